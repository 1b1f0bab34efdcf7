"""Triangle-inequality constants for Lorentz quasi-norms: closed-form bounds
and a randomized worst-case search over families of step functions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .measure import INF, lorentz_norm_of_moduli
from .parallel import parallel_map, spawn_seeds

PROFILES = ("one_sided", "two_sided")


def bound_modulo_A(p: float, r: float) -> float:
    """``C(p,r) / A^{1/p}`` for ``0 < p < 1``, ``p < r <= inf``.

    Equals ``(1/(1-p))^{1/p-1/r} (1 + (p/r) log(1/(1-p)))^{1/p-1/r}``.
    """
    if not (0 < p < 1) or not (r > p):
        raise ValueError("need 0 < p < 1 and r > p")
    lead = 1.0 / (1.0 - p)
    if r == INF:
        return lead ** (1.0 / p)
    expo = 1.0 / p - 1.0 / r
    return lead**expo * (1.0 + (p / r) * math.log(lead)) ** expo


def stw_bound(p: float) -> float:
    """``((2-p)/(1-p))^{1/p}`` for ``0 < p < 1``."""
    if not 0 < p < 1:
        raise ValueError("need 0 < p < 1")
    return ((2.0 - p) / (1.0 - p)) ** (1.0 / p)


def bks_constant(p: float, r: float) -> float:
    """Sharp constant ``(p/r)^{1/r} (p'/r')^{1/r'}`` for ``1 < p < r``."""
    if not (1 < p < r):
        raise ValueError("need 1 < p < r")
    if r == INF:
        return p / (p - 1.0)
    pc = p / (p - 1.0)
    rc = r / (r - 1.0)
    return (p / r) ** (1.0 / r) * (pc / rc) ** (1.0 / rc)


def hardy_constant(p: float) -> float:
    """``(1 - 1/p)^{-1}`` for ``p > 1``."""
    if not p > 1:
        raise ValueError("need p > 1")
    return p / (p - 1.0)


@dataclass(frozen=True)
class Configuration:
    """A family of ``K`` weighted cyclic shifts of one power profile on ``n`` cells.

    The profile is ``(dist + c0)^{-b}`` with ``dist`` the distance to the
    origin measured one way round the circle (``one_sided``) or both ways.
    """

    profile: str
    b: float
    c0: float
    K: int
    jitter: float
    spread: float
    seed: int
    n: int = 512

    def build(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n = self.n
        x = (np.arange(n) + 0.5) / n
        dist = x if self.profile == "one_sided" else np.minimum(x, 1.0 - x)
        h = (dist + self.c0) ** (-self.b)
        rng = np.random.default_rng(self.seed)
        base = np.round(np.arange(self.K) * n / self.K).astype(int)
        shifts = (base + np.round(self.jitter * n / max(self.K, 1) * rng.uniform(-0.5, 0.5, self.K))
                  .astype(int)) % n
        amps = np.exp(self.spread * rng.standard_normal(self.K))
        if self.K == 1:
            amps = np.ones(1)
        return h, shifts, amps


def _ratio(cfg: Configuration, p: float, r: float) -> float:
    h, shifts, amps = cfg.build()
    n = cfg.n
    comb = np.zeros(n)
    np.add.at(comb, shifts, amps)
    total = np.fft.irfft(np.fft.rfft(h) * np.fft.rfft(comb), n)
    total = np.maximum(total, 0.0)
    mass = 1.0 / n
    top = lorentz_norm_of_moduli(total, mass, p, r)
    single = lorentz_norm_of_moduli(h, mass, p, r)
    if p < 1:
        rhs = single * float(np.sum(amps**p)) ** (1.0 / p)
    else:
        rhs = single * float(np.sum(amps))
    return top / rhs


@dataclass
class ConstantReport:
    p: float
    r: float
    empirical_lower: float
    analytic_bound_mod_A: float | None
    stw_bound: float | None
    bks_constant: float | None
    hardy_constant: float | None
    evaluations: int
    best_configuration: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _random_config(rng: np.random.Generator, p: float, n: int) -> Configuration:
    profile = PROFILES[int(rng.integers(2))]
    b = float(rng.uniform(0.0, 1.2 / p))
    c0 = float(10.0 ** rng.uniform(-4.0, -0.5))
    K = int(round(math.exp(rng.uniform(0.0, math.log(64.0)))))
    jitter = float(rng.uniform(0.0, 1.0)) if rng.uniform() < 0.5 else 0.0
    spread = float(rng.uniform(0.0, 1.5)) if rng.uniform() < 0.5 else 0.0
    return Configuration(profile, b, c0, max(K, 1), jitter, spread, int(rng.integers(2**31)), n)


def _search_chunk(args: tuple) -> tuple[float, Configuration, int]:
    p, r, seed, count, n = args
    rng = np.random.default_rng(seed)
    best, best_cfg = -1.0, None
    for _ in range(count):
        cfg = _random_config(rng, p, n)
        val = _ratio(cfg, p, r)
        if val > best:
            best, best_cfg = val, cfg
    return best, best_cfg, count


def _ascend(cfg: Configuration, val: float, p: float, r: float, budget: int) -> tuple[float, Configuration, int]:
    """Coordinate ascent on ``b``, ``log c0``, ``K``, ``jitter`` and ``spread``."""
    steps = {"b": 0.1 / p, "c0": 1.0, "K": 8, "jitter": 0.2, "spread": 0.3}
    used = 0
    while used < budget and max(steps["b"] * p, steps["c0"], steps["jitter"]) > 1e-4:
        improved = False
        for name in ("b", "c0", "K", "jitter", "spread"):
            for sign in (1.0, -1.0):
                if used >= budget:
                    break
                cand = _move(cfg, name, sign * steps[name])
                if cand is None:
                    continue
                used += 1
                cv = _ratio(cand, p, r)
                if cv > val:
                    cfg, val, improved = cand, cv, True
                    break
        if not improved:
            for name in steps:
                steps[name] = steps[name] / 2 if name != "K" else max(1, steps[name] // 2)
            if steps["K"] == 1 and steps["b"] * p < 1e-4:
                break
    return val, cfg, used


def _move(cfg: Configuration, name: str, delta: float) -> Configuration | None:
    d = asdict(cfg)
    if name == "c0":
        d["c0"] = cfg.c0 * math.exp(delta)
        if not 1e-6 <= d["c0"] <= 1.0:
            return None
    elif name == "K":
        d["K"] = int(cfg.K + delta)
        if not 1 <= d["K"] <= 64:
            return None
    else:
        d[name] = getattr(cfg, name) + delta
        if d[name] < 0:
            return None
    return Configuration(**d)


def empirical_constant(p: float, r: float, budget: int, seed: int = 0, n: int = 512) -> ConstantReport:
    """Largest triangle ratio found within ``budget`` family evaluations.

    For ``p < 1`` the ratio is ``||sum f_k|| / (sum ||f_k||^p)^{1/p}``; for
    ``p >= 1`` it is ``||sum f_k|| / sum ||f_k||``.  The singleton family is
    always evaluated, so the result is at least 1.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    single = Configuration("one_sided", 0.0, 1.0, 1, 0.0, 0.0, 0, n)
    best, best_cfg = _ratio(single, p, r), single
    used = 1
    random_budget = (budget - 1) // 2
    chunks = max(1, min(64, random_budget // 256))
    sizes = [random_budget // chunks + (1 if i < random_budget % chunks else 0) for i in range(chunks)]
    seeds = spawn_seeds(seed, chunks)
    results = parallel_map(_search_chunk, [(p, r, s, c, n) for s, c in zip(seeds, sizes) if c > 0])
    for val, cfg, count in results:
        used += count
        if cfg is not None and val > best:
            best, best_cfg = val, cfg
    val, cfg, spent = _ascend(best_cfg, best, p, r, budget - used)
    used += spent
    if val > best:
        best, best_cfg = val, cfg
    return ConstantReport(
        p=p,
        r=r,
        empirical_lower=best,
        analytic_bound_mod_A=bound_modulo_A(p, r) if 0 < p < 1 and r > p else None,
        stw_bound=stw_bound(p) if 0 < p < 1 else None,
        bks_constant=bks_constant(p, r) if 1 < p < r else None,
        hardy_constant=hardy_constant(p) if p > 1 else None,
        evaluations=used,
        best_configuration=asdict(best_cfg),
    )


def fitted_A(reports: list[ConstantReport]) -> float | None:
    """``sup (empirical^p / bound_modulo_A^p)`` over reports with ``p < 1``."""
    vals = [(rep.empirical_lower / rep.analytic_bound_mod_A) ** rep.p
            for rep in reports if rep.analytic_bound_mod_A]
    return max(vals) if vals else None

"""Grid functions, decreasing rearrangements and Lorentz quasi-norms.

A :class:`GridFunction` is a finite list of complex samples on a uniform
periodic grid where every cell carries the same mass.  Its decreasing
rearrangement is a step function, so the Lorentz functionals reduce to finite
sums of closed-form segment integrals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate

INF = math.inf


def _is_inf(x: float) -> bool:
    return x == INF


@dataclass(frozen=True)
class LorentzExponents:
    """Exponent pair ``(p, r)`` with ``0 < p < inf`` and ``0 < r <= inf``."""

    p: float
    r: float

    def __post_init__(self) -> None:
        p, r = float(self.p), float(self.r)
        if not (0.0 < p < INF):
            raise ValueError(f"p must be finite and positive, got {self.p!r}")
        if not r > 0.0:
            raise ValueError(f"r must be positive, got {self.r!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "r", r)

    def scaled(self, sigma: float) -> "LorentzExponents":
        """Exponents of ``|f|**sigma`` that carry the same information."""
        return LorentzExponents(self.p / sigma, self.r / sigma)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples on a uniform periodic 1-D grid.

    Parameters
    ----------
    samples : array_like
        Cell values.  Stored as a read-only complex128 array.
    cell_mass : float
        Measure of each cell.
    """

    samples: np.ndarray
    cell_mass: float = 1.0

    def __post_init__(self) -> None:
        arr = np.array(self.samples, dtype=np.complex128).reshape(-1)
        arr.setflags(write=False)
        if not (self.cell_mass > 0 and math.isfinite(self.cell_mass)):
            raise ValueError("cell_mass must be positive and finite")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "cell_mass", float(self.cell_mass))

    @property
    def length(self) -> int:
        return int(self.samples.shape[0])

    @property
    def total_measure(self) -> float:
        return self.length * self.cell_mass

    def modulus(self) -> np.ndarray:
        return np.abs(self.samples)

    def compatible(self, other: "GridFunction") -> bool:
        return self.length == other.length and self.cell_mass == other.cell_mass

    def __add__(self, other: "GridFunction") -> "GridFunction":
        if not self.compatible(other):
            raise ValueError("grid functions differ in length or cell_mass")
        return GridFunction(self.samples + other.samples, self.cell_mass)

    def scale(self, c: complex) -> "GridFunction":
        return GridFunction(c * self.samples, self.cell_mass)


@dataclass(frozen=True, eq=False)
class StepRearrangement:
    """Decreasing step function ``f*`` given by values and right breakpoints.

    ``values[i]`` is the value on ``(breakpoints[i-1], breakpoints[i]]`` with
    an implicit left endpoint ``0`` for the first step.
    """

    values: np.ndarray
    breakpoints: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float).reshape(-1)
        t = np.array(self.breakpoints, dtype=float).reshape(-1)
        if v.shape != t.shape:
            raise ValueError("values and breakpoints differ in length")
        if v.size:
            if np.any(v <= 0) or np.any(np.diff(v) >= 0):
                raise ValueError("values must be positive and strictly decreasing")
            if t[0] <= 0 or np.any(np.diff(t) <= 0):
                raise ValueError("breakpoints must be positive and strictly increasing")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "breakpoints", t)

    @property
    def steps(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in zip(self.values, self.breakpoints)]

    @property
    def support_measure(self) -> float:
        return float(self.breakpoints[-1]) if self.breakpoints.size else 0.0

    def __len__(self) -> int:
        return int(self.values.size)


def rearrange(f: GridFunction) -> StepRearrangement:
    """Exact decreasing rearrangement of ``|f|`` with equal values merged."""
    if f.length == 0:
        raise ValueError("empty domain")
    mod = f.modulus()
    mod = mod[mod > 0]
    if mod.size == 0:
        return StepRearrangement(np.empty(0), np.empty(0))
    vals, counts = np.unique(mod, return_counts=True)
    vals, counts = vals[::-1], counts[::-1]
    return StepRearrangement(vals, np.cumsum(counts) * f.cell_mass)


def distribution(f: GridFunction, alpha: float) -> float:
    """Measure of ``{|f| > alpha}``."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return int(np.count_nonzero(f.modulus() > alpha)) * f.cell_mass


def _power_increments(t: np.ndarray, a: float) -> np.ndarray:
    """``t_i**a - t_{i-1}**a`` with ``t_{-1} = 0``, accurate for close breakpoints."""
    out = np.empty_like(t)
    out[0] = t[0] ** a
    ratio = t[:-1] / t[1:]
    out[1:] = -(t[1:] ** a) * np.expm1(a * np.log(ratio))
    return out


def _lorentz_from_steps(v: np.ndarray, t: np.ndarray, p: float, r: float) -> float:
    if v.size == 0:
        return 0.0
    if _is_inf(r):
        return float(np.max(v * t ** (1.0 / p)))
    terms = v**r * _power_increments(t, r / p)
    return math.fsum(terms.tolist()) ** (1.0 / r)


def lorentz_norm(rearr: StepRearrangement, e: LorentzExponents) -> float:
    """Lorentz quasi-norm ``||f||_{p,r}`` of a step rearrangement.

    Uses ``(r/p) * int (t^{1/p} f*(t))^r dt/t`` evaluated segment by segment,
    so that indicators satisfy ``||1_E|| = mu(E)^{1/p}`` for every ``r``.
    """
    return _lorentz_from_steps(rearr.values, rearr.breakpoints, e.p, e.r)


def lorentz_norm_of_moduli(moduli: np.ndarray, cell_mass: float, p: float, r: float) -> float:
    """Lorentz norm of nonnegative samples with uniform cell mass.

    Skips the merge step of :func:`rearrange`; repeated values telescope so
    the result is the same step-function integral.
    """
    m = np.asarray(moduli, dtype=float).reshape(-1)
    m = m[m > 0]
    if m.size == 0:
        return 0.0
    v = np.sort(m)[::-1]
    t = np.arange(1, v.size + 1, dtype=float) * cell_mass
    return _lorentz_from_steps(v, t, p, r)


def lorentz_norm_weighted(values: np.ndarray, masses: np.ndarray, p: float, r: float) -> float:
    """Lorentz norm of a step function with atoms of unequal mass."""
    v = np.asarray(values, dtype=float).reshape(-1)
    w = np.asarray(masses, dtype=float).reshape(-1)
    keep = (v > 0) & (w > 0)
    v, w = v[keep], w[keep]
    if v.size == 0:
        return 0.0
    order = np.argsort(-v, kind="stable")
    return _lorentz_from_steps(v[order], np.cumsum(w[order]), p, r)


def lorentz_norm_via_distribution(f: GridFunction, e: LorentzExponents) -> float:
    """Lorentz quasi-norm from the distribution function.

    Evaluates ``r * int_0^inf mu_f(alpha)^{r/p} alpha^{r-1} d alpha`` as a sum
    over the gaps between consecutive distinct moduli ``c_1 > ... > c_n``: on
    ``[c_{j+1}, c_j)`` the distribution is the constant mass of ``{|f| >= c_j}``.
    """
    mod = f.modulus()
    levels = np.unique(mod[mod > 0])
    if levels.size == 0:
        return 0.0
    sorted_mod = np.sort(mod)
    # mass of {|f| >= c} for each distinct level c
    mass = (mod.size - np.searchsorted(sorted_mod, levels, side="left")) * f.cell_mass
    c = levels[::-1]
    d = mass[::-1]
    p, r = e.p, e.r
    if _is_inf(r):
        return float(np.max(c * d ** (1.0 / p)))
    gaps = np.empty_like(c)
    # a level ratio that underflows to 0 gives expm1(-inf) = -1, the right gap
    with np.errstate(divide="ignore"):
        gaps[:-1] = -(c[:-1] ** r) * np.expm1(r * np.log(c[1:] / c[:-1]))
    gaps[-1] = c[-1] ** r
    return math.fsum((d ** (r / p) * gaps).tolist()) ** (1.0 / r)


def maximal_average(rearr: StepRearrangement, t: np.ndarray) -> np.ndarray:
    """``f**(t) = (1/t) int_0^t f*`` evaluated at positive points ``t``."""
    t = np.asarray(t, dtype=float)
    v, b = rearr.values, rearr.breakpoints
    if v.size == 0:
        return np.zeros_like(t)
    left = np.concatenate(([0.0], b[:-1]))
    cum = np.concatenate(([0.0], np.cumsum(v * (b - left))))
    idx = np.searchsorted(b, t, side="left")
    out = np.empty_like(t)
    inside = idx < v.size
    i = idx[inside]
    out[inside] = (cum[i] + v[i] * (t[inside] - left[i])) / t[inside]
    out[~inside] = cum[-1] / t[~inside]
    return out


def double_star_norm(rearr: StepRearrangement, e: LorentzExponents, rtol: float = 1e-9) -> float:
    """``|||f|||_{p,r} = ((r/p) int (t^{1/p} f**(t))^r dt/t)^{1/r}``.

    The first segment and the tail past the support have closed forms; every
    other segment is integrated with adaptive quadrature at relative tolerance
    ``rtol``.  Returns ``inf`` when ``p <= 1`` and ``f`` is nonzero.
    """
    v, b = rearr.values, rearr.breakpoints
    if v.size == 0:
        return 0.0
    p, r = e.p, e.r
    left = np.concatenate(([0.0], b[:-1]))
    cum = np.concatenate(([0.0], np.cumsum(v * (b - left))))
    total = cum[-1]
    if p <= 1:
        return INF
    if _is_inf(r):
        a = 1.0 / p - 1.0
        best = v[0] * b[0] ** (1.0 / p)
        for i in range(1, v.size):
            A = cum[i] - v[i] * left[i]
            cands = [left[i], b[i]]
            if a < 0 and A > 0:
                tc = -a * A / ((a + 1.0) * v[i])
                if left[i] < tc < b[i]:
                    cands.append(tc)
            for tt in cands:
                best = max(best, tt**a * (A + v[i] * tt))
        return float(best)

    k = r / p

    def seg(tt: float, i: int) -> float:
        return (cum[i] + v[i] * (tt - left[i])) ** r * tt ** (k - r - 1.0)

    # t^{r/p} f**^r integrated against (r/p) dt/t
    parts = [v[0] ** r * b[0] ** k / k]
    for i in range(1, v.size):
        val, _ = integrate.quad(seg, left[i], b[i], args=(i,), epsabs=0.0, epsrel=rtol, limit=200)
        parts.append(val)
    parts.append(total**r * b[-1] ** (k - r) / (r - k))
    return (k * math.fsum(parts)) ** (1.0 / r)


def power_transform(f: GridFunction, sigma: float) -> GridFunction:
    """``|f|**sigma`` on the same grid."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return GridFunction(f.modulus() ** sigma, f.cell_mass)


def indicator(length: int, count: int, cell_mass: float = 1.0, offset: int = 0) -> GridFunction:
    """Indicator of ``count`` consecutive cells starting at ``offset``."""
    s = np.zeros(length)
    s[offset : offset + count] = 1.0
    return GridFunction(s, cell_mass)


def save_grid_function(f: GridFunction, path: str | Path) -> None:
    """Write ``f`` as CSV: a ``#``-prefixed JSON header, then ``re,im`` rows."""
    path = Path(path)
    header = json.dumps({"length": f.length, "cell_mass": f.cell_mass}, sort_keys=True)
    lines = [f"# {header}", "re,im"]
    lines += [f"{z.real!r},{z.imag!r}" for z in f.samples.tolist()]
    path.write_text("\n".join(lines) + "\n")


def load_grid_function(path: str | Path) -> GridFunction:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError("missing JSON header line")
    header = json.loads(text[0][1:])
    rows = [ln for ln in text[2:] if ln.strip()]
    data = np.array([[float(x) for x in ln.split(",")] for ln in rows]).reshape(-1, 2)
    if data.shape[0] != header["length"]:
        raise ValueError("sample count does not match header length")
    return GridFunction(data[:, 0] + 1j * data[:, 1], header["cell_mass"])

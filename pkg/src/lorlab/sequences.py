"""Mixed norms of function sequences and the sequence embedding predicate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .measure import INF, GridFunction, LorentzExponents, lorentz_norm_of_moduli
from .parallel import parallel_map, spawn_seeds

L_TO_ELL = "L->l"
ELL_TO_L = "l->L"


class FunctionSequence:
    """Nonempty tuple of grid functions sharing length and cell mass."""

    def __init__(self, members: Sequence[GridFunction]):
        members = tuple(members)
        if not members:
            raise ValueError("sequence must be nonempty")
        first = members[0]
        for g in members[1:]:
            if not first.compatible(g):
                raise ValueError("members differ in length or cell_mass")
        self.members = members

    @classmethod
    def from_array(cls, arr: np.ndarray, cell_mass: float = 1.0) -> "FunctionSequence":
        return cls([GridFunction(row, cell_mass) for row in np.atleast_2d(arr)])

    @property
    def cell_mass(self) -> float:
        return self.members[0].cell_mass

    def moduli(self) -> np.ndarray:
        return np.stack([g.modulus() for g in self.members])

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _lq_sum(values: np.ndarray, q: float, axis: int = 0) -> np.ndarray:
    if q == INF:
        return np.max(values, axis=axis)
    # factor out the max so q-th powers neither overflow nor underflow
    top = np.max(values, axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    s = np.sum((values / safe) ** q, axis=axis, keepdims=True) ** (1.0 / q)
    return np.squeeze(s * top, axis=axis)


def norm_lq_of_Lpr(fs: FunctionSequence, q: float, e: LorentzExponents) -> float:
    """``(sum_k ||f_k||_{p,r}^q)^{1/q}``, a supremum when ``q = inf``."""
    norms = np.array([lorentz_norm_of_moduli(g.modulus(), g.cell_mass, e.p, e.r) for g in fs])
    return float(_lq_sum(norms, q))


def norm_Lpr_of_lq(fs: FunctionSequence, q: float, e: LorentzExponents) -> float:
    """Lorentz norm of the pointwise aggregate ``(sum_k |f_k(x)|^q)^{1/q}``."""
    agg = _lq_sum(fs.moduli(), q)
    return lorentz_norm_of_moduli(agg, fs.cell_mass, e.p, e.r)


def power_sequence(fs: FunctionSequence, sigma: float) -> FunctionSequence:
    return FunctionSequence([GridFunction(g.modulus() ** sigma, g.cell_mass) for g in fs])


@dataclass(frozen=True)
class SeqEmbeddingQuery:
    """Exponents of ``l^{q0}(L^{p,r0}) -> L^{p,r1}(l^{q1})`` or the reverse."""

    p: float
    q0: float
    r0: float
    q1: float
    r1: float
    direction: str = ELL_TO_L

    def __post_init__(self) -> None:
        if self.direction not in (ELL_TO_L, L_TO_ELL):
            raise ValueError(f"unknown direction {self.direction!r}")
        if not (0 < self.p < INF):
            raise ValueError("p must be finite and positive")
        for name in ("q0", "r0", "q1", "r1"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def decide_seq_embedding(q: SeqEmbeddingQuery) -> bool:
    """Exact truth table for the two sequence-space embeddings."""
    p, q0, r0, q1, r1 = q.p, q.q0, q.r0, q.q1, q.r1
    if r0 > r1:
        return False
    if q.direction == ELL_TO_L:
        if not q0 <= min(p, q1, r1):
            return False
        return p != q1 or p >= r0 or q0 < p < r0
    if not q1 >= max(p, q0, r0):
        return False
    return p != q0 or p <= r1 or r1 < p < q1


def random_sequence(rng: np.random.Generator, members: int, length: int = 256,
                    cell_mass: float | None = None) -> FunctionSequence:
    """Members supported on random unions of dyadic blocks with log-uniform values.

    Values span six decades so both ends of the rearrangement are exercised.
    Each member also gets a log-uniform amplitude over six decades, so a few
    members dominate and the family does not self-average as it grows.  The
    number of nonzero members is log-uniform in ``[1, members]``; zero members
    are legitimate, so the search space grows with ``members``.
    """
    cell_mass = 1.0 / length if cell_mass is None else cell_mass
    levels = int(math.log2(length))
    arr = np.zeros((members, length))
    active = int(np.floor(np.exp(rng.uniform(0.0, math.log(members + 1)))))
    active = min(max(active, 1), members)
    for k in range(active):
        nblocks = int(rng.integers(1, 5))
        for _ in range(nblocks):
            size = 2 ** int(rng.integers(0, levels - 1))
            start = size * int(rng.integers(0, length // size))
            vals = 10.0 ** rng.uniform(-3.0, 3.0, size=size)
            arr[k, start : start + size] += vals
        arr[k] *= 10.0 ** rng.uniform(-3.0, 3.0)
    return FunctionSequence.from_array(arr, cell_mass)


def _seq_norms(q: SeqEmbeddingQuery, fs: FunctionSequence) -> tuple[float, float]:
    if q.direction == ELL_TO_L:
        src = norm_lq_of_Lpr(fs, q.q0, LorentzExponents(q.p, q.r0))
        tgt = norm_Lpr_of_lq(fs, q.q1, LorentzExponents(q.p, q.r1))
    else:
        src = norm_Lpr_of_lq(fs, q.q0, LorentzExponents(q.p, q.r0))
        tgt = norm_lq_of_Lpr(fs, q.q1, LorentzExponents(q.p, q.r1))
    return src, tgt


def _trial(args: tuple) -> float:
    q, seed, members, length = args
    rng = np.random.default_rng(seed)
    src, tgt = _seq_norms(q, random_sequence(rng, members, length))
    return tgt / src


def verify_seq_embedding(q: SeqEmbeddingQuery, trials: int, members: int,
                         seed: int = 0, length: int = 256) -> float:
    """Largest target/source ratio over random sequences.

    Raises
    ------
    ValueError
        If the embedding is not claimed by :func:`decide_seq_embedding`.
    """
    if not decide_seq_embedding(q):
        raise ValueError("embedding not claimed")
    seeds = spawn_seeds(seed, trials)
    ratios = parallel_map(_trial, [(q, s, members, length) for s in seeds])
    return float(max(ratios))


def seq_lattice(values: Sequence) -> list[SeqEmbeddingQuery]:
    """Every query over a value lattice, both directions."""
    vals = list(values)
    out = []
    for direction in (ELL_TO_L, L_TO_ELL):
        for p in vals:
            if p == INF:
                continue
            for q0 in vals:
                for r0 in vals:
                    for q1 in vals:
                        for r1 in vals:
                            out.append(SeqEmbeddingQuery(p, q0, r0, q1, r1, direction))
    return out

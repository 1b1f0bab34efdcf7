"""Decision tables for embeddings between Besov-Lorentz and Triebel-Lizorkin-Lorentz spaces.

Rational exponents are compared exactly with :class:`fractions.Fraction`;
``inf`` is the top element of every comparison.  Floats fall back to a
relative tolerance on the critical-line equality only.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

INF = math.inf
FLOAT_RTOL = 1e-12
CLAUSES = ("i", "ii", "iii", "iv", "v", "vi")
PAIRS = ("BF", "FB", "BB", "FF")

Number = Fraction | float


def parse_exponent(text: str | int | float | Fraction) -> Number:
    """Parse ``"a/b"``, ``"inf"``, integers or decimals.

    Decimal strings become exact fractions, so ``"0.5"`` equals ``"1/2"``.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError("boolean is not an exponent")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return INF if text == INF else text
    s = str(text).strip().lower()
    if s in ("inf", "infinity", "+inf", "oo"):
        return INF
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"malformed exponent {text!r}") from None


def _exact(*xs: Number) -> bool:
    return all(isinstance(x, Fraction) or x == INF for x in xs)


@dataclass(frozen=True)
class SmoothnessParams:
    """One space ``B^s_q[L^{p,r}]`` (scale ``"B"``) or ``F^s_q[L^{p,r}]`` (scale ``"F"``)."""

    scale: str
    s: Number
    p: Number
    q: Number
    r: Number
    d: int = 1

    def __post_init__(self) -> None:
        if self.scale not in ("B", "F"):
            raise ValueError(f"scale must be 'B' or 'F', got {self.scale!r}")
        for name in ("s", "p", "q", "r"):
            object.__setattr__(self, name, parse_exponent(getattr(self, name)))
        if self.s == INF:
            raise ValueError("s must be finite")
        if not (0 < self.p < INF):
            raise ValueError("p must be finite and positive")
        if not (self.q > 0 and self.r > 0):
            raise ValueError("q and r must be positive")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("d must be a positive integer")


@dataclass(frozen=True)
class EmbeddingQuery:
    source: SmoothnessParams
    target: SmoothnessParams
    d: int = 1

    @property
    def pair(self) -> str:
        return self.source.scale + self.target.scale

    @classmethod
    def build(cls, pair: str, d: int, s0, p0, q0, r0, s1, p1, q1, r1) -> "EmbeddingQuery":
        if pair not in PAIRS:
            raise ValueError(f"pair must be one of {PAIRS}")
        return cls(SmoothnessParams(pair[0], s0, p0, q0, r0, d),
                   SmoothnessParams(pair[1], s1, p1, q1, r1, d), d)


@dataclass(frozen=True)
class Verdict:
    holds: bool
    clause: str | None
    theorem: str

    def __post_init__(self) -> None:
        if self.holds != (self.clause is not None):
            raise ValueError("a verdict holds exactly when a clause is given")

    def as_dict(self) -> dict:
        return {"holds": self.holds, "clause": self.clause, "theorem": self.theorem}


class _Geometry:
    """Sign of ``s0 - s1`` and of the gap to the critical line."""

    def __init__(self, q: EmbeddingQuery):
        a, b = q.source, q.target
        d = q.d
        ds = a.s - b.s
        dp = Fraction(d) / a.p - Fraction(d) / b.p if _exact(a.p, b.p) else d / a.p - d / b.p
        self.ds_sign = _sign(ds, 0, _exact(a.s, b.s))
        self.crit_sign = _sign(ds, dp, _exact(a.s, b.s, a.p, b.p))
        self.dp_sign = _sign(dp, 0, _exact(a.p, b.p))
        self.p_equal = a.p == b.p if _exact(a.p, b.p) else _close(a.p, b.p)


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= FLOAT_RTOL * max(1.0, abs(x), abs(y))


def _sign(x: Number, y: Number, exact: bool) -> int:
    """Sign of ``x - y``; floats within tolerance count as equal."""
    if exact:
        return (x > y) - (x < y)
    x, y = float(x), float(y)
    if _close(x, y):
        warnings.warn("float exponents: criticality decided within tolerance", stacklevel=3)
        return 0
    return (x > y) - (x < y)


def _common(g: _Geometry, r0: Number, r1: Number) -> tuple[bool, bool]:
    c1 = g.crit_sign > 0 and g.dp_sign > 0
    c2 = g.ds_sign > 0 and g.p_equal and r0 <= r1
    return c1, c2


def _clauses(q: EmbeddingQuery) -> list[tuple[str, bool]]:
    a, b = q.source, q.target
    g = _Geometry(q)
    q0, r0, q1, r1 = a.q, a.r, b.q, b.r
    p = a.p
    c1, c2 = _common(g, r0, r1)
    critical = g.crit_sign == 0 and g.dp_sign > 0
    same = g.ds_sign == 0 and g.p_equal
    pair = q.pair
    out = [("i", c1), ("ii", c2)]
    if pair == "BF":
        out += [
            ("iii", critical and q0 <= r1),
            ("iv", same and p != q1 and r0 <= r1 and q0 <= min(p, q1, r1)),
            ("v", same and p == q1 and p >= r0 and r0 <= r1 and q0 <= min(p, r1)),
            ("vi", same and p == q1 and p < r0 and r0 <= r1 and q0 < p),
        ]
    elif pair == "FB":
        out += [
            ("iii", critical and r0 <= q1),
            ("iv", same and p != q0 and r0 <= r1 and q1 >= max(p, q0, r0)),
            ("v", same and p == q0 and p <= r1 and r0 <= r1 and q1 >= max(p, r0)),
            ("vi", same and p == q0 and p > r1 and r0 <= r1 and q1 > p),
        ]
    elif pair == "BB":
        out += [
            ("iii", critical and q0 <= q1),
            ("iv", same and r0 <= r1 and q0 <= q1),
        ]
    else:
        out += [
            ("iii", critical and r0 <= r1),
            ("iv", same and r0 <= r1 and q0 <= q1),
        ]
    return out


def decide(q: EmbeddingQuery) -> Verdict:
    """First satisfied clause in the order (i) to (vi), or a failing verdict."""
    for name, ok in _clauses(q):
        if ok:
            return Verdict(True, name, q.pair)
    return Verdict(False, None, q.pair)


def satisfied_clauses(q: EmbeddingQuery) -> list[str]:
    return [name for name, ok in _clauses(q) if ok]


# ---------------------------------------------------------------- self tests

S_LATTICE = tuple(Fraction(x) for x in ("0", "1/4", "1/2", "3/4", "1", "3/2"))
P_LATTICE = tuple(Fraction(x) for x in ("1/2", "1", "4/3", "2", "4", "8"))
QR_LATTICE = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(4), INF)


@dataclass
class SelfTestReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _step(lattice: Sequence[Number], value: Number, up: bool) -> Number | None:
    i = lattice.index(value)
    j = i + 1 if up else i - 1
    return lattice[j] if 0 <= j < len(lattice) else None


RELAXATIONS = (
    ("target", "s", False),
    ("target", "r", True),
    ("target", "q", True),
    ("source", "r", False),
    ("source", "q", False),
    ("source", "s", True),
)


def _random_space(rng: np.random.Generator, scale: str, d: int) -> SmoothnessParams:
    pick = lambda lat: lat[int(rng.integers(len(lat)))]  # noqa: E731
    return SmoothnessParams(scale, pick(S_LATTICE), pick(P_LATTICE), pick(QR_LATTICE),
                            pick(QR_LATTICE), d)


def _near_critical_query(rng: np.random.Generator, pair: str, d: int) -> EmbeddingQuery:
    """Random query biased toward the critical line and the diagonal ``p0 = p1``."""
    src = _random_space(rng, pair[0], d)
    tgt = _random_space(rng, pair[1], d)
    mode = int(rng.integers(3))
    if mode == 1:
        tgt = replace(tgt, p=src.p, s=src.s)
    elif mode == 2:
        shift = Fraction(d) / src.p - Fraction(d) / tgt.p
        if src.s - shift in S_LATTICE:
            tgt = replace(tgt, s=src.s - shift)
    return EmbeddingQuery(src, tgt, d)


def self_test_monotonicity(queries: Iterable[EmbeddingQuery],
                           lattices: dict[str, Sequence[Number]] | None = None) -> SelfTestReport:
    """Relaxing a holding query one lattice step must keep it holding.

    The relaxations are: lower ``s1``, raise ``r1``, raise ``q1``, lower
    ``r0``, lower ``q0``, raise ``s0``.  Steps leaving the lattice are skipped.
    """
    lattices = lattices or {"s": S_LATTICE, "q": QR_LATTICE, "r": QR_LATTICE}
    rep = SelfTestReport()
    for q in queries:
        if not decide(q).holds:
            continue
        for side, name, up in RELAXATIONS:
            space = getattr(q, side)
            new = _step(lattices[name], getattr(space, name), up)
            if new is None:
                continue
            moved = replace(q, **{side: replace(space, **{name: new})})
            rep.checked += 1
            if not decide(moved).holds:
                rep.violations.append((q, side, name, new))
    return rep


def monotonicity_queries(count: int, seed: int = 0, d: int = 1) -> list[EmbeddingQuery]:
    rng = np.random.default_rng(seed)
    return [_near_critical_query(rng, PAIRS[i % 4], d) for i in range(count)]


def self_test_transitivity(triples: Iterable[tuple[SmoothnessParams, SmoothnessParams, SmoothnessParams]],
                           d: int = 1) -> SelfTestReport:
    """``X -> Y`` and ``Y -> Z`` must imply ``X -> Z``."""
    rep = SelfTestReport()
    for x, y, z in triples:
        xy = decide(EmbeddingQuery(x, y, d)).holds
        yz = decide(EmbeddingQuery(y, z, d)).holds
        rep.checked += 1
        if xy and yz and not decide(EmbeddingQuery(x, z, d)).holds:
            rep.violations.append((x, y, z))
    return rep


def transitivity_triples(count: int, seed: int = 0, d: int = 1) -> list[tuple]:
    """Random triples over the lattice, each repeated for every scale choice of X, Y, Z.

    Half of the triples are built so that both links hold, which keeps the
    implication from being vacuous.
    """
    rng = np.random.default_rng(seed)
    out = []
    scales = list(itertools.product("BF", repeat=3))
    while len(out) < count * len(scales):
        base = [_random_space(rng, "B", d) for _ in range(3)]
        if len(out) // len(scales) % 2 == 0:
            base = _chain_from(rng, base[0], d)
            if base is None:
                continue
        for sx, sy, sz in scales:
            out.append((replace(base[0], scale=sx), replace(base[1], scale=sy),
                        replace(base[2], scale=sz)))
    return out


def _chain_from(rng: np.random.Generator, x: SmoothnessParams, d: int) -> list | None:
    """Draw Y, Z so that X -> Y -> Z holds for at least one scale assignment."""
    chain = [x]
    for _ in range(2):
        for _attempt in range(200):
            cand = _random_space(rng, "B", d)
            mode = int(rng.integers(3))
            if mode == 0:
                cand = replace(cand, s=chain[-1].s, p=chain[-1].p)
            elif mode == 1:
                shift = Fraction(d) / chain[-1].p - Fraction(d) / cand.p
                if chain[-1].s - shift in S_LATTICE:
                    cand = replace(cand, s=chain[-1].s - shift)
            prev = chain[-1]
            if any(decide(EmbeddingQuery(replace(prev, scale=a), replace(cand, scale=b), d)).holds
                   for a in "BF" for b in "BF"):
                chain.append(cand)
                break
        else:
            return None
    return chain


def check_embedding_chain(s1: Number, s2: Number, s3: Number, d: int, q: Number) -> bool:
    """``B^{s3}_1[L^{d/s3}] -> F^{s2}_q[L^{d/s2,1}] -> B^{s1}_1[L^{d/s1}]`` for ``0 < s1 < s2 < s3 < d``."""
    s1, s2, s3, q = (parse_exponent(x) for x in (s1, s2, s3, q))
    if not (0 < s1 < s2 < s3 < d):
        raise ValueError("need 0 < s1 < s2 < s3 < d")
    one = Fraction(1)

    def lp(s: Number) -> Number:
        return Fraction(d) / s if isinstance(s, Fraction) else d / s

    b3 = SmoothnessParams("B", s3, lp(s3), one, lp(s3), d)
    f2 = SmoothnessParams("F", s2, lp(s2), q, one, d)
    b1 = SmoothnessParams("B", s1, lp(s1), one, lp(s1), d)
    return decide(EmbeddingQuery(b3, f2, d)).holds and decide(EmbeddingQuery(f2, b1, d)).holds


def noncomparable_pair(s: Number, d: int) -> tuple[bool, bool]:
    """Verdicts for ``F^s_2[L^{d/s,1}] -> B^s_1[L^{d/s}]`` and its reverse."""
    s = parse_exponent(s)
    p = Fraction(d) / s if isinstance(s, Fraction) else d / s
    f = SmoothnessParams("F", s, p, 2, 1, d)
    b = SmoothnessParams("B", s, p, 1, p, d)
    return decide(EmbeddingQuery(f, b, d)).holds, decide(EmbeddingQuery(b, f, d)).holds

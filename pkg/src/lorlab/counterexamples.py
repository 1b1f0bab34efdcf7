"""Test-function families on periodic grids and embedding norm ratios.

Each family is a one-parameter collection indexed by a size ``N``.  For a
failing embedding the target/source norm ratio grows with ``N``; for a
holding embedding it stays bounded.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np

from .littlewood_paley import (
    PsiKernels,
    build_beta_family,
    build_psi_kernels,
    bump,
    default_moment_order,
    fitted_slope,
    smoothness_norms,
)
from .measure import INF, GridFunction
from .oracle import EmbeddingQuery, SmoothnessParams, Verdict, decide
from .parallel import parallel_map

FAMILIES = ("translation", "dilation", "critical_h", "lattice", "modulation", "log")
COEFF_RULES = ("ones", "power", "geometric", "log_tail", "explicit")
GRID_CAP = 2**24
# grid cells per half-width of the finest compactly supported bump
SAMPLES_PER_HALFWIDTH = 8
KERNEL_HALFWIDTH = 0.125
DILATION_RADIUS = 1.0 / 16
MODULATION_RADIUS = 1.0 / 16
MODULATION_PERIOD = 64.0
LOG_RADIUS = 1.0
LATTICE_FIRST_SCALE = 8
LATTICE_SPACING = 0.25

DEFAULT_SIZES = {
    "translation": (8, 16, 32, 64),
    "dilation": (6, 7, 8, 9, 10, 11, 12),
    "critical_h": (2, 3, 4, 5, 6, 7),
    "lattice": (2, 3, 4, 5),
    "modulation": (2, 4, 6, 8),
    "log": (4, 6, 8, 10),
}


class InfeasibleGrid(ValueError):
    """The family needs more grid cells than the cap allows."""

    def __init__(self, required: int):
        super().__init__(f"family needs a grid of {required} cells, cap is {GRID_CAP}")
        self.required = required


@dataclass(frozen=True)
class FamilySpec:
    """A family identifier with its tunables.

    ``coeff`` selects the coefficient rule: ``ones`` (``a_l = 1``), ``power``
    (``l^-theta``), ``geometric`` (``2^(-theta l)``), ``log_tail``
    (``l^-theta (1 + log l)^-delta``) or ``explicit`` (``values``).  ``s``
    is the smoothness weight ``2^(-s n_l)`` applied by the lattice,
    modulation and log families; ``p`` enters the log family's weights.
    """

    family: str
    N: int
    R: int = 2
    coeff: str = "ones"
    theta: float = 0.0
    delta: float | None = None
    M: int = 8
    gamma: float = 0.0
    s: float = 0.0
    p: float = 1.0
    values: tuple | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.coeff not in COEFF_RULES:
            raise ValueError(f"unknown coefficient rule {self.coeff!r}")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError("N must be an integer >= 2")
        if int(self.R) != self.R or self.R < 1:
            raise ValueError("R must be an integer >= 1")
        if self.theta < 0:
            raise ValueError("theta must be nonnegative")
        if self.coeff == "explicit":
            if self.values is None or len(self.values) != self.N:
                raise ValueError("explicit coefficients need exactly N values")
            mags = np.abs(np.asarray(self.values, dtype=float))
            if np.any(np.diff(mags) > 1e-12 * mags.max()):
                raise ValueError("coefficient magnitudes must be nonincreasing")
        if self.family == "log" and self.delta is None:
            raise ValueError("log family needs delta")

    def with_size(self, N: int) -> "FamilySpec":
        return replace(self, N=int(N))


def coefficients(spec: FamilySpec) -> np.ndarray:
    """``a_1 .. a_N`` for the spec's rule; magnitudes are nonincreasing."""
    idx = np.arange(1, spec.N + 1, dtype=float)
    if spec.coeff == "ones":
        return np.ones(spec.N)
    if spec.coeff == "power":
        return idx ** (-spec.theta)
    if spec.coeff == "geometric":
        return 2.0 ** (-spec.theta * idx)
    if spec.coeff == "log_tail":
        delta = spec.delta or 0.0
        return idx ** (-spec.theta) * (1.0 + np.log(idx)) ** (-delta)
    return np.asarray(spec.values, dtype=complex if np.iscomplexobj(spec.values) else float)


@dataclass(frozen=True, eq=False)
class BuiltFamily:
    """A family member on a torus of length ``period``."""

    spec: FamilySpec
    function: GridFunction
    period: float


@lru_cache(maxsize=16)
def _kernels(M: int) -> PsiKernels:
    return build_psi_kernels(M, KERNEL_HALFWIDTH)


def _grid(period: float, cell: float) -> int:
    length = 1 << max(2, int(math.ceil(math.log2(period / cell - 1e-9))))
    if length > GRID_CAP:
        raise InfeasibleGrid(length)
    return length


def _place(samples: np.ndarray, x: np.ndarray, kernels: PsiKernels, scale: float,
           centre: float, weight: complex) -> None:
    """Add ``weight * psi_1(scale * (x - centre))`` where it is nonzero."""
    hw = kernels.support(1) / scale
    cell = x[1] - x[0]
    lo = max(0, int(math.floor((centre - hw) / cell)) - 1)
    hi = min(x.size, int(math.ceil((centre + hw) / cell)) + 2)
    if lo < hi:
        samples[lo:hi] += weight * kernels.psi(1, scale * (x[lo:hi] - centre))


def _translation(spec: FamilySpec) -> BuiltFamily:
    ker = _kernels(spec.M)
    period = float(1 << int(math.ceil(math.log2(spec.N + 2))))
    length = _grid(period, ker.support(1) / SAMPLES_PER_HALFWIDTH)
    x = np.arange(length) * (period / length)
    g = np.zeros(length, dtype=complex)
    for n, a in enumerate(coefficients(spec), start=1):
        _place(g, x, ker, 1.0, float(n), a)
    return BuiltFamily(spec, GridFunction(g, period / length), period)


def _spectral(length: int, period: float, profile) -> np.ndarray:
    """Samples of the periodic function whose Fourier coefficients are ``profile(xi)``."""
    xi = np.fft.fftfreq(length, d=period / length)
    return np.fft.ifft(profile(xi)) * length / period


def _dilation(spec: FamilySpec) -> BuiltFamily:
    k = spec.N
    length = _grid(1.0, 2.0 ** (-k - 5))
    chi = lambda xi: bump((xi / 2.0**k - 1.0) / DILATION_RADIUS)  # noqa: E731
    return BuiltFamily(spec, GridFunction(_spectral(length, 1.0, chi), 1.0 / length), 1.0)


def _scales(spec: FamilySpec, first: int) -> np.ndarray:
    return first + spec.R * np.arange(spec.N)


def _critical_h(spec: FamilySpec) -> BuiltFamily:
    ker = _kernels(spec.M)
    ns = _scales(spec, spec.R)
    length = _grid(1.0, ker.support(1) * 2.0 ** -float(ns[-1]) / SAMPLES_PER_HALFWIDTH)
    x = np.arange(length) / length
    g = np.zeros(length, dtype=complex)
    for a, n in zip(coefficients(spec), ns):
        _place(g, x, ker, 2.0 ** float(n), 2.0 ** -float(n), a * 2.0 ** (float(n) * spec.gamma))
    return BuiltFamily(spec, GridFunction(g, 1.0 / length), 1.0)


def lattice_scales(spec: FamilySpec) -> np.ndarray:
    return _scales(spec, LATTICE_FIRST_SCALE)


def _lattice(spec: FamilySpec) -> BuiltFamily:
    ker = _kernels(spec.M)
    ns = lattice_scales(spec)
    period = float(1 << max(0, int(math.ceil(math.log2(spec.N * LATTICE_SPACING)))))
    length = _grid(period, ker.support(1) * 2.0 ** -float(ns[-1]) / SAMPLES_PER_HALFWIDTH)
    cell = period / length
    x = np.arange(length) * cell
    g = np.zeros(length, dtype=complex)
    hw = ker.support(1)
    for l, (a, n) in enumerate(zip(coefficients(spec), ns)):
        start = l * LATTICE_SPACING
        lo = int(start / cell)
        hi = min(length, int((start + 2.0**-3 + 2.0 ** -float(n)) / cell) + 2)
        u = 2.0 ** float(n) * (x[lo:hi] - start)
        nu = np.rint(u)
        keep = (nu >= 8) & (nu <= 2 ** (int(n) - 3)) & (np.abs(u - nu) < hw)
        vals = np.where(keep, ker.psi(1, u - nu), 0.0)
        g[lo:hi] += a * 2.0 ** (-spec.s * float(n)) * vals
    return BuiltFamily(spec, GridFunction(g, cell), period)


def modulation_bands(spec: FamilySpec) -> np.ndarray:
    return np.arange(2, spec.N + 2)


def _modulation(spec: FamilySpec) -> BuiltFamily:
    period = MODULATION_PERIOD
    bands = modulation_bands(spec)
    length = _grid(period, 1.0 / (8.0 * 2.0 ** float(bands[-1])))
    a = coefficients(spec)

    def profile(xi):
        out = np.zeros_like(xi, dtype=complex)
        for al, l in zip(a, bands):
            out += al * 2.0 ** (-spec.s * float(l)) * bump((xi - 2.0 ** float(l)) / MODULATION_RADIUS)
        return out

    return BuiltFamily(spec, GridFunction(_spectral(length, period, profile), period / length), period)


def log_weights(spec: FamilySpec) -> np.ndarray:
    """``(1 + R|k-l|)^(-1/p) log(2 + R|k-l|)^(-delta)`` for ``k = N+1..2N``, ``l = 0..4N``."""
    k = np.arange(spec.N + 1, 2 * spec.N + 1)[:, None]
    l = np.arange(0, 4 * spec.N + 1)[None, :]
    gap = spec.R * np.abs(k - l)
    return (1.0 + gap) ** (-1.0 / spec.p) * np.log(2.0 + gap) ** (-spec.delta)


def log_bands(spec: FamilySpec) -> np.ndarray:
    return np.arange(2, spec.N + 2)


def _log(spec: FamilySpec) -> BuiltFamily:
    w = log_weights(spec)
    bands = log_bands(spec)
    extent = spec.R * 4 * spec.N + 16.0
    period = float(1 << int(math.ceil(math.log2(extent))))
    length = _grid(period, 1.0 / (8.0 * 2.0 ** float(bands[-1])))
    shifts = spec.R * np.arange(0, 4 * spec.N + 1) + 8.0

    def profile(xi):
        out = np.zeros_like(xi, dtype=complex)
        for row, b in zip(w, bands):
            centre = 19.0 / 16.0 * 2.0 ** float(b)
            idx = np.nonzero(np.abs(xi - centre) < LOG_RADIUS)[0]
            chi = bump((xi[idx] - centre) / LOG_RADIUS)
            phase = np.exp(-2j * np.pi * np.outer(shifts, xi[idx] - centre))
            out[idx] += 2.0 ** (-spec.s * float(b)) * chi * (row @ phase)
        return out

    return BuiltFamily(spec, GridFunction(_spectral(length, period, profile), period / length), period)


_BUILDERS = {
    "translation": _translation,
    "dilation": _dilation,
    "critical_h": _critical_h,
    "lattice": _lattice,
    "modulation": _modulation,
    "log": _log,
}


def build_family(spec: FamilySpec) -> BuiltFamily:
    """Sample the family member of size ``spec.N`` on a torus.

    Spectrally defined families (dilation, modulation, log) are built from
    their Fourier coefficients; the others are sums of dilated and
    translated copies of ``psi_1``.

    Raises
    ------
    InfeasibleGrid
        If resolving the finest scale needs more than ``GRID_CAP`` cells.
    """
    return _BUILDERS[spec.family](spec)


# ------------------------------------------------------------------ ratios


def space_norms(built: BuiltFamily, spaces: list[SmoothnessParams]) -> list[float]:
    f = built.function
    fam = build_beta_family(f.length, period=built.period)
    return smoothness_norms(f, fam, spaces)


@dataclass
class RatioTable:
    """Rows of ``(N, source_norm, target_norm, ratio)`` plus the fitted slope.

    The slope is that of ``log2(ratio)`` against ``log2(N)``, except for the
    dilation family where ``N`` is already a dyadic exponent.
    """

    family: str
    rows: list[tuple[int, float, float, float]]
    slope: float
    classification: str
    spec: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "source_norm", "target_norm", "ratio"])
        for N, src, tgt, ratio in self.rows:
            w.writerow([N, repr(src), repr(tgt), repr(ratio)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"family": self.family, "slope": self.slope,
                "classification": self.classification, "sizes": [r[0] for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


def classify(sizes: list[int], ratios: list[float]) -> str:
    """``growth``, ``bounded`` or ``inconclusive``.

    Growth: the ratio strictly increases and ``last / first >= 1.5``.
    Bounded: ``max / min <= 2`` over sizes in the top octave ``[N_max/2, N_max]``.
    """
    r = np.asarray(ratios, dtype=float)
    if np.all(np.diff(r) > 0) and r[-1] / r[0] >= 1.5:
        return "growth"
    top = max(sizes)
    sel = r[np.asarray(sizes) * 2 >= top]
    if sel.max() / sel.min() <= 2.0:
        return "bounded"
    return "inconclusive"


def _one_size(args: tuple) -> tuple[int, float, float]:
    q, spec = args
    src, tgt = space_norms(build_family(spec), [q.source, q.target])
    return spec.N, src, tgt


def measure_ratio(q: EmbeddingQuery, spec: FamilySpec, sizes=None) -> RatioTable:
    """Target/source norm ratio of the family across sizes.

    Raises
    ------
    InfeasibleGrid
        If any size needs more grid cells than the cap.
    """
    if q.d != 1:
        raise ValueError("norms are evaluated in dimension 1")
    sizes = sorted(int(n) for n in (sizes or DEFAULT_SIZES[spec.family]))
    if len(sizes) < 2:
        raise ValueError("need at least two sizes")
    for N in sizes:
        _check_feasible(spec.with_size(N))
    results = parallel_map(_one_size, [(q, spec.with_size(N)) for N in sizes])
    rows = [(N, src, tgt, tgt / src) for N, src, tgt in results]
    xs = [float(N) if spec.family == "dilation" else math.log2(N) for N in sizes]
    ratios = [r[3] for r in rows]
    slope = fitted_slope(xs, ratios)
    return RatioTable(spec.family, rows, slope, classify(sizes, ratios), asdict(spec))


def required_grid(spec: FamilySpec) -> int:
    """Grid length the family would use, without building it."""
    try:
        if spec.family == "translation":
            period = float(1 << int(math.ceil(math.log2(spec.N + 2))))
            return _grid(period, KERNEL_HALFWIDTH / SAMPLES_PER_HALFWIDTH)
        if spec.family == "dilation":
            return _grid(1.0, 2.0 ** (-spec.N - 5))
        if spec.family == "critical_h":
            n = float(_scales(spec, spec.R)[-1])
            return _grid(1.0, KERNEL_HALFWIDTH * 2.0**-n / SAMPLES_PER_HALFWIDTH)
        if spec.family == "lattice":
            n = float(lattice_scales(spec)[-1])
            period = float(1 << max(0, int(math.ceil(math.log2(spec.N * LATTICE_SPACING)))))
            return _grid(period, KERNEL_HALFWIDTH * 2.0**-n / SAMPLES_PER_HALFWIDTH)
        if spec.family == "modulation":
            return _grid(MODULATION_PERIOD, 1.0 / (8.0 * 2.0 ** float(spec.N + 1)))
        extent = spec.R * 4 * spec.N + 16.0
        period = float(1 << int(math.ceil(math.log2(extent))))
        return _grid(period, 1.0 / (8.0 * 2.0 ** float(spec.N + 1)))
    except InfeasibleGrid as exc:
        return exc.required


def _check_feasible(spec: FamilySpec) -> None:
    need = required_grid(spec)
    if need > GRID_CAP:
        raise InfeasibleGrid(need)


# ------------------------------------------------------------ family choice


def _f(x) -> float:
    return INF if x == INF else float(x)


def _moment_order(q: EmbeddingQuery) -> int:
    return default_moment_order(max(abs(float(q.source.s)), abs(float(q.target.s))))


def _midpoint(a: float, b: float) -> float:
    return 0.5 * (a + b)


def _inv(x: float) -> float:
    return 0.0 if x == INF else 1.0 / x


def select_family(q: EmbeddingQuery, v: Verdict | None = None) -> FamilySpec:
    """Family that certifies the failure of a non-holding query.

    Raises
    ------
    ValueError
        If the query holds.
    """
    v = decide(q) if v is None else v
    if v.holds:
        raise ValueError("query holds; there is no failure to certify")
    a, b = q.source, q.target
    s0, s1 = float(a.s), float(b.s)
    p0, p1 = _f(a.p), _f(b.p)
    q0, r0, q1, r1 = _f(a.q), _f(a.r), _f(b.q), _f(b.r)
    M = _moment_order(q)
    d = q.d
    gap = (s0 - s1) - (d / p0 - d / p1)
    crit_tol = 1e-12 * max(1.0, abs(s0), abs(s1))
    if p0 > p1:
        return FamilySpec("translation", 2, M=M)
    if p0 == p1 and r0 > r1:
        delta = _midpoint(_inv(r0), _inv(r1)) if r0 != INF else 0.5 * _inv(r1)
        return FamilySpec("translation", 2, coeff="log_tail", theta=1.0 / p0, delta=delta, M=M)
    if gap < -crit_tol:
        return FamilySpec("dilation", 2, M=M)
    if abs(gap) <= crit_tol and p0 < p1:
        return FamilySpec("critical_h", 2, M=M, gamma=-s0 + d / p0)
    pair = q.pair
    same = abs(s0 - s1) <= crit_tol and p0 == p1
    p = p0
    if same:
        if (pair == "BF" and q0 > p) or (pair == "FB" and q1 < p):
            return FamilySpec("lattice", 2, M=M, s=s0)
        if q0 > q1:
            return FamilySpec("modulation", 2, M=M, s=s0)
        if pair == "BF":
            return FamilySpec("log", 4, M=M, s=s0, p=p, delta=_midpoint(_inv(r0), 1.0 / p))
        if pair == "FB":
            return FamilySpec("log", 4, M=M, s=s0, p=p, delta=_midpoint(1.0 / p, _inv(r1)))
    return FamilySpec("modulation", 2, M=M, s=s0)


def natural_family(q: EmbeddingQuery) -> FamilySpec:
    """Family used to probe boundedness of a holding query."""
    a, b = q.source, q.target
    s0, s1 = float(a.s), float(b.s)
    p0, p1 = _f(a.p), _f(b.p)
    M = _moment_order(q)
    d = q.d
    if p0 < p1:
        return FamilySpec("critical_h", 2, M=M, gamma=-s0 + d / p0)
    if s0 > s1:
        return FamilySpec("translation", 2, M=M)
    clause = decide(q).clause
    if q.pair in ("BF", "FB") and clause in ("iv", "v"):
        return FamilySpec("lattice", 2, M=M, s=s0)
    if q.pair in ("BF", "FB") and clause == "vi":
        r0 = _f(a.r)
        delta = _midpoint(_inv(r0), 1.0 / p0) if q.pair == "BF" else _midpoint(1.0 / p0, _inv(_f(b.r)))
        return FamilySpec("log", 4, M=M, s=s0, p=p0, delta=delta)
    return FamilySpec("modulation", 2, M=M, s=s0)


# ------------------------------------------------------------ sandwiches


def coefficient_norm(spec: FamilySpec, a: np.ndarray, space: SmoothnessParams) -> float:
    """Sequence norm the family's smoothness norm is equivalent to."""
    mags = np.abs(np.asarray(a))
    q, p, r = _f(space.q), _f(space.p), _f(space.r)
    if spec.family == "lattice" and space.scale == "F":
        l = np.arange(1, mags.size + 1, dtype=float)
        if r == INF:
            return float(np.max(l ** (1.0 / p) * mags))
        return float(np.sum(l ** (r / p - 1.0) * mags**r) ** (1.0 / r))
    e = r if (spec.family == "critical_h" and space.scale == "F") else q
    return float(np.max(mags)) if e == INF else float(np.sum(mags**e) ** (1.0 / e))


def _check_sandwich_constraints(spec: FamilySpec, a: np.ndarray, space: SmoothnessParams) -> None:
    mags = np.abs(a)
    if np.any(np.diff(mags) > 1e-12 * mags.max()):
        raise ValueError("coefficient magnitudes must be nonincreasing")
    if spec.family == "critical_h":
        grown = mags * 2.0 ** (_scales(spec, spec.R) / float(space.p))
        if np.any(np.diff(grown) < -1e-12 * grown.max()):
            raise ValueError("2^(n_l/p) |a_l| must be nondecreasing")


def sandwich_ratios(spec: FamilySpec, a, b, space: SmoothnessParams) -> tuple[float, float]:
    """``(norm(b) / norm(a), coeffnorm(b) / coeffnorm(a))`` for two coefficient sequences."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size != b.size:
        raise ValueError("coefficient sequences differ in length")
    for c in (a, b):
        _check_sandwich_constraints(spec, c, space)
    specs = [replace(spec, N=int(c.size), coeff="explicit", values=tuple(c.tolist())) for c in (a, b)]
    na, nb = (space_norms(build_family(s), [space])[0] for s in specs)
    return nb / na, coefficient_norm(spec, b, space) / coefficient_norm(spec, a, space)


def norm_sandwich_check(spec: FamilySpec, a, b, space: SmoothnessParams) -> bool:
    """Whether the norm ratio of two instances is within a factor 2 of the coefficient-norm ratio."""
    computed, expected = sandwich_ratios(spec, a, b, space)
    return 0.5 <= computed / expected <= 2.0

"""FFT Littlewood-Paley pieces, Besov / Triebel-Lizorkin-Lorentz norms and
compactly supported kernels with vanishing moments.

Grid functions live on a torus of length ``period``; the sample at index
``n`` of the FFT carries the ordinary frequency ``n / period``, so with the
default ``period = 1`` frequencies are integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np
from numpy.polynomial import legendre
from scipy import integrate

from .measure import INF, GridFunction, lorentz_norm_of_moduli
from .oracle import SmoothnessParams
from .sequences import FunctionSequence

PLATEAU = 1.5
GAUSS_NODES = 400
CUTOFF = 1.75


def smooth_step(t: np.ndarray) -> np.ndarray:
    """``eta(t) / (eta(t) + eta(1 - t))`` with ``eta(t) = exp(-1/t)`` for ``t > 0``."""
    t = np.asarray(t, dtype=float)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    u = 1.0 - t
    b = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
    return a / (a + b)


def beta0(xi: np.ndarray) -> np.ndarray:
    """Equals 1 for ``|xi| <= 3/2`` and 0 for ``|xi| >= 7/4``."""
    return 1.0 - smooth_step((np.abs(xi) - PLATEAU) / (CUTOFF - PLATEAU))


@dataclass(frozen=True, eq=False)
class BumpFamily:
    """Multipliers ``beta_0 .. beta_K`` on the grid's FFT frequencies.

    Bands are evaluated on demand so large grids never hold all ``K+1``
    multipliers at once.
    """

    grid_length: int
    K: int
    period: float

    @cached_property
    def frequencies(self) -> np.ndarray:
        return np.fft.fftfreq(self.grid_length, d=self.period / self.grid_length)

    @property
    def cell_mass(self) -> float:
        return self.period / self.grid_length

    def band(self, k: int) -> np.ndarray:
        """``beta_k(xi) = beta_0(2^-k xi) - beta_0(2^{1-k} xi)``, with ``beta_0`` for ``k = 0``."""
        if not 0 <= k <= self.K:
            raise IndexError(f"band {k} outside 0..{self.K}")
        xi = self.frequencies
        if k == 0:
            return beta0(xi)
        return beta0(xi / 2.0**k) - beta0(xi / 2.0 ** (k - 1))

    @property
    def beta(self) -> np.ndarray:
        return np.stack([self.band(k) for k in range(self.K + 1)])


def max_bands(grid_length: int, period: float = 1.0) -> int:
    """Largest ``K`` with ``2^K <= grid_length / (4 * period)``."""
    return int(math.floor(math.log2(grid_length / (4.0 * period)) + 1e-12))


def build_beta_family(grid_length: int, K: int | None = None, period: float = 1.0) -> BumpFamily:
    """Dyadic partition ``beta_k(xi) = beta_0(2^-k xi) - beta_0(2^{1-k} xi)``.

    ``K`` defaults to the largest band that still fits below Nyquist.
    """
    if grid_length < 4:
        raise ValueError("grid too small")
    kmax = max_bands(grid_length, period)
    K = kmax if K is None else int(K)
    if K < 0:
        raise ValueError("K must be nonnegative")
    if K > kmax:
        raise ValueError("band exceeds Nyquist")
    return BumpFamily(grid_length, K, float(period))


def partition_deviation(fam: BumpFamily) -> float:
    """Max of ``|sum_k beta_k - 1|`` on ``|xi| <= 3 * 2^(K-1)``."""
    xi = np.abs(fam.frequencies)
    mask = xi <= 3.0 * 2.0 ** (fam.K - 1)
    total = np.zeros(fam.grid_length)
    for k in range(fam.K + 1):
        total += fam.band(k)
    return float(np.max(np.abs(total[mask] - 1.0)))


def _check(f: GridFunction, fam: BumpFamily) -> None:
    if f.length != fam.grid_length:
        raise ValueError("dimension mismatch between function and band family")


def iter_bands(f: GridFunction, fam: BumpFamily) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(k, samples of Lambda_k f)`` one band at a time."""
    _check(f, fam)
    fhat = np.fft.fft(f.samples)
    for k in range(fam.K + 1):
        b = fam.band(k)
        if not np.any(b):
            yield k, np.zeros(fam.grid_length, dtype=complex)
            continue
        yield k, np.fft.ifft(fhat * b)


def lp_decompose(f: GridFunction, fam: BumpFamily) -> FunctionSequence:
    """``{Lambda_k f}_{k=0..K}``."""
    return FunctionSequence([GridFunction(v, f.cell_mass) for _, v in iter_bands(f, fam)])


def reconstruction_error(f: GridFunction, fam: BumpFamily) -> float:
    """Relative max-modulus error of ``sum_k Lambda_k f``."""
    total = np.zeros(f.length, dtype=complex)
    for _, v in iter_bands(f, fam):
        total += v
    scale = np.max(np.abs(f.samples))
    return float(np.max(np.abs(total - f.samples)) / scale) if scale > 0 else 0.0


def _fl(x) -> float:
    return INF if x == INF else float(x)


def smoothness_norms(f: GridFunction, fam: BumpFamily, specs: Sequence[SmoothnessParams]) -> list[float]:
    """Evaluate several Besov / Triebel-Lizorkin norms sharing one pass over the bands.

    Besov: ``(sum_k 2^{ksq} ||Lambda_k f||_{p,r}^q)^{1/q}``.
    Triebel-Lizorkin: ``|| (sum_k |2^{ks} Lambda_k f|^q)^{1/q} ||_{p,r}``.
    """
    params = [(sp.scale, _fl(sp.s), _fl(sp.p), _fl(sp.q), _fl(sp.r)) for sp in specs]
    b_terms: list[list[float]] = [[] for _ in specs]
    f_acc: list[np.ndarray | None] = [None for _ in specs]
    for k, band in iter_bands(f, fam):
        mod = np.abs(band)
        cache: dict[tuple[float, float], float] = {}
        for i, (scale, s, p, q, r) in enumerate(params):
            w = 2.0 ** (k * s)
            if scale == "B":
                if (p, r) not in cache:
                    cache[(p, r)] = lorentz_norm_of_moduli(mod, f.cell_mass, p, r)
                b_terms[i].append(w * cache[(p, r)])
            else:
                piece = w * mod if q == INF else (w * mod) ** q
                if f_acc[i] is None:
                    f_acc[i] = piece.copy()
                elif q == INF:
                    np.maximum(f_acc[i], piece, out=f_acc[i])
                else:
                    f_acc[i] += piece
    out = []
    for i, (scale, s, p, q, r) in enumerate(params):
        if scale == "B":
            t = np.array(b_terms[i])
            if q == INF:
                out.append(float(t.max()))
            else:
                top = t.max()
                out.append(float(top * np.sum((t / top) ** q) ** (1.0 / q)) if top > 0 else 0.0)
        else:
            agg = f_acc[i] if q == INF else f_acc[i] ** (1.0 / q)
            out.append(lorentz_norm_of_moduli(agg, f.cell_mass, p, r))
    return out


def besov_norm(f: GridFunction, fam: BumpFamily, sp: SmoothnessParams) -> float:
    if sp.scale != "B":
        raise ValueError("besov_norm needs a B-scale parameter set")
    return smoothness_norms(f, fam, [sp])[0]


def tl_norm(f: GridFunction, fam: BumpFamily, sp: SmoothnessParams) -> float:
    if sp.scale != "F":
        raise ValueError("tl_norm needs an F-scale parameter set")
    return smoothness_norms(f, fam, [sp])[0]


# ------------------------------------------------------------ moment kernels


def bump(u: np.ndarray, skew: float = 0.0) -> np.ndarray:
    """``exp(skew*u - 1/(1-u^2))`` on ``|u| < 1``, zero outside."""
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1.0
    out = np.zeros_like(u)
    ui = u[inside]
    out[inside] = np.exp(skew * ui - 1.0 / (1.0 - ui**2))
    return out


@dataclass(frozen=True, eq=False)
class PsiKernels:
    """``psi_0 = P * phi`` with unit mass and vanishing moments ``1..M``.

    ``psi_0(x) = Q(x / rho) / rho`` where ``Q(u) = P(u) bump(u, skew)`` and
    ``rho`` is the support half-width.  A nonzero skew breaks the parity of
    the bump so that moment ``M+1`` does not vanish by symmetry.  ``psi_k = 2^k psi_0(2^k .) - 2^{k-1} psi_0(2^{k-1} .)``.
    """

    M: int
    support_halfwidth: float
    coeffs: np.ndarray
    scale_count: int
    skew: float = 0.0

    def q_profile(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return legendre.legval(np.clip(u, -1.0, 1.0), self.coeffs) * bump(u, self.skew)

    def psi0(self, x: np.ndarray) -> np.ndarray:
        rho = self.support_halfwidth
        return self.q_profile(np.asarray(x, dtype=float) / rho) / rho

    def psi(self, k: int, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if k == 0:
            return self.psi0(x)
        return 2.0**k * self.psi0(2.0**k * x) - 2.0 ** (k - 1) * self.psi0(2.0 ** (k - 1) * x)

    def support(self, k: int) -> float:
        """Half-width of the support of ``psi_k``."""
        return self.support_halfwidth * (1.0 if k == 0 else 2.0 ** (1 - k))

    def moments(self, orders: Sequence[int]) -> np.ndarray:
        """Moments of ``psi_0`` by adaptive quadrature, in units of the support."""
        rho = self.support_halfwidth
        out = []
        for m in orders:
            val, _ = integrate.quad(lambda u: self.q_profile(u) * u**m, -1.0, 1.0,
                                    epsabs=1e-14, epsrel=1e-13, limit=400)
            out.append(val * rho**m)
        return np.array(out)

    @cached_property
    def autocorrelation_bound(self) -> tuple[float, float]:
        """``(eps, c)`` with ``psi_1 * psi_1 >= c`` on ``(-eps, eps)``."""
        w = self.support(1)
        n = 4096
        h = 2.0 * w / n
        x = (np.arange(n) - n // 2) * h
        s = self.psi(1, x)
        conv = np.convolve(s, s, mode="full") * h
        lag = (np.arange(conv.size) - n) * h
        peak = float(conv[n])
        if peak <= 0:
            raise ValueError("autocorrelation of psi_1 is not positive at the origin")
        c = 0.5 * peak
        below = np.abs(lag[conv < c])
        eps = float(below.min()) if below.size else float(np.abs(lag).max())
        return eps, c


def build_psi_kernels(M: int, support_halfwidth: float = 0.125, scale_count: int = 16,
                      skew: float = 0.5) -> PsiKernels:
    """Solve the ``(M+1) x (M+1)`` moment system in a Legendre basis."""
    if int(M) != M or M < 1:
        raise ValueError("moment order M must be an integer >= 1")
    if not support_halfwidth > 0:
        raise ValueError("support half-width must be positive")
    M = int(M)
    # the bump is flat to all orders at +-1, so Gauss-Legendre converges very fast
    nodes, weights = legendre.leggauss(GAUSS_NODES)
    w = weights * bump(nodes, skew)
    powers = nodes[None, :] ** np.arange(M + 1)[:, None]
    basis = legendre.legvander(nodes, M)
    A = (powers * w) @ basis
    rhs = np.zeros(M + 1)
    rhs[0] = 1.0
    if np.linalg.cond(A) > 1e13:
        raise ValueError("moment system is singular")
    coeffs = np.linalg.solve(A, rhs)
    return PsiKernels(M, float(support_halfwidth), coeffs, int(scale_count), float(skew))


def default_moment_order(s: float) -> int:
    """``M >= |s| + 4``."""
    return int(math.ceil(abs(float(s)))) + 4


def signed_positions(n: int, cell_mass: float) -> np.ndarray:
    """Grid offsets ``0, h, 2h, ..., -2h, -h`` in FFT order."""
    idx = np.arange(n)
    idx = np.where(idx < (n + 1) // 2, idx, idx - n)
    return idx * cell_mass


def local_mean(f: GridFunction, kernels: PsiKernels, j: int) -> GridFunction:
    """``psi_j * f`` on the torus, with ``psi_j`` sampled at the grid offsets."""
    x = signed_positions(f.length, f.cell_mass)
    ker = kernels.psi(j, x) * f.cell_mass
    out = np.fft.ifft(np.fft.fft(f.samples) * np.fft.fft(ker))
    return GridFunction(out, f.cell_mass)


def decay_profile(kernels: PsiKernels, n: int, js: Sequence[int], points: int = 1,
                  samples: int = 256) -> dict[int, float]:
    """``sup |psi_j * h|`` for ``h = sum_w psi_1(2^n (x - w))``.

    The centres ``w`` are ``points`` consecutive multiples of ``2^-n``.  Each
    ``j`` gets its own torus, just long enough to hold the convolution, with
    ``samples`` cells per half-width of the finest bump so that discrete
    moments vanish to near machine precision.
    """
    rho = kernels.support_halfwidth
    hw = kernels.support(1) * 2.0**-n
    cluster = (points - 1) * 2.0**-n
    out = {}
    for j in js:
        if j < 1:
            raise ValueError("local means start at j = 1")
        cell = min(rho * 2.0**-j, rho * 2.0 ** (-n - 1)) / samples
        extent = 2.0 * (kernels.support(j) + hw + cluster)
        length = 1 << int(math.ceil(math.log2(1.25 * extent / cell)))
        x = (np.arange(length) - length // 2) * cell
        g = np.zeros(length)
        for i in range(points):
            g += kernels.psi(1, 2.0**n * (x - (i - (points - 1) / 2.0) * 2.0**-n))
        out[j] = float(np.max(np.abs(local_mean(GridFunction(g, cell), kernels, j).samples)))
    return out


def fitted_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log2(ys)`` against ``xs``."""
    return float(np.polyfit(np.asarray(xs, float), np.log2(np.asarray(ys, float)), 1)[0])

"""scikit-learn transformers over rows of periodic samples."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .littlewood_paley import build_beta_family, iter_bands
from .measure import GridFunction, lorentz_norm_of_moduli


def _rows(X) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d array of signals, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("signals must be finite")
    return X


class LittlewoodPaleyTransformer(TransformerMixin, BaseEstimator):
    """Split each row into its dyadic bands ``Lambda_0 f .. Lambda_K f``.

    Parameters
    ----------
    K : int or None
        Top band; ``None`` uses the largest band below Nyquist.
    period : float
        Length of the torus the row samples.

    ``transform`` returns an array of shape ``(n_signals, K + 1, n_samples)``,
    real when the input is real.
    """

    def __init__(self, K=None, period=1.0):
        self.K = K
        self.period = period

    def fit(self, X, y=None):
        X = _rows(X)
        self.family_ = build_beta_family(X.shape[1], self.K, self.period)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "family_")
        X = _rows(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError("signal length differs from the fitted length")
        fam = self.family_
        real = not np.iscomplexobj(X)
        out = np.empty((X.shape[0], fam.K + 1, X.shape[1]), dtype=float if real else complex)
        for i, row in enumerate(X):
            f = GridFunction(row, fam.cell_mass)
            for k, band in iter_bands(f, fam):
                out[i, k] = band.real if real else band
        return out


class BandNormTransformer(TransformerMixin, BaseEstimator):
    """Weighted band norms ``2^{ks} ||Lambda_k f||_{p,r}`` for each row.

    ``transform`` returns an array of shape ``(n_signals, K + 1)``.
    """

    def __init__(self, s=0.0, p=2.0, r=2.0, K=None, period=1.0):
        self.s = s
        self.p = p
        self.r = r
        self.K = K
        self.period = period

    def fit(self, X, y=None):
        X = _rows(X)
        if not self.p > 0 or not self.r > 0:
            raise ValueError("p and r must be positive")
        self.family_ = build_beta_family(X.shape[1], self.K, self.period)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "family_")
        X = _rows(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError("signal length differs from the fitted length")
        fam = self.family_
        out = np.empty((X.shape[0], fam.K + 1))
        for i, row in enumerate(X):
            f = GridFunction(row, fam.cell_mass)
            for k, band in iter_bands(f, fam):
                out[i, k] = 2.0 ** (k * self.s) * lorentz_norm_of_moduli(
                    np.abs(band), fam.cell_mass, float(self.p), float(self.r))
        return out

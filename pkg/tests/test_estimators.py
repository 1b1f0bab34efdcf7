import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from lorlab.estimators import BandNormTransformer, LittlewoodPaleyTransformer
from lorlab.littlewood_paley import besov_norm, build_beta_family
from lorlab.measure import GridFunction
from lorlab.oracle import SmoothnessParams


@pytest.fixture
def X(rng):
    return rng.standard_normal((3, 256))


def test_lp_transformer_reconstructs(X):
    # the bands cover |xi| <= 96 on a 256-cell grid, so drop the rest first
    spec = np.fft.fft(X, axis=1)
    spec[:, np.abs(np.fft.fftfreq(256, 1 / 256)) > 90] = 0
    X = np.fft.ifft(spec, axis=1).real
    out = LittlewoodPaleyTransformer().fit_transform(X)
    assert out.shape[:2] == (3, build_beta_family(256).K + 1)
    assert out.dtype == float
    assert np.max(np.abs(out.sum(axis=1) - X)) < 1e-10 * np.max(np.abs(X))


def test_lp_transformer_complex_input(X):
    Z = X + 1j * X[::-1]
    out = LittlewoodPaleyTransformer(K=3).fit_transform(Z)
    assert np.iscomplexobj(out) and out.shape == (3, 4, 256)


def test_band_norms_give_besov_norm(X):
    bn = BandNormTransformer(s=0.5, p=2, r=3).fit(X)
    out = bn.transform(X)
    fam = build_beta_family(256)
    for row, norms in zip(X, out):
        f = GridFunction(row, 1 / 256)
        assert np.sqrt(np.sum(norms**2)) == pytest.approx(
            besov_norm(f, fam, SmoothnessParams("B", 0.5, 2, 2, 3)), rel=1e-12)


def test_contracts(X):
    with pytest.raises(NotFittedError):
        LittlewoodPaleyTransformer().transform(X)
    t = LittlewoodPaleyTransformer().fit(X)
    with pytest.raises(ValueError):
        t.transform(X[:, :128])
    with pytest.raises(ValueError):
        t.fit(X[0])
    with pytest.raises(ValueError):
        BandNormTransformer(p=0).fit(X)
    bad = X.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        t.transform(bad)


def test_clone_and_pipeline(X):
    est = BandNormTransformer(s=1.0, K=4)
    assert clone(est).get_params() == est.get_params()
    pipe = make_pipeline(BandNormTransformer(K=4))
    assert pipe.fit_transform(X).shape == (3, 5)

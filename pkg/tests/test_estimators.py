from fractions import Fraction as F

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from intrinsic_lab.estimators import IntrinsicExponentEstimator, KappaCalibrator, SimplexVerifier


def test_exponent_estimator_parabola():
    est = IntrinsicExponentEstimator("cn:2", height=10**4).fit(["phi"])
    assert abs(est.exponent_ - 1) < 0.05
    assert est.c_reference_ == 1
    feats = est.transform(["phi", "x^2-2,[1,2]"])
    assert feats.shape == (2, 4)
    assert np.all(np.abs(feats[:, 1] - 1) < 0.1)
    assert est.score(["phi"]) == pytest.approx(0.0)


def test_exponent_estimator_enumerate_matches_convergent():
    a = IntrinsicExponentEstimator("cn:2", height=2000, method="enumerate").fit(["phi"])
    b = IntrinsicExponentEstimator("cn:2", height=2000, method="convergent").fit(["phi"])
    assert a.exponent_ == pytest.approx(b.exponent_)


def test_exponent_estimator_params_and_clone():
    est = IntrinsicExponentEstimator("cn:3", height=500, tail=F(1, 3))
    params = est.get_params()
    assert params["chart"] == "cn:3" and params["tail"] == F(1, 3)
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    twin.set_params(height=700)
    assert twin.height == 700 and est.height == 500


def test_unfitted_estimators_raise():
    with pytest.raises(NotFittedError):
        IntrinsicExponentEstimator().predict(["phi"])
    with pytest.raises(NotFittedError):
        SimplexVerifier().predict([(0, F(1, 64))])
    with pytest.raises(NotFittedError):
        KappaCalibrator().predict([(0, F(1, 64))])


def test_bad_hyperparameters_rejected():
    with pytest.raises(ValueError):
        IntrinsicExponentEstimator(method="magic").fit(["phi"])
    with pytest.raises(ValueError):
        IntrinsicExponentEstimator(height=1).fit(["phi"])
    with pytest.raises(ValueError):
        IntrinsicExponentEstimator().fit("phi")
    with pytest.raises(ValueError):
        SimplexVerifier(kappa=0.1).fit()


def test_simplex_verifier_rows():
    ver = SimplexVerifier("cn:2", F(1, 10)).fit()
    X = [(0, F(1, 64)), ("1/3", "1/1024"), (F(-1, 2), F(1, 8))]
    assert ver.predict(X).tolist() == [True, True, True]
    feats = ver.transform(X)
    assert feats.shape == (3, 3) and feats.dtype == np.int64
    assert np.all(feats[:, 2] <= 2)
    assert ver.score(X) == 1.0
    with pytest.raises(ValueError):
        ver.predict([(0, 1, 2)])


def test_simplex_verifier_large_kappa_fails_somewhere():
    ver = SimplexVerifier("cn:2", 4).fit()
    X = [(F(59793, 131072), F(1, 8)), (F(-5743, 131072), F(1, 128))]
    assert not ver.predict(X).any()
    assert ver.score(X, [False, False]) == 1.0


def test_kappa_calibrator():
    cal = KappaCalibrator("cn:2", samples=30, seed=3).fit()
    assert cal.kappa_ > 0
    assert cal.verifier_.kappa_ == cal.kappa_
    assert cal.predict([(0, F(1, 64))]).tolist() == [True]
    again = clone(cal).fit()
    assert again.kappa_ == cal.kappa_

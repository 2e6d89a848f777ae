from fractions import Fraction as F

import pytest

from intrinsic_lab.approx import (
    ApproximationRecord,
    EnumerationCache,
    ba_test,
    best_approximations,
    convergent_records,
    dirichlet_test,
    exponent_estimate,
    reference_exponent,
    vwa_test,
)
from intrinsic_lab.arith import RationalPoint, reduce
from intrinsic_lab.charts import chart_from_spec, curve_cn, identity_chart, sphere_chart, veronese_chart
from intrinsic_lab.errors import Degenerate, InsufficientData
from intrinsic_lab.targets import LacunaryTarget, as_target, continued_fraction, convergents, quadratic_targets

FIB_SQUARES = [1, 4, 9, 25, 64, 169, 441, 1156, 3025, 7921]


def golden_chart(n):
    return curve_cn(n).with_domain([(1, 2)])


def staircase_ok(records):
    hs = [r.height for r in records]
    ds = [r.distance for r in records]
    return hs == sorted(set(hs)) and all(b < a for a, b in zip(ds, ds[1:]))


def test_rational_target_hits_zero():
    recs = best_approximations(curve_cn(2), F(1, 3), 100)
    assert [(r.height, r.distance) for r in recs] == [(1, F(1, 3)), (4, F(1, 6)), (9, 0)]
    assert recs[-1].witness == reduce((F(1, 3), F(1, 9)))


def test_golden_ratio_records_on_parabola():
    recs = best_approximations(golden_chart(2), "phi", 10**4)
    assert [r.height for r in recs] == FIB_SQUARES
    assert staircase_ok(recs)
    scaled = [float(r.distance) * r.height for r in recs[2:]]
    assert 0.5 < min(scaled) and max(scaled) < 2.5


def test_sphere_quadratic_target_has_dirichlet_records():
    target = quadratic_targets(1, seed=4)[0]
    recs = best_approximations(sphere_chart(2), target, 10**4)
    assert staircase_ok(recs) and len(recs) >= 5
    assert max(float(r.distance) * r.height for r in recs) < 10


def test_certified_enclosures_cover_true_distance():
    target = as_target("x^2-2,[1,2]")
    for r in best_approximations(curve_cn(2).with_domain([(1, 2)]), target, 10**4):
        lo, hi = r.bounds
        assert 0 <= lo <= hi and hi - lo <= F(1, 2**60)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_convergent_oracle_matches_enumeration(n, seed):
    chart = curve_cn(n).with_domain([(-1, 1)])
    cache = EnumerationCache()
    for target in quadratic_targets(4, seed):
        a = best_approximations(chart, target, 10**4, cache)
        b = convergent_records(chart, target, 10**4)
        assert [(r.height, r.witness) for r in a] == [(r.height, r.witness) for r in b]
        for x, y in zip(a, b):
            assert max(x.bounds[0], y.bounds[0]) <= min(x.bounds[1], y.bounds[1])


def test_convergent_oracle_golden():
    recs = convergent_records(golden_chart(2), "phi", 10**4)
    assert [r.height for r in recs] == FIB_SQUARES


def test_convergent_records_need_power_rule():
    with pytest.raises(ValueError):
        convergent_records(sphere_chart(2), "1/3", 100)


def test_veronese_transfer():
    for n in (2, 3):
        chart = veronese_chart(1, n)
        line = identity_chart(1)
        for target in quadratic_targets(3, seed=n, lo=F(-1, 2), hi=F(1, 2)):
            amb = best_approximations(chart, target, 20**n)
            par = best_approximations(line, target, 20)
            assert [r.height for r in amb] == [r.height ** n for r in par]
            for a, p in zip(amb, par):
                assert a.witness.coords()[0] == p.witness.coords()[0]
                if p.distance:
                    assert 1 <= a.distance / p.distance <= n


@pytest.mark.parametrize("c", [F(1, 2), F(1), F(5, 6)])
def test_exponent_on_synthetic_power_law(c):
    recs = []
    for h in [2**j for j in range(1, 40)]:
        d = F(1, h) if c == 1 else F(round(h ** -float(c) * 2**80), 2**80)
        recs.append(ApproximationRecord(h, d, RationalPoint(h, (1,))))
    est = exponent_estimate(recs, c)
    assert abs(est.slope - float(c)) < 1e-9
    assert abs(est.tail_slope - float(c)) < 1e-9


def test_exponent_needs_two_records():
    with pytest.raises(InsufficientData):
        exponent_estimate([ApproximationRecord(2, F(1, 4), RationalPoint(2, (1,)))])


@pytest.mark.parametrize("n,expected", [(2, 1.0), (3, 2 / 3)])
def test_exponent_near_two_over_n(n, expected):
    est = exponent_estimate(convergent_records(golden_chart(n), "phi", 10**6), reference_exponent(curve_cn(n)))
    assert abs(est.tail_slope - expected) < 0.05


def test_ba_examples():
    rational = best_approximations(curve_cn(2), F(1, 3), 100)
    t = ba_test(rational, 1)
    assert t.infimum[0] == 0 and not t.is_ba
    golden = convergent_records(golden_chart(2), "phi", 10**6)
    t = ba_test(golden, 1)
    assert t.is_ba and 0.2 < float(t.infimum[0]) < 2
    t0 = ba_test(golden, 0)
    assert t0.infimum[0] == min(r.bounds[0] for r in golden) > 0


def test_vwa_examples():
    golden = convergent_records(golden_chart(2), "phi", 10**6)
    assert vwa_test(golden, 1).epsilon is None
    with pytest.raises(Degenerate):
        vwa_test(best_approximations(curve_cn(2), F(1, 3), 100), 1)


@pytest.mark.parametrize("base,eps", [(2, F(23, 16)), (10, F(15, 16))])
def test_vwa_for_lacunary_target(base, eps):
    target = LacunaryTarget(base)
    recs = convergent_records(curve_cn(2), target, base**240, intermediate=False)
    t = vwa_test(recs, 1, min_count=2, tail=1)
    assert t.epsilon == eps
    assert not ba_test(recs, 1).is_ba


def test_ba_and_vwa_exclusive():
    for target in quadratic_targets(5, seed=9):
        recs = convergent_records(curve_cn(2), target, 10**6)
        ba, vwa = ba_test(recs, 1), vwa_test(recs, 1)
        assert not (ba.is_ba and vwa.epsilon is not None)


def test_dirichlet_small_runs():
    targets = quadratic_targets(20, seed=0)
    sphere = dirichlet_test(sphere_chart(2), targets, 1, 2**12)
    assert sphere.stable and 0 < sphere.constant < 100
    cubic = dirichlet_test(curve_cn(3), targets, 1, 2**12)
    assert cubic.constant > sphere.constant
    trivial = dirichlet_test(curve_cn(2), targets, 0, 2**10)
    assert 0 < trivial.constant <= 1


def test_continued_fraction_of_targets():
    qs, complete = continued_fraction(as_target("phi").coords[0], 10**6)
    assert not complete and set(qs) == {1}
    assert convergents(qs)[-1][1] > 10**6
    qs, complete = continued_fraction(as_target("x^2-2,[1,2]").coords[0], 1000)
    assert qs[0] == 1 and set(qs[1:]) == {2}

"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even when
output is captured) or directly with ``python tests/test_acceptance.py``.
"""

import sys
import time
from fractions import Fraction as F

import pytest

from intrinsic_lab.approx import (
    EnumerationCache,
    best_approximations,
    convergent_records,
    default_domain,
    dirichlet_test,
    exponent_estimate,
    reference_exponent,
)
from intrinsic_lab.arith import binom, reduce
from intrinsic_lab.charts import (
    BUILTIN_SPECS,
    atlas,
    bruteforce_intrinsic,
    chart_from_spec,
    enumerate_atlas,
    enumerate_rationals,
    sweep,
    unit_box,
    veronese_chart,
)
from intrinsic_lab.constants import N_bruteforce, c_table, dirichlet_constants, veronese_condition
from intrinsic_lab.game import (
    Ball,
    GameRules,
    alice_simplex_strategy,
    ba_constant,
    bob_greedy_strategy,
    play,
    replay,
    verify_transcript,
)
from intrinsic_lab.simplex import kappa_calibrate, simplex_sweep
from intrinsic_lab.targets import as_target, quadratic_targets

PUBLISHED_TABLE = {
    1: ["2", "1", "2/3", "1/2", "2/5", "1/3"],
    2: ["3/2", "1", "5/6", "3/4", "7/11"],
    3: ["4/3", "1", "6/7", "7/9"],
    4: ["5/4", "1", "7/8"],
    5: ["6/5", "1"],
    6: ["7/6"],
}


def criterion_1():
    table = c_table(6)
    want = {(k, k + i): F(v) for k, row in PUBLISHED_TABLE.items() for i, v in enumerate(row)}
    assert len(want) == 21
    ok = table == want and table[(2, 4)] == F(5, 6) and table[(2, 6)] == F(7, 11) and table[(3, 5)] == F(6, 7)
    return ok, f"{len(table)} entries, c(2,4)={table[(2, 4)]} c(2,6)={table[(2, 6)]} c(3,5)={table[(3, 5)]}", 1


def criterion_2():
    bad = [(k, d) for d in range(1, 13) for k in range(1, d + 1)
           if dirichlet_constants(k, d).N_kd != N_bruteforce(k, d)]
    return not bad, f"78 pairs k <= d <= 12, mismatches {bad}", 10


def criterion_3():
    bad = []
    for d in range(1, 21):
        c = {k: dirichlet_constants(k, d).c_kd for k in range(1, d + 1)}
        if c[d] != 1 + F(1, d) or c[1] != F(2, d) or (d >= 2 and c[d - 1] != 1):
            bad.append(("special", d))
        if any(c[k] >= c[k + 1] for k in range(1, d)):
            bad.append(("monotone", d))
    return not bad, f"d <= 20, violations {bad}", 1


def criterion_4():
    bad = []
    for k in range(1, 7):
        for n in range(1, 7):
            vc = veronese_condition(k, k, n)
            big = binom(k, n) - 1
            identity = F(dirichlet_constants(k, big).N_kd) == F(k * n, k + 1) * binom(k, n)
            if not (vc.holds and identity):
                bad.append((k, n))
    return not bad, f"(k,k,n) for 1 <= k,n <= 6, failures {bad}", 1


def criterion_5():
    bad, checked = [], 0
    for k in (1, 2):
        params = sweep(chart_from_spec(f"identity:{k}"), 64, param_box=unit_box(k)).params()
        heights = [reduce(t).height for t in params]
        for n in (2, 3):
            images = veronese_chart(k, n).evaluate_many(params)
            checked += len(images)
            bad += [(k, n, t) for t, h, p in zip(params, heights, images) if p.height != h**n]
    return not bad, f"{checked} parameter evaluations, failures {len(bad)}", 30


def criterion_6():
    bad, total = [], 0
    for spec in BUILTIN_SPECS:
        chart = chart_from_spec(spec)
        box = unit_box(chart.d)
        brute = bruteforce_intrinsic(chart.implicit_eqs, 30, box)
        mine = [p for p, _, _ in enumerate_atlas(chart, 30, box)]
        if len(atlas(chart)) == 1:
            # single-chart manifolds: the plain enumeration is the whole story
            mine_plain = sorted(p for p, _ in enumerate_rationals(chart, 30, box))
            if mine_plain != brute:
                bad.append(spec)
        if mine != brute:
            bad.append(spec)
        total += len(brute)
    return not bad, f"{len(BUILTIN_SPECS)} charts at T=30, {total} points, mismatches {bad}", 60


def criterion_7():
    parts, ok = [], True
    for spec in ("cn:2", "sphere:2"):
        rep = simplex_sweep(chart_from_spec(spec), 1000, rho_range=(F(1, 2**20), F(1)), kappa=F(1, 10), seed=0)
        integral = all(r.failure is None or r.failure.integrality_holds for r in rep.failures)
        ok = ok and rep.pass_rate == 1 and integral
        parts.append(f"{spec} pass rate {rep.pass_rate} ({rep.samples} samples)")
    return ok, "; ".join(parts), 300


def criterion_8():
    parts, ok = [], True
    target = as_target("phi")
    for spec, want in (("cn:2", 1.0), ("cn:3", 2 / 3)):
        chart = default_domain(chart_from_spec(spec), target)
        records = convergent_records(chart, target, 10**6)
        oracle = best_approximations(chart, target, 10**6)
        agree = [(r.height, r.witness) for r in records] == [(r.height, r.witness) for r in oracle]
        est = exponent_estimate(records, reference_exponent(chart))
        good = agree and abs(est.tail_slope - want) < 0.05
        ok = ok and good
        parts.append(f"{spec} tail exponent {est.tail_slope:.4f} (want {want:.4f}), oracle agrees {agree}")
    return ok, "; ".join(parts), None


def criterion_9():
    parts = []
    results = {}
    for spec in ("sphere:2", "cn:3"):
        chart = chart_from_spec(spec)
        (lo, hi), = chart.domain
        targets = quadratic_targets(100, 0, lo, hi)
        test = dirichlet_test(chart, targets, F(1), 2**16, EnumerationCache())
        results[spec] = test
        parts.append(f"{spec} constant {test.constant:.4g} ratios {[round(r, 3) for r in test.ratios]}")
    sphere, cubic = results["sphere:2"], results["cn:3"]
    ok = (sphere.stable and all(0.5 <= r <= 2 for r in sphere.ratios) and sphere.constant < float("inf")
          and cubic.growing)
    return ok, "; ".join(parts), None


def criterion_10():
    chart = chart_from_spec("cn:2")
    cal = kappa_calibrate(chart, 200, seed=7)
    kappa = cal.kappa / 2
    initial = Ball((F(0),), F(1, 2))
    lures = sweep(chart, 100, param_box=initial.box()).params()
    result = play(GameRules("algebraic", F(1, 8), 2), initial, alice_simplex_strategy(chart, kappa),
                  bob_greedy_strategy(lures), 25, {"chart": chart.spec})
    problems = verify_transcript(result)
    rep = replay(result.to_jsonl().splitlines())
    ba = ba_constant(chart, result.final, 10**4, F(1))
    ok = (result.outcome == "completed" and len(result.moves) == 25 and not problems and rep.identical
          and rep.final == result.final and ba.constant > 0
          and result.final.radius == F(1, 2) * F(1, 8) ** 25)
    detail = (f"kappa {kappa}, {len(lures)} lures, {result.outcome} after {len(result.moves)} moves, "
              f"c = {float(ba.constant):.6g} > 0 (witness {ba.witness}), replay identical {rep.identical}")
    return ok, detail, 300


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_criterion(number: int):
    start = time.perf_counter()
    ok, detail, limit = CRITERIA[number - 1]()
    elapsed = time.perf_counter() - start
    in_time = limit is None or elapsed < limit
    budget = "" if limit is None else f" < {limit} s"
    line = f"{'PASS' if ok and in_time else 'FAIL'} criterion {number}: {detail} [{elapsed:.2f} s{budget}]"
    return ok, in_time, line


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number, capsys):
    ok, in_time, line = run_criterion(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line
    assert in_time, line


if __name__ == "__main__":
    failed = 0
    for n in range(1, len(CRITERIA) + 1):
        ok, in_time, line = run_criterion(n)
        print(line, flush=True)
        failed += not (ok and in_time)
    sys.exit(1 if failed else 0)

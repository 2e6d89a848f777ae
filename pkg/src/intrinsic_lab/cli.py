"""Command-line entry point: ``intrinsic-lab <command> ...``.

Exit codes: 0 success, 1 other runtime error, 2 usage, 3 budget exceeded,
4 invariant violation.  Errors are also written to stderr as one JSON record.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .approx import (
    ba_test,
    best_approximations,
    convergent_records,
    dirichlet_test,
    EnumerationCache,
    default_domain,
    exponent_estimate,
    reference_exponent,
    vwa_test,
)
from .arith import fmt_rational
from .charts import DEFAULT_BUDGET, bruteforce_intrinsic, enumerate_atlas, sweep, unit_box
from .constants import N_bruteforce, c_table, dirichlet_constants, format_table, veronese_condition
from .errors import BudgetExceeded, IllegalMove, IntrinsicLabError, SimplexViolation
from .game import (
    Ball,
    GameRules,
    alice_noop_strategy,
    alice_simplex_strategy,
    ba_constant,
    bob_greedy_strategy,
    bob_random_strategy,
    partial_quotients,
    play,
    replay,
    verify_transcript,
)
from .reports import (
    FORMATS,
    RunConfig,
    decimal,
    envelope,
    error_record,
    render_csv,
    render_jsonl,
    render_text,
    write_output,
)
from .simplex import kappa_calibrate, simplex_sweep
from .targets import as_target, quadratic_targets
from .validation import (
    check_box,
    check_chart,
    check_fraction_open,
    check_positive_int,
    check_rational,
    check_seed,
)

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class InvariantFailure(IntrinsicLabError):
    """A cross-check inside a command disagreed; the report is still written."""


@contextlib.contextmanager
def _usage():
    try:
        yield
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc


class Outcome:
    """What a command produced: an envelope plus per-format renderings."""

    def __init__(self, chart, payload, records=(), columns=(), rows=(), text=(), code=EXIT_OK, note=""):
        self.chart = chart
        self.payload = payload
        self.records = list(records)
        self.columns = list(columns)
        self.rows = list(rows)
        self.text = list(text)
        self.code = code
        self.note = note


# ------------------------------------------------------------------ ckd


def cmd_ckd(args, config) -> Outcome:
    with _usage():
        nums = [check_positive_int(v, "argument") for v in args.numbers]
        if args.table is not None:
            if nums:
                raise ValueError("--table takes no positional integers")
            d_max = check_positive_int(args.table, "--table")
        elif args.veronese_condition and len(nums) != 3:
            raise ValueError("--veronese-condition needs k d n")
        elif not args.veronese_condition and len(nums) != 2:
            raise ValueError("ckd needs k d, k d n --veronese-condition, or --table D")
    if args.table is not None:
        table = c_table(d_max)
        rows, lines = [], [format_table(table)]
        disagree = []
        for (k, d), c in sorted(table.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            dc = dirichlet_constants(k, d)
            row = [k, d, dc.n_kd, dc.m_kd, dc.N_kd, c, decimal(c)]
            if args.oracle:
                nb = N_bruteforce(k, d)
                row.append(nb)
                if nb != dc.N_kd:
                    disagree.append((k, d))
            rows.append(row)
        columns = ["k", "d", "n", "m", "N", "c", "c_approx"] + (["N_oracle"] if args.oracle else [])
        records = [{"record": "constant", **dict(zip(columns, r))} for r in rows]
        payload = {"d_max": d_max, "entries": len(rows)}
        if args.oracle:
            payload["oracle_agree"] = not disagree
            lines.append(f"oracle: {'agree' if not disagree else 'DISAGREE at ' + str(disagree)}")
        return Outcome(None, payload, records, columns, rows, lines,
                       EXIT_INVARIANT if disagree else EXIT_OK)
    if args.veronese_condition:
        k, d, n = nums
        with _usage():
            vc = veronese_condition(k, d, n)
        payload = {"k": k, "d": d, "n": n, "holds": vc.holds, "lhs": vc.lhs, "rhs": vc.rhs}
        line = f"{'true' if vc.holds else 'false'} lhs={vc.lhs} rhs={vc.rhs}"
        return Outcome(None, payload, [{"record": "condition", **payload}], list(payload),
                       [list(payload.values())], [line])
    k, d = nums
    with _usage():
        dc = dirichlet_constants(k, d)
    payload = {"k": k, "d": d, "n": dc.n_kd, "m": dc.m_kd, "N": dc.N_kd, "c": dc.c_kd,
               "c_approx": decimal(dc.c_kd)}
    line = f"n={dc.n_kd} m={dc.m_kd} N={dc.N_kd} c={dc.c_kd}"
    code = EXIT_OK
    if args.oracle:
        nb = N_bruteforce(k, d)
        payload["N_oracle"] = nb
        payload["oracle_agree"] = nb == dc.N_kd
        line += f" oracle N={nb} {'agree' if nb == dc.N_kd else 'DISAGREE'}"
        code = EXIT_OK if nb == dc.N_kd else EXIT_INVARIANT
    return Outcome(None, payload, [{"record": "constant", **payload}], list(payload),
                   [list(payload.values())], [line], code)


# ------------------------------------------------------------ enumerate


def cmd_enumerate(args, config) -> Outcome:
    with _usage():
        chart = check_chart(args.chart)
        if args.domain:
            chart = chart.with_domain(check_box(args.domain, chart.k, "--domain"))
        T = check_positive_int(args.height, "--height")
        box = check_box(args.box, chart.d) if args.box else unit_box(chart.d)
    found = enumerate_atlas(chart, T, box, budget=config.budget)
    records, rows = [], []
    for point, piece, t in found:
        coords = [fmt_rational(x) for x in point.coords()]
        params = [fmt_rational(x) for x in t]
        records.append({"record": "point", "height": point.height, "point": coords, "chart": piece,
                        "param": params})
        rows.append([point.height, *coords, piece, *params])
    columns = ["height"] + [f"x{i + 1}" for i in range(chart.d)] + ["chart"] + [f"t{i + 1}" for i in range(chart.k)]
    payload = {"T": T, "box": [list(side) for side in box], "domain": [list(side) for side in chart.domain],
               "points": len(found)}
    code = EXIT_OK
    if args.oracle:
        oracle = set(bruteforce_intrinsic(chart.implicit_eqs, T, box, budget=config.budget))
        mine = {p for p, _, _ in found}
        payload["oracle_points"] = len(oracle)
        payload["missing"] = sorted(str(p) for p in oracle - mine)
        payload["extra"] = sorted(str(p) for p in mine - oracle)
        payload["oracle_agree"] = oracle == mine
        code = EXIT_OK if oracle == mine else EXIT_INVARIANT
    text = [f"{len(found)} points of height <= {T}"] + [f"{str(p)}  [{piece} t=({', '.join(map(fmt_rational, t))})]"
                                                        for p, piece, t in found]
    if args.oracle:
        text.append(f"oracle: {payload['oracle_points']} points, {'agree' if payload['oracle_agree'] else 'DISAGREE'}")
    return Outcome(chart.spec, payload, records, columns, rows, text, code)


# -------------------------------------------------------------- simplex


def cmd_simplex(args, config) -> Outcome:
    with _usage():
        chart = check_chart(args.chart)
        samples = check_positive_int(args.samples, "--samples")
        rho_min = check_rational(args.rho_min, "--rho-min", positive=True, upper=Fraction(1))
        rho_range = (rho_min, Fraction(1))
        precision = check_rational(args.precision_kappa, "--calibration-precision", positive=True)
        kappa = check_rational(args.kappa, "--kappa", nonnegative=True) if args.kappa is not None else None
    payload = {"samples": samples, "rho_range": list(rho_range), "seed": config.seed}
    if args.calibrate:
        cal = kappa_calibrate(chart, samples, precision, config.seed, rho_range, workers=config.workers,
                              budget=config.budget)
        payload["calibration"] = {"kappa": cal.kappa, "kappa_approx": decimal(cal.kappa), "precision": precision,
                                  "doubled_failures": cal.doubled_failures, "doubled_verdict": cal.doubled_verdict}
        if kappa is None:
            kappa = cal.kappa
    if kappa is None:
        kappa = Fraction(1, 10)
    report = simplex_sweep(chart, samples, rho_range, kappa, config.seed, config.workers, config.budget)
    summary = report.summary()
    payload.update({"kappa": kappa, "pass_rate": report.pass_rate, "failures": len(report.failures),
                    "worst": summary["worst"]})
    broken = [r.index for r in report.failures if r.failure is not None and not r.failure.integrality_holds]
    payload["integrality_violations"] = broken
    records = [{"record": "sample", **r.to_json()} for r in report.records]
    columns = ["index", "center", "radius", "kappa", "height_bound", "size", "rank", "passed", "det"]
    rows = [[r.index, " ".join(fmt_rational(x) for x in r.center), r.radius, r.kappa, r.height_bound, r.size,
             r.rank, r.passed, "" if r.failure is None else fmt_rational(r.failure.det)] for r in report.records]
    text = [f"chart {chart.spec}: {report.samples} samples, kappa={kappa}, "
            f"pass rate {fmt_rational(report.pass_rate)} ({float(report.pass_rate):.2%})"]
    if args.calibrate:
        text.append(f"calibrated kappa {fmt_rational(payload['calibration']['kappa'])} "
                    f"(doubled: {payload['calibration']['doubled_verdict']})")
    for r in report.failures[:10]:
        text.append(f"failure #{r.index}: rank {r.rank} from {r.size} points, det {fmt_rational(r.failure.det)}")
    code = EXIT_OK
    if broken or (args.strict and report.failures):
        code = EXIT_INVARIANT
    return Outcome(chart.spec, payload, records, columns, rows, text, code)


# ------------------------------------------------------------- exponent


def cmd_exponent(args, config) -> Outcome:
    with _usage():
        chart = check_chart(args.chart)
        target = as_target(args.target)
        if target.k != chart.k:
            raise ValueError(f"target has {target.k} coordinates, chart {chart.spec} has {chart.k} parameters")
        T = check_positive_int(args.height, "--height", minimum=2)
        chart = chart.with_domain(check_box(args.domain, chart.k, "--domain")) if args.domain \
            else default_domain(chart, target)
        c = check_rational(args.c, "--c", positive=True) if args.c is not None else reference_exponent(chart)
        tail = check_rational(args.tail, "--tail", positive=True, upper=Fraction(1))
        convergent_ok = chart.k == 1 and chart.param_height_bound.kind == "root"
        method = args.method
        if method == "auto":
            method = "both" if convergent_ok else "enumerate"
        if method in ("convergent", "both") and not convergent_ok:
            raise ValueError(f"convergent records need a one-parameter chart with height H(t)^n, not {chart.spec}")
    spec = target.spec()
    code = EXIT_OK
    payload = {"target": spec, "T": T, "domain": [list(side) for side in chart.domain], "method": method, "c": c}
    if method == "enumerate":
        records = best_approximations(chart, target, T, budget=config.budget)
    else:
        records = convergent_records(chart, target, T, budget=config.budget)
        if method == "both":
            other = best_approximations(chart, target, T, budget=config.budget)
            agree = [(r.height, r.witness) for r in records] == [(r.height, r.witness) for r in other]
            payload["oracle_agree"] = agree
            if not agree:
                code = EXIT_INVARIANT
    est = exponent_estimate(records, reference_exponent(chart), tail)
    payload["estimate"] = est.summary()
    payload["c_reference"] = reference_exponent(chart)
    payload["ba"] = _ba_summary(records, c)
    payload["vwa"] = _vwa_summary(records, c)
    rec_json = [{"record": "approximation", **r.to_json(spec)} for r in records]
    columns = ["height", "distance", "error", "distance_approx", "witness", "log_ratio_approx"]
    rows = []
    for r in records:
        ratio = ""
        if r.distance > 0 and r.height > 1:
            ratio = decimal(-math.log(float(r.distance)) / math.log(r.height))
        rows.append([r.height, r.distance, r.error, decimal(r.distance), str(r.witness), ratio])
    text = [f"{len(records)} records for {spec} on {chart.spec} up to height {T} ({method})",
            f"tail exponent {est.tail_slope:.6f}  overall slope {est.slope:.6f}  "
            f"tail ratio range [{est.tail_inf:.4f}, {est.tail_sup:.4f}]",
            f"reference c(k,d) = {payload['c_reference']}"]
    if "oracle_agree" in payload:
        text.append(f"convergent oracle vs enumeration: {'agree' if payload['oracle_agree'] else 'DISAGREE'}")
    text.append(f"BA at c={c}: {payload['ba'].get('verdict')}; "
                f"VWA: {payload['vwa'].get('verdict')}")
    return Outcome(chart.spec, payload, rec_json, columns, rows, text, code)


def _ba_summary(records, c) -> dict:
    try:
        t = ba_test(records, c)
    except IntrinsicLabError as exc:
        return {"verdict": None, "reason": str(exc)}
    return {"verdict": t.verdict, "inf_lower": t.infimum[0], "inf_approx": decimal(t.infimum[0]),
            "witness": str(t.witness.witness)}


def _vwa_summary(records, c) -> dict:
    try:
        t = vwa_test(records, c)
    except IntrinsicLabError as exc:
        return {"verdict": None, "reason": str(exc)}
    return {"verdict": t.verdict, "epsilon": t.epsilon}


# ------------------------------------------------------------ dirichlet


def cmd_dirichlet(args, config) -> Outcome:
    with _usage():
        chart = check_chart(args.chart)
        if chart.k != 1:
            raise ValueError("seeded quadratic targets need a one-parameter chart")
        if args.domain:
            chart = chart.with_domain(check_box(args.domain, chart.k, "--domain"))
        count = check_positive_int(args.targets, "--targets")
        T = check_positive_int(args.height, "--height", minimum=4)
        c = check_rational(args.c, "--c", positive=True)
    (lo, hi), = chart.domain
    targets = quadratic_targets(count, config.seed, lo, hi)
    cache = EnumerationCache(config.budget)
    test = dirichlet_test(chart, targets, c, T, cache, config.budget)
    payload = {"targets": count, "T": T, "c": c, "constant_approx": test.constant,
               "ratios_approx": list(test.ratios), "stable": test.stable, "growing": test.growing,
               "witness_target": targets[test.witness[0]].spec() if test.witness[0] >= 0 else None,
               "witness_height": test.witness[1]}
    records = [{"record": "constant", "h": h, "constant_approx": v} for h, v in test.constants]
    rows = [[h, decimal(v)] for h, v in test.constants]
    text = [f"{count} targets on {chart.spec}, c={c}, T={T}",
            f"constant {test.constant:.6g}; last ratios {', '.join(f'{r:.4f}' for r in test.ratios)}",
            f"stable={test.stable} growing={test.growing}"]
    return Outcome(chart.spec, payload, records, ["h", "constant_approx"], rows, text)


# ----------------------------------------------------------------- game


def cmd_game(args, config) -> Outcome:
    if args.replay:
        return _replay(args)
    with _usage():
        if not args.chart:
            raise ValueError("game needs a chart specifier (or --replay FILE)")
        chart = check_chart(args.chart)
        beta = check_fraction_open(args.beta, "--beta")
        depth = check_positive_int(args.depth, "--depth", minimum=0)
        degree = check_positive_int(args.degree, "--degree") if args.degree else max(1, chart.degree)
        kind = args.kind or ("hyperplane" if chart.spec.startswith("identity:") else "algebraic")
        rules = GameRules(kind, beta, degree)
        center = tuple(check_rational(x, "--center") for x in args.center.split(",")) if args.center \
            else tuple(Fraction(0) for _ in range(chart.k))
        if len(center) != chart.k:
            raise ValueError(f"--center needs {chart.k} coordinates")
        radius = check_rational(args.radius, "--radius", positive=True)
        initial = Ball(center, radius)
        lure_height = check_positive_int(args.lure_height, "--lure-height")
        ba_height = check_positive_int(args.ba_height, "--ba-height")
        ba_c = check_rational(args.ba_c, "--ba-c", nonnegative=True) if args.ba_c is not None \
            else reference_exponent(chart)
        kappa = check_rational(args.kappa, "--kappa", nonnegative=True) if args.kappa is not None else None
        calib_samples = check_positive_int(args.calibration_samples, "--calibration-samples")
    payload = {"rules": rules.to_json(), "initial": initial.to_json(), "depth": depth}
    if args.alice == "simplex":
        if kappa is None:
            cal = kappa_calibrate(chart, calib_samples, seed=config.seed, workers=config.workers,
                                  budget=config.budget)
            kappa = cal.kappa / 2
            payload["calibration"] = {"calibrated": cal.kappa, "samples": calib_samples, "safety_factor": "1/2"}
        payload["kappa"] = kappa
        alice = alice_simplex_strategy(chart, kappa, budget=config.budget)
    else:
        alice = alice_noop_strategy(radius)
    if args.bob == "greedy":
        lures = sweep(chart, lure_height, param_box=initial.box(), budget=config.budget).params()
        payload["lures"] = len(lures)
        bob = bob_greedy_strategy(lures)
    else:
        bob = bob_random_strategy(config.seed)
    meta = {"chart": chart.spec, "alice": args.alice, "bob": args.bob, "seed": config.seed}
    result = play(rules, initial, alice, bob, depth, meta)
    problems = verify_transcript(result)
    rep = replay(result.to_jsonl().splitlines())
    try:
        ba = ba_constant(chart, result.final, ba_height, ba_c, budget=config.budget)
        ba_json = {"c": ba.c, "lower_bound": ba.constant, "lower_bound_approx": decimal(ba.constant),
                   "witness": ba.witness, "checked": ba.checked, "height": ba_height}
        ba_text = f"BA constant (c={ba.c}, height <= {ba_height}): {decimal(ba.constant)} at {ba.witness}"
    except BudgetExceeded as exc:
        # the game itself is still valid; only the post-hoc sweep was too large
        ba_json = {"c": ba_c, "lower_bound": None, "height": ba_height, "reason": str(exc)}
        ba_text = f"BA constant (c={ba_c}, height <= {ba_height}): skipped, {exc}; lower --ba-height"
    payload.update({
        "outcome": result.outcome,
        "moves": len(result.moves),
        "final": result.final.to_json(),
        "enclosure": [list(side) for side in result.enclosure()],
        "transcript_problems": problems,
        "replay_identical": rep.identical,
        "ba_constant": ba_json,
    })
    if chart.k == 1:
        payload["partial_quotients"] = partial_quotients(result.final)
    code = EXIT_INVARIANT if problems or not rep.identical else EXIT_OK
    columns = ["move", "player", "verdict", "detail"]
    rows = []
    for rec in result.transcript[1:-1]:
        detail = rec.get("deletion") if rec["player"] == "alice" else rec.get("ball")
        rows.append([rec["move"], rec["player"], rec["verdict"], "" if detail is None else str(detail)])
    text = [f"{chart.spec} {kind} game, beta={beta}, depth {depth}: {result.outcome} "
            f"after {len(result.moves)} moves",
            f"final ball center {', '.join(map(fmt_rational, result.final.center))} "
            f"radius {result.final.radius}",
            f"transcript check: {'ok' if not problems else problems}; replay identical: {rep.identical}",
            ba_text]
    out = Outcome(chart.spec, payload, result.transcript, columns, rows, text, code)
    out.transcript = result.to_jsonl()
    return out


def _replay(args) -> Outcome:
    with open(args.replay, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    with _usage():
        try:
            records = [json.loads(ln) for ln in lines]
        except json.JSONDecodeError as exc:
            raise ValueError(f"{args.replay} is not line-delimited JSON: {exc}") from exc
        game_lines = [ln for ln, rec in zip(lines, records)
                      if isinstance(rec, dict) and rec.get("record") in ("header", "move", "result")]
        if not game_lines:
            raise ValueError(f"{args.replay} holds no game transcript")
    try:
        rep = replay(game_lines)
    except (ValueError, KeyError, TypeError) as exc:
        raise InvariantFailure(f"transcript does not replay: {exc}") from exc
    header = json.loads(game_lines[0])
    chart = header.get("meta", {}).get("chart")
    payload = {"file": os.path.basename(args.replay), "moves": rep.moves, "outcome": rep.outcome,
               "final": rep.final.to_json(), "identical": rep.identical}
    text = [f"replayed {rep.moves} moves: {rep.outcome}; byte-identical: {rep.identical}"]
    return Outcome(chart, payload, [], list(payload), [list(payload.values())], text,
                   EXIT_OK if rep.identical else EXIT_INVARIANT)


# --------------------------------------------------------------- parser


def _shared(p: argparse.ArgumentParser, default_format: str) -> None:
    g = p.add_argument_group("run options")
    g.add_argument("--seed", default="0", help="64-bit seed (default 0)")
    g.add_argument("--budget", default=str(DEFAULT_BUDGET), help="max candidates per enumeration")
    g.add_argument("--format", choices=FORMATS, default=default_format, dest="fmt")
    g.add_argument("--output", "-o", default=None, help="output file (default stdout)")
    g.add_argument("--precision", default="2^-64", help="enclosure width target for algebraic targets")
    g.add_argument("--workers", default=None, help="worker processes (default: all CPUs)")
    g.add_argument("--emit-config", action="store_true", help="print the resolved config and exit")
    g.add_argument("--timing", action="store_true", help="report wall time on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intrinsic-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ckd", help="intrinsic Dirichlet exponents c(k,d)")
    p.add_argument("numbers", nargs="*", help="k d, or k d n with --veronese-condition")
    p.add_argument("--table", default=None, metavar="D", help="all c(k,d) with k <= d <= D")
    p.add_argument("--veronese-condition", action="store_true")
    p.add_argument("--oracle", action="store_true", help="cross-check N against the direct minimization")
    _shared(p, "text")

    p = sub.add_parser("enumerate", help="intrinsic rational points up to a height")
    p.add_argument("chart")
    p.add_argument("--height", required=True)
    p.add_argument("--box", default=None, help="ambient box lo..hi or lo..hi,lo..hi (default [-1,1]^d)")
    p.add_argument("--domain", default=None, help="parameter box (default [-1,1]^k)")
    p.add_argument("--oracle", action="store_true", help="diff against the implicit-equation brute force")
    _shared(p, "jsonl")

    p = sub.add_parser("simplex", help="hyperplane containment of low-height points in balls")
    p.add_argument("chart")
    p.add_argument("--kappa", default=None, help="default 1/10, or the calibrated value with --calibrate")
    p.add_argument("--samples", default="1000")
    p.add_argument("--rho-min", default="2^-20")
    p.add_argument("--calibrate", action="store_true", help="estimate the largest passing kappa first")
    p.add_argument("--calibration-precision", dest="precision_kappa", default="1/64")
    p.add_argument("--strict", action="store_true", help="exit 4 on any failed sample")
    _shared(p, "jsonl")

    p = sub.add_parser("exponent", help="best approximations and their exponent")
    p.add_argument("chart")
    p.add_argument("--target", required=True, help='e.g. phi, 1/3, liouville:10, "x^2-x-1,[1,2]"')
    p.add_argument("--height", required=True)
    p.add_argument("--domain", default=None)
    p.add_argument("--method", choices=("auto", "enumerate", "convergent", "both"), default="auto")
    p.add_argument("--c", default=None, help="exponent for the BA/VWA tests (default c(k,d))")
    p.add_argument("--tail", default="1/2", help="fraction of the log-height range used for the tail fit")
    _shared(p, "jsonl")

    p = sub.add_parser("dirichlet", help="uniform Dirichlet constant over seeded algebraic targets")
    p.add_argument("chart")
    p.add_argument("--targets", default="100")
    p.add_argument("--height", default="2^16")
    p.add_argument("--c", default="1")
    p.add_argument("--domain", default=None)
    _shared(p, "jsonl")

    p = sub.add_parser("game", help="play, check and replay absolute games")
    p.add_argument("chart", nargs="?")
    p.add_argument("--beta", default="1/8")
    p.add_argument("--depth", default="25")
    p.add_argument("--kind", choices=("hyperplane", "algebraic", "levelset"), default=None)
    p.add_argument("--degree", default=None, help="degree bound D (default: chart degree)")
    p.add_argument("--alice", choices=("simplex", "noop"), default="simplex")
    p.add_argument("--bob", choices=("greedy", "random"), default="greedy")
    p.add_argument("--center", default=None, help="initial center, comma separated")
    p.add_argument("--radius", default="1/2")
    p.add_argument("--kappa", default=None, help="default: half the calibrated value")
    p.add_argument("--calibration-samples", default="200")
    p.add_argument("--lure-height", default="100")
    p.add_argument("--ba-height", default="10000")
    p.add_argument("--ba-c", default=None, help="exponent in the BA constant (default c(k,d))")
    p.add_argument("--transcript", default=None, help="also write the bare replayable transcript here")
    p.add_argument("--replay", default=None, metavar="FILE", help="re-validate a recorded transcript")
    _shared(p, "jsonl")
    return parser


COMMANDS = {"ckd": cmd_ckd, "enumerate": cmd_enumerate, "simplex": cmd_simplex, "exponent": cmd_exponent,
            "dirichlet": cmd_dirichlet, "game": cmd_game}

_CONFIG_SKIP = {"command", "seed", "budget", "fmt", "output", "precision", "workers", "emit_config", "timing"}


def _config(args) -> RunConfig:
    with _usage():
        seed = check_seed(args.seed)
        budget = check_positive_int(args.budget, "--budget")
        precision = check_rational(args.precision, "--precision", positive=True)
        workers = check_positive_int(args.workers, "--workers") if args.workers else (os.cpu_count() or 1)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _CONFIG_SKIP}
    return RunConfig(args.command, params, seed, budget, args.fmt, args.output, precision, workers)


def render(outcome: Outcome, config: RunConfig) -> str:
    env = envelope(config, outcome.chart, outcome.payload)
    if config.fmt == "jsonl":
        return render_jsonl(env, outcome.records)
    if config.fmt == "csv":
        return render_csv(env, outcome.columns, outcome.rows)
    return render_text(env, outcome.text)


_VALUE_OPTIONS = {"--box", "--domain", "--center", "--rho-min", "--kappa", "--c", "--target", "--precision"}


def _glue_negative_values(argv):
    """Turn ``--box -1..1`` into ``--box=-1..1`` so argparse does not read an option."""
    out = []
    for token in argv:
        if out and out[-1] in _VALUE_OPTIONS and token[:1] == "-" and token[1:2] not in ("", "-") \
                and not token[1:2].isalpha():
            out[-1] = f"{out[-1]}={token}"
        else:
            out.append(token)
    return out


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        config = _config(args)
        if args.emit_config:
            stdout.write(json.dumps(config.to_json(), sort_keys=True) + "\n")
            return EXIT_OK
        outcome = COMMANDS[args.command](args, config)
        text = render(outcome, config)
        write_output(text, config.output, stdout)
        transcript = getattr(outcome, "transcript", None)
        if transcript is not None and getattr(args, "transcript", None):
            write_output(transcript, args.transcript, stdout)
        code = outcome.code
    except UsageError as exc:
        stderr.write(error_record(EXIT_USAGE, exc))
        return EXIT_USAGE
    except BudgetExceeded as exc:
        stderr.write(error_record(EXIT_BUDGET, exc))
        return EXIT_BUDGET
    except (SimplexViolation, IllegalMove, InvariantFailure) as exc:
        stderr.write(error_record(EXIT_INVARIANT, exc))
        return EXIT_INVARIANT
    except (IntrinsicLabError, OSError) as exc:
        code = EXIT_USAGE if isinstance(exc, ValueError) else EXIT_ERROR
        stderr.write(error_record(code, exc))
        return code
    if args.timing:
        stderr.write(f"wall time {time.perf_counter() - start:.3f} s\n")
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Hyperplane, algebraic-set and levelset games on balls in parameter space.

Balls are closed max-norm boxes.  Each round Alice names a set A_n and Bob
answers with a ball B_{n+1} inside B_n avoiding the closed (beta * rho_n)
neighbourhood of A_n, with rho_{n+1} >= beta * rho_n (equal in simulation
mode).  A player who cannot move loses.  Every verdict here is exact, except
algebraic deletions in two or more variables, which are certified by interval
subdivision or else reported as unknown.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .arith import as_fraction, fmt_rational, power_bounds, primitive_integer_vector
from .charts import DEFAULT_BUDGET, Chart, sweep
from .errors import IllegalMove, SimplexViolation
from .polys import MPoly, isolate_roots, usup_abs_bounds
from .simplex import Hyperplane, SimplexQuery, collect_S, hyperplane_containment
from .targets import cf_quotients

GAME_KINDS = ("hyperplane", "algebraic", "levelset")


def _fr(x: str | int | Fraction) -> Fraction:
    return as_fraction(x)


@dataclass(frozen=True)
class Ball:
    center: tuple[Fraction, ...]
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(as_fraction(c) for c in self.center))
        object.__setattr__(self, "radius", as_fraction(self.radius))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    @property
    def k(self) -> int:
        return len(self.center)

    def box(self, pad: Fraction = Fraction(0)) -> tuple[tuple[Fraction, Fraction], ...]:
        r = self.radius + pad
        return tuple((c - r, c + r) for c in self.center)

    def contains_ball(self, other: "Ball") -> bool:
        return all(abs(a - b) + other.radius <= self.radius for a, b in zip(self.center, other.center))

    def contains_point(self, x: Sequence[Fraction]) -> bool:
        return all(abs(a - b) <= self.radius for a, b in zip(self.center, x))

    def to_json(self) -> dict:
        return {"center": [fmt_rational(c) for c in self.center], "radius": fmt_rational(self.radius)}

    @classmethod
    def from_json(cls, data: dict) -> "Ball":
        return cls(tuple(_fr(c) for c in data["center"]), _fr(data["radius"]))


# ------------------------------------------------------------------ deletions


@dataclass(frozen=True)
class HyperplaneDeletion:
    """{x : w.x = b} with integer, jointly primitive (w, b)."""

    normal: tuple[int, ...]
    offset: int
    kind = "hyperplane"

    def __post_init__(self):
        if not any(self.normal):
            raise ValueError("hyperplane normal must be nonzero")

    @classmethod
    def through(cls, normal: Sequence, offset) -> "HyperplaneDeletion":
        v = primitive_integer_vector([as_fraction(w) for w in normal] + [as_fraction(offset)])
        return cls(tuple(v[:-1]), v[-1])

    @property
    def degree(self) -> int:
        return 1

    def polynomial(self) -> MPoly:
        k = len(self.normal)
        f = MPoly.const(k, -self.offset)
        for i, w in enumerate(self.normal):
            f = f + MPoly.var(k, i) * w
        return f

    def to_json(self) -> dict:
        return {"kind": self.kind, "normal": list(self.normal), "offset": self.offset}


def _poly_json(f: MPoly) -> list:
    return [[list(e), fmt_rational(c)] for e, c in f.terms]


def _poly_from_json(k: int, data: list) -> MPoly:
    return MPoly.from_dict(k, {tuple(e): _fr(c) for e, c in data})


@dataclass(frozen=True)
class AlgebraicDeletion:
    """Zero set of a nonzero polynomial in k variables."""

    poly: MPoly
    kind = "algebraic"

    def __post_init__(self):
        if self.poly.is_zero():
            raise ValueError("algebraic deletion needs a nonzero polynomial")

    @property
    def degree(self) -> int:
        return self.poly.degree

    def polynomial(self) -> MPoly:
        return self.poly

    def to_json(self) -> dict:
        return {"kind": self.kind, "poly": _poly_json(self.poly)}


@dataclass(frozen=True)
class LevelsetDeletion:
    """Zero set of f, admitted when the C^(D+1) norm on the ball is at most C1 times the C^D norm.

    Only one-variable polynomials are accepted, so that both norms have exact
    enclosures.
    """

    poly: MPoly
    kind = "levelset"

    def __post_init__(self):
        if self.poly.nvars != 1:
            raise ValueError("levelset deletions are supported for one parameter only")
        if self.poly.is_zero():
            raise ValueError("levelset deletion needs a nonzero function")

    @property
    def degree(self) -> int:
        return self.poly.degree

    def polynomial(self) -> MPoly:
        return self.poly

    def to_json(self) -> dict:
        return {"kind": self.kind, "poly": _poly_json(self.poly)}


Deletion = HyperplaneDeletion | AlgebraicDeletion | LevelsetDeletion


def deletion_from_json(k: int, data: dict) -> Deletion:
    kind = data["kind"]
    if kind == "hyperplane":
        return HyperplaneDeletion(tuple(int(w) for w in data["normal"]), int(data["offset"]))
    if kind == "algebraic":
        return AlgebraicDeletion(_poly_from_json(k, data["poly"]))
    if kind == "levelset":
        return LevelsetDeletion(_poly_from_json(k, data["poly"]))
    raise ValueError(f"unknown deletion kind {kind!r}")


def cd_norm_bounds(f: MPoly, lo: Fraction, hi: Fraction, order: int) -> tuple[Fraction, Fraction]:
    """Enclosure of max_{j <= order} sup_[lo, hi] |f^(j)|."""
    best_lo = best_hi = Fraction(0)
    g = f.to_univariate()
    for _ in range(order + 1):
        a, b = usup_abs_bounds(g, lo, hi)
        best_lo, best_hi = max(best_lo, a), max(best_hi, b)
        g = tuple(i * c for i, c in enumerate(g))[1:]
        if not g:
            break
    return best_lo, best_hi


# ------------------------------------------------------------------ state


@dataclass(frozen=True)
class GameRules:
    kind: str
    beta: Fraction
    degree: int = 1  # D
    c1: Fraction = Fraction(1)
    mode: str = "simulation"

    def __post_init__(self):
        if self.kind not in GAME_KINDS:
            raise ValueError(f"game kind must be one of {GAME_KINDS}")
        beta = as_fraction(self.beta)
        if not 0 < beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "c1", as_fraction(self.c1))
        if self.mode not in ("simulation", "tournament"):
            raise ValueError("mode must be simulation or tournament")
        if self.degree < 1:
            raise ValueError("degree bound must be >= 1")

    def to_json(self) -> dict:
        return {"kind": self.kind, "beta": fmt_rational(self.beta), "D": self.degree,
                "C1": fmt_rational(self.c1), "mode": self.mode}

    @classmethod
    def from_json(cls, data: dict) -> "GameRules":
        return cls(data["kind"], _fr(data["beta"]), int(data["D"]), _fr(data["C1"]), data["mode"])


@dataclass
class GameState:
    rules: GameRules
    ball: Ball
    history: list[tuple[Ball, Deletion]] = field(default_factory=list)
    pending: Deletion | None = None

    @property
    def n(self) -> int:
        return len(self.history)

    @property
    def k(self) -> int:
        return self.ball.k

    @property
    def thickness(self) -> Fraction:
        return self.rules.beta * self.ball.radius


@dataclass(frozen=True)
class Verdict:
    legal: bool
    reason: str | None = None  # containment | radius | deletion | unknown | rules
    detail: str = ""

    def label(self) -> str:
        return "legal" if self.legal else f"illegal:{self.reason}"


LEGAL = Verdict(True)


def check_deletion(rules: GameRules, deletion: Deletion, ball: Ball) -> Verdict:
    """Is this set an admissible choice for Alice in the given game?"""
    if deletion.kind == "hyperplane":
        if len(deletion.normal) != ball.k:
            return Verdict(False, "rules", "hyperplane dimension mismatch")
        return LEGAL
    if rules.kind == "hyperplane":
        return Verdict(False, "rules", f"{deletion.kind} deletion in the hyperplane game")
    if deletion.kind != rules.kind:
        return Verdict(False, "rules", f"{deletion.kind} deletion in the {rules.kind} game")
    if deletion.poly.nvars != ball.k:
        return Verdict(False, "rules", "polynomial variable count mismatch")
    if deletion.kind == "algebraic":
        if deletion.degree > rules.degree:
            return Verdict(False, "rules", f"degree {deletion.degree} exceeds D = {rules.degree}")
        return LEGAL
    (lo, hi), = ball.box()
    top_lo, top_hi = cd_norm_bounds(deletion.poly, lo, hi, rules.degree + 1)
    base_lo, base_hi = cd_norm_bounds(deletion.poly, lo, hi, rules.degree)
    if top_hi <= rules.c1 * base_lo:
        return LEGAL
    if top_lo > rules.c1 * base_hi:
        return Verdict(False, "rules", "C^(D+1) norm exceeds C1 times the C^D norm")
    return Verdict(False, "unknown", "norm inequality not certified")


def _interval_nonzero(f: MPoly, box, depth: int) -> bool | None:
    """True if f has no zero on the box (certified), False if a zero was found, None if undecided."""
    stack = [(tuple(box), 0)]
    while stack:
        b, level = stack.pop()
        lo, hi = f.eval_interval(b)
        if lo > 0 or hi < 0:
            continue
        mid = tuple((a + c) / 2 for a, c in b)
        if f(mid) == 0 or any(f(corner) == 0 for corner in _corners(b)):
            return False
        if level >= depth:
            return None
        i = max(range(len(b)), key=lambda j: b[j][1] - b[j][0])
        a, c = b[i]
        m = (a + c) / 2
        stack.append((b[:i] + ((m, c),) + b[i + 1:], level + 1))
        stack.append((b[:i] + ((a, m),) + b[i + 1:], level + 1))
    return True


def _corners(box):
    out = [()]
    for a, c in box:
        out = [p + (x,) for p in out for x in (a, c)]
    return out


def avoids(deletion: Deletion, ball: Ball, eps: Fraction, depth: int = 12) -> Verdict:
    """Does the closed ball miss the closed eps-neighbourhood of the deleted set?

    Equivalently: the deleted set misses the ball thickened by eps.
    """
    if deletion.kind == "hyperplane":
        w = deletion.normal
        value = sum(a * c for a, c in zip(w, ball.center)) - deletion.offset
        l1 = sum(abs(a) for a in w)
        # max-norm distance from the box to the hyperplane is (|w.c - b| - rho*|w|_1) / |w|_1
        if abs(value) > (ball.radius + eps) * l1:
            return LEGAL
        return Verdict(False, "deletion", "ball meets the thickened hyperplane")
    f = deletion.polynomial()
    box = ball.box(eps)
    if ball.k == 1:
        (lo, hi), = box
        roots = isolate_roots(f.to_univariate(), lo, hi)
        if not roots:
            return LEGAL
        return Verdict(False, "deletion", f"{len(roots)} deleted point(s) within distance {eps}")
    res = _interval_nonzero(f, box, depth)
    if res:
        return LEGAL
    if res is None:
        return Verdict(False, "unknown", "sign of the polynomial not certified on the thickened ball")
    return Verdict(False, "deletion", "ball meets the thickened zero set")


def legal_move(state: GameState, proposed: Ball) -> Verdict:
    if state.pending is None:
        raise ValueError("no pending deletion")
    if proposed.k != state.k:
        return Verdict(False, "containment", "dimension mismatch")
    need = state.rules.beta * state.ball.radius
    if state.rules.mode == "simulation" and proposed.radius != need:
        return Verdict(False, "radius", f"radius must equal beta * rho = {need}")
    if proposed.radius < need:
        return Verdict(False, "radius", f"radius below beta * rho = {need}")
    if not state.ball.contains_ball(proposed):
        return Verdict(False, "containment", "proposed ball leaves the current ball")
    return avoids(state.pending, proposed, state.thickness)


def point_deleted(deletion: Deletion, x: Sequence[Fraction], eps: Fraction) -> bool:
    """Is x in the closed eps-neighbourhood of the deleted set (k = 1 or hyperplanes exactly)?"""
    if deletion.kind == "hyperplane":
        v = sum(a * c for a, c in zip(deletion.normal, x)) - deletion.offset
        return abs(v) <= eps * sum(abs(a) for a in deletion.normal)
    if len(x) == 1:
        return bool(isolate_roots(deletion.polynomial().to_univariate(), x[0] - eps, x[0] + eps))
    return _interval_nonzero(deletion.polynomial(), tuple((c - eps, c + eps) for c in x), 12) is not True


# ------------------------------------------------------------------ strategies


AliceStrategy = Callable[[GameState], Deletion]
BobStrategy = Callable[[GameState], "Ball | None"]


def noop_deletion(state: GameState, rho0: Fraction) -> Deletion:
    """The hyperplane x_1 = c_1 + 10 rho_0, far outside every ball of the game."""
    normal = [1] + [0] * (state.k - 1)
    return HyperplaneDeletion.through(normal, state.ball.center[0] + 10 * rho0)


def pullback(chart: Chart, plane: Hyperplane) -> MPoly:
    """Numerator of w.Psi(t) - b over a common denominator, as a polynomial in t."""
    k = chart.k
    num, den = MPoly.const(k, -plane.offset), MPoly.const(k, 1)
    for w, f in zip(plane.normal, chart.coords):
        if not w:
            continue
        if f.den == den:
            num = num + f.num * w
        else:
            num, den = num * f.den + f.num * den * w, den * f.den
    return num


def alice_simplex_strategy(chart: Chart, kappa, rho0: Fraction | None = None,
                           budget: int = DEFAULT_BUDGET) -> AliceStrategy:
    """Delete the neighbourhood of Psi^-1(L), L the hyperplane holding S(s_n, 2 rho_n).

    Dummy (no-op) moves are made while 2 rho_n > 1.
    """
    kappa = as_fraction(kappa)

    def play(state: GameState) -> Deletion:
        r0 = rho0 if rho0 is not None else (state.history[0][0].radius if state.history else state.ball.radius)
        radius = 2 * state.ball.radius
        if radius > 1:
            return noop_deletion(state, r0)
        points = collect_S(SimplexQuery(chart, state.ball.center, radius, kappa), budget)
        report = hyperplane_containment(points, chart.d)
        if not report.passed:
            raise SimplexViolation(f"S at move {state.n} spans rank {report.rank}", report.failure)
        if report.hyperplane is None:
            return noop_deletion(state, r0)
        if state.rules.kind == "hyperplane":
            if chart.spec != f"identity:{chart.d}":
                raise ValueError("hyperplane game needs the identity chart")
            return HyperplaneDeletion(report.hyperplane.normal, report.hyperplane.offset)
        f = pullback(chart, report.hyperplane)
        if f.is_zero():
            raise SimplexViolation("hyperplane contains the whole chart image")
        if state.rules.kind == "levelset":
            return LevelsetDeletion(f)
        return AlgebraicDeletion(f)

    return play


def alice_noop_strategy(rho0: Fraction) -> AliceStrategy:
    return lambda state: noop_deletion(state, rho0)


def bob_grid(state: GameState) -> list[Ball]:
    """Balls of radius beta*rho_n centred on a ceil(2/beta)-per-axis grid inside B_n."""
    rho = state.ball.radius
    r = state.rules.beta * rho
    steps = math.ceil(2 / state.rules.beta)
    span = 2 * (rho - r)
    axes = [[c - rho + r + span * i / steps for i in range(steps + 1)] for c in state.ball.center]
    centers = [()]
    for axis in axes:
        centers = [p + (x,) for p in centers for x in axis]
    return [Ball(c, r) for c in centers]


def bob_greedy_strategy(lures: Iterable[Sequence]) -> BobStrategy:
    """Legal grid ball nearest to the nearest lure not yet deleted; None when stuck.

    Distances used for the choice are floats (a heuristic, deterministic);
    membership of lures in the current ball is decided exactly.
    """
    lures = [tuple(as_fraction(x) for x in p) for p in lures]
    approx = np.array([[float(x) for x in p] for p in lures]) if lures else np.zeros((0, 1))

    def play(state: GameState) -> Ball | None:
        c = np.array([float(x) for x in state.ball.center])
        slack = float(state.ball.radius) * (1 + 1e-9) + 1e-300
        near = np.flatnonzero(np.all(np.abs(approx - c) <= slack, axis=1)) if len(lures) else []
        alive = [lures[i] for i in near if state.ball.contains_point(lures[i])
                 and not any(point_deleted(d, lures[i], state.rules.beta * b.radius) for b, d in state.history)
                 and not point_deleted(state.pending, lures[i], state.thickness)]
        alive_f = np.array([[float(x) for x in p] for p in alive]) if alive else None
        best, best_key = None, None
        for i, cand in enumerate(bob_grid(state)):
            if not legal_move(state, cand).legal:
                continue
            if alive_f is None:
                gap = 0.0
            else:
                gap = float(np.min(np.max(np.abs(alive_f - [float(x) for x in cand.center]), axis=1)))
            key = (gap, i)
            if best_key is None or key < best_key:
                best, best_key = cand, key
        return best

    return play


def bob_random_strategy(seed: int) -> BobStrategy:
    """A seeded uniform choice among the legal grid balls."""
    rng = random.Random(seed)

    def play(state: GameState) -> Ball | None:
        legal = [b for b in bob_grid(state) if legal_move(state, b).legal]
        return rng.choice(legal) if legal else None

    return play


# ------------------------------------------------------------------ play


@dataclass
class GameResult:
    rules: GameRules
    initial: Ball
    transcript: list[dict]
    final: Ball
    outcome: str  # completed | bob-loses
    moves: list[tuple[Ball, Deletion]]

    def enclosure(self) -> tuple[tuple[Fraction, Fraction], ...]:
        return self.final.box()

    def to_jsonl(self) -> str:
        return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in self.transcript)


def play(rules: GameRules, initial: Ball, alice: AliceStrategy, bob: BobStrategy, depth: int,
         meta: dict | None = None) -> GameResult:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    state = GameState(rules, initial)
    header = {"record": "header", "rules": rules.to_json(), "initial": initial.to_json(), "depth": depth,
              **({"meta": meta} if meta else {})}
    transcript = [header]
    outcome = "completed"
    for n in range(depth):
        deletion = alice(state)
        verdict = check_deletion(rules, deletion, state.ball)
        transcript.append({"record": "move", "move": n, "player": "alice", "deletion": deletion.to_json(),
                           "thickness": fmt_rational(state.thickness), "verdict": verdict.label()})
        if not verdict.legal:
            raise IllegalMove("alice", verdict.detail)
        state.pending = deletion
        proposal = bob(state)
        if proposal is None:
            transcript.append({"record": "move", "move": n, "player": "bob", "ball": None, "verdict": "stuck"})
            outcome = "bob-loses"
            break
        verdict = legal_move(state, proposal)
        transcript.append({"record": "move", "move": n, "player": "bob", "ball": proposal.to_json(),
                           "verdict": verdict.label()})
        if not verdict.legal:
            raise IllegalMove("bob", verdict.detail)
        state.history.append((state.ball, deletion))
        state.ball = proposal
        state.pending = None
    transcript.append({"record": "result", "outcome": outcome, "final": state.ball.to_json()})
    return GameResult(rules, initial, transcript, state.ball, outcome, list(state.history))


@dataclass(frozen=True)
class ReplayReport:
    moves: int
    outcome: str
    final: Ball
    identical: bool  # re-serialised records equal the input lines byte for byte


def replay(lines: Iterable[str]) -> ReplayReport:
    """Re-check every recorded move; raises IllegalMove or ValueError on any mismatch."""
    raw = [line.rstrip("\n") for line in lines if line.strip()]
    records = [json.loads(line) for line in raw]
    if not records or records[0].get("record") != "header":
        raise ValueError("transcript must start with a header record")
    header = records[0]
    rules = GameRules.from_json(header["rules"])
    state = GameState(rules, Ball.from_json(header["initial"]))
    outcome, final, moves = None, None, 0
    for rec in records[1:]:
        if rec["record"] == "result":
            outcome, final = rec["outcome"], Ball.from_json(rec["final"])
            continue
        if rec["player"] == "alice":
            deletion = deletion_from_json(state.k, rec["deletion"])
            verdict = check_deletion(rules, deletion, state.ball)
            if verdict.label() != rec["verdict"] or rec["thickness"] != fmt_rational(state.thickness):
                raise ValueError(f"move {rec['move']}: alice record does not replay")
            if not verdict.legal:
                raise IllegalMove("alice", verdict.detail)
            state.pending = deletion
            continue
        if rec["ball"] is None:
            continue
        ball = Ball.from_json(rec["ball"])
        verdict = legal_move(state, ball)
        if verdict.label() != rec["verdict"]:
            raise ValueError(f"move {rec['move']}: recorded {rec['verdict']}, replay gives {verdict.label()}")
        if not verdict.legal:
            raise IllegalMove("bob", verdict.detail)
        state.history.append((state.ball, state.pending))
        state.ball = ball
        state.pending = None
        moves += 1
    if final is None or final != state.ball:
        raise ValueError("final ball does not match the replayed state")
    identical = all(json.dumps(r, sort_keys=True) == line for r, line in zip(records, raw))
    return ReplayReport(moves, outcome, state.ball, identical)


def verify_transcript(result: GameResult) -> list[str]:
    """Post hoc: nesting, exact radii and disjointness of every later ball; returns violations."""
    problems = []
    balls = [b for b, _ in result.moves] + [result.final]
    for n, (ball, deletion) in enumerate(result.moves):
        nxt = balls[n + 1]
        if not ball.contains_ball(nxt):
            problems.append(f"ball {n + 1} not nested in ball {n}")
        if result.rules.mode == "simulation" and nxt.radius != result.rules.beta * ball.radius:
            problems.append(f"ball {n + 1} radius is not beta * rho_{n}")
        eps = result.rules.beta * ball.radius
        for m in range(n + 1, len(balls)):
            if not avoids(deletion, balls[m], eps).legal:
                problems.append(f"ball {m} meets the neighbourhood of deletion {n}")
    return problems


# ------------------------------------------------------------------ analysis


@dataclass(frozen=True)
class BAConstant:
    """min over intrinsic rationals r of dist(Psi(final enclosure), r) * H(r)^c, certified from below."""

    c: Fraction
    constant: Fraction
    witness: str
    checked: int


def _projects_parameters(chart: Chart) -> bool:
    """Do the first k image coordinates equal the parameters?  Then image distance >= parameter distance."""
    k = chart.k
    return all(f.is_polynomial and f.num == MPoly.var(k, i) for i, f in enumerate(chart.coords[:k]))


def ba_constant(chart: Chart, final: Ball, T: int, c=Fraction(1), budget: int = DEFAULT_BUDGET) -> BAConstant:
    """Certified lower bound for min over r of dist(Psi(final), r) * H(r)^c, c >= 0.

    When the chart projects onto its parameters, only a window of half-width
    delta around the final ball is swept: points outside have gap > delta and
    height >= 1, so they cannot beat a minimum below delta.  The window grows
    until that holds or covers the domain.
    """
    c = as_fraction(c)
    if c < 0:
        raise ValueError("c must be >= 0")
    image = chart.image_interval(final.box())
    delta = final.radius * 2**10 if _projects_parameters(chart) else None
    while True:
        window = None if delta is None else final.box(delta)
        enum = sweep(chart, T, param_box=window, budget=budget)
        best, witness = None, ""
        for point in enum.points():
            gap = Fraction(0)
            for (a, b), r in zip(image, point.coords()):
                gap = max(gap, a - r, r - b)
            lower = gap * power_bounds(point.height, c)[0]
            if best is None or lower < best:
                best, witness = lower, str(point)
        covers = window is None or all(lo <= a and b <= hi for (lo, hi), (a, b) in zip(window, chart.domain))
        if covers or (best is not None and best <= delta):
            return BAConstant(c, best if best is not None else Fraction(0), witness, len(enum))
        delta *= 2**4


def partial_quotients(final: Ball) -> list[int]:
    """Continued-fraction quotients shared by both ends of a one-dimensional enclosure."""
    (lo, hi), = final.box()
    a, b = cf_quotients(lo, 10**6), cf_quotients(hi, 10**6)
    out = []
    for x, y in zip(a, b):
        if x != y:
            break
        out.append(x)
    return out[:-1] if out and (len(out) == len(a) or len(out) == len(b)) else out

import json
import random
from fractions import Fraction as F

import pytest

from intrinsic_lab.charts import chart_from_spec, sweep
from intrinsic_lab.errors import IllegalMove
from intrinsic_lab.game import (
    AlgebraicDeletion,
    Ball,
    GameRules,
    GameState,
    HyperplaneDeletion,
    LevelsetDeletion,
    alice_noop_strategy,
    alice_simplex_strategy,
    avoids,
    ba_constant,
    bob_greedy_strategy,
    bob_random_strategy,
    check_deletion,
    legal_move,
    partial_quotients,
    play,
    replay,
    verify_transcript,
)
from intrinsic_lab.polys import MPoly
from intrinsic_lab.simplex import kappa_calibrate


def t_poly(*coeffs):
    """Univariate polynomial sum coeffs[i] t^i."""
    return MPoly.from_dict(1, {(i,): F(c) for i, c in enumerate(coeffs) if c})


def point_deletion(x):
    return AlgebraicDeletion(t_poly(-F(x), 1))


def pending_state(beta, ball, deletion, kind="algebraic", degree=2):
    state = GameState(GameRules(kind, F(beta), degree), ball)
    state.pending = deletion
    return state


# ---------------------------------------------------------------- legality


def test_point_deletion_far_from_proposal_is_legal():
    ball = Ball((F(0),), F(1))
    proposal = Ball((F(5, 8),), F(1, 8))
    assert avoids(point_deletion(0), proposal, F(1, 4)).legal
    assert legal_move(pending_state(F(1, 8), ball, point_deletion(0)), proposal).legal


def test_proposal_outside_current_ball_is_containment_violation():
    state = pending_state(F(1, 8), Ball((F(0),), F(1)), point_deletion(0))
    verdict = legal_move(state, Ball((F(15, 16),), F(1, 8)))
    assert not verdict.legal and verdict.reason == "containment"


def test_wrong_radius_in_simulation_mode():
    state = pending_state(F(1, 8), Ball((F(0),), F(1)), point_deletion(0))
    verdict = legal_move(state, Ball((F(1, 2),), F(1, 4)))
    assert not verdict.legal and verdict.reason == "radius"


def test_tournament_mode_allows_larger_radius():
    state = GameState(GameRules("algebraic", F(1, 8), 2, mode="tournament"), Ball((F(0),), F(1)))
    state.pending = point_deletion(0)
    assert legal_move(state, Ball((F(1, 2),), F(1, 4))).legal
    assert legal_move(state, Ball((F(1, 2),), F(1, 16))).reason == "radius"


def test_hyperplane_slab_two_dimensions():
    plane = HyperplaneDeletion.through((1, 1), 0)
    box = Ball((F(3, 8), F(3, 8)), F(1, 8))  # [1/4, 1/2]^2
    assert avoids(plane, box, F(1, 10)).legal
    # min over corners of |x1 + x2| / 2 is exactly 1/4: distance 1/4 is not > 1/4
    assert not avoids(plane, box, F(1, 4)).legal
    assert avoids(plane, box, F(1, 4) - F(1, 10**9)).legal


def test_closed_neighbourhood_boundary():
    proposal = Ball((F(5, 8),), F(1, 8))
    assert not avoids(point_deletion(0), proposal, F(1, 2)).legal
    assert avoids(point_deletion(0), proposal, F(1, 2) - F(1, 10**12)).legal


def test_two_variable_algebraic_uses_interval_certificate():
    circle = AlgebraicDeletion(MPoly.from_dict(2, {(2, 0): F(1), (0, 2): F(1), (0, 0): F(-1)}))
    assert avoids(circle, Ball((F(0), F(0)), F(1, 4)), F(1, 8)).legal
    far = avoids(circle, Ball((F(1), F(0)), F(1, 16)), F(1, 32))
    assert not far.legal and far.reason in ("deletion", "unknown")


def test_deletion_admissibility_rules():
    ball = Ball((F(0),), F(1))
    rules = GameRules("algebraic", F(1, 8), 2)
    assert check_deletion(rules, point_deletion(0), ball).legal
    cubic = AlgebraicDeletion(t_poly(0, 0, 0, 1))
    assert check_deletion(rules, cubic, ball).reason == "rules"
    hp_rules = GameRules("hyperplane", F(1, 8))
    assert check_deletion(hp_rules, point_deletion(0), ball).reason == "rules"
    lv_rules = GameRules("levelset", F(1, 8), 1, c1=F(4))
    assert check_deletion(lv_rules, LevelsetDeletion(t_poly(-1, 2)), ball).legal
    # t^3 on [-1, 1]: C^2 norm 6 against C^1 norm 3
    steep = LevelsetDeletion(t_poly(0, 0, 0, 1))
    assert not check_deletion(GameRules("levelset", F(1, 8), 1), steep, ball).legal


def test_degenerate_deletions_rejected():
    with pytest.raises(ValueError):
        HyperplaneDeletion((0, 0), 1)
    with pytest.raises(ValueError):
        AlgebraicDeletion(MPoly.const(1, 0))
    with pytest.raises(ValueError):
        LevelsetDeletion(MPoly.from_dict(2, {(1, 0): F(1)}))
    with pytest.raises(ValueError):
        Ball((F(0),), F(0))
    with pytest.raises(ValueError):
        GameRules("algebraic", F(1))


def _sampled_root_near(f, lo, hi, samples=256):
    """Sign change or exact zero of f on a grid over [lo, hi]; may miss tangential roots."""
    step = (hi - lo) / samples
    values = [f((lo + step * i,)) for i in range(samples + 1)]
    return any(v == 0 for v in values) or any(a * b < 0 for a, b in zip(values, values[1:]))


def test_legality_checker_sound_against_sampling():
    rng = random.Random(20240601)
    contradicted = 0
    legal = illegal_confirmed = 0
    for _ in range(1000):
        rho = F(rng.randint(1, 16), 16)
        ball = Ball((F(rng.randint(-16, 16), 16),), rho)
        beta = F(1, rng.choice([2, 3, 4, 8]))
        roots = [ball.center[0] + rho * F(rng.randint(-40, 40), 32) for _ in range(rng.randint(1, 3))]
        f = MPoly.const(1, 1)
        for r in roots:
            f = f * t_poly(-r, 1)
        if rng.random() < 0.3:
            f = f + MPoly.const(1, F(rng.randint(-3, 3), 64))
        if f.is_zero():
            continue
        r = beta * rho
        c = ball.center[0] - rho + r + (2 * rho - 2 * r) * F(rng.randint(0, 64), 64)
        proposal = Ball((c,), r)
        state = pending_state(beta, ball, AlgebraicDeletion(f), degree=3)
        verdict = legal_move(state, proposal)
        eps = state.thickness
        hit = _sampled_root_near(f, c - r - eps, c + r + eps)
        if verdict.legal:
            legal += 1
            contradicted += hit
        elif verdict.reason == "deletion" and hit:
            illegal_confirmed += 1
    assert contradicted == 0
    assert legal > 100 and illegal_confirmed > 100


# ---------------------------------------------------------------- strategies


def test_alice_single_point_pulls_back_to_t():
    chart = chart_from_spec("cn:2")
    state = GameState(GameRules("algebraic", F(1, 8), 2), Ball((F(0),), F(1, 256)))
    deletion = alice_simplex_strategy(chart, F(1, 10))(state)
    assert deletion.kind == "algebraic"
    assert deletion.poly == t_poly(0, 1)


def test_alice_empty_set_is_noop():
    chart = chart_from_spec("cn:2")
    state = GameState(GameRules("algebraic", F(1, 8), 2), Ball((F(0),), F(1, 64)))
    deletion = alice_simplex_strategy(chart, F(1, 100), rho0=F(1, 64))(state)
    assert deletion == HyperplaneDeletion.through((1,), F(10, 64))
    assert avoids(deletion, state.ball, state.thickness).legal


def test_alice_dummy_move_on_large_ball():
    chart = chart_from_spec("cn:2")
    state = GameState(GameRules("algebraic", F(1, 8), 2), Ball((F(0),), F(1)))
    deletion = alice_simplex_strategy(chart, F(1, 10))(state)
    assert deletion.kind == "hyperplane" and avoids(deletion, state.ball, state.thickness).legal


def test_depth_zero_returns_initial_ball():
    initial = Ball((F(0),), F(1, 2))
    result = play(GameRules("algebraic", F(1, 8), 2), initial, alice_noop_strategy(F(1, 2)),
                  bob_random_strategy(0), 0)
    assert result.final == initial and result.outcome == "completed" and not result.moves


def test_noop_alice_and_greedy_bob_converge_to_lure():
    lure = (F(3, 10),)
    initial = Ball((F(0),), F(1, 2))
    result = play(GameRules("algebraic", F(1, 8), 1), initial, alice_noop_strategy(initial.radius),
                  bob_greedy_strategy([lure]), 10)
    assert result.outcome == "completed"
    # each grid step lands within one grid spacing of the lure
    assert result.final.contains_point(lure) or abs(result.final.center[0] - lure[0]) <= 4 * result.final.radius


def test_deleted_lure_sends_bob_to_next_lure():
    lures = [(F(1, 10),), (F(-1, 3),)]
    initial = Ball((F(0),), F(1, 2))
    state = pending_state(F(1, 8), initial, point_deletion(F(1, 10)), degree=1)
    ball = bob_greedy_strategy(lures)(state)
    assert ball is not None and legal_move(state, ball).legal
    assert abs(ball.center[0] + F(1, 3)) < abs(ball.center[0] - F(1, 10))


def test_bob_loses_when_everything_is_deleted():
    initial = Ball((F(0),), F(1))
    # beta = 3/4: thickness 3/4, every proposal of radius 3/4 sits within 1/4 of the centre
    rules = GameRules("algebraic", F(3, 4), 1)
    alice = lambda state: point_deletion(state.ball.center[0])
    result = play(rules, initial, alice, bob_greedy_strategy([(F(0),)]), 5)
    assert result.outcome == "bob-loses"
    assert result.transcript[-2]["verdict"] == "stuck"
    assert replay(result.to_jsonl().splitlines()).outcome == "bob-loses"


def test_illegal_strategy_raises():
    rules = GameRules("algebraic", F(1, 8), 1)
    initial = Ball((F(0),), F(1))
    cheat = lambda state: Ball((F(0),), state.thickness)
    with pytest.raises(IllegalMove) as err:
        play(rules, initial, lambda s: point_deletion(0), cheat, 3)
    assert err.value.player == "bob"


# ---------------------------------------------------------------- full runs


@pytest.fixture(scope="module")
def parabola_game():
    chart = chart_from_spec("cn:2")
    cal = kappa_calibrate(chart, 200, seed=7)
    initial = Ball((F(0),), F(1, 2))
    lures = sweep(chart, 100, param_box=initial.box()).params()
    result = play(GameRules("algebraic", F(1, 8), 2), initial,
                  alice_simplex_strategy(chart, cal.kappa / 2), bob_greedy_strategy(lures), 12,
                  {"chart": chart.spec})
    return chart, result


def test_parabola_game_invariants(parabola_game):
    chart, result = parabola_game
    assert result.outcome == "completed" and len(result.moves) == 12
    assert result.final.radius == F(1, 2) * F(1, 8) ** 12
    assert verify_transcript(result) == []


def test_parabola_game_replays_byte_identical(parabola_game):
    _, result = parabola_game
    text = result.to_jsonl()
    rep = replay(text.splitlines())
    assert rep.identical and rep.final == result.final and rep.moves == 12
    again = "\n".join(json.dumps(json.loads(line), sort_keys=True) for line in text.splitlines()) + "\n"
    assert again == text


def test_replay_detects_tampering(parabola_game):
    _, result = parabola_game
    lines = result.to_jsonl().splitlines()
    rec = json.loads(lines[2])
    rec["ball"]["center"] = ["1/2"]
    lines[2] = json.dumps(rec, sort_keys=True)
    with pytest.raises((ValueError, IllegalMove)):
        replay(lines)


def test_parabola_final_ball_avoids_low_rationals(parabola_game):
    chart, result = parabola_game
    ba = ba_constant(chart, result.final, 2000, F(1))
    assert ba.constant > 0


def test_identity_line_game_has_bounded_quotients():
    chart = chart_from_spec("identity:1")
    initial = Ball((F(1, 3),), F(1, 4))
    lures = sweep(chart, 200, param_box=initial.box()).params()
    result = play(GameRules("hyperplane", F(1, 8)), initial, alice_simplex_strategy(chart, F(1, 16)),
                  bob_greedy_strategy(lures), 10)
    assert result.outcome == "completed" and verify_transcript(result) == []
    quotients = partial_quotients(result.final)
    assert len(quotients) >= 3
    assert max(quotients[1:]) <= 64
    assert ba_constant(chart, result.final, 2000, F(2)).constant > 0


def test_random_bob_is_seeded():
    chart = chart_from_spec("cn:2")
    initial = Ball((F(0),), F(1, 2))
    rules = GameRules("algebraic", F(1, 8), 2)
    runs = [play(rules, initial, alice_simplex_strategy(chart, F(1, 20)), bob_random_strategy(s), 6).to_jsonl()
            for s in (3, 3, 4)]
    assert runs[0] == runs[1]
    assert runs[0] != runs[2]


def test_ba_constant_rejects_negative_exponent():
    chart = chart_from_spec("cn:2")
    with pytest.raises(ValueError):
        ba_constant(chart, Ball((F(0),), F(1, 64)), 10, F(-1))

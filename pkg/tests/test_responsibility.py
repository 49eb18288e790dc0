import random
from fractions import Fraction
from itertools import combinations

import pytest

from backresp import zoo
from backresp.coop import CoopGame, MissingCounterexample, PlayerCapExceeded, Variant
from backresp.report import format_decimal
from backresp.responsibility import (
    BudgetTooSmall,
    estimate,
    exact,
    has_safe_path,
    optimistic_fast,
    plan_samples,
)
from backresp.ts import validate_counterexample, validate_system
from backresp.weights import banzhaf_weights, shapley_weights, validate_custom
from helpers import random_model

F = Fraction
OPT, PES = Variant.OPTIMISTIC, Variant.PESSIMISTIC


def shapley_for(m, grouping=None):
    return shapley_weights(len(grouping) if grouping else m.system.num_states)


def test_train_pessimistic(train):
    r = exact(train.system, train.counterexample, PES, shapley_for(train))
    assert [p.exact for p in r.players] == [F(1, 6), F(2, 3), F(1, 6), 0, 0]
    assert r.sum == 1 and r.safe_path


def test_train_optimistic(train):
    r = exact(train.system, train.counterexample, OPT, shapley_for(train))
    assert [p.exact for p in r.players] == [F(1, 2), F(1, 2), 0, 0, 0]


def test_dresden_pessimistic(dresden):
    r = exact(dresden.system, dresden.counterexample, PES, shapley_for(dresden))
    v = r.values()
    assert v["35"] == F(3, 4)
    assert v["36"] == v["37"] == v["42"] == F(1, 12)
    assert v["34"] == v["39"] == v["40"] == v["41"] == 0


def test_grouped_train(train5):
    ts, ce = train5.system, train5.counterexample
    r = exact(ts, ce, PES, shapley_for(train5))
    v = r.values()
    assert all(v[f"t{i}"] == F(1, 42) for i in range(1, 6))
    assert v["s1"] == F(5, 14) and v["s2"] == F(11, 21)
    assert [format_decimal(v[k]) for k in ("t1", "s1", "s2")] == ["0.0238", "0.3571", "0.5238"]
    g = exact(ts, ce, PES, shapley_for(train5, train5.grouping), train5.grouping).values()
    assert (g["s1"], g["s2"], g["t"]) == (F(1, 6), F(2, 3), F(1, 6))


def test_train_banzhaf_against_subset_count(train):
    game = CoopGame(train.system, train.counterexample, PES)
    others = [0, 2, 3, 4]
    critical = sum(
        game(set(c) | {1}) - game(set(c)) for k in range(5) for c in combinations(others, k)
    )
    expected = F(critical, 16)
    assert expected == F(3, 4)
    r = exact(train.system, train.counterexample, PES, banzhaf_weights(5))
    assert r.values()["s2"] == expected


def test_exact_needs_counterexample(train):
    with pytest.raises(MissingCounterexample):
        exact(train.system, None, PES, shapley_for(train))


def test_exact_cap(train5):
    with pytest.raises(PlayerCapExceeded):
        exact(train5.system, train5.counterexample, PES, shapley_for(train5), cap=8)


def test_optimistic_fast_train(train):
    r = optimistic_fast(train.system, train.counterexample, shapley_for(train))
    assert [p.exact for p in r.players] == [F(1, 2), F(1, 2), 0, 0, 0]
    assert r.diagnostics["|W|"] == 2


def test_optimistic_fast_banzhaf_train(train):
    fast = optimistic_fast(train.system, train.counterexample, banzhaf_weights(5))
    slow = exact(train.system, train.counterexample, OPT, banzhaf_weights(5))
    assert fast.values() == slow.values()
    assert fast.values()["s1"] == F(1, 2)


def test_optimistic_fast_degenerate():
    ts = validate_system(3, [(0, 1), (1, 2), (2, 2)], 0, [2])
    ce = validate_counterexample(ts, [0, 1, 2])
    r = optimistic_fast(ts, ce, shapley_weights(3))
    assert all(p.exact == 0 for p in r.players)
    assert any("on its own" in w for w in r.warnings)


def test_peg_solitaire_positive_prefix():
    m = zoo.peg_solitaire()
    r = optimistic_fast(m.system, m.counterexample, shapley_for(m))
    last = zoo.run_index_of_board(m, [4, 5, 7, 10, 11, 14, 15])
    flags = [r.players[s].exact > 0 for s in m.counterexample.run]
    assert flags == [i <= last for i in range(len(flags))]


def test_plan_shapley_even():
    assert plan_samples(shapley_weights(10), 900).allocation == (90,) * 10


def test_plan_banzhaf_proportional():
    assert plan_samples(banzhaf_weights(3), 4).allocation == (1, 2, 1)


def test_plan_minimum_coverage():
    w = validate_custom([F(1, 2), 0, F(1, 2)])
    assert plan_samples(w, 2).allocation == (1, 0, 1)
    assert plan_samples(shapley_weights(6), 6).allocation == (1,) * 6


def test_plan_budget_too_small():
    with pytest.raises(BudgetTooSmall):
        plan_samples(shapley_weights(10), 3)


def _dictator_model():
    # only state 0 can steer away from the bad state
    ts = validate_system(3, [(0, 1), (0, 2), (1, 1), (2, 2)], 0, [2])
    return ts, validate_counterexample(ts, [0, 2])


@pytest.mark.parametrize("budget, seed", [(3, 0), (17, 5), (200, 9), (5000, 1)])
def test_estimate_degenerate_dictator(budget, seed):
    ts, ce = _dictator_model()
    plan = plan_samples(shapley_weights(3), budget, seed)
    r = estimate(ts, ce, PES, shapley_weights(3), plan)
    dictator = r.players[0]
    if all(dictator.samples_per_size):
        assert dictator.estimate == 1.0
    else:
        # a size never sampled without the dictator is skipped and reported
        assert dictator.estimate < 1.0
        assert any("coverage" in w and "0" in w for w in r.warnings)
    assert r.players[1].estimate == r.players[2].estimate == 0.0


def test_estimate_dictator_covered_with_modest_budget():
    ts, ce = _dictator_model()
    plan = plan_samples(shapley_weights(3), 200, 9)
    r = estimate(ts, ce, PES, shapley_weights(3), plan)
    assert all(r.players[0].samples_per_size)
    assert r.players[0].estimate == 1.0


def test_estimate_close_to_exact_on_train(train):
    w = shapley_for(train)
    truth = exact(train.system, train.counterexample, PES, w)
    est = estimate(train.system, train.counterexample, PES, w, plan_samples(w, 10_000, seed=1))
    for t, e in zip(truth.players, est.players):
        assert abs(float(t.exact) - e.estimate) <= 0.05
    assert est.plan.seed == 1


def test_estimate_flags_low_coverage():
    m = zoo.generals(6)
    w = shapley_for(m)
    r = estimate(m.system, m.counterexample, PES, w, plan_samples(w, w.n, seed=0))
    assert any("coverage" in x for x in r.warnings)


def test_estimate_deterministic_across_workers(dresden):
    w = shapley_for(dresden)
    plan = plan_samples(w, 25_000, seed=3)
    a = estimate(dresden.system, dresden.counterexample, PES, w, plan, workers=1)
    b = estimate(dresden.system, dresden.counterexample, PES, w, plan, workers=4)
    assert a.values() == b.values()


def test_grouped_estimate(train5):
    w = shapley_for(train5, train5.grouping)
    r = estimate(train5.system, train5.counterexample, PES, w, plan_samples(w, 5000, 2), train5.grouping)
    v = r.values()
    assert abs(v["s2"] - 2 / 3) < 0.05 and abs(v["t"] - 1 / 6) < 0.05


def test_has_safe_path(train):
    assert has_safe_path(train.system)
    doomed = validate_system(2, [(0, 1), (1, 1)], 0, [1])
    assert not has_safe_path(doomed)
    assert has_safe_path(validate_system(1, [(0, 0)], 0, []))


@pytest.mark.parametrize("seed", range(30))
def test_structural_properties(seed):
    rng = random.Random(seed)
    m = random_model(rng, rng.randint(2, 10))
    ts, ce = m.system, m.counterexample
    pes = exact(ts, ce, PES, shapley_for(m))
    opt = exact(ts, ce, OPT, shapley_for(m))
    for r in (pes, opt):
        assert all(p.exact >= 0 for p in r.players)
        assert r.sum == (1 if has_safe_path(ts) else 0)
        for s in ts.states:
            if len(ts.successors[s]) == 1:
                assert r.players[s].exact == 0
    positive = {s for s, p in enumerate(opt.players) if p.exact > 0}
    assert len({p.exact for p in opt.players}) <= 2
    assert positive <= set(ce.run)


@pytest.mark.parametrize("seed", range(30))
def test_optimistic_positive_iff_wins_alone(seed):
    rng = random.Random(200 + seed)
    m = random_model(rng, rng.randint(2, 10))
    ts, ce = m.system, m.counterexample
    game = CoopGame(ts, ce, OPT)
    r = exact(ts, ce, OPT, banzhaf_weights(ts.num_states))  # p_0 > 0
    for s in ts.states:
        assert (r.players[s].exact > 0) == bool(game.value(1 << s))


@pytest.mark.parametrize("seed", range(40))
def test_fast_equals_exact_optimistic(seed):
    rng = random.Random(300 + seed)
    m = random_model(rng, rng.randint(2, 12))
    n = m.system.num_states
    for w in (shapley_weights(n), banzhaf_weights(n)):
        fast = optimistic_fast(m.system, m.counterexample, w)
        slow = exact(m.system, m.counterexample, OPT, w)
        assert fast.values() == slow.values()


def pad_with_dummies(m, k):
    """Append ``k`` unreachable states forming a chain into a self-loop."""
    ts = m.system
    n = ts.num_states
    trans = list(ts.transitions()) + [(n + i, n + i + 1) for i in range(k - 1)] + [(n + k - 1, n + k - 1)]
    big = validate_system(n + k, trans, ts.initial, ts.bad)
    return big, validate_counterexample(big, m.counterexample.run)


@pytest.mark.parametrize("seed", range(15))
def test_dummy_invariance(seed):
    rng = random.Random(400 + seed)
    m = random_model(rng, rng.randint(2, 8))
    n = m.system.num_states
    base = exact(m.system, m.counterexample, PES, shapley_weights(n))
    big, ce = pad_with_dummies(m, 3)
    padded = exact(big, ce, PES, shapley_weights(n + 3))
    assert [p.exact for p in padded.players[:n]] == [p.exact for p in base.players]
    assert all(p.exact == 0 for p in padded.players[n:])


def test_threshold_and_positivity_queries(dresden):
    r = exact(dresden.system, dresden.counterexample, PES, shapley_for(dresden))
    assert sorted(r.positive()) == ["35", "36", "37", "42"]
    assert r.exceeds(0.5) == ["35"]


def test_no_safe_path_report_sums_to_zero():
    ts = validate_system(3, [(0, 1), (0, 2), (1, 2), (2, 2)], 0, [2])
    ce = validate_counterexample(ts, [0, 2])
    r = exact(ts, ce, PES, shapley_weights(3))
    assert r.sum == 0 and not r.safe_path
    assert r.warnings

"""Responsibility engines: exact tally, optimistic characterisation, sampling."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .coop import (
    DEFAULT_PLAYER_CAP,
    CoopGame,
    MissingCounterexample,
    PlayerCapExceeded,
    Variant,
    build_win_table,
    popcounts,
    winning_states,
)
from .game import EngravedGame
from .ts import Counterexample, StateGrouping, TransitionSystem
from .weights import WeightError, WeightVector, binomial_row

SAMPLE_BLOCK = 1024
CALIBRATION_SAMPLES = 100
LOW_SUM_THRESHOLD = 0.9
_CACHE_LIMIT = 2_000_000


@dataclass
class PlayerEntry:
    name: str
    exact: Optional[Fraction] = None
    estimate: Optional[float] = None
    samples_per_size: Optional[list[int]] = None

    @property
    def value(self) -> float:
        return float(self.exact) if self.exact is not None else float(self.estimate)


@dataclass
class ResponsibilityReport:
    players: list[PlayerEntry]
    variant: Variant
    index: str
    grouping: str
    safe_path: bool
    warnings: list[str] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    plan: Optional["SamplingPlan"] = None

    @property
    def sum(self):
        if all(p.exact is not None for p in self.players):
            return sum((p.exact for p in self.players), Fraction(0))
        return sum(p.value for p in self.players)

    def __getitem__(self, name: str) -> PlayerEntry:
        for p in self.players:
            if p.name == name:
                return p
        raise KeyError(name)

    def values(self) -> dict:
        return {p.name: (p.exact if p.exact is not None else p.estimate) for p in self.players}

    def positive(self) -> list[str]:
        return [p.name for p in self.players if p.value > 0]

    def exceeds(self, threshold: float) -> list[str]:
        return [p.name for p in self.players if p.value > threshold]


def has_safe_path(ts: TransitionSystem) -> bool:
    """True iff some run avoids the bad states forever."""
    return EngravedGame(ts, None).safe_wins(bytearray(b"\x01" * ts.num_states))


def _check_weights(weights: WeightVector, n: int):
    if weights.n != n:
        raise WeightError(f"weight vector has {weights.n} entries but the game has {n} players")


def _grouping_label(grouping: StateGrouping | None) -> str:
    return "states" if grouping is None else f"groups({len(grouping)})"


def exact(
    ts: TransitionSystem,
    rho: Counterexample,
    variant: Variant,
    weights: WeightVector,
    grouping: StateGrouping | None = None,
    cap: int = DEFAULT_PLAYER_CAP,
    workers: int = 1,
) -> ResponsibilityReport:
    """Exact responsibility from per-size critical-pair counts.

    For player ``x`` and size ``i``, ``c_i`` counts coalitions ``C`` of size
    ``i`` without ``x`` such that ``C`` loses and ``C + x`` wins; the value is
    ``sum_i c_i * p_i``.
    """
    if rho is None:
        raise MissingCounterexample()
    game = CoopGame(ts, rho, variant, grouping)
    n = game.n
    if n > cap:
        raise PlayerCapExceeded(n, cap)
    _check_weights(weights, n)
    table = build_win_table(game, cap, workers).bits
    pc = popcounts(n)
    masks = np.arange(1 << n, dtype=np.uint32)

    def tally(x: int) -> Fraction:
        bit = np.uint32(1 << x)
        without = masks[(masks & bit) == 0]
        critical = table[without | bit] & ~table[without]
        counts = np.bincount(pc[without[critical]], minlength=n)
        return sum((int(c) * weights[i] for i, c in enumerate(counts) if c), Fraction(0))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(tally, range(n)))
    else:
        values = [tally(x) for x in range(n)]

    safe = has_safe_path(ts)
    report = ResponsibilityReport(
        players=[PlayerEntry(name, exact=v) for name, v in zip(game.player_names, values)],
        variant=game.variant,
        index=weights.name,
        grouping=_grouping_label(grouping),
        safe_path=safe,
        warnings=list(ts.warnings()),
    )
    if not safe:
        report.warnings.append("no bad-avoiding path exists; every coalition loses")
    return report


def optimistic_constant(weights: WeightVector, w: int) -> Fraction:
    """Value shared by every state that wins the optimistic game alone."""
    return sum((c * weights[i] for i, c in enumerate(binomial_row(weights.n - w))), Fraction(0))


def optimistic_fast(
    ts: TransitionSystem, rho: Counterexample, weights: WeightVector
) -> ResponsibilityReport:
    """Optimistic responsibility from the set of states that can win alone.

    Needs one attractor computation per run state.
    """
    if rho is None:
        raise MissingCounterexample()
    _check_weights(weights, ts.num_states)
    W = winning_states(ts, rho)
    w = len(W)
    warnings = list(ts.warnings())
    if w == 0:
        K = Fraction(0)
        warnings.append("no state can avert the violation on its own; all optimistic values are 0")
    else:
        K = optimistic_constant(weights, w)
        if weights.name == "shapley":
            assert K == Fraction(1, w), (K, w)
        elif weights.name == "banzhaf":
            assert K == Fraction(1, 2 ** (w - 1)), (K, w)
    members = set(W)
    return ResponsibilityReport(
        players=[PlayerEntry(ts.names[s], exact=K if s in members else Fraction(0)) for s in ts.states],
        variant=Variant.OPTIMISTIC,
        index=weights.name,
        grouping="states",
        safe_path=has_safe_path(ts),
        warnings=warnings,
        diagnostics={"|W|": w, "W": [ts.names[s] for s in W], "K": K},
    )


class BudgetTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class SamplingPlan:
    allocation: tuple[int, ...]
    seed: int

    @property
    def budget(self) -> int:
        return sum(self.allocation)


def plan_samples(weights: WeightVector, budget: int, seed: int = 0) -> SamplingPlan:
    """Split ``budget`` over coalition sizes proportionally to their weight mass.

    Every size with positive mass gets one sample up front; the rest is
    distributed by largest remainder (ties to the smaller size).
    """
    masses = weights.size_masses
    positive = [i for i, m in enumerate(masses) if m > 0]
    if budget < len(positive):
        raise BudgetTooSmall(f"budget {budget} cannot cover {len(positive)} coalition sizes")
    alloc = [0] * weights.n
    for i in positive:
        alloc[i] = 1
    rest = budget - len(positive)
    total = sum(masses[i] for i in positive)
    quotas = {i: rest * masses[i] / total for i in positive}
    for i in positive:
        alloc[i] += int(quotas[i])
    leftover = rest - sum(int(q) for q in quotas.values())
    by_remainder = sorted(positive, key=lambda i: (-(quotas[i] - int(quotas[i])), i))
    for i in by_remainder[:leftover]:
        alloc[i] += 1
    return SamplingPlan(tuple(alloc), seed)


def _sample_masks(seed: int, size: int, block: int, count: int, n: int) -> list[int]:
    rng = np.random.default_rng([seed, size, block])
    if size == 0:
        return [0] * count
    picks = np.argsort(rng.random((count, n)), axis=1)[:, :size]
    weights = np.left_shift(np.uint64(1), picks.astype(np.uint64))
    return [int(m) for m in np.bitwise_or.reduce(weights, axis=1)]


class _CachedGame:
    def __init__(self, game: CoopGame):
        self.game = game
        self.cache: dict[int, int] = {}

    def __call__(self, mask: int) -> int:
        v = self.cache.get(mask)
        if v is None:
            v = self.game.value(mask)
            if len(self.cache) < _CACHE_LIMIT:
                self.cache[mask] = v
        return v


def _run_block(value, n, seed, size, block, count):
    hits = [0] * n
    trials = [0] * n
    full = (1 << n) - 1
    for mask in _sample_masks(seed, size, block, count, n):
        base = value(mask)
        absent = full & ~mask
        s = 0
        while absent:
            if absent & 1:
                trials[s] += 1
                if value(mask | (1 << s)) > base:
                    hits[s] += 1
            absent >>= 1
            s += 1
    return size, hits, trials


def estimate(
    ts: TransitionSystem,
    rho: Counterexample,
    variant: Variant,
    weights: WeightVector,
    plan: SamplingPlan,
    grouping: StateGrouping | None = None,
    workers: int = 1,
) -> ResponsibilityReport:
    """Stratified Monte Carlo estimate of responsibility.

    Each sampled coalition is shared by every player outside it. The random
    stream for size ``i`` and block ``b`` is seeded from ``(seed, i, b)`` so
    results do not depend on ``workers``.
    """
    if rho is None:
        raise MissingCounterexample()
    game = CoopGame(ts, rho, variant, grouping)
    n = game.n
    _check_weights(weights, n)
    if len(plan.allocation) != n:
        raise BudgetTooSmall(f"plan covers {len(plan.allocation)} sizes, game has {n} players")
    value = _CachedGame(game)

    jobs = []
    for size, count in enumerate(plan.allocation):
        for b, start in enumerate(range(0, count, SAMPLE_BLOCK)):
            jobs.append((size, b, min(SAMPLE_BLOCK, count - start)))

    def run(job):
        size, b, count = job
        return _run_block(value, n, plan.seed, size, b, count)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    hits = [[0] * n for _ in range(n)]  # [player][size]
    trials = [[0] * n for _ in range(n)]
    for size, h, t in results:
        for s in range(n):
            hits[s][size] += h[s]
            trials[s][size] += t[s]

    masses = weights.size_masses
    entries = []
    gaps: dict[str, list[int]] = {}
    for s in range(n):
        est = Fraction(0)
        for i in range(n):
            if trials[s][i]:
                est += masses[i] * Fraction(hits[s][i], trials[s][i])
            elif masses[i]:
                gaps.setdefault(game.player_names[s], []).append(i)
        entries.append(PlayerEntry(game.player_names[s], estimate=float(est), samples_per_size=list(trials[s])))

    safe = has_safe_path(ts)
    report = ResponsibilityReport(
        players=entries,
        variant=game.variant,
        index=weights.name,
        grouping=_grouping_label(grouping),
        safe_path=safe,
        warnings=list(ts.warnings()),
        plan=plan,
        diagnostics={"samples": plan.budget, "seed": plan.seed},
    )
    for name, sizes in gaps.items():
        report.warnings.append(f"coverage gap: {name} unsampled at coalition sizes {sizes}")
    total = report.sum
    if weights.name == "shapley" and safe and total < LOW_SUM_THRESHOLD:
        report.warnings.append(
            f"sum of estimates is {total:.4f}, well below 1; coverage is likely insufficient"
        )
    return report


def plan_for_time(
    ts: TransitionSystem,
    rho: Counterexample,
    variant: Variant,
    weights: WeightVector,
    seconds: float,
    seed: int = 0,
    grouping: StateGrouping | None = None,
) -> SamplingPlan:
    """Convert a wall-clock budget to a fixed sample plan via a short burst."""
    if seconds <= 0:
        raise BudgetTooSmall(f"time budget must be positive, got {seconds}")
    positive = sum(1 for m in weights.size_masses if m > 0)
    burst = plan_samples(weights, max(CALIBRATION_SAMPLES, positive), seed)
    t0 = time.perf_counter()
    estimate(ts, rho, variant, weights, burst, grouping)
    elapsed = max(time.perf_counter() - t0, 1e-9)
    budget = max(positive, int(burst.budget * seconds / elapsed))
    return plan_samples(weights, budget, seed)

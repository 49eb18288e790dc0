"""Optimistic and pessimistic cooperative games over states or state groups."""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .game import EngravedGame
from .ts import Counterexample, StateGrouping, TransitionSystem, bits

DEFAULT_PLAYER_CAP = 25
_CHUNK = 256


class Variant(enum.Enum):
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"


class PlayerCapExceeded(ValueError):
    def __init__(self, players: int, cap: int):
        self.players = players
        self.cap = cap
        super().__init__(
            f"{players} players exceed the exact-engine cap of {cap}; "
            "group states (--use-groups) or estimate with the `sample` command"
        )


class MissingCounterexample(ValueError):
    def __init__(self):
        super().__init__("model has no counterexample; add a 'counterexample' line")


class CoopGame:
    """Simple game whose players are states or groups of states.

    ``value(mask)`` is 1 iff Safe wins the engraved game when the players in
    ``mask`` (plus, optimistically, every off-run state) are Safe-owned.
    """

    def __init__(
        self,
        ts: TransitionSystem,
        rho: Counterexample,
        variant: Variant,
        grouping: StateGrouping | None = None,
    ):
        if rho is None:
            raise MissingCounterexample()
        self.ts = ts
        self.rho = rho
        self.variant = Variant(variant)
        self.grouping = grouping
        if grouping is None:
            self.player_states: tuple[tuple[int, ...], ...] = tuple((s,) for s in ts.states)
            self.player_names: tuple[str, ...] = ts.names
        else:
            self.player_states = grouping.blocks
            self.player_names = grouping.names
        self.engine = EngravedGame(ts, rho)
        base = bytearray(ts.num_states)
        if self.variant is Variant.OPTIMISTIC:
            for s in ts.states:
                if not self.engine.on_run[s]:
                    base[s] = 1
        self._base = bytes(base)

    @property
    def n(self) -> int:
        return len(self.player_states)

    def safe_flags(self, mask: int) -> bytearray:
        flags = bytearray(self._base)
        for p in bits(mask):
            for s in self.player_states[p]:
                flags[s] = 1
        return flags

    def value(self, mask: int) -> int:
        return int(self.engine.safe_wins(self.safe_flags(mask)))

    def __call__(self, players: Iterable[int]) -> int:
        m = 0
        for p in players:
            m |= 1 << p
        return self.value(m)


def value(
    ts: TransitionSystem,
    rho: Counterexample,
    variant: Variant,
    coalition: Iterable[int],
    grouping: StateGrouping | None = None,
) -> int:
    return CoopGame(ts, rho, variant, grouping)(coalition)


def popcounts(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint32)).astype(np.uint8)


@dataclass(frozen=True)
class WinTable:
    n: int
    bits: np.ndarray  # bool, indexed by coalition mask
    variant: Variant

    def __getitem__(self, mask: int) -> bool:
        return bool(self.bits[mask])

    def is_monotone(self) -> bool:
        masks = np.arange(1 << self.n, dtype=np.uint32)
        for b in range(self.n):
            lower = masks[(masks >> b) & 1 == 0]
            if np.any(self.bits[lower] & ~self.bits[lower | (1 << b)]):
                return False
        return True


def _implied_by_subsets(table: np.ndarray, masks: np.ndarray, n: int) -> np.ndarray:
    implied = np.zeros(len(masks), dtype=bool)
    for b in range(n):
        bit = np.uint32(1 << b)
        has = (masks & bit) != 0
        implied[has] |= table[masks[has] ^ bit]
    return implied


def build_win_table(game: CoopGame, cap: int = DEFAULT_PLAYER_CAP, workers: int = 1) -> WinTable:
    """Winning bit for every coalition mask.

    Masks are visited by increasing size; a mask with a winning immediate
    subset is winning without solving (monotonicity), so games are only
    solved for masks whose subsets all lose.
    """
    n = game.n
    if n > cap:
        raise PlayerCapExceeded(n, cap)
    table = np.zeros(1 << n, dtype=bool)
    pc = popcounts(n)
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for k in range(n + 1):
            masks = np.nonzero(pc == k)[0].astype(np.uint32)
            implied = _implied_by_subsets(table, masks, n) if k else np.zeros(len(masks), dtype=bool)
            table[masks[implied]] = True
            todo = masks[~implied].tolist()
            if pool is None:
                results = [game.value(m) for m in todo]
            else:
                chunks = [todo[i:i + _CHUNK] for i in range(0, len(todo), _CHUNK)]
                results = [v for part in pool.map(lambda c: [game.value(m) for m in c], chunks) for v in part]
            if todo:
                table[np.asarray(todo, dtype=np.uint32)] = np.asarray(results, dtype=bool)
    finally:
        if pool is not None:
            pool.shutdown()
    return WinTable(n, table, game.variant)


def minimal_winning(table: WinTable) -> list[int]:
    """Inclusion-minimal winning masks, ascending by size then mask."""
    n = table.n
    pc = popcounts(n)
    winners = np.nonzero(table.bits)[0].astype(np.uint32)
    has_winning_subset = _implied_by_subsets(table.bits, winners, n)
    minimal = winners[~has_winning_subset]
    order = np.lexsort((minimal, pc[minimal]))
    return [int(m) for m in minimal[order]]


def winning_states(ts: TransitionSystem, rho: Counterexample, candidates: Sequence[int] | None = None) -> list[int]:
    """States that win the optimistic game on their own.

    Only run states can qualify, so by default only they are tested.
    """
    game = CoopGame(ts, rho, Variant.OPTIMISTIC)
    pool = rho.run if candidates is None else candidates
    return sorted(s for s in pool if game.value(1 << s))

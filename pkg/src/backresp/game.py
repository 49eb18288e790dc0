"""Counterexample-engraved safety games and their attractor solver."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .ts import Counterexample, TransitionSystem


class Player(enum.Enum):
    SAFE = "Safe"
    REACH = "Reach"


@dataclass(frozen=True)
class GameArena:
    owner: tuple[Player, ...]
    successors: tuple[tuple[int, ...], ...]
    initial: int
    bad: frozenset[int]


@dataclass(frozen=True)
class Winner:
    player: Player
    reach_region: frozenset[int]

    @property
    def safe_wins(self) -> bool:
        return self.player is Player.SAFE


def engrave(ts: TransitionSystem, rho: Counterexample, safe: Iterable[int]) -> GameArena:
    """Materialise the safety game where ``safe`` is owned by player Safe.

    On-run states outside ``safe`` keep only the transition the run took.
    The final (bad) run state keeps its original successors.
    """
    safe = frozenset(safe)
    succ = list(ts.successors)
    run = rho.run
    for i in range(len(run) - 1):
        if run[i] not in safe:
            succ[run[i]] = (run[i + 1],)
    owner = tuple(Player.SAFE if s in safe else Player.REACH for s in ts.states)
    return GameArena(owner, tuple(succ), ts.initial, ts.bad)


def solve(arena: GameArena) -> Winner:
    """Compute Reach's attractor of the bad states with a FIFO worklist.

    Linear in states plus transitions: each Safe state keeps a counter of
    successors not yet known to be losing.
    """
    n = len(arena.owner)
    preds: list[list[int]] = [[] for _ in range(n)]
    for s, succ in enumerate(arena.successors):
        for t in succ:
            preds[t].append(s)
    remaining = [len(s) for s in arena.successors]
    in_attr = bytearray(n)
    queue = deque()
    for b in sorted(arena.bad):
        in_attr[b] = 1
        queue.append(b)
    while queue:
        t = queue.popleft()
        for p in preds[t]:
            if in_attr[p]:
                continue
            if arena.owner[p] is Player.SAFE:
                remaining[p] -= 1
                if remaining[p]:
                    continue
            in_attr[p] = 1
            queue.append(p)
    region = frozenset(i for i in range(n) if in_attr[i])
    return Winner(Player.REACH if arena.initial in region else Player.SAFE, region)


class EngravedGame:
    """Solver for many coalitions over one (system, counterexample) pair.

    Behaves exactly like ``solve(engrave(ts, rho, safe))`` but never copies
    the transition structure: engraved states are handled by an overlay that
    looks up the run successor.
    """

    def __init__(self, ts: TransitionSystem, rho: Counterexample | None):
        self.ts = ts
        self.rho = rho
        n = ts.num_states
        self.preds = ts.predecessors()
        self.out_degree = [len(s) for s in ts.successors]
        # run successor for engravable states, -1 elsewhere
        nxt = [-1] * n
        if rho is not None:
            for i in range(len(rho.run) - 1):
                nxt[rho.run[i]] = rho.run[i + 1]
        self.run_next = nxt
        self.on_run = bytearray(n)
        if rho is not None:
            for s in rho.run:
                self.on_run[s] = 1
        self.bad = sorted(ts.bad)

    def reach_region(self, safe: bytearray) -> bytearray:
        """Attractor of bad; ``safe[s]`` is nonzero iff Safe owns ``s``."""
        preds = self.preds
        nxt = self.run_next
        remaining = self.out_degree.copy()
        in_attr = bytearray(len(remaining))
        queue = deque(self.bad)
        for b in self.bad:
            in_attr[b] = 1
        while queue:
            t = queue.popleft()
            for p in preds[t]:
                if in_attr[p]:
                    continue
                if safe[p]:
                    remaining[p] -= 1
                    if remaining[p]:
                        continue
                elif nxt[p] >= 0 and nxt[p] != t:
                    # engraved: the only remaining edge goes elsewhere
                    continue
                in_attr[p] = 1
                queue.append(p)
        return in_attr

    def safe_wins(self, safe: bytearray) -> bool:
        return not self.reach_region(safe)[self.ts.initial]

    def winner(self, safe: Iterable[int]) -> Winner:
        flags = bytearray(self.ts.num_states)
        for s in safe:
            flags[s] = 1
        region = self.reach_region(flags)
        won = Player.REACH if region[self.ts.initial] else Player.SAFE
        return Winner(won, frozenset(i for i, x in enumerate(region) if x))

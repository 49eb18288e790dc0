"""Transition systems, counterexamples and state groupings.

All objects here are immutable once validated. States are dense integers
``0..num_states-1``; human-readable names are carried alongside for reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Issue:
    code: str
    message: str
    location: tuple = ()

    def __str__(self) -> str:
        loc = f" at {self.location}" if self.location else ""
        return f"{self.code}{loc}: {self.message}"


class ValidationError(ValueError):
    """Raised with every violated invariant of a model or run."""

    def __init__(self, issues: Sequence[Issue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))

    @property
    def codes(self) -> list[str]:
        return [i.code for i in self.issues]


@dataclass(frozen=True)
class TransitionSystem:
    num_states: int
    successors: tuple[tuple[int, ...], ...]
    initial: int
    bad: frozenset[int]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(self.num_states)))

    @property
    def states(self) -> range:
        return range(self.num_states)

    @property
    def num_transitions(self) -> int:
        return sum(len(s) for s in self.successors)

    def transitions(self) -> Iterable[tuple[int, int]]:
        for src, succ in enumerate(self.successors):
            for dst in succ:
                yield src, dst

    def has_transition(self, src: int, dst: int) -> bool:
        return dst in self.successors[src]

    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        preds: list[list[int]] = [[] for _ in range(self.num_states)]
        for src, dst in self.transitions():
            preds[dst].append(src)
        return tuple(tuple(p) for p in preds)

    def state_index(self, name_or_id) -> int:
        """Resolve a state given by name or by integer id."""
        if isinstance(name_or_id, int):
            return name_or_id
        try:
            return self.names.index(name_or_id)
        except ValueError:
            pass
        if str(name_or_id).isdigit() and int(name_or_id) < self.num_states:
            return int(name_or_id)
        raise KeyError(f"unknown state {name_or_id!r}")

    def warnings(self) -> list[str]:
        if not self.bad:
            return ["no bad states; all responsibilities are 0"]
        return []


def validate_system(
    num_states: int,
    transitions: Iterable[tuple[int, int]],
    initial: int,
    bad: Iterable[int],
    names: Sequence[str] | None = None,
    complete_sinks: bool = False,
) -> TransitionSystem:
    """Check raw model data and return the canonical system.

    Successor lists are deduplicated and sorted. States without successors
    are rejected unless ``complete_sinks`` is set, in which case they get a
    self-loop. Raises :class:`ValidationError` listing every problem found.
    """
    issues: list[Issue] = []
    if not isinstance(num_states, int) or num_states < 1:
        raise ValidationError([Issue("EmptySystem", f"need at least one state, got {num_states!r}")])

    def in_range(s) -> bool:
        return isinstance(s, int) and 0 <= s < num_states

    succ: list[set[int]] = [set() for _ in range(num_states)]
    for src, dst in transitions:
        if not (in_range(src) and in_range(dst)):
            issues.append(Issue("DanglingTransition", f"transition {src}->{dst} leaves 0..{num_states - 1}", (src, dst)))
            continue
        succ[src].add(dst)

    if not in_range(initial):
        issues.append(Issue("BadInitial", f"initial state {initial!r} is not a state", (initial,)))

    bad_set = set()
    for b in bad:
        if in_range(b):
            bad_set.add(b)
        else:
            issues.append(Issue("BadStateOutOfRange", f"bad state {b!r} is not a state", (b,)))

    for s in range(num_states):
        if not succ[s]:
            if complete_sinks:
                succ[s].add(s)
            else:
                issues.append(Issue("NoSuccessor", f"state {s} has no successor (use sink completion)", (s,)))

    if names is not None:
        names = list(names)
        if len(names) != num_states:
            issues.append(Issue("NameCount", f"{len(names)} names for {num_states} states"))
        elif len(set(names)) != len(names):
            seen = set()
            for i, nm in enumerate(names):
                if nm in seen:
                    issues.append(Issue("DuplicateName", f"name {nm!r} used twice", (i,)))
                seen.add(nm)

    if issues:
        raise ValidationError(issues)
    return TransitionSystem(
        num_states=num_states,
        successors=tuple(tuple(sorted(s)) for s in succ),
        initial=initial,
        bad=frozenset(bad_set),
        names=tuple(names) if names is not None else (),
    )


@dataclass(frozen=True)
class Counterexample:
    run: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.run)

    @property
    def states(self) -> frozenset[int]:
        return frozenset(self.run)

    def index(self, state: int) -> int:
        return self.run.index(state)


def validate_counterexample(ts: TransitionSystem, run: Sequence[int]) -> Counterexample:
    """Return the run as a :class:`Counterexample` or raise on the first violated clause."""
    run = tuple(run)

    def fail(code, msg, loc=()):
        raise ValidationError([Issue(code, msg, loc)])

    if not run:
        fail("EmptyRun", "counterexample must contain at least one state")
    for i, s in enumerate(run):
        if not (isinstance(s, int) and 0 <= s < ts.num_states):
            fail("UnknownState", f"run position {i} holds {s!r}", (i,))
    if run[0] != ts.initial:
        fail("NotFromInitial", f"run starts at {ts.names[run[0]]}, not the initial state", (0,))
    first_seen: dict[int, int] = {}
    for i, s in enumerate(run):
        if s in first_seen:
            fail("RepeatedState", f"state {ts.names[s]} occurs at positions {first_seen[s]} and {i}", (first_seen[s], i))
        first_seen[s] = i
        if i > 0 and not ts.has_transition(run[i - 1], s):
            fail("NotATransition", f"no transition {ts.names[run[i - 1]]}->{ts.names[s]}", (i - 1,))
        if i < len(run) - 1 and s in ts.bad:
            fail("EarlyBadState", f"bad state {ts.names[s]} reached before the end", (i,))
    if run[-1] not in ts.bad:
        fail("LastNotBad", f"run ends in {ts.names[run[-1]]}, which is not bad", (len(run) - 1,))
    return Counterexample(run)


@dataclass(frozen=True)
class StateGrouping:
    """Partition of the states into named blocks, ordered by smallest member."""

    names: tuple[str, ...]
    blocks: tuple[tuple[int, ...], ...]
    _owner: tuple[int, ...] = field(default=(), repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.blocks)

    def group_of(self, state: int) -> int:
        return self._owner[state]


def make_grouping(
    ts: TransitionSystem, groups: Iterable[tuple[str, Iterable[int]]] = ()
) -> StateGrouping:
    """Build a partition from explicit groups; uncovered states become singletons."""
    issues: list[Issue] = []
    owner = [-1] * ts.num_states
    blocks: list[tuple[str, list[int]]] = []
    seen_names: set[str] = set()
    for name, members in groups:
        members = sorted(set(members))
        if name in seen_names:
            issues.append(Issue("DuplicateGroup", f"group name {name!r} used twice"))
        seen_names.add(name)
        if not members:
            issues.append(Issue("EmptyGroup", f"group {name!r} has no states"))
            continue
        for s in members:
            if not (0 <= s < ts.num_states):
                issues.append(Issue("UnknownState", f"group {name!r} lists state {s}", (s,)))
            elif owner[s] != -1:
                issues.append(Issue("OverlappingGroups", f"state {s} is in {blocks[owner[s]][0]!r} and {name!r}", (s,)))
            else:
                owner[s] = len(blocks)
        blocks.append((name, members))
    for s in range(ts.num_states):
        if owner[s] == -1:
            nm = ts.names[s]
            if nm in seen_names:
                issues.append(Issue("DuplicateGroup", f"singleton group for state {s} clashes with group {nm!r}"))
            seen_names.add(nm)
            owner[s] = len(blocks)
            blocks.append((nm, [s]))
    if issues:
        raise ValidationError(issues)

    blocks.sort(key=lambda b: b[1][0])
    names = tuple(b[0] for b in blocks)
    members = tuple(tuple(b[1]) for b in blocks)
    owner_final = [0] * ts.num_states
    for g, block in enumerate(members):
        for s in block:
            owner_final[s] = g
    return StateGrouping(names, members, tuple(owner_final))


def singleton_grouping(ts: TransitionSystem) -> StateGrouping:
    return make_grouping(ts)


@dataclass(frozen=True)
class Coalition:
    """A set of players stored as an integer bitmask."""

    members: int
    player_count: int

    def __post_init__(self):
        if self.members < 0 or self.members >> self.player_count:
            raise ValueError(f"coalition {self.members:#x} exceeds {self.player_count} players")

    @classmethod
    def of(cls, players: Iterable[int], player_count: int) -> "Coalition":
        return cls(mask_of(players), player_count)

    @property
    def size(self) -> int:
        return self.members.bit_count()

    def __contains__(self, player: int) -> bool:
        return bool(self.members >> player & 1)

    def __iter__(self):
        return iter(bits(self.members))

    def __len__(self) -> int:
        return self.size


def mask_of(players: Iterable[int]) -> int:
    m = 0
    for p in players:
        m |= 1 << p
    return m


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out

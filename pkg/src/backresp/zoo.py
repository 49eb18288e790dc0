"""Parametric example models with counterexamples and groupings."""

from __future__ import annotations

from collections import deque
from typing import Callable, Hashable, Iterable

from .ts import make_grouping, validate_counterexample, validate_system
from .tsr import Model


class ParamOutOfRange(ValueError):
    pass


def _build(names, trans, initial, bad, run, groups=None) -> Model:
    index = {nm: i for i, nm in enumerate(names)}
    ts = validate_system(
        len(names),
        [(index[a], index[b]) for a, b in trans],
        index[initial],
        [index[b] for b in bad],
        names,
    )
    ce = validate_counterexample(ts, [index[s] for s in run])
    grouping = None
    if groups is not None:
        grouping = make_grouping(ts, [(g, [index[s] for s in members]) for g, members in groups])
    return Model(ts, ce, grouping)


def train(branches: int = 1) -> Model:
    """Railway with switch ``s1`` choosing ``s2`` or one of ``branches`` side switches.

    Every switch after ``s1`` routes to the destination or to the accident.
    With one branch the side switch is called ``s3``.
    """
    if not 1 <= branches <= 20:
        raise ParamOutOfRange("branches must lie in 1..20")
    side = ["s3"] if branches == 1 else [f"t{i}" for i in range(1, branches + 1)]
    names = ["s1", "s2", *side, "dest", "crash"]
    trans = [("s1", "s2")] + [("s1", t) for t in side]
    for sw in ["s2", *side]:
        trans += [(sw, "dest"), (sw, "crash")]
    trans += [("dest", "dest"), ("crash", "crash")]
    groups = None
    if branches > 1:
        groups = [("s1", ["s1"]), ("s2", ["s2"]), ("t", side)]
    return _build(names, trans, "s1", ["crash"], ["s1", "s2", "crash"], groups)


def dresden() -> Model:
    """Switch fragment of a station where a train reached the wrong platform.

    Exits leaving the fragment lead to the absorbing bad sink ``other``.
    """
    names = ["34", "36", "37", "39", "40", "41", "42", "35", "P12", "P13", "other"]
    trans = [
        ("34", "39"), ("34", "36"),
        ("39", "40"), ("39", "other"),
        ("40", "41"), ("40", "other"),
        ("41", "35"), ("41", "other"),
        ("36", "41"), ("36", "37"),
        ("37", "35"), ("37", "42"),
        ("42", "P13"), ("42", "other"),
        ("35", "P12"), ("35", "P13"),
        ("P12", "P12"), ("P13", "P13"), ("other", "other"),
    ]
    return _build(names, trans, "34", ["P12", "other"], ["34", "36", "41", "35", "P12"])


def _explore(initial: Hashable, successors: Callable[[Hashable], Iterable[Hashable]]):
    """Breadth-first reachable states and transitions, in discovery order."""
    order = [initial]
    seen = {initial}
    trans = []
    queue = deque([initial])
    while queue:
        s = queue.popleft()
        for t in successors(s):
            trans.append((s, t))
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    return order, trans


# Triangle board with 5 rows; holes numbered 1..15 row by row.
_HOLES = [(r, c) for r in range(5) for c in range(r + 1)]
_HOLE_NO = {rc: i + 1 for i, rc in enumerate(_HOLES)}
_DIRECTIONS = [(0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (-1, -1)]


def _jumps():
    out = []
    for r, c in _HOLES:
        for dr, dc in _DIRECTIONS:
            over, to = (r + dr, c + dc), (r + 2 * dr, c + 2 * dc)
            if to in _HOLE_NO:
                out.append((_HOLE_NO[(r, c)], _HOLE_NO[over], _HOLE_NO[to]))
    return out


PEG_JUMPS = _jumps()
DEFAULT_PEG_PLAY = "4-1 6-4 1-6 12-5 14-12 6-13 12-14 15-13 7-2 2-9 10-8 13-4"


def peg_board(pegs: int) -> str:
    return "".join("x" if pegs >> (h - 1) & 1 else "." for h in range(1, 16))


def peg_moves(pegs: int) -> list[tuple[int, int, int]]:
    return [
        (a, m, b)
        for a, m, b in PEG_JUMPS
        if pegs >> (a - 1) & 1 and pegs >> (m - 1) & 1 and not pegs >> (b - 1) & 1
    ]


def peg_apply(pegs: int, frm: int, to: int) -> int:
    for a, m, b in peg_moves(pegs):
        if a == frm and b == to:
            return pegs & ~(1 << (a - 1)) & ~(1 << (m - 1)) | (1 << (b - 1))
    raise ParamOutOfRange(f"illegal move {frm}->{to} on board {peg_board(pegs)}")


def peg_solitaire(played_moves: str = DEFAULT_PEG_PLAY, empty_hole: int = 1) -> Model:
    """Triangular peg solitaire; the run replays ``played_moves`` (``a-b`` jumps).

    Configurations with one peg are won (safe sinks); stuck configurations
    with several pegs are bad sinks.
    """
    if not 1 <= empty_hole <= 15:
        raise ParamOutOfRange("empty_hole must lie in 1..15")
    start = (1 << 15) - 1 & ~(1 << (empty_hole - 1))

    def succ(pegs):
        moves = peg_moves(pegs)
        if not moves:
            return [pegs]
        return sorted({peg_apply(pegs, a, b) for a, _, b in moves})

    order, trans = _explore(start, succ)
    names = ["p" + peg_board(s) for s in order]
    key = dict(zip(order, names))
    bad = [key[s] for s in order if not peg_moves(s) and s.bit_count() > 1]

    run = [start]
    for mv in played_moves.replace(",", " ").split():
        frm, to = (int(x) for x in mv.replace("->", "-").split("-"))
        run.append(peg_apply(run[-1], frm, to))
    return _build(names, [(key[a], key[b]) for a, b in trans], key[start], bad, [key[s] for s in run])


def run_index_of_board(model: Model, pegs_present: Iterable[int]) -> int:
    """Position in the run of the configuration with exactly these pegs."""
    pegs = 0
    for h in pegs_present:
        pegs |= 1 << (h - 1)
    name = "p" + peg_board(pegs)
    ts = model.system
    return [ts.names[s] for s in model.counterexample.run].index(name)


THINK, LEFT, EAT = 0, 1, 2


def dining_philosophers(N: int = 4) -> Model:
    """Round-robin scheduled philosophers; deadlock is everyone holding the left fork.

    On its turn a thinking philosopher may keep thinking or take its left
    fork; one holding the left fork takes the right one when free or puts
    the left one back; an eating philosopher releases both.
    """
    if not 2 <= N <= 8:
        raise ParamOutOfRange("N must lie in 2..8")

    def fork_free(phil, i):
        # fork i is the left fork of i and the right fork of i-1
        return phil[i] == THINK and phil[(i - 1) % N] != EAT

    def succ(state):
        turn, phil = state
        nxt = (turn + 1) % N
        me = phil[turn]
        options = []
        if me == THINK:
            options.append(THINK)
            if phil[(turn - 1) % N] != EAT:
                options.append(LEFT)
        elif me == LEFT:
            right = (turn + 1) % N
            if phil[right] == THINK:
                options.append(EAT)
            else:
                options.append(LEFT)
            options.append(THINK)
        else:
            options.append(THINK)
        return [(nxt, phil[:turn] + (o,) + phil[turn + 1:]) for o in options]

    start = (0, (THINK,) * N)
    order, trans = _explore(start, succ)
    label = "TLE"

    def name(state):
        turn, phil = state
        return f"turn{turn}:" + "".join(label[p] for p in phil)

    names = [name(s) for s in order]
    bad = [name(s) for s in order if all(p == LEFT for p in s[1])]
    run = [start]
    for i in range(N):
        turn, phil = run[-1]
        run.append(((turn + 1) % N, phil[:i] + (LEFT,) + phil[i + 1:]))
    groups = [
        (f"turn{i}", [name(s) for s in order if s[0] == i]) for i in range(N)
    ]
    return _build(names, [(name(a), name(b)) for a, b in trans], name(start), bad, [name(s) for s in run], groups)


def generals(N: int = 3) -> Model:
    """``N`` generals decide in turn to attack (A) or retreat (R).

    A mixed final decision is the bad outcome. The run has every general
    attack except the last. Groups collect each general's decision states.
    """
    if not 2 <= N <= 8:
        raise ParamOutOfRange("N must lie in 2..8")
    names, trans = [], []
    groups = []
    for i in range(N):
        layer = [""] if i == 0 else [p + d for p in groups[-1][2] for d in "AR"]
        groups.append((f"g{i}", [f"g{i}:{p or '-'}" for p in layer], layer))
        names += groups[-1][1]
    names += ["agreed", "split"]
    for i, (_, members, layer) in enumerate(groups):
        for nm, prefix in zip(members, layer):
            for d in "AR":
                full = prefix + d
                if i + 1 < N:
                    trans.append((nm, f"g{i + 1}:{full}"))
                else:
                    trans.append((nm, "agreed" if len(set(full)) == 1 else "split"))
    trans += [("agreed", "agreed"), ("split", "split")]
    run = [f"g{i}:{'A' * i or '-'}" for i in range(N)] + ["split"]
    return _build(names, trans, names[0], ["split"], run, [(g, m) for g, m, _ in groups])


FAMILIES = {
    "train": train,
    "dresden": dresden,
    "philosophers": dining_philosophers,
    "generals": generals,
    "pegsolitaire": peg_solitaire,
}


def generate(family: str, **params) -> Model:
    try:
        factory = FAMILIES[family]
    except KeyError:
        raise ParamOutOfRange(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    return factory(**params)

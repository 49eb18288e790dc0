"""Brute-force reference computations of power indices.

Slow on purpose: they enumerate every permutation or subset and take the
game as an opaque callable on frozensets of players.
"""

from fractions import Fraction
from itertools import combinations, permutations
from math import factorial

MAX_PERMUTATION_PLAYERS = 8
MAX_SUBSET_PLAYERS = 12


class TooManyPlayers(ValueError):
    pass


def shapley_by_permutations(value_fn, players):
    players = list(players)
    n = len(players)
    if n > MAX_PERMUTATION_PLAYERS:
        raise TooManyPlayers(f"{n} players; permutation oracle allows {MAX_PERMUTATION_PLAYERS}")
    totals = {x: 0 for x in players}
    for order in permutations(players):
        before = frozenset()
        prev = value_fn(before)
        for x in order:
            before = before | {x}
            cur = value_fn(before)
            totals[x] += cur - prev
            prev = cur
    return {x: Fraction(totals[x], factorial(n)) for x in players}


def index_by_definition(value_fn, weights, players):
    """Literal sum over all ``C`` not containing ``i`` of ``p_|C| * (v(C+i) - v(C))``."""
    players = list(players)
    n = len(players)
    if n > MAX_SUBSET_PLAYERS:
        raise TooManyPlayers(f"{n} players; subset oracle allows {MAX_SUBSET_PLAYERS}")
    if len(weights) != n:
        raise ValueError("weight vector length must equal the number of players")
    result = {}
    for i in players:
        others = [x for x in players if x != i]
        total = Fraction(0)
        for k in range(n):
            for c in combinations(others, k):
                c = frozenset(c)
                total += Fraction(weights[k]) * (value_fn(c | {i}) - value_fn(c))
        result[i] = total
    return result

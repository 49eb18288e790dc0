"""Semivalue weight vectors with exact rational entries."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence


class WeightError(ValueError):
    pass


class NotNormalized(WeightError):
    def __init__(self, actual: Fraction):
        self.actual = actual
        super().__init__(f"sum of C(n-1,k)*p_k is {actual}, expected 1")


class NegativeWeight(WeightError):
    def __init__(self, k: int, value: Fraction):
        self.k = k
        super().__init__(f"p_{k} = {value} is negative")


@dataclass(frozen=True)
class WeightVector:
    """Weights ``p_0..p_{n-1}``; ``p[k]`` weighs coalitions of size ``k``."""

    p: tuple[Fraction, ...]
    name: str = "custom"

    @property
    def n(self) -> int:
        return len(self.p)

    def __getitem__(self, k: int) -> Fraction:
        return self.p[k]

    @cached_property
    def size_masses(self) -> tuple[Fraction, ...]:
        """Total weight of all size-``k`` coalitions that exclude a given player."""
        return tuple(c * pk for c, pk in zip(binomial_row(self.n - 1), self.p))

    def size_mass(self, k: int) -> Fraction:
        return self.size_masses[k]


def binomial_row(m: int) -> list[int]:
    """``[C(m, 0), ..., C(m, m)]``."""
    row = [1]
    for k in range(m):
        row.append(row[-1] * (m - k) // (k + 1))
    return row


def normalization(p: Sequence[Fraction]) -> Fraction:
    return sum(WeightVector(tuple(Fraction(x) for x in p)).size_masses, Fraction(0))


def shapley_weights(n: int) -> WeightVector:
    if n < 1:
        raise WeightError("need at least one player")
    # (n-1-i)! i! / n!  ==  1 / (n * C(n-1, i))
    return WeightVector(tuple(Fraction(1, n * c) for c in binomial_row(n - 1)), "shapley")


def banzhaf_weights(n: int) -> WeightVector:
    if n < 1:
        raise WeightError("need at least one player")
    return WeightVector((Fraction(1, 2 ** (n - 1)),) * n, "banzhaf")


def validate_custom(p: Sequence, allow_negative: bool = False) -> WeightVector:
    p = tuple(Fraction(x) for x in p)
    if not p:
        raise WeightError("empty weight vector")
    if not allow_negative:
        for k, pk in enumerate(p):
            if pk < 0:
                raise NegativeWeight(k, pk)
    total = normalization(p)
    if total != 1:
        raise NotNormalized(total)
    return WeightVector(p)


def make_weights(index: str, n: int) -> WeightVector:
    if index == "shapley":
        return shapley_weights(n)
    if index == "banzhaf":
        return banzhaf_weights(n)
    raise WeightError(f"unknown index {index!r}")


def parse_weights(text: str, allow_negative: bool = False) -> WeightVector:
    """Read ``weights <n>`` followed by ``w <k> <num>/<den>`` lines."""
    n = None
    entries: dict[int, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "weights" and len(tok) == 2 and n is None:
                n = int(tok[1])
            elif tok[0] == "w" and len(tok) == 3 and n is not None:
                k = int(tok[1])
                if not 0 <= k < n or k in entries:
                    raise WeightError(f"line {lineno}: weight id {k} out of range or repeated")
                entries[k] = Fraction(tok[2])
            else:
                raise WeightError(f"line {lineno}: unexpected {line!r}")
        except (ValueError, ZeroDivisionError) as e:
            if isinstance(e, WeightError):
                raise
            raise WeightError(f"line {lineno}: {e}") from None
    if n is None:
        raise WeightError("missing 'weights <n>' header")
    missing = [k for k in range(n) if k not in entries]
    if missing:
        raise WeightError(f"missing weights for sizes {missing}")
    wv = validate_custom([entries[k] for k in range(n)], allow_negative)
    return wv


def emit_weights(wv: WeightVector) -> str:
    lines = [f"weights {wv.n}"]
    lines += [f"w {k} {pk.numerator}/{pk.denominator}" for k, pk in enumerate(wv.p)]
    return "\n".join(lines) + "\n"

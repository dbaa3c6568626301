"""
The exclusion game: Alice holds ``x`` in {0,1}^n, Bob holds an ``m``-subset
``y`` of positions, and Bob wins by outputting any ``z`` other than ``x``
restricted to ``y``.

Bit strings are ``str`` of ``'0'``/``'1'``; the leftmost character is
position 1. Subsets are ascending tuples of 1-based positions.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Iterator

DEFAULT_EXHAUSTIVE_CAP = 12


class CapExceeded(ValueError):
    """Exhaustive enumeration requested beyond the configured size cap."""


def exhaustive_cap(default: int = DEFAULT_EXHAUSTIVE_CAP) -> int:
    env = os.environ.get("EXLAB_MAX_QUBITS")
    return int(env) if env else default


@dataclass(frozen=True)
class GameInstance:
    n: int
    m: int
    gamma: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if not 1 <= self.m <= self.n:
            raise ValueError(f"need 1 <= m <= n, got n={self.n}, m={self.m}")
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")

    @property
    def num_inputs(self) -> int:
        return (1 << self.n) * comb(self.n, self.m)


@dataclass(frozen=True)
class InputPair:
    x: str
    y: tuple

    def __post_init__(self):
        check_subset(self.y, len(self.x))


def check_bits(s: str) -> str:
    if not isinstance(s, str) or any(c not in "01" for c in s):
        raise ValueError(f"not a bit string: {s!r}")
    return s


def check_subset(y, n: int) -> tuple:
    y = tuple(int(i) for i in y)
    if any(b <= a for a, b in zip(y, y[1:])):
        raise ValueError(f"subset must be strictly increasing: {y}")
    if y and (y[0] < 1 or y[-1] > n):
        raise ValueError(f"subset {y} out of range 1..{n}")
    return y


def canonical_subset(y, n: int) -> tuple:
    return check_subset(sorted(int(i) for i in y), n)


def restrict(x: str, y) -> str:
    """``x`` restricted to the positions in ``y``, in ascending position order."""
    check_bits(x)
    y = canonical_subset(y, len(x))
    return "".join(x[i - 1] for i in y)


def is_win(x: str, y, z: str) -> bool:
    target = restrict(x, y)
    check_bits(z)
    if len(z) != len(target):
        raise ValueError(f"answer length {len(z)} != |y| = {len(target)}")
    return z != target


def complement_bits(s: str) -> str:
    return s.translate(str.maketrans("01", "10"))


def all_strings(n: int) -> Iterator[str]:
    for bits in product("01", repeat=n):
        yield "".join(bits)


def all_subsets(n: int, m: int) -> Iterator[tuple]:
    return combinations(range(1, n + 1), m)


def enumerate_inputs(n: int, m: int, cap: int | None = None) -> Iterator[InputPair]:
    """Every ``(x, y)`` pair, ``x`` outer and ``y`` inner, both lexicographic."""
    cap = exhaustive_cap() if cap is None else cap
    if n > cap:
        raise CapExceeded(
            f"n={n} exceeds the exhaustive cap {cap}; use sampled mode "
            "or raise EXLAB_MAX_QUBITS"
        )
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got n={n}, m={m}")
    subsets = list(all_subsets(n, m))
    for x in all_strings(n):
        for y in subsets:
            yield InputPair(x, y)


def subset_mask(y, n: int) -> int:
    """Bitmask of ``y`` with position 1 as the most significant of ``n`` bits."""
    mask = 0
    for i in y:
        mask |= 1 << (n - i)
    return mask

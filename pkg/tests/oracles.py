"""Independent reference computations used only by the tests."""

from fractions import Fraction
from math import comb

import numpy as np


def parity(v: int) -> int:
    return bin(v).count("1") & 1


def naive_wht(values):
    """alpha_b = 2^-n sum_x f(x) (-1)^{b.x} by the O(4^n) double sum."""
    size = len(values)
    out = np.zeros(size)
    for b in range(size):
        acc = 0.0
        for x in range(size):
            acc += values[x] * (-1 if parity(b & x) else 1)
        out[b] = acc / size
    return out


def character_matrix(n: int) -> np.ndarray:
    size = 1 << n
    return np.array([[(-1) ** parity(b & x) for x in range(size)] for b in range(size)], dtype=float)


def binomial_tail_exact(j: int, p: float, cutoff: int) -> Fraction:
    """P[Bin(j, p) <= cutoff] in exact rational arithmetic on the float p."""
    p = Fraction(p)
    q = 1 - p
    return sum((comb(j, i) * p**i * q ** (j - i) for i in range(0, min(cutoff, j) + 1)), Fraction(0))


def direct_final_state(unitaries, initial, phases):
    """U_t O_x ... O_x U_0 |initial> by explicit dense matrix products."""
    oracle = np.diag(phases)
    op = unitaries[0]
    for u in unitaries[1:]:
        op = u @ oracle @ op
    return op @ initial

"""Fourier analysis of real functions on the Boolean hypercube {0,1}^n.

Inputs and masks are encoded as unsigned integers: logical bit ``i`` (1..n)
lives at bit position ``i - 1``. The dummy index 0 (always reading 0) is
never stored.

Coefficients use the normalization

    alpha_b = 2^-n * sum_x f(x) * (-1)^(b.x),   f = sum_b alpha_b chi_b,

so no extra factor appears when a function is rebuilt from its spectrum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import CostGuardError, DimensionError, FormatError

ZERO_THRESHOLD = 1e-12
MAX_TABLE_BITS = 24


def popcount(v: int) -> int:
    return bin(v).count("1")


def _popcount_array(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    count = np.zeros(a.shape, dtype=np.int64)
    while np.any(a):
        count += (a & np.uint64(1)).astype(np.int64)
        a >>= np.uint64(1)
    return count


def _check_bits(n: int, bits: int, what: str) -> None:
    if n < 0:
        raise DimensionError(f"{what}: n must be non-negative, got {n}")
    if bits < 0 or bits >> n:
        raise DimensionError(f"{what}: word {bits:#x} does not fit in n={n} bits")


@dataclass(frozen=True)
class InputWord:
    """An input x = x_1 ... x_n, with the convention x_0 = 0."""

    n: int
    bits: int = 0

    def __post_init__(self):
        _check_bits(self.n, self.bits, "InputWord")

    @classmethod
    def from_bits(cls, values: Iterable[int]) -> "InputWord":
        """Build from ``(x_1, ..., x_n)``."""
        values = list(values)
        word = 0
        for i, v in enumerate(values):
            if v not in (0, 1):
                raise ValueError(f"bit x_{i + 1} must be 0 or 1, got {v!r}")
            word |= v << i
        return cls(len(values), word)

    def bit(self, i: int) -> int:
        if not 0 <= i <= self.n:
            raise IndexError(f"bit index {i} outside 0..{self.n}")
        if i == 0:
            return 0
        return (self.bits >> (i - 1)) & 1

    @property
    def weight(self) -> int:
        return popcount(self.bits)

    def to_tuple(self) -> tuple[int, ...]:
        return tuple(self.bit(i) for i in range(1, self.n + 1))


@dataclass(frozen=True)
class Mask:
    """A subset b of {1..n}, one bit per logical index."""

    n: int
    bits: int = 0

    def __post_init__(self):
        _check_bits(self.n, self.bits, "Mask")

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "Mask":
        word = 0
        for i in indices:
            if not 1 <= i <= n:
                raise IndexError(f"mask index {i} outside 1..{n}")
            word |= 1 << (i - 1)
        return cls(n, word)

    @property
    def size(self) -> int:
        return popcount(self.bits)

    def indices(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if (self.bits >> i) & 1)


def _as_word(x, n: int, what: str) -> int:
    if isinstance(x, (InputWord, Mask)):
        if x.n != n:
            raise DimensionError(f"{what} has n={x.n}, expected n={n}")
        return x.bits
    x = int(x)
    _check_bits(n, x, what)
    return x


def chi(b: Mask, x: InputWord) -> int:
    """Character chi_b(x) = (-1)^(b.x)."""
    if b.n != x.n:
        raise DimensionError(f"mask has n={b.n} but input has n={x.n}")
    return -1 if popcount(b.bits & x.bits) & 1 else 1


@dataclass(frozen=True, eq=False)
class RealHypercubeFunction:
    """A function {0,1}^n -> R stored as its 2^n values."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] != 1 << self.n:
            raise DimensionError(
                f"expected {1 << self.n} values for n={self.n}, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, n: int, fn) -> "RealHypercubeFunction":
        """Tabulate ``fn(InputWord)`` over all 2^n inputs."""
        return cls(n, [fn(InputWord(n, x)) for x in range(1 << n)])

    def __call__(self, x) -> float:
        return float(self.values[_as_word(x, self.n, "input")])

    def to_json(self) -> dict:
        return {"n": self.n, "values": [float(v) for v in self.values]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "RealHypercubeFunction":
        try:
            return cls(int(doc["n"]), doc["values"])
        except KeyError as exc:
            raise FormatError(f"function document missing key {exc}") from None


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Coefficients alpha_b indexed by the integer encoding of b."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.float64)
        if coeffs.ndim != 1 or coeffs.shape[0] != 1 << self.n:
            raise DimensionError(
                f"expected {1 << self.n} coefficients for n={self.n}, got shape {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def __getitem__(self, b) -> float:
        return float(self.coeffs[_as_word(b, self.n, "mask")])

    def support(self, threshold: float = ZERO_THRESHOLD) -> np.ndarray:
        """Masks with |alpha_b| > threshold, ascending."""
        return np.flatnonzero(np.abs(self.coeffs) > threshold)

    def to_json(self) -> dict:
        return {"n": self.n, "coeffs": [float(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "FourierSpectrum":
        try:
            return cls(int(doc["n"]), doc["coeffs"])
        except KeyError as exc:
            raise FormatError(f"spectrum document missing key {exc}") from None


@dataclass(frozen=True)
class MonomialPolynomial:
    """p(x) = sum_S c_S prod_{i in S} x_i, with S a subset of {1..n}."""

    n: int
    terms: Mapping[frozenset, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for vars_, c in self.terms.items():
            key = frozenset(int(i) for i in vars_)
            if any(not 1 <= i <= self.n for i in key):
                raise DimensionError(f"term {sorted(key)} uses a variable outside 1..{self.n}")
            c = float(c)
            if not np.isfinite(c):
                raise ValueError(f"coefficient of {sorted(key)} is not finite")
            clean[key] = clean.get(key, 0.0) + c
        object.__setattr__(self, "terms", clean)

    @property
    def degree(self) -> int:
        return max((len(s) for s, c in self.terms.items() if c != 0.0), default=0)

    def __call__(self, x) -> float:
        word = _as_word(x, self.n, "input")
        total = 0.0
        for s, c in self.terms.items():
            if all((word >> (i - 1)) & 1 for i in s):
                total += c
        return total

    def to_json(self) -> dict:
        terms = sorted(self.terms.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        return {
            "n": self.n,
            "terms": [{"vars": sorted(s), "coeff": c} for s, c in terms],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "MonomialPolynomial":
        try:
            n = int(doc["n"])
            terms: dict = {}
            for k, term in enumerate(doc["terms"]):
                try:
                    key = frozenset(int(i) for i in term["vars"])
                    terms[key] = terms.get(key, 0.0) + float(term["coeff"])
                except (KeyError, TypeError, ValueError) as exc:
                    raise FormatError(f"terms[{k}]: malformed term ({exc})") from None
        except KeyError as exc:
            raise FormatError(f"polynomial document missing key {exc}") from None
        return cls(n, terms)


def wht_forward(f: RealHypercubeFunction) -> FourierSpectrum:
    """Fourier coefficients of ``f`` via the fast butterfly, O(n 2^n)."""
    coeffs = kernels.fwht(f.values)
    coeffs *= 1.0 / (1 << f.n)
    return FourierSpectrum(f.n, coeffs)


def wht_inverse(s: FourierSpectrum) -> RealHypercubeFunction:
    """Evaluate the spectrum at every input (the transform is its own inverse up to 2^n)."""
    return RealHypercubeFunction(s.n, kernels.fwht(s.coeffs))


def eval_spectrum(s: FourierSpectrum, x) -> float:
    """sum_b alpha_b chi_b(x) at a single input."""
    word = _as_word(x, s.n, "input")
    masks = np.arange(1 << s.n, dtype=np.uint64)
    signs = 1 - 2 * (_popcount_array(masks & np.uint64(word)) & 1)
    return float(np.dot(s.coeffs, signs))


def l1_norm(s: FourierSpectrum) -> float:
    """Fourier 1-norm L = sum_b |alpha_b|."""
    return float(np.abs(s.coeffs).sum())


def degree(s: FourierSpectrum, threshold: float = ZERO_THRESHOLD) -> int:
    """Largest |b| with |alpha_b| > threshold; 0 for the zero spectrum."""
    support = s.support(threshold)
    if support.size == 0:
        return 0
    return int(_popcount_array(support).max())


def monomials_to_fourier(p: MonomialPolynomial) -> FourierSpectrum:
    """Rewrite a multilinear polynomial in the character basis.

    Each x_i is replaced by (1 - chi_{e_i}) / 2, so a monomial over S
    expands to 2^-|S| sum_{T subset S} (-1)^|T| chi_T.
    """
    if p.n > MAX_TABLE_BITS:
        raise CostGuardError(f"n={p.n} exceeds the table guard of {MAX_TABLE_BITS} bits")
    coeffs = np.zeros(1 << p.n)
    for s, c in p.terms.items():
        if c == 0.0:
            continue
        bits = [1 << (i - 1) for i in sorted(s)]
        scale = c / (1 << len(bits))
        for r in range(len(bits) + 1):
            sign = -scale if r & 1 else scale
            for chosen in itertools.combinations(bits, r):
                coeffs[sum(chosen)] += sign
    return FourierSpectrum(p.n, coeffs)


def function_to_monomials(f: RealHypercubeFunction) -> MonomialPolynomial:
    """Exact multilinear representation of ``f`` by Moebius inversion."""
    if f.n > MAX_TABLE_BITS:
        raise CostGuardError(f"n={f.n} exceeds the table guard of {MAX_TABLE_BITS} bits")
    c = np.array(f.values, dtype=np.float64)
    for i in range(f.n):
        step = 1 << i
        view = c.reshape(-1, 2, step)
        view[:, 1, :] -= view[:, 0, :]
    terms = {}
    for s in np.flatnonzero(np.abs(c) > ZERO_THRESHOLD):
        terms[frozenset(i + 1 for i in range(f.n) if (int(s) >> i) & 1)] = float(c[s])
    return MonomialPolynomial(f.n, terms)

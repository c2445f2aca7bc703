"""Exact state-vector simulation of quantum query algorithms.

The Hilbert space has basis |i>|j> with i in 0..n and j in 1..m, stored at
flat index ``i * m + (j - 1)``. The query operator is the diagonal phase
oracle O_x |i>|j> = (-1)^{x_i} |i>|j>, with x_0 = 0.

An algorithm with t queries applies U_t O_x U_{t-1} ... O_x U_0 to a fixed
initial state and measures with a complete set of orthogonal projectors
(CSOP).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import CostGuardError, DimensionError, FormatError, ValidationError
from .fourier import InputWord, RealHypercubeFunction, _as_word

TOLERANCE = 1e-9
MAX_SWEEP_BITS = 20
MAX_RANDOM_DIM = 64
MAX_RANDOM_QUERIES = 4


def basis_index(i: int, j: int, m: int) -> int:
    """Flat index of |i>|j> (j is 1-based)."""
    return i * m + (j - 1)


@dataclass(frozen=True, eq=False)
class CSOP:
    """Output labels and one projector per label."""

    labels: tuple
    projectors: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        projectors = tuple(np.array(p, dtype=np.complex128) for p in self.projectors)
        if len(labels) != len(projectors):
            raise DimensionError(f"{len(labels)} labels but {len(projectors)} projectors")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels}")
        for p in projectors:
            p.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "projectors", projectors)

    def projector(self, z) -> np.ndarray:
        try:
            return self.projectors[self.labels.index(z)]
        except ValueError:
            raise KeyError(f"unknown output label {z!r}; labels are {self.labels}") from None


@dataclass
class ValidationReport:
    """Worst deviation per check; ``failures`` lists checks above tolerance."""

    deviations: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    details: list = field(default_factory=list)
    tolerance: float = TOLERANCE

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, name: str, deviation: float) -> None:
        deviation = float(deviation)
        self.deviations[name] = max(self.deviations.get(name, 0.0), deviation)
        if not deviation <= self.tolerance and name not in self.failures:
            self.failures.append(name)

    def summary(self) -> str:
        lines = [f"{name}: {dev:.3e}" + ("  FAIL" if name in self.failures else "")
                 for name, dev in self.deviations.items()]
        return "\n".join(lines + self.details)


@dataclass(frozen=True, eq=False)
class QueryAlgorithm:
    n: int
    m: int
    t: int
    initial: np.ndarray
    unitaries: tuple
    csop: CSOP

    def __post_init__(self):
        if self.n < 0 or self.m < 1 or self.t < 0:
            raise DimensionError(f"need n >= 0, m >= 1, t >= 0; got n={self.n}, m={self.m}, t={self.t}")
        dim = (self.n + 1) * self.m
        initial = np.array(self.initial, dtype=np.complex128).reshape(-1)
        if initial.shape != (dim,):
            raise DimensionError(f"initial state has length {initial.size}, expected {dim}")
        unitaries = tuple(np.array(u, dtype=np.complex128) for u in self.unitaries)
        if len(unitaries) != self.t + 1:
            raise DimensionError(f"expected {self.t + 1} unitaries for t={self.t}, got {len(unitaries)}")
        for k, u in enumerate(unitaries):
            if u.shape != (dim, dim):
                raise DimensionError(f"U_{k} has shape {u.shape}, expected {(dim, dim)}")
            u.setflags(write=False)
        for z, p in zip(self.csop.labels, self.csop.projectors):
            if p.shape != (dim, dim):
                raise DimensionError(f"projector P_{z} has shape {p.shape}, expected {(dim, dim)}")
        initial.setflags(write=False)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "unitaries", unitaries)

    @property
    def dim(self) -> int:
        return (self.n + 1) * self.m

    @functools.cached_property
    def validation(self) -> ValidationReport:
        return validate(self)

    def cumulative_unitary(self, j: int) -> np.ndarray:
        """U~_j = U_j ... U_0."""
        return self._cumulative[j]

    @functools.cached_property
    def _cumulative(self) -> tuple:
        out = []
        acc = np.eye(self.dim, dtype=np.complex128)
        for u in self.unitaries:
            acc = u @ acc
            out.append(acc)
        return tuple(out)


def validate(alg: QueryAlgorithm, tolerance: float = TOLERANCE) -> ValidationReport:
    """Check unitarity, the CSOP axioms and the initial norm.

    Deviations are Frobenius norms (absolute value for the initial norm).
    """
    report = ValidationReport(tolerance=tolerance)
    eye = np.eye(alg.dim)
    for k, u in enumerate(alg.unitaries):
        deviation = np.linalg.norm(u.conj().T @ u - eye)
        report.record("unitarity", deviation)
        if deviation > tolerance:
            report.details.append(f"U_{k} is not unitary (deviation {deviation:.3e})")
    report.record("initial_norm", abs(np.linalg.norm(alg.initial) - 1.0))
    projectors = alg.csop.projectors
    total = np.zeros((alg.dim, alg.dim), dtype=np.complex128)
    for a, p in enumerate(projectors):
        report.record("hermitian", np.linalg.norm(p - p.conj().T))
        report.record("idempotent", np.linalg.norm(p @ p - p))
        for q in projectors[a + 1:]:
            report.record("orthogonal", np.linalg.norm(p @ q))
        total += p
    report.record("completeness", np.linalg.norm(total - eye))
    return report


def _require_valid(alg: QueryAlgorithm) -> None:
    report = alg.validation
    if not report.ok:
        raise ValidationError(
            f"algorithm failed validation ({', '.join(report.failures)}):\n{report.summary()}",
            report,
        )


def oracle_phases(x, n: int, m: int) -> np.ndarray:
    """Diagonal of O_x as a +-1 vector of length (n+1)*m."""
    word = _as_word(x, n, "input")
    bits = np.array([0] + [(word >> i) & 1 for i in range(n)], dtype=np.int64)
    return np.repeat(1 - 2 * bits, m).astype(np.float64)


def oracle_apply(x: InputWord, v: np.ndarray, m: int = 1) -> np.ndarray:
    """O_x v. The register size n is taken from ``x``."""
    v = np.asarray(v, dtype=np.complex128)
    if not isinstance(x, InputWord):
        raise TypeError("oracle_apply needs an InputWord to know n")
    if v.shape != ((x.n + 1) * m,):
        raise DimensionError(f"vector length {v.shape} does not match (n+1)*m = {(x.n + 1) * m}")
    return v * oracle_phases(x, x.n, m)


def run(alg: QueryAlgorithm, x) -> np.ndarray:
    """Final state U_t O_x U_{t-1} ... O_x U_0 |initial>."""
    _require_valid(alg)
    phases = oracle_phases(x, alg.n, alg.m)
    v = alg.unitaries[0] @ alg.initial
    for u in alg.unitaries[1:]:
        v = u @ (phases * v)
    return v


def output_probability(alg: QueryAlgorithm, x, z) -> float:
    """pi_z(x) = ||P_z |final>||^2."""
    p = alg.csop.projector(z)
    v = p @ run(alg, x)
    return float(np.vdot(v, v).real)


def _all_phases(n: int, m: int, words: np.ndarray) -> np.ndarray:
    bits = (words[None, :] >> np.arange(n, dtype=np.int64)[:, None]) & 1
    bits = np.vstack([np.zeros((1, words.size), dtype=np.int64), bits])
    return np.repeat(1.0 - 2.0 * bits, m, axis=0)


def final_states(alg: QueryAlgorithm, words: np.ndarray | None = None) -> np.ndarray:
    """Final states as columns, one per input word (default: all 2^n)."""
    _require_valid(alg)
    if words is None:
        words = np.arange(1 << alg.n, dtype=np.int64)
    phases = _all_phases(alg.n, alg.m, np.asarray(words, dtype=np.int64))
    v = alg.unitaries[0] @ alg.initial
    states = np.repeat(v[:, None], phases.shape[1], axis=1)
    for u in alg.unitaries[1:]:
        states = u @ (phases * states)
    return states


def output_probability_function(alg: QueryAlgorithm, z, chunk: int = 1 << 14) -> RealHypercubeFunction:
    """Tabulate pi_z over every input in {0,1}^n."""
    if alg.n > MAX_SWEEP_BITS:
        raise CostGuardError(f"n={alg.n} exceeds the sweep guard of {MAX_SWEEP_BITS}")
    p = alg.csop.projector(z)
    size = 1 << alg.n
    values = np.empty(size)
    for start in range(0, size, chunk):
        words = np.arange(start, min(size, start + chunk), dtype=np.int64)
        proj = p @ final_states(alg, words)
        values[start:start + words.size] = np.einsum("ij,ij->j", proj.conj(), proj).real
    return RealHypercubeFunction(alg.n, values)


@dataclass
class ProbabilityReport:
    pi: dict
    residual: np.ndarray

    @property
    def worst_residual(self) -> float:
        return float(np.max(np.abs(self.residual)))

    def in_range(self, tol: float = TOLERANCE) -> bool:
        return all(np.all(f.values >= -tol) and np.all(f.values <= 1 + tol) for f in self.pi.values())


def probability_report(alg: QueryAlgorithm) -> ProbabilityReport:
    pi = {z: output_probability_function(alg, z) for z in alg.csop.labels}
    residual = 1.0 - sum(f.values for f in pi.values())
    return ProbabilityReport(pi, residual)


def build_deutsch_jozsa(n: int) -> QueryAlgorithm:
    """One-query Deutsch-Jozsa with pi_1(x) = (n - 2|x|)^2 / n^2.

    U_0 is the Householder reflection swapping |0>|1> with the uniform
    superposition over |i>|1>, i = 1..n, and U_1 = U_0^dagger. P_1 projects
    onto |0>|1>.
    """
    if n < 2 or n % 2:
        raise ValueError(f"Deutsch-Jozsa needs an even n >= 2, got {n}")
    dim = n + 1
    e0 = np.zeros(dim)
    e0[0] = 1.0
    uniform = np.full(dim, 1.0 / math.sqrt(n))
    uniform[0] = 0.0
    w = e0 - uniform
    u0 = np.eye(dim) - 2.0 * np.outer(w, w) / np.dot(w, w)
    p1 = np.outer(e0, e0)
    csop = CSOP((0, 1), (np.eye(dim) - p1, p1))
    return QueryAlgorithm(n, 1, 1, e0, (u0, u0.conj().T), csop)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary: QR of a complex Gaussian matrix with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def build_random_algorithm(n: int, m: int, t: int, seed: int) -> QueryAlgorithm:
    """Random t-query algorithm; deterministic in ``seed``.

    The CSOP splits a random orthonormal basis into two nonempty blocks.
    """
    dim = (n + 1) * m
    if dim > MAX_RANDOM_DIM or t > MAX_RANDOM_QUERIES:
        raise CostGuardError(
            f"(n+1)*m = {dim} (max {MAX_RANDOM_DIM}) or t = {t} (max {MAX_RANDOM_QUERIES}) too large"
        )
    if dim < 2:
        raise DimensionError("need (n+1)*m >= 2 to split the output space")
    rng = np.random.default_rng(seed)
    unitaries = tuple(random_unitary(dim, rng) for _ in range(t + 1))
    initial = np.zeros(dim, dtype=np.complex128)
    initial[0] = 1.0
    basis = random_unitary(dim, rng)
    rank = int(rng.integers(1, dim))
    block = basis[:, :rank]
    p1 = block @ block.conj().T
    p0 = np.eye(dim) - p1
    p0 = (p0 + p0.conj().T) / 2
    return QueryAlgorithm(n, m, t, initial, unitaries, CSOP((0, 1), (p0, p1)))


def _encode_matrix(a: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in a]


def _decode_vector(doc, where: str) -> np.ndarray:
    try:
        arr = np.array(doc, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: not an array of [re, im] pairs ({exc})") from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise FormatError(f"{where}: entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def algorithm_to_json(alg: QueryAlgorithm) -> dict:
    return {
        "n": alg.n,
        "m": alg.m,
        "t": alg.t,
        "initial": [[float(v.real), float(v.imag)] for v in alg.initial],
        "unitaries": [_encode_matrix(u) for u in alg.unitaries],
        "csop": {
            "labels": list(alg.csop.labels),
            "projectors": [_encode_matrix(p) for p in alg.csop.projectors],
        },
    }


def algorithm_from_json(doc: Mapping) -> QueryAlgorithm:
    """Parse the algorithm file format; raises FormatError with the failing field."""
    try:
        n, m, t = int(doc["n"]), int(doc["m"]), int(doc["t"])
        initial = _decode_vector(doc["initial"], "initial")
        unitaries = tuple(
            _decode_vector(u, f"unitaries[{k}]") for k, u in enumerate(doc["unitaries"])
        )
        csop_doc = doc["csop"]
        projectors = tuple(
            _decode_vector(p, f"csop.projectors[{k}]") for k, p in enumerate(csop_doc["projectors"])
        )
        labels = tuple(csop_doc["labels"])
    except KeyError as exc:
        raise FormatError(f"algorithm document missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(f"algorithm document malformed: {exc}") from None
    try:
        return QueryAlgorithm(n, m, t, initial, unitaries, CSOP(labels, projectors))
    except DimensionError as exc:
        raise FormatError(str(exc)) from None


def constant_algorithm(n: int, probability_one: float) -> QueryAlgorithm:
    """t = 0 algorithm whose output-1 probability is ``probability_one`` for all x."""
    if n < 1 or not 0.0 <= probability_one <= 1.0:
        raise ValueError("need n >= 1 and a probability in [0, 1]")
    dim = n + 1
    initial = np.zeros(dim, dtype=np.complex128)
    initial[0] = math.sqrt(1.0 - probability_one)
    initial[1] = math.sqrt(probability_one)
    p1 = np.zeros((dim, dim))
    p1[1, 1] = 1.0
    csop = CSOP((0, 1), (np.eye(dim) - p1, p1))
    return QueryAlgorithm(n, 1, 0, initial, (np.eye(dim),), csop)

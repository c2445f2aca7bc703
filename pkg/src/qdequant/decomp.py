"""State decomposition of a query algorithm into phase-flip components.

For a t-query algorithm, level j (0 <= j < t) uses the conjugated block
projectors P~_i^j = U~_j^dagger Pbar_i U~_j, where Pbar_i projects onto
span{|i>|j'>} and U~_j = U_j ... U_0. The component for an index tuple
k = (k_0, ..., k_{t-1}) is

    Psi(k) = P~_{k_{t-1}}^{t-1} ... P~_{k_0}^0 |initial>,

and the final state is recovered as

    U~_t^dagger |final(x)> = sum_k (-1)^{x_{k_0} + ... + x_{k_{t-1}}} Psi(k).

Each tuple carries the XOR mask of its nonzero entries, which is the
character whose sign the component picks up. Pairs (k, h) then land on
b = mask(k) ^ mask(h).

``include_final_level=True`` adds the level j = t as well, giving t + 1
phases. Its reconstruction equals U~_t^dagger O_x |final(x)>; the
measurement-based metrics are only defined for the default form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CostGuardError, DimensionError, FormatError
from .fourier import _as_word, _popcount_array
from .qqm import QueryAlgorithm, _require_valid, oracle_phases, run

ZERO_THRESHOLD = 1e-12
MAX_TUPLES = 10**7


@dataclass(frozen=True, eq=False)
class StateDecomposition:
    n: int
    m: int
    t: int
    tuples: tuple
    vectors: np.ndarray
    masks: np.ndarray
    discarded_mass: float
    threshold: float
    final_unitary: np.ndarray
    csop: object
    include_final_level: bool = False

    @property
    def levels(self) -> int:
        return self.t + int(self.include_final_level)

    @property
    def count(self) -> int:
        return len(self.tuples)

    def norms_sq(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.vectors.conj(), self.vectors).real

    def measurement(self, z) -> np.ndarray:
        """U~_t^dagger P_z U~_t, the projector seen by the components."""
        if self.include_final_level:
            raise ValueError("measurement metrics need the default decomposition (t levels)")
        p = self.csop.projector(z)
        u = self.final_unitary
        return u.conj().T @ p @ u

    def gram(self, z) -> np.ndarray:
        """Matrix of <Psi(k)| M_z |Psi(h)> over stored components."""
        v = self.vectors
        return v.conj() @ self.measurement(z) @ v.T

    def to_json(self) -> dict:
        return {
            "metadata": {
                "n": self.n,
                "m": self.m,
                "t": self.t,
                "threshold": self.threshold,
                "levels": self.levels,
                "discarded_mass": self.discarded_mass,
            },
            "components": [
                {"tuple": list(k), "vector": [[float(a.real), float(a.imag)] for a in vec]}
                for k, vec in zip(self.tuples, self.vectors)
            ],
        }


def _tuple_mask(k) -> int:
    mask = 0
    for i in k:
        if i:
            mask ^= 1 << (i - 1)
    return mask


def decompose(alg: QueryAlgorithm, include_final_level: bool = False,
              threshold: float = ZERO_THRESHOLD) -> StateDecomposition:
    """Build the components level by level, pruning squared norms <= threshold."""
    if (alg.n + 1) ** (alg.t + 1) > MAX_TUPLES:
        raise CostGuardError(
            f"(n+1)^(t+1) = {(alg.n + 1) ** (alg.t + 1)} exceeds the guard {MAX_TUPLES}"
        )
    _require_valid(alg)

    levels = alg.t + int(include_final_level)
    m = alg.m
    tuples = [()]
    vectors = [alg.initial.copy()]
    discarded = 0.0
    for j in range(levels):
        u = alg.cumulative_unitary(j)
        rotated = np.array(vectors) @ u.T  # rows are U~_j |v>
        next_tuples, next_vectors = [], []
        for k, w in zip(tuples, rotated):
            for i in range(alg.n + 1):
                block = np.zeros_like(w)
                block[i * m:(i + 1) * m] = w[i * m:(i + 1) * m]
                comp = u.conj().T @ block
                norm_sq = float(np.vdot(comp, comp).real)
                if norm_sq > threshold:
                    next_tuples.append(k + (i,))
                    next_vectors.append(comp)
                else:
                    discarded += norm_sq
        tuples, vectors = next_tuples, next_vectors

    dim = alg.dim
    stacked = np.array(vectors, dtype=np.complex128).reshape(len(vectors), dim)
    masks = np.array([_tuple_mask(k) for k in tuples], dtype=np.int64)
    return StateDecomposition(
        n=alg.n, m=alg.m, t=alg.t,
        tuples=tuple(tuples), vectors=stacked, masks=masks,
        discarded_mass=discarded, threshold=threshold,
        final_unitary=alg.cumulative_unitary(alg.t), csop=alg.csop,
        include_final_level=include_final_level,
    )


def reconstruct(d: StateDecomposition, x) -> np.ndarray:
    """sum_k (-1)^{sum_i x_{k_i}} Psi(k)."""
    word = _as_word(x, d.n, "input")
    if d.count == 0:
        return np.zeros(d.final_unitary.shape[0], dtype=np.complex128)
    signs = 1.0 - 2.0 * (_popcount_array(d.masks & word) & 1)
    return signs @ d.vectors


def reconstruction_target(alg: QueryAlgorithm, x, include_final_level: bool = False) -> np.ndarray:
    """Direct-simulation counterpart of ``reconstruct``."""
    final = run(alg, x)
    if include_final_level:
        final = oracle_phases(x, alg.n, alg.m) * final
    return alg.cumulative_unitary(alg.t).conj().T @ final


def level_projectors(alg: QueryAlgorithm, j: int) -> list:
    """The CSOP {P~_i^j : i = 0..n} for level j."""
    u = alg.cumulative_unitary(j)
    out = []
    for i in range(alg.n + 1):
        bar = np.zeros((alg.dim, alg.dim))
        sl = slice(i * alg.m, (i + 1) * alg.m)
        bar[sl, sl] = np.eye(alg.m)
        out.append(u.conj().T @ bar @ u)
    return out


def l_tilde(d: StateDecomposition, z=1) -> float:
    """sum_k sum_h |<Psi(k)| M_z |Psi(h)>|, an upper bound on L(pi_z)."""
    return float(np.abs(d.gram(z)).sum())


def grouped_coefficients(d: StateDecomposition, z=1) -> np.ndarray:
    """Complex sums of <Psi(k)| M_z |Psi(h)> binned by b = mask(k) ^ mask(h).

    In exact arithmetic the result is real and equals the Fourier spectrum of pi_z.
    """
    bins, _ = kernels.xor_bin_pairs(d.masks, d.gram(z), d.n)
    return bins


def grouped_l(d: StateDecomposition, z=1) -> float:
    """sum_b |sum_{(k,h)~b} <Psi(k)| M_z |Psi(h)>|."""
    return float(np.abs(grouped_coefficients(d, z)).sum())


@dataclass(frozen=True)
class DecompositionMetrics:
    d_count: int
    norm_sum_sq: float
    min_norm_sq: float
    norm_sq_total: float

    @property
    def inv_min_norm(self) -> float:
        return 1.0 / self.min_norm_sq

    def to_json(self) -> dict:
        return {
            "d_count": self.d_count,
            "norm_sum_sq": self.norm_sum_sq,
            "min_norm_sq": self.min_norm_sq,
            "inv_min_norm": self.inv_min_norm,
            "norm_sq_total": self.norm_sq_total,
        }


def summary_metrics(d: StateDecomposition) -> DecompositionMetrics:
    """Component count d, (sum ||Psi(k)||)^2 and min ||Psi(k)||^2."""
    if d.count == 0:
        raise ValueError("empty decomposition")
    norms_sq = d.norms_sq()
    return DecompositionMetrics(
        d_count=d.count,
        norm_sum_sq=float(np.sqrt(norms_sq).sum() ** 2),
        min_norm_sq=float(norms_sq.min()),
        norm_sq_total=float(norms_sq.sum()),
    )


def decomposition_from_json(doc, alg: QueryAlgorithm) -> StateDecomposition:
    """Reload an exported decomposition against its source algorithm."""
    try:
        meta = doc["metadata"]
        comps = doc["components"]
        tuples = tuple(tuple(int(i) for i in c["tuple"]) for c in comps)
        vecs = np.array([[complex(a, b) for a, b in c["vector"]] for c in comps], dtype=np.complex128)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"decomposition document malformed: {exc}") from None
    if (meta["n"], meta["m"], meta["t"]) != (alg.n, alg.m, alg.t):
        raise DimensionError("decomposition metadata does not match the algorithm")
    return StateDecomposition(
        n=alg.n, m=alg.m, t=alg.t, tuples=tuples, vectors=vecs.reshape(len(tuples), alg.dim),
        masks=np.array([_tuple_mask(k) for k in tuples], dtype=np.int64),
        discarded_mass=float(meta.get("discarded_mass", 0.0)),
        threshold=float(meta["threshold"]),
        final_unitary=alg.cumulative_unitary(alg.t), csop=alg.csop,
        include_final_level=meta.get("levels", alg.t) != alg.t,
    )

"""Classical simulation of a quantum query algorithm from its Fourier spectrum.

A parity tree D(b) reads the bits in b and outputs 1 iff sgn(alpha_b) *
chi_b(x) = +1. The mixture R picks D(b) with probability 2|alpha_b| / (1 + 2L)
or a constant-0 arm with probability 1 / (1 + 2L). Its output-1
probability is (L + pi_1(x)) / (1 + 2L), which misclassifies by at most
(eps + L) / (1 + 2L). Majority voting over j independent runs drives the
error down at a Chernoff rate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import DimensionError, DomainError
from .fourier import (
    ZERO_THRESHOLD,
    FourierSpectrum,
    InputWord,
    MonomialPolynomial,
    _as_word,
    _popcount_array,
    degree,
    monomials_to_fourier,
    popcount,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParityTree:
    """Deterministic tree querying the bits of ``mask``; outputs (1 + sign*chi_b(x)) / 2."""

    n: int
    mask: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.mask < 0 or self.mask >> self.n:
            raise DimensionError(f"mask {self.mask:#x} does not fit in n={self.n}")

    @property
    def query_cost(self) -> int:
        return popcount(self.mask)

    @property
    def indices(self) -> tuple:
        return tuple(i + 1 for i in range(self.n) if (self.mask >> i) & 1)


class CountingInput:
    """Wraps an InputWord and counts bit reads."""

    def __init__(self, x: InputWord):
        self.x = x
        self.n = x.n
        self.reads = 0

    def bit(self, i: int) -> int:
        self.reads += 1
        return self.x.bit(i)


def run_parity_tree(tree: ParityTree, x) -> int:
    """Query each bit in the mask once and return the sign-adjusted parity bit."""
    if x.n != tree.n:
        raise DimensionError(f"tree has n={tree.n} but input has n={x.n}")
    parity = 0
    for i in tree.indices:
        parity ^= x.bit(i)
    character = -1 if parity else 1
    return 1 if tree.sign * character == 1 else 0


def _tree_outputs(trees, words: np.ndarray) -> np.ndarray:
    """Outputs of each tree (rows) on each input word (columns)."""
    out = np.empty((len(trees), words.size), dtype=np.int8)
    for r, tree in enumerate(trees):
        parity = _popcount_array(words & tree.mask) & 1
        out[r] = (tree.sign * (1 - 2 * parity) == 1)
    return out


@dataclass(frozen=True, eq=False)
class MixtureSimulator:
    n: int
    arms: tuple
    zero_arm_weight: float
    source_l1: float
    source_epsilon: float
    query_budget: int

    @property
    def eps_tilde(self) -> float:
        return (self.source_epsilon + self.source_l1) / (1.0 + 2.0 * self.source_l1)

    @property
    def trees(self) -> tuple:
        return tuple(tree for _, tree in self.arms)

    @property
    def weights(self) -> np.ndarray:
        """Arm weights followed by the zero-arm weight."""
        return np.array([w for w, _ in self.arms] + [self.zero_arm_weight])

    def arm_table(self) -> list:
        return [
            {"mask": tree.mask, "vars": list(tree.indices), "sign": tree.sign, "weight": w}
            for w, tree in self.arms
        ]


def build_mixture(spec: FourierSpectrum, epsilon: float, t: int) -> MixtureSimulator:
    """One arm per nonzero coefficient plus the constant-0 arm."""
    if not 0.0 <= epsilon < 0.5:
        raise DomainError(f"epsilon must lie in [0, 1/2), got {epsilon}")
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    deg = degree(spec)
    if deg > 2 * t:
        raise DomainError(f"spectrum degree {deg} exceeds 2t = {2 * t}")
    support = spec.support(ZERO_THRESHOLD)
    # L is taken over the arms actually built so the weights sum to 1 exactly
    l1 = float(np.abs(spec.coeffs[support]).sum())
    denom = 1.0 + 2.0 * l1
    arms = tuple(
        (2.0 * abs(spec.coeffs[b]) / denom, ParityTree(spec.n, int(b), 1 if spec.coeffs[b] > 0 else -1))
        for b in support
    )
    return MixtureSimulator(
        n=spec.n,
        arms=arms,
        zero_arm_weight=1.0 / denom,
        source_l1=l1,
        source_epsilon=float(epsilon),
        query_budget=2 * t,
    )


def simulate_from_polynomial(p: MonomialPolynomial, t: int, epsilon: float) -> MixtureSimulator:
    """Mixture simulator for a polynomial of degree at most 2t."""
    if p.degree > 2 * t:
        raise DomainError(f"polynomial degree {p.degree} exceeds 2t = {2 * t}")
    return build_mixture(monomials_to_fourier(p), epsilon, t)


def mixture_output_prob(sim: MixtureSimulator, x) -> float:
    """Exact probability that R outputs 1 on x (the zero arm never does)."""
    if not isinstance(x, InputWord):
        x = InputWord(sim.n, _as_word(x, sim.n, "input"))
    if x.n != sim.n:
        raise DimensionError(f"simulator has n={sim.n} but input has n={x.n}")
    return float(sum(w * run_parity_tree(tree, x) for w, tree in sim.arms))


def mixture_output_table(sim: MixtureSimulator) -> np.ndarray:
    """mixture_output_prob at every input, indexed by word."""
    words = np.arange(1 << sim.n, dtype=np.int64)
    if not sim.arms:
        return np.zeros(words.size)
    weights = np.array([w for w, _ in sim.arms])
    return weights @ _tree_outputs(sim.trees, words).astype(np.float64)


def _arm_outcomes(sim: MixtureSimulator, x: InputWord):
    """Per-arm (output bit, queries) on x, zero arm last."""
    bits, costs = [], []
    for tree in sim.trees:
        reader = CountingInput(x)
        bits.append(run_parity_tree(tree, reader))
        costs.append(reader.reads)
    bits.append(0)
    costs.append(0)
    return np.array(bits, dtype=np.int64), np.array(costs, dtype=np.int64)


def _choice_probs(sim: MixtureSimulator) -> np.ndarray:
    w = sim.weights
    return w / w.sum()


def sample_mixture(sim: MixtureSimulator, x: InputWord, rng: np.random.Generator):
    """Draw one arm and run it; returns (bit, queries_used)."""
    idx = int(rng.choice(len(sim.arms) + 1, p=_choice_probs(sim)))
    if idx == len(sim.arms):
        return 0, 0
    reader = CountingInput(x)
    bit = run_parity_tree(sim.arms[idx][1], reader)
    assert reader.reads <= sim.query_budget, "parity tree exceeded the 2t query budget"
    return bit, reader.reads


def sample_mixture_batch(sim: MixtureSimulator, x: InputWord, size: int, rng: np.random.Generator):
    """``size`` independent draws of R on x; returns (bits, queries) arrays."""
    bits, costs = _arm_outcomes(sim, x)
    assert costs.max(initial=0) <= sim.query_budget, "parity tree exceeded the 2t query budget"
    idx = rng.choice(bits.size, size=size, p=_choice_probs(sim))
    return bits[idx], costs[idx]


@dataclass(frozen=True, eq=False)
class AmplifiedSimulator:
    base: MixtureSimulator
    repetitions: int

    def __post_init__(self):
        if self.repetitions < 1:
            raise DomainError(f"repetitions must be >= 1, got {self.repetitions}")

    @property
    def query_budget(self) -> int:
        return self.repetitions * self.base.query_budget

    @property
    def error_bound(self) -> float:
        return amplified_error_bound(self.base.eps_tilde, self.repetitions)


def amplified_error_bound(eps_tilde: float, j: int) -> float:
    """exp(-j (1/2 - eps~)^2 / (2 (1 - eps~))); 1.0 when eps~ >= 1/2."""
    if j < 0:
        raise DomainError(f"j must be non-negative, got {j}")
    if eps_tilde >= 0.5:
        log.warning("eps_tilde = %.6g >= 1/2: majority voting cannot reduce the error", eps_tilde)
        return 1.0
    if eps_tilde < 0:
        raise DomainError(f"eps_tilde must be non-negative, got {eps_tilde}")
    return math.exp(-j * (0.5 - eps_tilde) ** 2 / (2.0 * (1.0 - eps_tilde)))


def _majority(ones: np.ndarray, j: int, rng: np.random.Generator) -> np.ndarray:
    out = (2 * ones > j).astype(np.int64)
    ties = 2 * ones == j
    if np.any(ties):
        out[ties] = rng.integers(0, 2, size=int(ties.sum()))
    return out


def run_amplified(sim: AmplifiedSimulator, x: InputWord, rng: np.random.Generator) -> int:
    """Majority vote of j runs of R; ties go to a fair coin."""
    bits, _ = run_amplified_batch(sim, x, 1, rng)
    return int(bits[0])


def run_amplified_batch(sim: AmplifiedSimulator, x: InputWord, runs: int,
                        rng: np.random.Generator, chunk: int = 1 << 22):
    """``runs`` independent amplified executions; returns (bits, queries)."""
    j = sim.repetitions
    out_bits = np.empty(runs, dtype=np.int64)
    out_queries = np.empty(runs, dtype=np.int64)
    per_chunk = max(1, chunk // j)
    for start in range(0, runs, per_chunk):
        size = min(per_chunk, runs - start)
        bits, queries = sample_mixture_batch(sim.base, x, size * j, rng)
        ones = bits.reshape(size, j).sum(axis=1)
        out_bits[start:start + size] = _majority(ones, j, rng)
        out_queries[start:start + size] = queries.reshape(size, j).sum(axis=1)
    assert out_queries.max(initial=0) <= sim.query_budget, "amplified run exceeded 2jt queries"
    return out_bits, out_queries


def chernoff_tail(j: int, p: float, beta: float):
    """Exact P[Bin(j, p) <= floor((1 - beta) j p)] and the bound exp(-beta^2 j p / 2)."""
    if j < 0 or not 0.0 <= p <= 1.0 or not 0.0 <= beta <= 1.0:
        raise DomainError(f"need j >= 0, p and beta in [0, 1]; got j={j}, p={p}, beta={beta}")
    cutoff = min(j, math.floor((1 - Fraction(beta)) * j * Fraction(p)))
    bound = math.exp(-beta * beta * j * p / 2.0)
    return _binomial_cdf(j, p, cutoff), bound


def _binomial_cdf(j: int, p: float, cutoff: int) -> float:
    if cutoff < 0:
        return 0.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 1.0 if cutoff >= j else 0.0
    log_p, log_q = math.log(p), math.log1p(-p)
    log_norm = math.lgamma(j + 1)
    logs = [
        log_norm - math.lgamma(i + 1) - math.lgamma(j - i + 1) + i * log_p + (j - i) * log_q
        for i in range(cutoff + 1)
    ]
    top = max(logs)
    return min(1.0, math.exp(top) * math.fsum(math.exp(v - top) for v in logs))


def required_repetitions(epsilon: float, eps_tilde: float) -> float:
    """Real j at which the amplified bound equals ``epsilon``."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"target error must lie in (0, 1), got {epsilon}")
    if not 0.0 <= eps_tilde < 0.5:
        raise DomainError(f"eps_tilde must lie in [0, 1/2), got {eps_tilde}")
    return -2.0 * math.log(epsilon) * (1.0 - eps_tilde) / (0.5 - eps_tilde) ** 2


def threshold_target(values: np.ndarray, epsilon: float, tol: float = 1e-9) -> dict:
    """Partial Boolean target read off an output probability: 1 where pi >= 1-eps, 0 where pi <= eps.

    ``tol`` absorbs round-off so exact algorithms (eps = 0) keep their promise set.
    """
    target = {}
    for x, v in enumerate(values):
        if v >= 1.0 - epsilon - tol:
            target[x] = 1
        elif v <= epsilon + tol:
            target[x] = 0
    return target


@dataclass
class SimulationReport:
    epsilon: float
    l1: float
    eps_tilde: float
    j: int | None
    bound: float | None
    per_input: list
    worst_error: float
    contract_held: bool
    empirical: dict = field(default_factory=dict)
    arms: list = field(default_factory=list)
    query_budget: int = 0

    @property
    def empirical_ok(self) -> bool:
        return bool(self.empirical.get("within_3sigma", True))

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "l1": self.l1,
            "eps_tilde": self.eps_tilde,
            "j": self.j,
            "bound": self.bound,
            "amplification_useful": self.eps_tilde < 0.5,
            "query_budget": self.query_budget,
            "worst_error": self.worst_error,
            "contract_held": self.contract_held,
            "arms": self.arms,
            "per_input": self.per_input,
            "empirical": self.empirical,
        }


def simulation_report(sim: MixtureSimulator, target: Mapping[int, int], j: int | None = None,
                      trials: int = 0, seed: int = 0) -> SimulationReport:
    """Exact error of R on every promise input, plus optional Monte Carlo checks.

    With ``trials > 0`` every promise input gets its own generator spawned
    from ``seed``: ``trials`` single draws of R are compared with the exact
    output probability, and (when ``j`` is given) ``trials`` amplified runs
    are compared with the Chernoff bound, both at 3 binomial sigma.
    """
    table = mixture_output_table(sim)
    eps_tilde = sim.eps_tilde
    per_input = []
    worst = 0.0
    for x in sorted(target):
        f = int(target[x])
        pi_hat = float(table[x])
        error = 1.0 - pi_hat if f == 1 else pi_hat
        worst = max(worst, error)
        per_input.append({"x": int(x), "pi_hat": pi_hat, "f": f, "error": error})
    contract = worst <= eps_tilde + 1e-12

    bound = amplified_error_bound(eps_tilde, j) if j is not None else None
    report = SimulationReport(
        epsilon=sim.source_epsilon, l1=sim.source_l1, eps_tilde=eps_tilde, j=j, bound=bound,
        per_input=per_input, worst_error=worst, contract_held=contract,
        arms=sim.arm_table(), query_budget=sim.query_budget,
    )
    if trials <= 0:
        return report

    amplified = AmplifiedSimulator(sim, j) if j is not None else None
    streams = np.random.SeedSequence(seed).spawn(len(per_input))
    freq, amp_err, max_queries, ok = [], [], 0, True
    for entry, stream in zip(per_input, streams):
        rng = np.random.Generator(np.random.PCG64(stream))
        x = InputWord(sim.n, entry["x"])
        bits, queries = sample_mixture_batch(sim, x, trials, rng)
        max_queries = max(max_queries, int(queries.max(initial=0)))
        p = entry["pi_hat"]
        observed = float(bits.mean())
        sigma = math.sqrt(p * (1.0 - p) / trials)
        ok &= abs(observed - p) <= 3.0 * sigma + 1e-15
        freq.append(observed)
        if amplified is not None:
            votes, _ = run_amplified_batch(amplified, x, trials, rng)
            err = float(np.mean(votes != entry["f"]))
            amp_sigma = math.sqrt(bound * (1.0 - bound) / trials)
            ok &= err <= bound + 3.0 * amp_sigma
            amp_err.append(err)
    report.empirical = {
        "seed": seed,
        "trials": trials,
        "freq": freq,
        "max_queries": max_queries,
        "within_3sigma": bool(ok),
    }
    if amplified is not None:
        report.empirical["amplified_error"] = amp_err
    return report

"""Closed-form speedup caps driven by the Fourier 1-norm.

F_eps(l) = ceil(-16 ln(eps) (1 + l) (1 + l - eps) / (1 - 2 eps)^2) caps the
ratio R_eps(f) / t between randomized and quantum query counts. The
randomized complexity R_eps(f) itself is never computed here; callers pass
known lower bounds where a formula needs one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

CHAIN = ("l1", "l_tilde", "norm_sum_sq", "d", "inv_min_norm")


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in the open interval (0, 1/2), got {epsilon}")


def f_epsilon_real(epsilon: float, l: float) -> float:
    """The expression inside the ceiling of F_eps."""
    _check_epsilon(epsilon)
    if l < 0:
        raise DomainError(f"l must be non-negative, got {l}")
    return -16.0 * math.log(epsilon) * (1.0 + l) * (1.0 + l - epsilon) / (1.0 - 2.0 * epsilon) ** 2


def f_epsilon(epsilon: float, l: float) -> int:
    return math.ceil(f_epsilon_real(epsilon, l))


def amplification_cap(epsilon: float, l: float) -> int:
    """ceil(2j) with j solving exp(-j (1/2 - e)^2 / (2 (1 - e))) = eps, e = (eps + l)/(1 + 2l).

    Closed form: -16 ln(eps) (1 + 2l) (1 + l - eps) / (1 - 2 eps)^2.
    """
    _check_epsilon(epsilon)
    if l < 0:
        raise DomainError(f"l must be non-negative, got {l}")
    eps_tilde = (epsilon + l) / (1.0 + 2.0 * l)
    j = -2.0 * math.log(epsilon) * (1.0 - eps_tilde) / (0.5 - eps_tilde) ** 2
    return math.ceil(2.0 * j)


def dj_randomized_upper_bound(epsilon: float) -> int:
    """ceil(-16 ln(eps) (2 - eps) / (1 - 2 eps)^2), independent of n."""
    _check_epsilon(epsilon)
    return math.ceil(-16.0 * math.log(epsilon) * (2.0 - epsilon) / (1.0 - 2.0 * epsilon) ** 2)


@dataclass
class BoundReport:
    epsilon: float
    inputs: dict = field(default_factory=dict)
    f_values: dict = field(default_factory=dict)
    caps: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def l1(self):
        return self.inputs.get("l1")

    @property
    def f_value(self):
        return self.f_values.get("l1")

    def chain_ordered(self) -> bool:
        values = [self.f_values[k] for k in CHAIN if k in self.f_values]
        return all(a <= b for a, b in zip(values, values[1:]))

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "inputs": self.inputs,
            "f_values": self.f_values,
            "caps": self.caps,
            "notes": self.notes,
        }


def speedup_bound_quantum(metrics: dict, epsilon: float, t: int | None = None) -> BoundReport:
    """F_eps at each quantity of the chain L <= L~ <= (sum ||Psi||)^2 <= d <= 1/min ||Psi||^2.

    ``metrics`` holds any of the keys in ``CHAIN``; ``min_norm_sq`` is
    accepted in place of ``inv_min_norm``.
    """
    _check_epsilon(epsilon)
    inputs = {k: float(metrics[k]) for k in CHAIN if k in metrics}
    if "inv_min_norm" not in inputs and "min_norm_sq" in metrics:
        inputs["inv_min_norm"] = 1.0 / float(metrics["min_norm_sq"])
    report = BoundReport(epsilon=epsilon, inputs=inputs)
    for key in CHAIN:
        if key in inputs:
            report.f_values[key] = f_epsilon(epsilon, inputs[key])
    if "l1" in inputs:
        report.caps["amplification_cap"] = amplification_cap(epsilon, inputs["l1"])
        if t is not None:
            report.caps["R_eps_over_t"] = report.f_values["l1"]
            report.caps["R_eps"] = t * report.f_values["l1"]
        report.notes.append(
            "amplification_cap is ceil(2j) with j solved from the Chernoff bound; it uses "
            "(1+2L) where F_eps uses (1+L), so it exceeds F_eps whenever L > 0"
        )
    if not report.chain_ordered():
        report.notes.append("chain ordering violated")
    return report


def exact_quantum_lower_bound(l1_of_f: float, r_eps_lower: float, epsilon: float) -> float:
    """Q_E(f) >= R_eps(f) / F_eps(L(f)) for a total f."""
    return r_eps_lower / f_epsilon(epsilon, l1_of_f)


def polynomial_speedup_bound(l1_of_p: float, t: int, epsilon: float) -> BoundReport:
    """R_eps(f) / 2t <= F_eps(L(p)) for a degree <= 2t approximating polynomial."""
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    f_value = f_epsilon(epsilon, l1_of_p)
    report = BoundReport(
        epsilon=epsilon,
        inputs={"l1": float(l1_of_p), "t": t},
        f_values={"l1": f_value},
        caps={"R_eps": 2 * t * f_value},
    )
    report.notes.append("polynomial form divides R_eps by 2t; the quantum form divides by t")
    return report


def dj_bound_report(epsilon: float) -> BoundReport:
    """Both readings of the Deutsch-Jozsa randomized upper bound (L = 1)."""
    report = BoundReport(epsilon=epsilon, inputs={"l1": 1.0})
    report.f_values["l1"] = f_epsilon(epsilon, 1.0)
    report.caps["dj_display"] = dj_randomized_upper_bound(epsilon)
    report.caps["f_epsilon_at_1"] = report.f_values["l1"]
    report.caps["amplification_cap"] = amplification_cap(epsilon, 1.0)
    report.notes.append(
        "dj_display uses (2 - eps); F_eps(1) uses 2 (2 - eps). Both are reported"
    )
    return report


def and_lower_bound_report(n: int, l1: float, epsilon: float = 1 / 3) -> BoundReport:
    """Q_E(AND_n) >= R_eps_lower / F_eps(L(AND_n)) with R_eps_lower = n/3 - 1."""
    r_lower = n / 3.0 - 1.0
    report = BoundReport(epsilon=epsilon, inputs={"l1": float(l1), "n": n, "R_eps_lower": r_lower})
    report.f_values["l1"] = f_epsilon(epsilon, l1)
    report.caps["Q_E_lower"] = exact_quantum_lower_bound(l1, r_lower, epsilon)
    return report

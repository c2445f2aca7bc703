"""Command-line entry point: ``qdequant {analyze,simulate,demo,bounds,build}``.

Exit codes: 0 when every checked inequality held, 1 when one failed
numerically, 2 for input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np

from . import bounds, decomp, dequant, fourier, qqm
from .errors import CostGuardError, QDequantError

EXIT_OK, EXIT_CONTRACT, EXIT_USAGE = 0, 1, 2
MAX_PAIR_COMPONENTS = 2048
TABLE_ROWS = 32

log = logging.getLogger("qdequant")


def _fraction(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}") from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


class Output:
    """Collects the JSON report and prints the human table unless quiet."""

    def __init__(self, args):
        self.quiet = args.quiet
        self.json_path = args.json

    def line(self, text: str = "") -> None:
        if not self.quiet:
            print(text)

    def table(self, header, rows) -> None:
        if self.quiet:
            return
        cells = [[str(c) for c in header]] + [[_fmt(c) for c in row] for row in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        for k, row in enumerate(cells):
            print("  ".join(c.rjust(w) for c, w in zip(row, widths)))
            if k == 0:
                print("  ".join("-" * w for w in widths))

    def write(self, report: dict) -> None:
        if self.json_path:
            text = json.dumps(report, indent=2, sort_keys=True) + "\n"
            Path(self.json_path).write_text(text)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _bits(x: int, n: int) -> str:
    return "".join(str((x >> i) & 1) for i in range(n))


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _load_algorithm(path: str) -> qqm.QueryAlgorithm:
    alg = qqm.algorithm_from_json(_load_json(path))
    report = alg.validation
    if not report.ok:
        raise QDequantError(
            f"{path}: validation failed on {', '.join(report.failures)}\n{report.summary()}"
        )
    return alg


def _spectrum_rows(spec: fourier.FourierSpectrum):
    return [
        (_bits(int(b), spec.n), fourier.popcount(int(b)), float(spec.coeffs[b]))
        for b in spec.support()
    ]


def analyze_algorithm(alg: qqm.QueryAlgorithm, epsilon: float, label=1) -> tuple[dict, bool]:
    """pi table, spectrum, decomposition metrics and the bound report for one algorithm."""
    pi = qqm.output_probability_function(alg, label)
    spec = fourier.wht_forward(pi)
    l1 = fourier.l1_norm(spec)
    deg = fourier.degree(spec)
    ok = deg <= 2 * alg.t
    report = {
        "n": alg.n, "m": alg.m, "t": alg.t, "label": label,
        "pi": [float(v) for v in pi.values],
        "spectrum": {str(int(b)): float(spec.coeffs[b]) for b in spec.support()},
        "l1": l1,
        "degree": deg,
        "validation": alg.validation.deviations,
    }
    metrics = {"l1": l1}
    try:
        d = decomp.decompose(alg)
    except CostGuardError as exc:
        report["decomposition"] = {"skipped": str(exc)}
    else:
        summary = decomp.summary_metrics(d)
        entry = summary.to_json()
        if d.count <= MAX_PAIR_COMPONENTS:
            entry["l_tilde"] = decomp.l_tilde(d, label)
            entry["grouped_l"] = decomp.grouped_l(d, label)
            metrics["l_tilde"] = entry["l_tilde"]
            ok &= abs(entry["grouped_l"] - l1) <= 1e-8
        else:
            entry["pairs_skipped"] = f"{d.count} components exceed {MAX_PAIR_COMPONENTS}"
        metrics.update(norm_sum_sq=summary.norm_sum_sq, d=summary.d_count,
                       inv_min_norm=summary.inv_min_norm)
        chain = [metrics[k] for k in bounds.CHAIN if k in metrics]
        entry["chain_holds"] = all(a <= b + 1e-9 for a, b in zip(chain, chain[1:]))
        ok &= entry["chain_holds"]
        report["decomposition"] = entry
    bound_report = bounds.speedup_bound_quantum(metrics, epsilon, t=alg.t)
    report["bounds"] = bound_report.to_json()
    return report, bool(ok)


def cmd_analyze(args) -> int:
    out = Output(args)
    alg = _load_algorithm(args.file)
    report, ok = analyze_algorithm(alg, args.epsilon, args.label)
    out.line(f"algorithm: n={alg.n} m={alg.m} t={alg.t} dim={alg.dim}")
    rows = [(_bits(x, alg.n), v) for x, v in enumerate(report["pi"])]
    out.line(f"\npi_{args.label}(x)" + (f" (first {TABLE_ROWS} of {len(rows)})" if len(rows) > TABLE_ROWS else ""))
    out.table(("x", "pi"), rows[:TABLE_ROWS])
    spec = fourier.wht_forward(fourier.RealHypercubeFunction(alg.n, report["pi"]))
    out.line("\nnonzero Fourier coefficients")
    out.table(("b", "|b|", "alpha_b"), _spectrum_rows(spec)[:TABLE_ROWS])
    out.line(f"\nL(pi) = {report['l1']:.12g}   degree = {report['degree']}   2t = {2 * alg.t}")
    dec = report["decomposition"]
    if "skipped" in dec:
        out.line(f"decomposition skipped: {dec['skipped']}")
    else:
        out.line("\ndecomposition")
        out.table(("quantity", "value"), [(k, dec[k]) for k in sorted(dec)])
    _print_bounds(out, report["bounds"])
    out.write(report)
    return EXIT_OK if ok else EXIT_CONTRACT


def _print_bounds(out: Output, b: dict) -> None:
    out.line(f"\nbounds at epsilon = {b['epsilon']:.6g}")
    out.table(("argument", "value", "F_eps"),
              [(k, b["inputs"].get(k, ""), v) for k, v in b["f_values"].items()])
    for k, v in b["caps"].items():
        out.line(f"  {k} = {_fmt(v)}")
    for note in b["notes"]:
        out.line(f"  note: {note}")


def _load_simulation_source(args):
    """Return (simulator, target, description) for an algorithm or polynomial file."""
    doc = _load_json(args.file)
    if "terms" in doc:
        poly = fourier.MonomialPolynomial.from_json(doc)
        t = args.t if args.t is not None else math.ceil(poly.degree / 2)
        sim = dequant.simulate_from_polynomial(poly, t, args.epsilon)
        values = fourier.wht_inverse(fourier.monomials_to_fourier(poly)).values
        return sim, dequant.threshold_target(values, args.epsilon), f"polynomial n={poly.n} degree={poly.degree} t={t}"
    alg = _load_algorithm(args.file)
    pi = qqm.output_probability_function(alg, 1)
    sim = dequant.build_mixture(fourier.wht_forward(pi), args.epsilon, alg.t)
    return sim, dequant.threshold_target(pi.values, args.epsilon), f"algorithm n={alg.n} m={alg.m} t={alg.t}"


def cmd_simulate(args) -> int:
    out = Output(args)
    sim, target, what = _load_simulation_source(args)
    report = dequant.simulation_report(sim, target, j=args.j, trials=args.trials, seed=args.seed)
    data = report.to_json()
    out.line(f"source: {what}")
    out.line(f"L = {report.l1:.12g}   epsilon = {report.epsilon:.6g}   eps_tilde = {report.eps_tilde:.12g}")
    out.line(f"arms: {len(sim.arms)} parity trees + zero arm (weight {sim.zero_arm_weight:.6g}), "
             f"query budget {sim.query_budget}")
    rows = []
    for k, entry in enumerate(report.per_input):
        row = [_bits(entry["x"], sim.n), entry["f"], entry["pi_hat"], entry["error"]]
        if report.empirical:
            row.append(report.empirical["freq"][k])
            if "amplified_error" in report.empirical:
                row.append(report.empirical["amplified_error"][k])
        rows.append(row)
    header = ["x", "f", "pi_hat", "error"]
    if report.empirical:
        header.append("freq")
        if "amplified_error" in report.empirical:
            header.append("amp_error")
    out.line(f"\npromise inputs: {len(rows)}" + (f" (first {TABLE_ROWS})" if len(rows) > TABLE_ROWS else ""))
    out.table(header, rows[:TABLE_ROWS])
    out.line(f"\nworst exact error = {report.worst_error:.12g} (<= eps_tilde: {report.contract_held})")
    if report.j is not None:
        out.line(f"amplified bound at j={report.j}: {report.bound:.6g}"
                 + ("" if report.eps_tilde < 0.5 else "  (eps_tilde >= 1/2: amplification useless)"))
    if report.empirical:
        out.line(f"empirical ({report.empirical['trials']} trials, seed {report.empirical['seed']}): "
                 f"within 3 sigma = {report.empirical['within_3sigma']}")
    out.write(data)
    return EXIT_OK if report.contract_held and report.empirical_ok else EXIT_CONTRACT


def demo_dj(n: int, epsilon: float) -> tuple[dict, bool]:
    alg = qqm.build_deutsch_jozsa(n)
    report, ok = analyze_algorithm(alg, epsilon)
    coeffs = fourier.wht_forward(qqm.output_probability_function(alg, 1)).coeffs
    sizes = fourier._popcount_array(np.arange(1 << n))
    pairs = [sum(1 << (i - 1) for i in c) for c in combinations(range(1, n + 1), 2)]
    pattern = {
        "alpha_empty": float(coeffs[0]),
        "expected_alpha_empty": 1.0 / n,
        "alpha_size2": sorted({round(float(coeffs[b]), 15) for b in pairs}),
        "expected_alpha_size2": 2.0 / n**2,
        "size2_count": len(pairs),
        "max_abs_other": float(np.abs(coeffs[(sizes != 0) & (sizes != 2)]).max(initial=0.0)),
    }
    ok &= abs(pattern["alpha_empty"] - 1.0 / n) <= 1e-9
    ok &= all(abs(a - 2.0 / n**2) <= 1e-9 for a in pattern["alpha_size2"])
    ok &= pattern["max_abs_other"] <= 1e-9
    report["pattern"] = pattern
    report["dj_bounds"] = bounds.dj_bound_report(epsilon).to_json()
    return report, bool(ok)


def demo_and(n: int, epsilon: float) -> tuple[dict, bool]:
    values = np.zeros(1 << n)
    values[-1] = 1.0
    spec = fourier.wht_forward(fourier.RealHypercubeFunction(n, values))
    l1 = fourier.l1_norm(spec)
    report = bounds.and_lower_bound_report(n, l1, epsilon).to_json()
    report["degree"] = fourier.degree(spec)
    return {"n": n, "l1": l1, "bounds": report}, abs(l1 - 1.0) <= 1e-9


def cmd_demo(args) -> int:
    out = Output(args)
    if args.name == "dj":
        n = args.n or 4
        report, ok = demo_dj(n, args.epsilon)
        p = report["pattern"]
        out.line(f"Deutsch-Jozsa, n = {n}: pi_1(x) = (n - 2|x|)^2 / n^2")
        out.table(("|b|", "masks", "alpha_b", "expected"), [
            (0, 1, p["alpha_empty"], p["expected_alpha_empty"]),
            (2, p["size2_count"], ",".join(_fmt(a) for a in p["alpha_size2"]), p["expected_alpha_size2"]),
            ("other", (1 << n) - 1 - p["size2_count"], p["max_abs_other"], 0.0),
        ])
        out.line(f"\nL(pi_1) = {report['l1']:.12g}   degree = {report['degree']}")
        _print_bounds(out, report["bounds"])
        _print_bounds(out, report["dj_bounds"])
    else:
        n = args.n or 6
        report, ok = demo_and(n, args.epsilon)
        b = report["bounds"]
        out.line(f"AND_{n}: L = {report['l1']:.12g}   degree = {b['degree']}")
        out.line(f"R_eps lower bound n/3 - 1 = {_fmt(b['inputs']['R_eps_lower'])}")
        out.line(f"F_eps(L) = {b['f_values']['l1']}")
        out.line(f"Q_E(AND_{n}) >= {_fmt(b['caps']['Q_E_lower'])}")
    out.write(report)
    return EXIT_OK if ok else EXIT_CONTRACT


def cmd_bounds(args) -> int:
    out = Output(args)
    report = bounds.speedup_bound_quantum({"l1": args.l1}, args.epsilon, t=args.t)
    if args.t is not None:
        poly = bounds.polynomial_speedup_bound(args.l1, args.t, args.epsilon)
        report.caps["polynomial_R_eps"] = poly.caps["R_eps"]
        report.notes.extend(poly.notes)
    if args.r_lower is not None:
        report.caps["Q_E_lower"] = bounds.exact_quantum_lower_bound(args.l1, args.r_lower, args.epsilon)
    report.caps["dj_display"] = bounds.dj_randomized_upper_bound(args.epsilon)
    report.caps["f_epsilon_real"] = bounds.f_epsilon_real(args.epsilon, args.l1)
    _print_bounds(out, report.to_json())
    out.write(report.to_json())
    return EXIT_OK


def cmd_build(args) -> int:
    if args.kind == "dj":
        doc = qqm.algorithm_to_json(qqm.build_deutsch_jozsa(args.n))
    elif args.kind == "random":
        doc = qqm.algorithm_to_json(qqm.build_random_algorithm(args.n, args.m, args.t, args.seed))
    else:
        pi = qqm.output_probability_function(qqm.build_deutsch_jozsa(args.n), 1)
        doc = fourier.function_to_monomials(pi).to_json()
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _common(p: argparse.ArgumentParser, epsilon_default: float) -> None:
    p.add_argument("--epsilon", type=_fraction, default=epsilon_default,
                   help="error parameter; fractions such as 1/3 are accepted")
    p.add_argument("--json", metavar="PATH", help="write the machine-readable report here")
    p.add_argument("--quiet", action="store_true", help="suppress the human-readable table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdequant", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="spectrum, decomposition metrics and bounds for an algorithm file")
    p.add_argument("file")
    p.add_argument("--label", type=int, default=1, help="output label whose probability is analysed")
    _common(p, 1 / 3)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run the classical mixture simulator on an algorithm or polynomial")
    p.add_argument("file")
    p.add_argument("--j", type=_positive_int, help="majority-vote repetitions")
    p.add_argument("--trials", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t", type=int, help="query count for polynomial input (default ceil(degree/2))")
    _common(p, 0.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("demo", help="worked examples: Deutsch-Jozsa or AND_n")
    p.add_argument("name", choices=("dj", "and"))
    p.add_argument("--n", type=int)
    _common(p, 1 / 3)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("bounds", help="evaluate F_eps and the derived caps")
    p.add_argument("--l1", type=_fraction, required=True, help="Fourier 1-norm")
    p.add_argument("--t", type=int, help="query count / half the polynomial degree")
    p.add_argument("--r-lower", type=_fraction, help="known lower bound on R_eps(f)")
    _common(p, 1 / 3)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("build", help="emit an algorithm or polynomial file")
    p.add_argument("kind", choices=("dj", "random", "dj-poly"))
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (QDequantError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

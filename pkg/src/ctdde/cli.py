"""Command-line entry point.

    ctdde simulate  SPEC [--out DIR] [--Q N] [--T N]
    ctdde analyze   SPEC [--out DIR] [--alpha-grid N]
    ctdde envelopes SPEC [--out DIR] [--Q N] [--alpha-grid N]
    ctdde bound     SPEC [--out DIR] [--Q N] [--T N]
    ctdde repro     [SPEC_DIR] [--out DIR] [--only NAME ...]

Exit codes: 0 success or verdict, 3 inconclusive, 1 error, 2 schema violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .analysis import (Tag, Verdict, barrier_verdict, certificate_verdict, construct_bounded_solution,
                       lemma_constant_delay_tests, s_scan, thm2_verdict, verify_certificate)
from .engine import INTERPOLATION_POLICY, SimulationError, check_condition5, detect_oscillation, simulate
from .envelope import RIGOROUS, SAMPLED, EnvelopeError, compute_envelopes, running_sup
from .expr import ExprError
from .interval import IntervalDivisionError
from .report import format_report
from .repro import SUITE, run_suite
from .specfile import SpecFile, SpecFileError, load

log = logging.getLogger("ctdde")

EXIT_OK, EXIT_ERROR, EXIT_SCHEMA, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class Contradiction(RuntimeError):
    """Two verdicts that cannot both hold."""


def _emit(items, out: Path | None, name: str) -> str:
    text = format_report(items)
    sys.stdout.write(text)
    if out is not None:
        (out / name).write_text(text)
    return text


def _outdir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args) -> SpecFile:
    sf = load(args.spec)
    return sf.with_overrides(T=getattr(args, "T", None), Q=getattr(args, "Q", None),
                             alpha_grid=getattr(args, "alpha_grid", None))


def _header(command: str, sf: SpecFile):
    return [("command", command), ("label", sf.label), ("m", sf.equation.m)]


# -- commands -------------------------------------------------------------

def cmd_simulate(args) -> int:
    sf = _load(args)
    out = _outdir(args)
    traj = simulate(sf.equation, sf.initial, sf.sim)
    items = _header("simulate", sf) + [
        ("T", sf.sim.T), ("Q", sf.sim.grid.Q), ("history_start", sf.initial.start),
        ("interpolation", INTERPOLATION_POLICY),
    ]
    items += detect_oscillation(traj).as_items()
    items += check_condition5(traj, sf.sim.T).as_items()
    if out is not None:
        traj.write_csv(out / "trajectory.csv")
        items.append(("trajectory_csv", "trajectory.csv"))
    _emit(items, out, "simulate_report.txt")
    return EXIT_OK


def analyze(sf: SpecFile):
    """All applicable verdicts, in report order, and the combined one."""
    n_from, n_to = sf.n_range
    eq = sf.equation
    sections: list[tuple[str, Verdict]] = []
    sections.append(("thm2", thm2_verdict(eq, n_from, n_to, sf.alpha_grid)))
    if sf.certificate is not None:
        sections.append(("certificate", certificate_verdict(eq, sf.certificate, max(n_from, 0), n_to)))
    scan = sf.t_scan
    if scan is not None:
        g = sf.g_expr if sf.g_expr is not None else running_sup(eq, scan["to"], sf.sim.grid.Q)
        sections.append(("s_scan", s_scan(eq, g, scan["from"], scan["to"], scan["step"]).verdict))
    sections.append(("barrier", barrier_verdict(eq, n_from, n_to + 1, sf.sim.grid.Q)))
    try:
        sections.append(("lemma", lemma_constant_delay_tests(eq, n_from, n_to)))
    except ValueError as exc:
        log.info("constant-delay tests skipped: %s", exc)
    tags = {name: v.tag for name, v in sections}
    if tags.get("certificate") is Tag.POSITIVE_SOLUTION_EXISTS:
        if tags.get("thm2") is Tag.NO_POSITIVE_UNDER_COND5:
            raise Contradiction("certificate passes but the comparison test excludes positive solutions")
        if tags.get("lemma") is Tag.OSCILLATORY:
            raise Contradiction("certificate passes but the constant-delay test says all solutions oscillate")
    combined = next((v for _, v in sections if v.conclusive), sections[0][1])
    return combined, sections


def cmd_analyze(args) -> int:
    sf = _load(args)
    out = _outdir(args)
    combined, sections = analyze(sf)
    items = _header("analyze", sf) + [("n_range", f"[{sf.n_range[0]}, {sf.n_range[1]}]"),
                                      ("alpha_grid", len(sf.alpha_grid))]
    items += combined.as_items()
    for name, v in sections:
        items += v.as_items(prefix=f"{name}.")
    _emit(items, out, "analyze_report.txt")
    return EXIT_OK if combined.conclusive else EXIT_INCONCLUSIVE


def cmd_envelopes(args) -> int:
    sf = _load(args)
    out = _outdir(args)
    n_from, n_to = sf.n_range
    items = _header("envelopes", sf) + [("n_range", f"[{n_from}, {n_to}]")]
    alphas = sf.alpha_grid if args.alpha_grid is not None else (0,)
    for mode in (RIGOROUS, SAMPLED):
        tables = [compute_envelopes(sf.equation, n_from, n_to, a, mode, sf.sim.grid.Q) for a in alphas]
        for tab in tables:
            tag = f"{mode}.alpha_{float(tab.alpha)!r}"
            items.append((f"{tag}.min_sum_a_low", float(min(tab.lower_sum(n) for n in tab.ns))))
            items.append((f"{tag}.max_a_high", float(tab.a_high.max())))
            items.append((f"{tag}.max_hf_high_minus_n",
                          max(tab.floor_high(k, n) - n for k in range(tab.m) for n in tab.ns)))
            items.append((f"{tag}.min_hf_low_minus_n",
                          min(tab.floor_low(k, n) - n for k in range(tab.m) for n in tab.ns)))
        if out is not None:
            path = out / f"envelopes_{mode}.csv"
            with open(path, "w") as fh:
                for i, tab in enumerate(tables):
                    tab.write_csv(fh, header=(i == 0))
            items.append((f"{mode}.csv", path.name))
    _emit(items, out, "envelopes_report.txt")
    return EXIT_OK


def cmd_bound(args) -> int:
    sf = _load(args)
    out = _outdir(args)
    if sf.certificate is None:
        raise SpecFileError("the bound command needs a 'certificate' section")
    T = sf.sim.T
    env = compute_envelopes(sf.equation, 0, T, 0, RIGOROUS)
    res = verify_certificate(sf.certificate, env)
    items = _header("bound", sf) + [("T", T), ("Q", sf.sim.grid.Q), ("certificate", "pass" if res.passed else "fail")]
    if not res.passed:
        items += [("failed_condition", res.condition), ("index", res.index), ("detail", res.detail)]
        _emit(items, out, "bound_report.txt")
        return EXIT_INCONCLUSIVE
    traj, bounds = construct_bounded_solution(sf.equation, sf.certificate, T, sf.sim.grid.Q)
    items += [("min_slack_16", res.min_slack("16")), ("min_slack_17", res.min_slack("17")),
              ("history_start", bounds.history_start), ("tolerance", bounds.tol),
              ("bound_violations", len(bounds.violations)),
              ("first_violation", bounds.violations[0] if bounds.violations else None)]
    if out is not None:
        traj.write_csv(out / "trajectory.csv")
        with open(out / "bounds.csv", "w") as fh:
            fh.write("n,piece_min,piece_max,u,V\n")
            for n, lo, hi, u, V in bounds.rows:
                fh.write(f"{n},{lo!r},{hi!r},{u!r},{V!r}\n")
    _emit(items, out, "bound_report.txt")
    if bounds.violations:
        log.error("bounds violated although the certificate passed")
        return EXIT_ERROR
    return EXIT_OK


def cmd_repro(args) -> int:
    out = _outdir(args)
    reports = run_suite(args.spec, args.only)
    items = [("command", "repro"), ("examples", len(reports))]
    for rep in reports:
        items.append((f"{rep.name}.status", "PASS" if rep.passed else "FAIL"))
        if rep.error:
            items.append((f"{rep.name}.error", rep.error))
        items += [(f"{rep.name}.{k}", v) for k, v in rep.items]
    failed = [r.name for r in reports if not r.passed]
    items.append(("failed", ",".join(failed) if failed else "none"))
    _emit(items, out, "repro_report.txt")
    for name in failed:
        print(f"ctdde: repro example '{name}' failed", file=sys.stderr)
    return EXIT_ERROR if failed else EXIT_OK


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ctdde", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"ctdde {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, T=False, Q=False, alpha=False):
        sp.add_argument("spec", help="equation spec file (JSON)")
        sp.add_argument("--out", help="directory for reports and CSV files")
        if Q:
            sp.add_argument("--Q", type=int, help="samples per unit interval")
        if T:
            sp.add_argument("--T", type=int, help="simulation horizon")
        if alpha:
            sp.add_argument("--alpha-grid", dest="alpha_grid", type=int,
                            help="use shifts alpha = j/N, j = 0..N-1")
        return sp

    common(sub.add_parser("simulate", help="simulate and write the trajectory"), T=True, Q=True).set_defaults(func=cmd_simulate)
    common(sub.add_parser("analyze", help="run the oscillation / existence criteria"), Q=True, alpha=True).set_defaults(func=cmd_analyze)
    common(sub.add_parser("envelopes", help="coefficient and delay-floor envelopes"), Q=True, alpha=True).set_defaults(func=cmd_envelopes)
    common(sub.add_parser("bound", help="check a certificate and build the bounded solution"), T=True, Q=True).set_defaults(func=cmd_bound)
    rp = sub.add_parser("repro", help="reproduce the worked examples")
    rp.add_argument("spec", nargs="?", help="directory of example spec files (default: bundled)")
    rp.add_argument("--out", help="directory for the suite report")
    rp.add_argument("--only", nargs="+", choices=sorted(SUITE), metavar="NAME",
                    help=f"run only these examples ({', '.join(SUITE)})")
    rp.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SpecFileError as exc:
        print(f"ctdde: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (SimulationError, EnvelopeError, ExprError, IntervalDivisionError, Contradiction,
            OSError, ValueError) as exc:
        print(f"ctdde: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

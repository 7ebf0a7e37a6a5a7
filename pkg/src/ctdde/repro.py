"""Reproduction suite: one sub-report per worked example, each a list of
named numeric checks over the bundled spec files."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .analysis import (Tag, check_groenwall, construct_bounded_solution, groenwall_bound, s_scan,
                       s_value, set_M, set_N, set_size, thm2_verdict, verify_certificate)
from .engine import check_condition5, detect_oscillation, residual, simulate
from .envelope import RIGOROUS, compute_envelopes
from .expr import evaluate, parse
from .specfile import SpecFileError, load

__all__ = ["SUITE", "SubReport", "run_suite", "default_spec_dir"]

SEED = 20240917


def default_spec_dir() -> Path:
    return Path(str(resources.files("ctdde") / "data"))


@dataclass
class SubReport:
    name: str
    items: list = field(default_factory=list)
    failed: list = field(default_factory=list)
    error: str = ""

    @property
    def passed(self) -> bool:
        return not self.failed and not self.error

    def check(self, key: str, ok: bool, value=None) -> None:
        if value is not None:
            self.items.append((key, value))
        self.items.append((f"{key}.ok", bool(ok)))
        if not ok:
            self.failed.append(key)

    def note(self, key: str, value) -> None:
        self.items.append((key, value))


def _samples(lo: float, hi: float, count: int = 10_000, seed: int = SEED):
    return np.random.default_rng(seed).uniform(lo, hi, count)


def _grid(traj, c: float, d: float):
    return traj.samples(c, d + 0.5 / traj.Q)  # closed on the right


def _example1(d: Path, r: SubReport) -> None:
    sf = load(d / "example1.json")
    res = residual(sf.equation, sf.reference, _samples(1, 40))
    r.check("residual_max", res <= 1e-12, res)
    traj = simulate(sf.equation, sf.initial, sf.sim)
    dev = max(abs(v - evaluate(sf.reference, t)) for t, v in _grid(traj, 1, 30))
    r.check("closed_form_deviation", dev <= 1e-9, dev)
    det = detect_oscillation(traj)
    r.check("eventually_positive", det.eventually_positive and not det.sign_events)
    xn = [traj.value_at(n) for n in range(1, 31)]
    r.check("x_n_equals_1_plus_half_pow_n",
            all(abs(x - (1 + 0.5 ** n)) <= 1e-12 and x > 1 for n, x in enumerate(xn, start=1)),
            min(xn))


def _theorem2_2(d: Path, r: SubReport) -> None:
    for name in ("theorem2_2", "theorem2_2_delayed"):
        sf = load(d / f"{name}.json")
        res = residual(sf.equation, sf.reference, _samples(0, 40))
        r.check(f"{name}.residual_max", res <= 1e-12, res)
        traj = simulate(sf.equation, sf.initial, sf.sim)
        low = min(v for _, v in _grid(traj, 0, 40))
        r.check(f"{name}.min_on_0_40", low > 0, low)
        c5 = check_condition5(traj, 40)
        Q = traj.Q
        scaled = [y * Q * 2.0 ** n for n, y in enumerate(c5.minima)]
        r.check(f"{name}.minima_times_Q_2pow_n", all(abs(s - 1) <= 1e-9 for s in scaled), max(scaled))
        r.check(f"{name}.cond5_suspect", c5.cond5_suspect)
        r.note(f"{name}.cond5_decay_ratio", c5.decay_ratio)


def _sign_change(d: Path, r: SubReport) -> None:
    sf = load(d / "sign_change.json")
    traj = simulate(sf.equation, sf.initial, sf.sim)
    worst = 0.0
    for t, v in traj.samples(0, 6.5):
        n = math.floor(t)
        if t - n < 0.5:
            worst = max(worst, abs(v - 1.5 ** n * 2.0 ** -t))
        elif t < 6:
            worst = max(worst, abs(v - 2.0 ** -t))
    r.check("closed_form_deviation", worst <= 1e-12, worst)
    first = traj.sign_events(0, traj.end)[0]
    r.check("first_sign_event_in_6.5_7", 6.5 <= first[1] < 7 and first[0] >= 6.5 - 1 / traj.Q,
            f"({first[0]!r}, {first[1]!r})")
    x = traj.value_at(6.75)
    r.check("x_6.75_negative", x < 0, x)


def _ex1eq1(d: Path, r: SubReport) -> None:
    sf = load(d / "ex1eq1.json")
    env = compute_envelopes(sf.equation, 3, 50, 0, RIGOROUS)
    low = min(env.lower_sum(n) for n in env.ns)
    r.check("min_sum_a_low", low >= 0.27, float(low))
    gap = max(env.floor_high(k, n) - n for k in range(env.m) for n in env.ns)
    r.check("max_hf_high_minus_n", gap <= -2, gap)
    v = thm2_verdict(sf.equation, 3, 50, sf.alpha_grid)
    r.check("thm2_verdict", v.tag is Tag.NO_POSITIVE_UNDER_COND5, str(v.tag))
    r.note("sum_test", v.evidence.get("sum_test", "none"))
    r.check("exceeds_4_27", low > 4 / 27)
    r.check("exceeds_1_4", low > 1 / 4)


def _ex3eq1(d: Path, r: SubReport) -> None:
    sf = load(d / "ex3eq1.json")
    env = compute_envelopes(sf.equation, 0, 30, 0, RIGOROUS)
    exact_a = all(env.lower(0, n) == env.upper(0, n) == 0.5 ** (n + 2) for n in env.ns)
    r.check("a_low_equals_a_high_equals_half_pow_n_plus_2", exact_a)
    floors = sorted({env.floor_high(0, n) - n for n in env.ns} | {env.floor_low(0, n) - n for n in env.ns})
    r.note("hf_offsets_found", floors)
    res = verify_certificate(sf.certificate, env)
    r.check("certificate", res.passed, res.condition or "pass")
    eq = max(abs(float(s)) for _, s in res.slack16)
    r.check("condition16_equality", eq <= 1e-15, eq)
    _, bounds = construct_bounded_solution(sf.equation, sf.certificate, 30, sf.sim.grid.Q)
    r.check("bounds_violations", bounds.ok, len(bounds.violations))


def _example4(d: Path, r: SubReport) -> None:
    sf = load(d / "example4.json")
    traj = simulate(sf.equation, sf.initial, sf.sim)
    dev = max(abs(v - evaluate(sf.reference, t)) for t, v in _grid(traj, 0, 20))
    r.check("closed_form_deviation", dev <= 1e-12, dev)
    rises = [traj.value_at(n + 0.5) > traj.value_at(n) for n in range(1, 21)]
    r.check("x_n_half_exceeds_x_n", all(rises))
    s = [s_value(sf.equation, parse("t"), float(t)) for t in range(1, 21)]
    r.check("s_value_zero", all(v == 0 for v in s), max(s))


def _groenwall(d: Path, r: SubReport) -> None:
    sf = load(d / "groenwall.json")
    traj = simulate(sf.equation, sf.initial, sf.sim)
    rng = random.Random(SEED)
    pairs = []
    while len(pairs) < 100:
        s, t = sorted((rng.uniform(0, 30), rng.uniform(0, 30)))
        pairs.append((s, t))
    chk = check_groenwall(traj, sf.equation, pairs)
    r.check("violations", not chk.skipped and not chk.violations, len(chk.violations))
    empty = [groenwall_bound(sf.equation, s, s + 0.999, f) for s in (0.0, 3.3, 17.5) for f in "NM"]
    r.check("empty_set_bound", all(b == 1 for b in empty))
    mismatches = 0
    for _ in range(1000):
        s = rng.uniform(0, 40)
        t = s + rng.uniform(0, 12)
        brute = sum(1 for j in range(0, 20) if s + j <= t - 1)
        brute_m = sum(1 for j in range(1, 20) if t - j >= s)
        if not (len(set_N(s, t)) == len(set_M(s, t)) == set_size(s, t) == brute == brute_m):
            mismatches += 1
    r.check("set_size_oracle_mismatches", mismatches == 0, mismatches)


def _burst(d: Path, r: SubReport) -> None:
    sf = load(d / "burst.json")
    s18 = s_value(sf.equation, sf.g_expr, 18.0)
    r.check("S_18", abs(s18 - 4.5) <= 1e-9, s18)
    scan = sf.t_scan
    res = s_scan(sf.equation, sf.g_expr, scan["from"], scan["to"], scan["step"])
    r.check("verdict", res.verdict.tag is Tag.NO_POSITIVE_NONINCREASING, str(res.verdict.tag))
    r.note("witness_t", res.verdict.evidence.get("t", "none"))


SUITE = {
    "example1": _example1,
    "theorem2_2": _theorem2_2,
    "sign_change": _sign_change,
    "ex1eq1": _ex1eq1,
    "ex3eq1": _ex3eq1,
    "example4": _example4,
    "groenwall": _groenwall,
    "burst": _burst,
}


def run_suite(spec_dir=None, only=None) -> list[SubReport]:
    spec_dir = Path(spec_dir) if spec_dir is not None else default_spec_dir()
    names = list(SUITE)
    if only:
        unknown = [n for n in only if n not in SUITE]
        if unknown:
            raise KeyError(f"unknown example(s): {', '.join(unknown)}; choose from {', '.join(SUITE)}")
        names = [n for n in names if n in only]
    out = []
    for name in names:
        rep = SubReport(name)
        try:
            SUITE[name](spec_dir, rep)
        except (SpecFileError, OSError, ValueError, ArithmeticError, RuntimeError) as exc:
            rep.error = f"{type(exc).__name__}: {exc}"
        out.append(rep)
    return out

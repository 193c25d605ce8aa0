"""Command-line entry point: verification pipelines, tables and exports.

Each subcommand builds a :class:`RunReport`, prints its tables, optionally
writes JSON/CSV, and exits with

    0  every check passed
    1  at least one check failed
    2  usage or domain error
    3  resource cap exceeded
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boson_oracle import build_basis, vertex_state
from .errors import (DegeneracyError, DomainError, FitError, InvalidStateError,
                     LuttingerError, ResourceCapError)
from .formfactor import (chiral_weights, direct_cauchy_det, f_minus, f_plus, formfactor)
from .params import (LuttingerParams, coupling_from_xi, energy_tower, params_from_coupling,
                     xi_from_anisotropy)
from .scaling import (ScalingRelation, boson_model, density_model, fit_prefactors,
                      formfactor_from_prefactor)
from .series import damping_trend, level_sums_enumerated, reconstruct_correlator
from .states import ChiralState, enumerate_level
from .xx_oracle import (ED_CAP, ExactDiagonalization, XxChainConfig, density_correlator,
                        density_lowest_formfactor, ground_state, lowest_sigma_minus_formfactor,
                        particle_hole_ratio, transverse_correlator, umklapp_state)

__all__ = ["RunReport", "Table", "TOLERANCE_PROFILES", "build_parser", "run", "main"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

TOLERANCE_PROFILES = {
    "default": {
        "sumrule": 1e-10,
        "formfactor": 1e-9,
        "ed": 1e-10,
        "scaldens": 1e-6,
        "scaling": 1e-2,
        "particle_hole": 1e-2,
        "tail_ratio": 1e-3,
    },
    "strict": {
        "sumrule": 1e-12,
        "formfactor": 1e-12,
        "ed": 1e-12,
        "scaldens": 1e-9,
        "scaling": 5e-3,
        "particle_hole": 5e-3,
        "tail_ratio": 1e-4,
    },
}

# asymptotic statements are only enforced from these lengths on
SCALING_MIN_LENGTH = 32
PARTICLE_HOLE_MIN_LENGTH = 64

PASS, FAIL, INFO = "pass", "fail", "info"


@dataclass
class Table:
    """Flat table; rows are lists aligned with ``columns``."""

    name: str
    columns: list
    rows: list = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row of {len(values)} values for {len(self.columns)} columns")
        self.rows.append([_clean(v) for v in values])

    def to_dict(self):
        return {"name": self.name, "columns": list(self.columns), "rows": self.rows}


@dataclass
class RunReport:
    """Everything needed to reproduce and judge one command invocation.

    ``parameters`` holds the fully resolved inputs (re-runnable), ``tables``
    the results, ``pass_fail`` one entry per judged quantity.  ``timing`` is
    wall-clock seconds per stage and is kept out of :meth:`body`.
    """

    command: str
    parameters: dict
    tables: list = field(default_factory=list)
    pass_fail: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    def table(self, name, columns) -> Table:
        t = Table(name, list(columns))
        self.tables.append(t)
        return t

    def judge(self, name, measured, tolerance, enforce=True, table=None, values=()):
        """Record a check ``measured <= tolerance``; ``enforce=False`` makes it informational.

        When ``table`` is given the row ``values + (measured, tolerance, status)``
        is appended to it.
        """
        ok = measured is not None and math.isfinite(measured) and measured <= tolerance
        status = INFO if not enforce else (PASS if ok else FAIL)
        self.pass_fail.append({"check": name, "measured": _clean(measured),
                               "tolerance": _clean(tolerance), "status": status})
        if table is not None:
            table.add(*values, measured, tolerance, status)
        return status

    @contextmanager
    def stage(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timing[name] = time.perf_counter() - start

    @property
    def passed(self) -> bool:
        return all(c["status"] != FAIL for c in self.pass_fail)

    def body(self) -> dict:
        return {"command": self.command, "parameters": self.parameters,
                "results": [t.to_dict() for t in self.tables], "pass_fail": self.pass_fail}

    def to_dict(self) -> dict:
        out = self.body()
        out["timing"] = dict(self.timing)
        return out

    def body_json(self) -> str:
        return json.dumps(self.body(), sort_keys=True, indent=2)


def _clean(v):
    """JSON-safe scalar: numpy to Python, non-finite floats to ``None``."""
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def render(report: RunReport) -> str:
    lines = [f"# {report.command}"]
    for key in sorted(report.parameters):
        lines.append(f"  {key} = {_fmt(report.parameters[key])}")
    for t in report.tables:
        cells = [[_fmt(v) for v in row] for row in t.rows]
        widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(t.columns)]
        lines.append("")
        lines.append(f"[{t.name}]")
        lines.append("  ".join(c.rjust(w) for c, w in zip(t.columns, widths)))
        for r in cells:
            lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
    n_fail = sum(c["status"] == FAIL for c in report.pass_fail)
    n_pass = sum(c["status"] == PASS for c in report.pass_fail)
    lines.append("")
    lines.append(f"checks: {n_pass} pass, {n_fail} fail, "
                 f"{len(report.pass_fail) - n_pass - n_fail} info")
    return "\n".join(lines)


def write_json(report: RunReport, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def write_csv(report: RunReport, directory):
    """One ``<command>_<table>.csv`` per table, header row first."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for t in report.tables:
        with open(d / f"{report.command}_{t.name}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(t.columns)
            for row in t.rows:
                w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v)
                            for v in row])


# --- commands --------------------------------------------------------------------

def cmd_params(args, tol) -> RunReport:
    report = RunReport("params", {"delta": args.delta, "lambda": args.lam,
                                  "length": args.length})
    with report.stage("params"):
        table = report.table("parameters", ["quantity", "value", "error", "tolerance", "status"])
        if args.lam is not None:
            p = params_from_coupling(args.lam, length=args.length)
            roundtrip = abs(coupling_from_xi(p.xi) - args.lam)
        else:
            xi = xi_from_anisotropy(args.delta)
            p = LuttingerParams(xi=xi, length=args.length)
            roundtrip = None
        table.add("xi", p.xi, None, None, INFO)
        table.add("u", p.u if args.lam is not None else None, None, None, INFO)
        if roundtrip is not None:
            report.judge("lambda_roundtrip", roundtrip, 1e-12, table=table,
                         values=("lambda(xi)", coupling_from_xi(p.xi)))
        tower = report.table("tower", ["delta_n", "delta_q", "energy", "error", "tolerance",
                                       "status"])
        for dn, dq, e in energy_tower(p, 2):
            tower.add(dn, dq, e, None, None, INFO)
    return report


def _parse_state(text: str) -> ChiralState:
    try:
        left, right = text.split(";")
        particles = [int(v) for v in left.split(",") if v.strip()]
        holes = [int(v) for v in right.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidStateError(f"state must look like 'p1,p2;q1,q2', got {text!r}") from exc
    return ChiralState.from_unsorted(particles, holes)


def _direct_formfactor(state: ChiralState, a: float) -> float:
    """Dense-determinant path, independent of the log-space product."""
    value = direct_cauchy_det(state.particles, state.holes)
    for p in state.particles:
        value *= f_plus(p, a)
    for q in state.holes:
        value *= f_minus(q, a)
    return value


def cmd_ff(args, tol) -> RunReport:
    if args.state is None and args.level is None:
        raise DomainError("ff needs --level or --state")
    report = RunReport("ff", {"a": args.a, "level": args.level, "state": args.state,
                              "oracle": bool(args.oracle)})
    with report.stage("formfactor"):
        if args.state is not None:
            states = [_parse_state(args.state)]
            if args.level is not None and states[0].level != args.level:
                raise DomainError(f"state {states[0]} has level {states[0].level}, "
                                  f"not {args.level}")
        else:
            states = enumerate_level(args.level)
        cutoff = max(s.level for s in states)
        oracle = None
    if args.oracle:
        with report.stage("oracle"):
            oracle = vertex_state(build_basis(cutoff), args.a)
    cols = ["state", "level", "F", "F_direct"]
    if oracle is not None:
        cols.append("F_oracle")
    table = report.table("formfactors", cols + ["error", "tolerance", "status"])
    ftol = tol["formfactor"]
    for s in states:
        f = formfactor(s, args.a).value
        row = [str(s), s.level, f, _direct_formfactor(s, args.a)]
        err = abs(f - row[3])
        if oracle is not None:
            row.append(oracle.amplitude(s))
            err = max(err, abs(f - row[-1]))
        report.judge(f"F[{s}]", err, ftol * max(1.0, abs(f)), table=table, values=row)
    return report


def cmd_sumrule(args, tol) -> RunReport:
    report = RunReport("sumrule", {"a": args.a, "max_level": args.max_level})
    with report.stage("enumeration"):
        reports = level_sums_enumerated(range(args.max_level + 1), args.a)
    table = report.table("sumrule", ["m", "states", "enumerated", "closed_form", "rel_err",
                                     "tolerance", "status"])
    for rep in reports:
        report.judge(f"sumrule[m={rep.level}]", rep.rel_err, tol["sumrule"], table=table,
                     values=(rep.level, rep.state_count, rep.enumerated_sum, rep.closed_form))
    return report


def cmd_reconstruct(args, tol) -> RunReport:
    theta = 2 * math.pi * args.x_over_l
    report = RunReport("reconstruct", {"a": args.a, "r": args.r, "x_over_l": args.x_over_l,
                                       "max_level": args.max_level, "trend": bool(args.trend)})
    with report.stage("reconstruction"):
        ev = reconstruct_correlator(args.r, theta, args.a, args.max_level)
    table = report.table("reconstruction", [
        "r", "theta", "M", "partial_re", "partial_im", "closed_re", "closed_im",
        "error", "tolerance", "status"])
    report.judge("partial_sum_within_tail_bound", ev.error, ev.tail_bound, table=table,
                 values=(args.r, theta, args.max_level, ev.partial_sum.real,
                         ev.partial_sum.imag, ev.closed_form.real, ev.closed_form.imag))
    ratio = report.table("tail", ["tail_bound", "closed_abs", "error", "tolerance", "status"])
    rel = ev.tail_bound / abs(ev.closed_form) if ev.closed_form else math.inf
    report.judge("tail_ratio", rel, tol["tail_ratio"], enforce=args.r <= 0.5, table=ratio,
                 values=(ev.tail_bound, abs(ev.closed_form)))
    if args.trend:
        with report.stage("trend"):
            trend = report.table("damping_trend", ["r", "error", "tolerance", "status"])
            for r, err, bound in damping_trend(theta, args.a, args.max_level):
                trend.add(r, err, bound, INFO)
    return report


def _fit_window(length: int, n_free: int):
    """Central window ``[L/8, 3L/8]``, widened to ``[1, L-1]`` if too few samples."""
    lo, hi = max(1, round(length / 8)), round(3 * length / 8)
    if hi - lo + 1 < 3 * n_free:
        lo, hi = 1, length - 1
    return lo, hi


def _xx_particle_hole_states(max_level: int):
    states = []
    for total in range(1, max_level + 1):
        for lr in range(total + 1):
            for right in enumerate_level(total - lr):
                for left in enumerate_level(lr):
                    states.append((right, left))
    return states


def cmd_xx_validate(args, tol) -> RunReport:
    L = args.length
    config = XxChainConfig(L)
    xi = 1.0
    report = RunReport("xx-validate", {"length": L, "max_level": args.max_level,
                                       "ed": bool(args.ed)})
    if args.ed and L > ED_CAP:
        raise ResourceCapError(f"--ed needs length <= {ED_CAP}, got {L}")

    with report.stage("ground_states"):
        gs = report.table("ground_states", ["particles", "antiperiodic", "energy", "error",
                                            "tolerance", "status"])
        t_m = ground_state(config)
        t_m1 = ground_state(config, config.filling - 1)
        for st in (t_m, t_m1):
            gs.add(st.n_particles, st.antiperiodic, st.energy(config.hopping), None, None, INFO)

    with report.stage("formfactors"):
        c_low = lowest_sigma_minus_formfactor(config)
        c1 = density_lowest_formfactor(config)
        ff = report.table("lowest_formfactors", ["quantity", "value", "error", "tolerance",
                                                 "status"])
        ff.add("C_sigma_minus", c_low, None, None, INFO)
        ff.add("C_sigma_minus^2 (L/2)^(1/2)", c_low ** 2 * math.sqrt(L / 2), None, None, INFO)
        report.judge("C1_equals_2/L", abs(c1 - 2.0 / L), tol["ed"], table=ff,
                     values=("C1_density", c1))

    enforce_scaling = L >= SCALING_MIN_LENGTH
    rel = report.table("scaling_relations", ["relation", "prefactor", "implied_ff_sq",
                                             "measured_ff_sq", "error", "tolerance", "status"])
    with report.stage("transverse_fit"):
        model = boson_model(xi, harmonics=(0,), fermi_momentum=config.fermi_momentum,
                            staggered=True)
        window = _fit_window(L, 1)
        xs = range(window[0], window[1] + 1)
        samples = [(x, transverse_correlator(config, x)) for x in xs]
        try:
            _, fit = fit_prefactors(samples, model, window, L)
        except FitError as exc:
            fit = None
            rel.add(f"sigma_minus m=0 ({exc})", None, None, c_low ** 2, None, None, INFO)
        if fit is not None:
            c0 = fit.amplitudes[0]
            implied = formfactor_from_prefactor(ScalingRelation("boson", 0, xi, L, prefactor=c0))
            report.judge("scaling_sigma_minus", abs(c_low ** 2 / implied - 1),
                         tol["scaling"], enforce=enforce_scaling, table=rel,
                         values=("sigma_minus m=0", c0, implied, c_low ** 2))

    with report.stage("density_fit"):
        model = density_model(xi, harmonics=(1,), fermi_momentum=config.fermi_momentum,
                              uniform=2.0)
        window = _fit_window(L, 2)
        xs = np.arange(window[0], window[1] + 1)
        samples = list(zip(xs.tolist(), density_correlator(config, xs).tolist()))
        try:
            _, dfit = fit_prefactors(samples, model, window, L)
        except FitError as exc:
            dfit = None
            rel.add(f"density m=1 ({exc})", None, None, c1 ** 2, None, None, INFO)
        if dfit is not None:
            c10 = dfit.amplitudes[0]
            implied = formfactor_from_prefactor(ScalingRelation("density", 1, xi, L,
                                                                prefactor=c10))
            report.judge("scaldens", abs(implied - c1 ** 2) / c1 ** 2, tol["scaldens"],
                         table=rel, values=("density m=1", c10, implied, c1 ** 2))
            fits = report.table("fits", ["correlator", "window_lo", "window_hi", "samples",
                                         "amplitude", "uniform", "error", "tolerance",
                                         "status"])
            if fit is not None:
                fits.add("transverse", fit.window[0], fit.window[1], fit.n_samples,
                         fit.amplitudes[0], None, fit.max_rel_residual, None, INFO)
            fits.add("density", dfit.window[0], dfit.window[1], dfit.n_samples,
                     dfit.amplitudes[0], dfit.uniform_coefficient, dfit.max_rel_residual,
                     None, INFO)

    with report.stage("particle_hole"):
        a_r, a_l = chiral_weights("boson", 0, xi)
        ph = report.table("particle_hole", ["right", "left", "ratio", "F", "error",
                                            "tolerance", "status"])
        enforce_ph = L >= PARTICLE_HOLE_MIN_LENGTH
        for right, left in _xx_particle_hole_states(args.max_level):
            target = abs(formfactor(right, a_r).value * formfactor(left, a_l).value)
            try:
                ratio = particle_hole_ratio(config, right, left)
            except (InvalidStateError, DomainError):
                ph.add(str(right), str(left), None, target, None, None, INFO)
                continue
            report.judge(f"particle_hole[{right}|{left}]", abs(ratio - target) / target,
                         tol["particle_hole"], enforce=enforce_ph, table=ph,
                         values=(str(right), str(left), ratio, target))

    if args.ed:
        with report.stage("ed"):
            _xx_ed_checks(report, config, tol["ed"])
    return report


def _xx_ed_checks(report: RunReport, config: XxChainConfig, tol: float):
    L, M = config.length, config.filling
    ed = ExactDiagonalization(L, config.antiferro)
    table = report.table("ed", ["observable", "free_fermion", "ed", "error", "tolerance",
                                "status"])

    def compare(name, ff_value, ed_value):
        report.judge(f"ed[{name}]", abs(ff_value - ed_value), tol, table=table,
                     values=(name, ff_value, ed_value))

    for n in (M, M - 1):
        compare(f"energy N={n}", ground_state(config, n).energy(config.hopping),
                ed.ground_state(n)[0])
    for x in range(1, L):
        compare(f"transverse x={x}", transverse_correlator(config, x), ed.transverse(x, M))
    for x in range(1, L):
        compare(f"density x={x}", density_correlator(config, x), ed.density(x, M))
    compare("lowest sigma_minus", lowest_sigma_minus_formfactor(config), ed.sigma_minus(M))
    tp = umklapp_state(ground_state(config), config.hopping)
    _, psi = ed.ground_state(M)
    compare("density lowest", density_lowest_formfactor(config),
            2.0 * abs(ed.number_element(ed.slater_vector(tp), psi)))


COMMANDS = {
    "params": cmd_params,
    "ff": cmd_ff,
    "sumrule": cmd_sumrule,
    "reconstruct": cmd_reconstruct,
    "xx-validate": cmd_xx_validate,
}


# --- argument handling -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the full report as JSON")
    common.add_argument("--csv", metavar="DIR", help="write one CSV file per table")
    common.add_argument("--tolerance-profile", choices=sorted(TOLERANCE_PROFILES),
                        default="default")
    common.add_argument("--config", metavar="FILE",
                        help="key=value file presetting options of the command")

    parser = argparse.ArgumentParser(
        prog="luttinger-ff",
        description="Formfactor, sum-rule and XX-chain verification pipelines.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("params", parents=[common], help="Luttinger parameters and energy tower")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--delta", type=float, help="XXZ anisotropy in (-1, 1]")
    g.add_argument("--lambda", dest="lam", type=float, help="density coupling, |lambda| < 1")
    p.add_argument("--length", type=int, default=100)

    p = sub.add_parser("ff", parents=[common], help="particle-hole formfactors")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--level", type=int)
    p.add_argument("--state", help="'p1,p2;q1,q2'")
    p.add_argument("--oracle", action="store_true", help="add the brute-force Fock column")

    p = sub.add_parser("sumrule", parents=[common], help="level sums against the closed form")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--max-level", type=int, default=12)

    p = sub.add_parser("reconstruct", parents=[common],
                       help="damped formfactor series against (1 - z)^(-a^2)")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--x-over-l", type=float, required=True)
    p.add_argument("--max-level", type=int, default=24)
    p.add_argument("--trend", action="store_true", help="report the r -> 1 trend")

    p = sub.add_parser("xx-validate", parents=[common], help="XX chain scaling pipeline")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--max-level", type=int, default=2)
    p.add_argument("--ed", action="store_true", help="cross-check against exact diagonalization")
    return parser


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment, blank lines are ignored."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("_", "-")] = value
    return out


_EXCLUSIVE = ({"delta", "lambda"},)


def _config_tokens(config: dict, given: set) -> list:
    tokens = []
    for key, value in config.items():
        if key in given or key == "config":
            continue
        if any(key in grp and grp & given for grp in _EXCLUSIVE):
            continue
        if value.lower() in ("true", "yes", "on"):
            tokens.append(f"--{key}")
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            tokens.append(f"--{key}={value}")
    return tokens


def parse_args(argv):
    """Parse ``argv``, applying a ``--config`` file underneath the command line."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config and argv and argv[0] in COMMANDS:
        given = {tok[2:].split("=", 1)[0] for tok in argv if tok.startswith("--")}
        try:
            config = read_config(known.config)
        except OSError as exc:
            raise DomainError(f"cannot read config {known.config}: {exc}") from exc
        argv = argv[:1] + _config_tokens(config, given) + argv[1:]
    return build_parser().parse_args(argv)


def run(argv=None) -> tuple:
    """Execute a command; returns ``(exit_code, report_or_None)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        tol = TOLERANCE_PROFILES[args.tolerance_profile]
        report = COMMANDS[args.command](args, tol)
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP, None
    except (DomainError, InvalidStateError, DegeneracyError, LuttingerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else EXIT_USAGE), None
    report.parameters["tolerance_profile"] = args.tolerance_profile
    print(render(report))
    for stage, secs in report.timing.items():
        print(f"timing {stage}: {secs:.3f} s", file=sys.stderr)
    if args.json:
        write_json(report, args.json)
    if args.csv:
        write_csv(report, args.csv)
    return (EXIT_OK if report.passed else EXIT_FAIL), report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())

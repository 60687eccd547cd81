"""Batch command-line front end writing deterministic CSV.

Exit codes: 0 ok, 1 usage or configuration error, 2 a strict-mode or check
criterion failed, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import oracle
from .calculus import RadialGrid
from .errors import PdmError, RestrictionError
from .oscillator import assemble_solution, default_grid, oscillator_field, unperturbed_potential
from .potentials import AmbiguityParams, QuantumSetting
from .profiles import BUILTINS, builtin_profiles, get_profile
from .split import check_allowed, cross_term_check, solvability_check
from .transform import assemble_phi_residual, oscillator_transform, prescription_residual

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_NUMERIC = 0, 1, 2, 3

SPECTRUM_COLUMNS = (
    "profile,alpha,gamma,N,L,n,omega,epsilon,delta_e_mean,delta_e_dev,"
    "E_analytic,E_oracle,abs_err,membership,solvable_flag"
).split(",")
WAVEFUNCTION_COLUMNS = ["r", "F", "G", "psi", "psi_normalized"]
IDENTITY_COLUMNS = "profile,alpha,gamma,N,L,identity_residual,tolerance,pass".split(",")
SOLVABILITY_COLUMNS = "profile,alpha,gamma,N,L,omega,delta_e_mean,delta_e_dev,tolerance,solvable_flag".split(",")
TRANSFORM_COLUMNS = (
    "profile,level,omega,lambda,phi_residual,control_residual,prescription_residual,pass"
).split(",")
VERIFY_COLUMNS = (
    "profile,alpha,gamma,N,L,n,E_analytic,E_oracle,abs_err,membership,oracle_estimate,oracle_spectrum"
).split(",")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    profile: str = "constant"
    params: dict = field(default_factory=dict)
    preset: str = "bendaniel-duke"
    omega: float = 2.0
    N: list = field(default_factory=lambda: [1])
    L: list = field(default_factory=lambda: [0])
    n: list = field(default_factory=lambda: [0])
    nodes: int = oracle.DEFAULT_NODES
    rmax: Optional[float] = None
    refine: int = oracle.DEFAULT_LEVELS
    strict: bool = False
    out: Optional[str] = None
    tol_identity: float = 1e-6
    tol_solvable: float = 1e-8
    tol_oracle: float = oracle.DEFAULT_TOL
    tol_transform: float = 1e-4
    check_rmin: float = 0.5
    check_rmax: float = 5.0
    check_nodes: int = 91
    wave_nodes: int = 2001
    transform_span: float = 8.0
    transform_step: float = 1e-3

    def validate(self):
        for name in ("N", "L", "n"):
            if not getattr(self, name):
                raise UsageError(f"{name} list is empty")
        if not self.omega > 0:
            raise UsageError("omega must be positive")
        if self.refine not in (1, 2, 3):
            raise UsageError("refine must be 1, 2 or 3")
        if self.nodes < 16:
            raise UsageError("nodes must be at least 16")
        return self

    def profiles(self):
        if self.profile == "all":
            if self.params:
                raise UsageError("--param cannot be combined with --profile all")
            return builtin_profiles()
        try:
            return [get_profile(self.profile, **self.params)]
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from None

    def presets(self):
        names = ["bendaniel-duke", "zhu-kroemer"] if self.preset == "all" else [self.preset]
        out = []
        for name in names:
            try:
                params = AmbiguityParams.preset(name)
                check_allowed(params)
            except (ValueError, RestrictionError) as exc:
                raise UsageError(str(exc)) from None
            out.append(params)
        return out

    def settings(self, with_n: bool = True):
        """Valid (N, L[, n]) settings, sorted by N, then L, then n; N = 1 keeps only L = 0."""
        out = []
        for N in sorted(set(self.N)):
            for L in sorted(set(self.L)):
                if N == 1 and L != 0:
                    continue
                for n in sorted(set(self.n)) if with_n else [0]:
                    try:
                        out.append(QuantumSetting(N, L, self.omega, n))
                    except ValueError as exc:
                        raise UsageError(str(exc)) from None
        if not out:
            raise UsageError("no valid (N, L, n) combination")
        return out


_LIST_KEYS = {"N", "L", "n"}
_INT_KEYS = {"nodes", "refine", "check_nodes", "wave_nodes"}
_BOOL_KEYS = {"strict"}


def _parse_list(text):
    try:
        return [int(x) for x in str(text).replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from None


def _coerce(key, value):
    if key in _LIST_KEYS:
        return _parse_list(value)
    if key in _BOOL_KEYS:
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    try:
        if key in _INT_KEYS:
            return int(value)
        if key == "rmax":
            return None if str(value).strip().lower() in ("", "auto", "none") else float(value)
        if key in ("profile", "preset", "out"):
            return str(value).strip()
        return float(value)
    except ValueError:
        raise UsageError(f"bad value for {key}: {value!r}") from None


def _parse_param(item):
    key, sep, value = item.partition("=")
    if not sep:
        raise UsageError(f"--param expects key=value, got {item!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise UsageError(f"parameter {key!r} needs a number, got {value!r}") from None


def read_config(path) -> dict:
    """Parse a key=value file; ``param.<name> = x`` sets a profile parameter."""
    known = {f.name for f in fields(RunConfig)} - {"params"}
    values, params = {}, {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        if key.startswith("param."):
            params.update([_parse_param(f"{key[6:]}={value}")])
        elif key in known:
            values[key] = _coerce(key, value)
        else:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
    if params:
        values["params"] = params
    return values


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value == 0.0:
            return "0"
        return format(value, ".12g")
    return str(value)


def write_csv(columns, rows, out: Optional[str]):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    text = buffer.getvalue()
    if out:
        Path(out).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def _oracle_options(cfg: RunConfig):
    return dict(nodes=cfg.nodes, r_max=cfg.rmax, levels=cfg.refine, tol=cfg.tol_oracle)


def _base_row(profile, params):
    return {"profile": profile.label(), "alpha": params.alpha, "gamma": params.gamma}


def _iter_cases(cfg, with_n=True):
    for profile in cfg.profiles():
        for params in cfg.presets():
            for setting in cfg.settings(with_n):
                yield profile, params, setting


def run_spectrum(cfg: RunConfig):
    rows = []
    for profile, params, s in _iter_cases(cfg):
        result, _ = assemble_solution(
            profile, params, s, threshold=cfg.tol_solvable, with_oracle=True, oracle_options=_oracle_options(cfg)
        )
        rows.append(
            {
                **_base_row(profile, params),
                "N": s.N,
                "L": s.L,
                "n": s.n,
                "omega": s.omega,
                "epsilon": result.epsilon,
                "delta_e_mean": result.delta_e_mean,
                "delta_e_dev": result.delta_e_deviation,
                "E_analytic": result.total_e,
                "E_oracle": result.oracle_e,
                "abs_err": result.abs_err,
                "membership": result.membership,
                "solvable_flag": result.solvable,
            }
        )
    code = EXIT_FAILED if cfg.strict and not all(r["solvable_flag"] for r in rows) else EXIT_OK
    return SPECTRUM_COLUMNS, rows, code


def run_wavefunction(cfg: RunConfig):
    profiles, presets, settings = cfg.profiles(), cfg.presets(), cfg.settings()
    if len(profiles) != 1 or len(presets) != 1 or len(settings) != 1:
        raise UsageError("wavefunction needs exactly one profile, preset and (N, L, n)")
    profile, params, s = profiles[0], presets[0], settings[0]
    grid = default_grid(profile, s, nodes=cfg.wave_nodes, r_max=cfg.rmax)
    result, table = assemble_solution(profile, params, s, grid=grid, threshold=cfg.tol_solvable)
    normalized = table.psi_normalized
    rows = [
        {"r": r, "F": f, "G": g, "psi": p, "psi_normalized": q}
        for r, f, g, p, q in zip(grid.nodes, table.F, table.G, table.psi, normalized)
    ]
    code = EXIT_FAILED if cfg.strict and not result.solvable else EXIT_OK
    return WAVEFUNCTION_COLUMNS, rows, code


def _check_grid(cfg):
    return RadialGrid(cfg.check_rmin, cfg.check_rmax, cfg.check_nodes)


def run_identity(cfg: RunConfig):
    rows, grid = [], _check_grid(cfg)
    for profile, params, s in _iter_cases(cfg, with_n=False):
        report = cross_term_check(profile, params, s, oscillator_field(profile, s.omega), grid)
        rows.append(
            {
                **_base_row(profile, params),
                "N": s.N,
                "L": s.L,
                "identity_residual": report.identity_residual,
                "tolerance": cfg.tol_identity,
                "pass": report.identity_residual <= cfg.tol_identity,
            }
        )
    return IDENTITY_COLUMNS, rows, EXIT_OK if all(r["pass"] for r in rows) else EXIT_FAILED


def run_solvability(cfg: RunConfig):
    rows, grid = [], _check_grid(cfg)
    for profile, params, s in _iter_cases(cfg, with_n=False):
        report = solvability_check(profile, params, s, oscillator_field(profile, s.omega), grid)
        rows.append(
            {
                **_base_row(profile, params),
                "N": s.N,
                "L": s.L,
                "omega": s.omega,
                "delta_e_mean": report.delta_e_mean,
                "delta_e_dev": report.delta_e_max_deviation,
                "tolerance": cfg.tol_solvable,
                "solvable_flag": report.delta_e_max_deviation <= cfg.tol_solvable,
            }
        )
    return SOLVABILITY_COLUMNS, rows, EXIT_OK if all(r["solvable_flag"] for r in rows) else EXIT_FAILED


def run_transform(cfg: RunConfig):
    """Hermite levels (the ``n`` list) on the 1-D oscillator system of each profile."""
    count = int(round(2 * cfg.transform_span / cfg.transform_step)) + 1
    grid = RadialGrid(-cfg.transform_span, cfg.transform_span, count)
    rows = []
    for profile in cfg.profiles():
        v0 = lambda z, p=profile: unperturbed_potential(p, cfg.omega, z)  # noqa: E731
        for level in sorted(set(cfg.n)):
            ts = oscillator_transform(profile, cfg.omega, level)
            lam = (level + 0.5) * cfg.omega
            res = assemble_phi_residual(ts, v0, lam, grid)
            control = assemble_phi_residual(ts, v0, lam + 0.1, grid)
            # f alone solves V0 at omega/2, so dV = 0 and dE = level * omega
            presc = prescription_residual(ts, lambda z: 0.0, level * cfg.omega, grid)
            rows.append(
                {
                    "profile": profile.label(),
                    "level": level,
                    "omega": cfg.omega,
                    "lambda": lam,
                    "phi_residual": res,
                    "control_residual": control,
                    "prescription_residual": presc,
                    "pass": res <= cfg.tol_transform and control >= 1e-2 and presc <= 1e-10,
                }
            )
    return TRANSFORM_COLUMNS, rows, EXIT_OK if all(r["pass"] for r in rows) else EXIT_FAILED


def run_verify(cfg: RunConfig):
    rows = []
    for profile, params, s in _iter_cases(cfg):
        result, _ = assemble_solution(
            profile, params, s, threshold=cfg.tol_solvable, with_oracle=True, oracle_options=_oracle_options(cfg)
        )
        rows.append(
            {
                **_base_row(profile, params),
                "N": s.N,
                "L": s.L,
                "n": s.n,
                "E_analytic": result.total_e,
                "E_oracle": result.oracle_e,
                "abs_err": result.abs_err,
                "membership": result.membership,
                "oracle_estimate": result.oracle_estimate,
                "oracle_spectrum": " ".join(_fmt(v) for v in result.oracle_spectrum),
            }
        )
    code = EXIT_FAILED if cfg.strict and not all(r["membership"] for r in rows) else EXIT_OK
    return VERIFY_COLUMNS, rows, code


def run_list(cfg: RunConfig):
    rows = []
    for name in sorted(BUILTINS):
        p = get_profile(name)
        rows.append(
            {
                "name": name,
                "params": " ".join(f"{k}={v:g}" for k, v in sorted(p.params.items())),
                "closed_sqrt_integral": p.closed_sqrt_integral is not None,
                "domain": p.domain,
            }
        )
    return ["name", "params", "closed_sqrt_integral", "domain"], rows, EXIT_OK


COMMANDS = {
    "spectrum": run_spectrum,
    "wavefunction": run_wavefunction,
    "check-identity": run_identity,
    "check-solvability": run_solvability,
    "transform-check": run_transform,
    "verify": run_verify,
    "list-profiles": run_list,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="pdmsplit", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", metavar="PATH")
    parser.add_argument("--profile", help=f"one of {sorted(BUILTINS)} or 'all'")
    parser.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    parser.add_argument("--preset", help="bendaniel-duke, zhu-kroemer or 'all'")
    parser.add_argument("--omega", type=float)
    parser.add_argument("--N", dest="N", metavar="LIST")
    parser.add_argument("--L", dest="L", metavar="LIST")
    parser.add_argument("--n", dest="n", metavar="LIST")
    parser.add_argument("--nodes", type=int)
    parser.add_argument("--rmax", type=float)
    parser.add_argument("--refine", type=int)
    parser.add_argument("--strict", action="store_true", default=None)
    parser.add_argument("--out", metavar="PATH")
    return parser


def make_config(args) -> RunConfig:
    values = read_config(args.config) if args.config else {}
    for key in ("profile", "preset", "omega", "nodes", "rmax", "refine", "strict", "out"):
        value = getattr(args, key)
        if value is not None:
            values[key] = value
    for key in ("N", "L", "n"):
        value = getattr(args, key)
        if value is not None:
            values[key] = _parse_list(value)
    if args.param:
        values["params"] = {**values.get("params", {}), **dict(_parse_param(p) for p in args.param)}
    return replace(RunConfig(), **values).validate()


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        columns, rows, code = COMMANDS[args.command](cfg)
        write_csv(columns, rows, cfg.out)
    except UsageError as exc:
        print(f"pdmsplit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PdmError, ArithmeticError, FloatingPointError) as exc:
        print(f"pdmsplit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return code


if __name__ == "__main__":
    sys.exit(main())

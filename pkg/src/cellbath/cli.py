"""Command-line front end: CSV emission, presets, sweeps, cross-validation.

Subcommands: gap, curie, dephase, transition, entangle, sweep, verify,
recipe.  Parameters come from flags and/or a flat key=value config file
(flags override the file); every CSV carries a header row and full-precision
values (17 significant digits), so identical inputs reproduce identical
files.  Diagnostics such as the above-Curie-temperature warning go to stderr.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import itertools
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import entanglement, meanfield, recipes, transitions, verify
from .dephasing import AtomParams, coherence_series
from .meanfield import FieldVector, LatticeSpec, ThermalPoint, curie_temperature, solve_gap
from .spinops import SpinMagnitude

INITIAL_STATES = ("ground", "plus", "bell")


@dataclass(frozen=True)
class RunConfig:
    """One complete run: lattice, thermal point, atom, grid, initial state."""

    spin: str = "1/2"
    coupling_sum: float = 6.0
    eta: int = 8
    temperature: float = 2.0
    hx: float = 0.0
    hy: float = 0.0
    hz: float = 0.0
    omega0: float = 2.0
    alpha: float = 0.0
    gamma: float = 0.0
    lam: float = 0.0  # config/flag spelling: lambda
    t_max: float = 50.0
    n_points: int = 1001
    initial: str = "plus"
    out: str = ""

    def validate(self):
        if self.temperature <= 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if self.t_max <= 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.n_points < 2:
            raise ValueError(f"n_points must be >= 2, got {self.n_points}")
        if self.initial not in INITIAL_STATES:
            raise ValueError(f"initial must be one of {INITIAL_STATES}, got {self.initial!r}")
        SpinMagnitude.parse(self.spin)

    def lattice(self) -> LatticeSpec:
        return LatticeSpec(coupling_sum=self.coupling_sum, eta=self.eta, s=SpinMagnitude.parse(self.spin))

    def field(self) -> FieldVector:
        return FieldVector(self.hx, self.hy, self.hz)

    def thermal(self) -> ThermalPoint:
        return ThermalPoint(self.temperature)

    def atom(self) -> AtomParams:
        return AtomParams(omega0=self.omega0, alpha=self.alpha, gamma=self.gamma, lam=self.lam)

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points)


_CONFIG_KEYS = {f.name: f for f in fields(RunConfig)}
_KEY_ALIASES = {"lambda": "lam"}


def parse_config_file(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment, blank lines are skipped."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = _KEY_ALIASES.get(key.strip(), key.strip())
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value.strip())
    return values


def _coerce(key: str, value: str):
    target = _CONFIG_KEYS[key].type
    if target in ("int", int):
        return int(value)
    if target in ("float", float):
        return float(value)
    return value


def build_config(args: argparse.Namespace, default_initial: str | None = None) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    for name in _CONFIG_KEYS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if default_initial is not None and "initial" not in values:
        values["initial"] = default_initial
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(out: str, header: list, rows, footer_lines: list | None = None):
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    if footer_lines:
        lines.extend(f"# {line}" for line in footer_lines)
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
        print(f"wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _warn_regime(cfg: RunConfig):
    t_c = curie_temperature(cfg.lattice())
    if cfg.temperature >= t_c:
        print(
            f"warning: T = {cfg.temperature:g} is not below the Curie temperature "
            f"T_c = {t_c:g}; results are outside the model's intended regime",
            file=sys.stderr,
        )


def _solved(cfg: RunConfig):
    _warn_regime(cfg)
    return solve_gap(cfg.lattice(), cfg.field(), cfg.thermal())


# ---------------------------------------------------------------------------
# subcommand payloads
# ---------------------------------------------------------------------------


def run_gap(cfg: RunConfig):
    sol = _solved(cfg)
    header = [
        "temperature", "hx", "hy", "hz", "spin", "coupling_sum", "eta",
        "mx", "my", "mz", "m", "lambda_norm", "residual", "iterations", "converged",
    ]
    row = [
        cfg.temperature, cfg.hx, cfg.hy, cfg.hz, SpinMagnitude.parse(cfg.spin).s,
        cfg.coupling_sum, cfg.eta, *sol.m_vec, sol.m, sol.lambda_norm,
        sol.residual, sol.iterations, sol.converged,
    ]
    write_csv(cfg.out, header, [row])


def run_dephase(cfg: RunConfig):
    if cfg.initial == "bell":
        raise ValueError("the bell initial state applies to the entangle subcommand only")
    sol = _solved(cfg)
    rho12_0, r3_0 = (0.5, 0.0) if cfg.initial == "plus" else (0.0, -1.0)
    res = coherence_series(cfg.grid(), rho12_0, sol, cfg.field(), cfg.atom(), cfg.lattice(), r3_0=r3_0)
    f_eta = res.f_values**cfg.eta
    header = ["t", "re_F", "im_F", "abs_F_eta", "re_rho12", "im_rho12", "r1", "r2", "r3", "kappa"]
    rows = zip(
        res.grid, res.f_values.real, res.f_values.imag, np.abs(f_eta),
        res.coherence.real, res.coherence.imag,
        res.bloch[:, 0], res.bloch[:, 1], res.bloch[:, 2], res.kappa,
    )
    write_csv(cfg.out, header, rows)


def _initial_atom_state(cfg: RunConfig) -> np.ndarray:
    if cfg.initial == "ground":
        return np.array([[0, 0], [0, 1]], dtype=complex)
    return np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)


def run_transition(cfg: RunConfig):
    if cfg.initial == "bell":
        raise ValueError("the bell initial state applies to the entangle subcommand only")
    sol = _solved(cfg)
    sectors = transitions.build_sectors(sol, cfg.field(), cfg.atom(), cfg.lattice())
    z_tilde = transitions.sector_normalizer(sectors)
    states = transitions.evolve_atom_series(_initial_atom_state(cfg), cfg.grid(), sectors, z_tilde)
    header = ["t", "rho11", "rho22", "re_rho12", "im_rho12"]
    rows = zip(
        cfg.grid(), states[:, 0, 0].real, states[:, 1, 1].real,
        states[:, 0, 1].real, states[:, 0, 1].imag,
    )
    write_csv(cfg.out, header, rows)


def run_entangle(cfg: RunConfig):
    if cfg.initial != "bell":
        raise ValueError("the entangle subcommand uses the bell initial state")
    sol = _solved(cfg)
    sectors = transitions.build_sectors(sol, cfg.field(), cfg.atom(), cfg.lattice())
    z_tilde = transitions.sector_normalizer(sectors)
    grid = cfg.grid()
    maps = transitions.channel_series(grid, sectors, z_tilde)
    series = entanglement.concurrence_series(grid, maps)
    footer = ["death_intervals (start, end)"]
    footer.extend(f"{_fmt(a)},{_fmt(b)}" for a, b in series.death_intervals)
    footer.append(f"revival,{entanglement.has_revival(series)}")
    write_csv(cfg.out, ["t", "concurrence"], zip(grid, series.c), footer)


def run_recipe(name: str, out_dir: str):
    entries = recipes.get_recipe(name)
    out_root = Path(out_dir)
    runners = {"dephase": run_dephase, "transition": run_transition, "entangle": run_entangle}
    for entry in entries:
        suffix = f"_{entry.label}" if len(entries) > 1 else ""
        cfg = RunConfig(
            spin=str(SpinMagnitude(entry.twice_s)),
            coupling_sum=entry.coupling_sum,
            eta=entry.eta,
            temperature=entry.temperature,
            hx=entry.hx, hy=entry.hy, hz=entry.hz,
            omega0=entry.omega0, alpha=entry.alpha, gamma=entry.gamma, lam=entry.lam,
            t_max=entry.t_max, n_points=entry.n_points,
            initial=entry.initial,
            out=str(out_root / f"{name}{suffix}.csv"),
        )
        cfg.validate()
        runners[entry.task](cfg)


def _sweep_axis(spec: str) -> tuple:
    key, _, rng = spec.partition("=")
    key = _KEY_ALIASES.get(key.strip(), key.strip())
    if key not in _CONFIG_KEYS:
        raise ValueError(f"unknown sweep key {key!r}")
    parts = rng.split(":")
    if len(parts) != 3:
        raise ValueError(f"--vary expects key=start:stop:count, got {spec!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError(f"sweep count must be >= 1, got {count}")
    values = np.linspace(start, stop, count)
    if _CONFIG_KEYS[key].type in ("int", int):
        values = [int(round(v)) for v in values]
    else:
        values = [float(v) for v in values]
    return key, values


def _config_hash(cfg: RunConfig) -> str:
    payload = "&".join(f"{f.name}={getattr(cfg, f.name)}" for f in fields(cfg) if f.name != "out")
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def run_sweep(base: RunConfig, task: str, axes: list, out_dir: str, workers: int):
    runners = {"gap": run_gap, "dephase": run_dephase, "transition": run_transition, "entangle": run_entangle}
    if task not in runners:
        raise ValueError(f"sweep task must be one of {sorted(runners)}, got {task!r}")
    out_root = Path(out_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    keys = [axis[0] for axis in axes]
    combos = list(itertools.product(*(axis[1] for axis in axes)))
    configs = []
    for combo in combos:
        cfg = replace(base, **dict(zip(keys, combo)))
        cfg = replace(cfg, out=str(out_root / f"{task}_{_config_hash(cfg)}.csv"))
        cfg.validate()
        configs.append(cfg)

    runner = runners[task]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(runner, configs))

    index_rows = []
    for cfg, combo in zip(configs, combos):
        index_rows.append([Path(cfg.out).name, *combo])
    write_csv(str(out_root / "index.csv"), ["file", *keys], index_rows)
    print(f"swept {len(configs)} configurations into {out_root}", file=sys.stderr)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value config file (flags override)")
    p.add_argument("--spin", help="lattice spin S, e.g. 1/2 or 1")
    p.add_argument("--coupling-sum", dest="coupling_sum", type=float, help="sum of neighbor couplings (default 6)")
    p.add_argument("--eta", type=int, help="unit-cell size (default 8)")
    p.add_argument("-T", "--temperature", type=float, help="temperature in units of J")
    p.add_argument("--hx", type=float)
    p.add_argument("--hy", type=float)
    p.add_argument("--hz", type=float)
    p.add_argument("--omega0", type=float, help="atom level splitting")
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--lambda", dest="lam", type=float, help="z-z coupling")
    p.add_argument("--t-max", dest="t_max", type=float, help="grid end time (default 50)")
    p.add_argument("--n-points", dest="n_points", type=int, help="grid points (default 1001)")
    p.add_argument("--initial", choices=INITIAL_STATES, help="initial state")
    p.add_argument("--out", help="output CSV path (default: stdout)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellbath",
        description="Two-level atom in a mean-field ferromagnetic lattice: "
        "magnetization, dephasing, transitions, entanglement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gap", help="solve the magnetization self-consistency equation")
    _add_run_flags(p)

    p = sub.add_parser("curie", help="print the Curie temperature")
    p.add_argument("--spin", default="1/2")
    p.add_argument("--coupling-sum", dest="coupling_sum", type=float, default=6.0)

    p = sub.add_parser("dephase", help="Ising-coupling coherence dynamics (CSV)")
    _add_run_flags(p)

    p = sub.add_parser("transition", help="isotropic-coupling population dynamics (CSV)")
    _add_run_flags(p)

    p = sub.add_parser("entangle", help="two-atom concurrence dynamics (CSV)")
    _add_run_flags(p)

    p = sub.add_parser("sweep", help="run a task over a parameter grid")
    _add_run_flags(p)
    p.add_argument("--task", required=True, help="gap | dephase | transition | entangle")
    p.add_argument("--vary", action="append", required=True, metavar="KEY=START:STOP:COUNT")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--workers", type=int, default=4)

    p = sub.add_parser("verify", help="run the cross-validation battery")
    p.add_argument("--quick", action="store_true", help="small-cell oracle checks only")
    p.add_argument("--out", help="write the report to a file as well")

    p = sub.add_parser("recipe", help="render a named preset to CSV")
    p.add_argument("name", nargs="?", help="preset name, e.g. fig2")
    p.add_argument("--list", action="store_true", help="list available presets")
    p.add_argument("--out-dir", dest="out_dir", default=".")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "curie":
            lat = LatticeSpec(coupling_sum=args.coupling_sum, eta=8, s=SpinMagnitude.parse(args.spin))
            print(f"{curie_temperature(lat):g}")
            return 0
        if args.command == "verify":
            report = verify.run_checks(quick=args.quick)
            text = verify.format_report(report)
            print(text)
            if args.out:
                Path(args.out).write_text(text + "\n")
            return 0 if report.passed else 1
        if args.command == "recipe":
            if args.list or not args.name:
                for name in recipes.recipe_names():
                    entries = recipes.get_recipe(name)
                    print(f"{name}: {entries[0].task}, {len(entries)} parameter set(s)")
                return 0
            run_recipe(args.name, args.out_dir)
            return 0
        if args.command == "sweep":
            base = build_config(args)
            axes = [_sweep_axis(spec) for spec in args.vary]
            run_sweep(base, args.task, axes, args.out_dir, args.workers)
            return 0
        defaults = {"entangle": "bell", "transition": "ground"}
        cfg = build_config(args, default_initial=defaults.get(args.command))
        if args.command == "gap":
            run_gap(cfg)
        elif args.command == "dephase":
            run_dephase(cfg)
        elif args.command == "transition":
            run_transition(cfg)
        elif args.command == "entangle":
            run_entangle(cfg)
        return 0
    except (ValueError, KeyError, meanfield.GapEquationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

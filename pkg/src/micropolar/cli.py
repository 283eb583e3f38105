"""Command-line entry point: ``micropolar <subcommand> [--config PATH] [--override k=v] [--out DIR] [--seed N]``.

Exit codes: 0 success, 1 an asserted monitor (or convergence check) failed,
2 configuration error, 3 numerical instability, 4 time step above the
advective limit.
"""

from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .analysis import (
    InequalityReport,
    chain_constants,
    check_gronwall_weak,
    check_strong_differential,
    continuous_dependence_experiment,
    estimate_constant,
    galerkin_convergence_study,
    report_lines,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ConfigError, RunConfig, load_config
from .dynamics import Bases, CFLViolation, NumericalInstability, simulate
from .ledger import EnergyLedger
from .presets import get_preset
from .spectral_core import basis_manifest

log = logging.getLogger("micropolar")

EXIT_OK, EXIT_MONITOR, EXIT_CONFIG, EXIT_NAN, EXIT_CFL = 0, 1, 2, 3, 4


def write_manifest(cfg: RunConfig, out: Path, command: str, extra: dict | None = None) -> None:
    manifest = {
        "command": command,
        "config": cfg.echo(),
        "seed": cfg.seed,
        "versions": {
            "micropolar": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "created_unix": time.time(),
    }
    if extra:
        manifest.update(extra)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")


def _write_reports(out: Path, reports: list[InequalityReport]) -> None:
    lines = [line for r in reports for line in r.to_lines()]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    csv = "".join(r.to_csv() if i == 0 else r.to_csv().split("\n", 1)[1] for i, r in enumerate(reports))
    (out / "report.csv").write_text(csv)


def monitor_ledger(led: EnergyLedger, cfg: RunConfig) -> list[InequalityReport]:
    preset = get_preset(cfg.initial["preset"])
    asserted = preset.assert_monitors and cfg.params.Ra >= 1
    m = cfg.monitors
    weak = check_gronwall_weak(led, cfg.params, tol=m["tol"], dt=cfg.stepper.dt, dt_slack=m["dt_slack"], asserted=asserted)
    strong = check_strong_differential(led, cfg.params, C1=m["C1"], C2=m["C2"], tol=m["tol"])
    return [weak, strong]


def initial_state(cfg: RunConfig, bases: Bases):
    ck = cfg.initial.get("checkpoint")
    if ck:
        state, _ = load_checkpoint(ck, bases)
        return state
    return get_preset(cfg.initial["preset"]).initial_state(bases, seed=cfg.seed, energy=cfg.initial["energy"])


def cmd_simulate(cfg: RunConfig, out: Path, args) -> int:
    bases = Bases.build(cfg.domain, cfg.resolution)
    s0 = initial_state(cfg, bases)
    t0 = time.perf_counter()
    traj, led = simulate(s0, cfg.params, cfg.stepper)
    wall = time.perf_counter() - t0
    led.write_csv(out / "ledger.csv")
    save_checkpoint(out / "final.ckpt", traj.final, cfg.params, cfg.stepper.scheme)
    reports = monitor_ledger(led, cfg)
    _write_reports(out, reports)
    write_manifest(cfg, out, "simulate", {"wall_seconds": wall, "steps": traj.final.steps, "t_final": traj.final.t})
    ok = all(r.passed for r in reports)
    for r in reports:
        for c in r.checks:
            log.info("%s/%s max_violation=%.3e passed=%s asserted=%s", r.monitor, c.name, c.max_violation, c.passed, c.asserted)
    return EXIT_OK if ok else EXIT_MONITOR


def cmd_verify(cfg: RunConfig, out: Path, args) -> int:
    try:
        led = EnergyLedger.read_csv(args.ledger)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read ledger {args.ledger}: {exc}") from exc
    reports = monitor_ledger(led, cfg)
    _write_reports(out, reports)
    write_manifest(cfg, out, "verify", {"ledger": str(args.ledger)})
    return EXIT_OK if all(r.passed for r in reports) else EXIT_MONITOR


def cmd_constants(cfg: RunConfig, out: Path, args) -> int:
    from .spectral_core import Resolution

    c = cfg.constants
    res = Resolution(c["Nx"], c["My"])
    ests = {n: estimate_constant(n, c["trials"], res, cfg.domain, seed=cfg.seed) for n in c["names"]}
    lines, rows = [], ["name,value,trials,maximizer,exact,alignment"]
    for e in ests.values():
        exact = "" if e.exact is None else f"{e.exact:.17g}"
        align = "" if e.alignment is None else f"{e.alignment:.17g}"
        lines.append(f"name={e.name} value={e.value:.17g} trials={e.trials} maximizer={e.maximizer} exact={exact} alignment={align} seed={cfg.seed}")
        rows.append(f"{e.name},{e.value:.17g},{e.trials},{e.maximizer},{exact},{align}")
    if {"k4", "k5", "k7"} <= ests.keys():
        C1, C2 = chain_constants(cfg.params, {k: ests[k].value for k in ("k4", "k5", "k7")})
        lines.append(f"name=chain C1={C1:.17g} C2={C2:.17g}")
    (out / "constants.txt").write_text("\n".join(lines) + "\n")
    (out / "constants.csv").write_text("\n".join(rows) + "\n")
    write_manifest(cfg, out, "constants")
    return EXIT_OK


def cmd_depend(cfg: RunConfig, out: Path, args) -> int:
    bases = Bases.build(cfg.domain, cfg.resolution)
    s0 = initial_state(cfg, bases)
    rep = continuous_dependence_experiment(s0, cfg.depend["deltas"], cfg.params, cfg.stepper, seed=cfg.seed)
    (out / "depend.txt").write_text("\n".join(report_lines(rep)) + "\n")
    keys = list(rep["runs"][0])
    rows = [",".join(keys)] + [",".join(f"{r[k]:.17g}" if isinstance(r[k], float) else str(int(r[k])) for k in keys) for r in rep["runs"]]
    (out / "depend.csv").write_text("\n".join(rows) + "\n")
    write_manifest(cfg, out, "depend")
    return EXIT_OK


def cmd_converge(cfg: RunConfig, out: Path, args) -> int:
    preset = get_preset(cfg.initial["preset"])
    init = lambda b, seed: preset.initial_state(b, seed=seed, energy=cfg.initial["energy"])  # noqa: E731
    rep = galerkin_convergence_study(init, cfg.params, cfg.stepper, cfg.converge["resolutions"], cfg.domain, seed=cfg.seed)
    (out / "converge.txt").write_text("\n".join(report_lines(rep)) + "\n")
    rows = ["coarse,fine,sup_y_difference"]
    for (r0, r1), d in zip(zip(rep["resolutions"][:-1], rep["resolutions"][1:]), rep["sup_y_differences"]):
        rows.append(f"{r0[0]},{r1[0]},{d:.17g}")
    (out / "converge.csv").write_text("\n".join(rows) + "\n")
    write_manifest(cfg, out, "converge")
    zero = all(d == 0 for d in rep["sup_y_differences"])
    return EXIT_OK if rep["strictly_decreasing"] or zero else EXIT_MONITOR


def cmd_basis(cfg: RunConfig, out: Path, args) -> int:
    text = basis_manifest(Bases.build(cfg.domain, cfg.resolution).vector)
    (out / "basis.txt").write_text(text)
    sys.stdout.write(text)
    write_manifest(cfg, out, "basis")
    return EXIT_OK


COMMANDS = {
    "simulate": (cmd_simulate, "integrate the Galerkin system and run the monitors"),
    "verify": (cmd_verify, "run the inequality monitors on an existing ledger CSV"),
    "constants": (cmd_constants, "estimate the interpolation constants k1..k7"),
    "depend": (cmd_depend, "continuous-dependence paired runs"),
    "converge": (cmd_converge, "Galerkin convergence across resolutions"),
    "basis": (cmd_basis, "dump the basis manifest"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VALUE", help="dotted scalar override, repeatable")
    common.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    common.add_argument("--seed", type=int, help="random seed (overrides seed)")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="micropolar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "verify":
            p.add_argument("ledger", type=Path, help="ledger CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    overrides = list(args.override) + [f"experiment={json.dumps(args.command)}"]
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.out is not None:
        overrides.append(f"output.dir={json.dumps(str(args.out))}")
    try:
        cfg = load_config(args.config, overrides)
        out = cfg.out_dir
        out.mkdir(parents=True, exist_ok=True)
        handler, _ = COMMANDS[args.command]
        return handler(cfg, out, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalInstability as exc:
        print(f"error: numerical instability: {exc}", file=sys.stderr)
        return EXIT_NAN
    except CFLViolation as exc:
        print(f"error: {exc}; reduce stepper.dt", file=sys.stderr)
        return EXIT_CFL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``spinclone <command> [options]``.

Commands
--------
fidelity-sweep   single-copy fidelity versus rescaled time (CSV)
verify           check the optimal-machine conditions for a coupling set (JSON)
ground-state     solve the preparation Hamiltonian and compare with |R> (JSON)
spectrum         closed-form spectrum of the preparation Hamiltonian (CSV)

Exit codes: 0 success, 1 usage, 2 I/O, 3 verification failure,
4 preparation failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from ._validation import haar_random_qubits
from .evolution import EvolutionSpec, Method, evolve, single_copy_fidelities
from .exceptions import SpinCloneError
from .hilbert import StateVector, apply_pauli_sum, overlap
from .model import (
    CloneConfig,
    analytic_fidelity,
    build_clone_hamiltonian,
    machine_input_state,
    optimal_fidelity,
    spin_flip_apply,
    subspace_closure_residual,
    target_output_state,
)
from .preparation import (
    PrepConfig,
    enumerate_spectrum,
    ground_state_overlap,
    predicted_gap,
    solve_ground_state,
    spectrum_to_csv,
)

log = logging.getLogger("spinclone")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY, EXIT_PREP = 0, 1, 2, 3, 4

CLOSURE_TOL = 1e-12
SYMMETRY_TOL = 1e-12
ENDPOINT_TOL = 1e-9
ENERGY_TOL = 1e-9
OVERLAP_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def _write_manifest(command: str, params: dict, outputs: list[str]) -> None:
    manifest = {
        "command": command,
        "parameters": params,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "outputs": outputs,
    }
    for out in outputs:
        _write_text(out + ".manifest.json", json.dumps(manifest, indent=2) + "\n")


def _emit_json(report: dict, out: str | None, command: str, params: dict) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if out:
        _write_text(out, text)
        _write_manifest(command, params, [out])
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_fidelity_sweep(p: dict) -> int:
    M, steps, n_inputs = p["copies"], p["steps"], p["inputs"]
    if M < 2 or steps < 2 or n_inputs < 1:
        raise UsageError("need copies >= 2, steps >= 2 and inputs >= 1")
    if not p.get("out"):
        raise UsageError("--out is required")
    if p["coupling"] == 0:
        raise UsageError("coupling must be nonzero")
    cfg = CloneConfig.optimal(M, p["coupling"])
    phis = np.linspace(p["phi_min"], p["phi_max"], steps)
    inputs = haar_random_qubits(n_inputs, p["seed"])
    method = None if p.get("method") is None else Method(p["method"])
    fids = single_copy_fidelities(cfg, inputs, phis, method)  # (inputs, phi, M)
    bound = optimal_fidelity(M)

    lines = ["phi,fidelity_mean,fidelity_std,analytic,bound"]
    for k, phi in enumerate(phis):
        sample = fids[:, k, :].reshape(-1)
        std = float(np.std(sample, ddof=1)) if sample.size > 1 else 0.0
        row = [phi, sample.mean(), std, analytic_fidelity(M, phi), bound]
        lines.append(",".join(_fmt(x) for x in row))
    _write_text(p["out"], "\n".join(lines) + "\n")
    _write_manifest("fidelity-sweep", p, [p["out"]])
    log.info("wrote %d rows to %s", steps, p["out"])
    return EXIT_OK


def _symmetry_residual(h, M: int, seed: int = 0, n_states: int = 5) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_states):
        z = rng.normal(size=h.register.dim) + 1j * rng.normal(size=h.register.dim)
        psi = StateVector(h.register, z / np.linalg.norm(z))
        php = spin_flip_apply(apply_pauli_sum(h, spin_flip_apply(psi)))
        worst = max(worst, (php - apply_pauli_sum(h, psi)).norm())
    return worst


def verify_report(cfg: CloneConfig) -> tuple[dict, bool]:
    h = build_clone_hamiltonian(cfg)
    scale = max(1.0, abs(cfg.j1), abs(cfg.j2)) * max(1.0, abs(cfg.lambda1), abs(cfg.lambda2))
    condition = cfg.optimal_condition()
    closure = subspace_closure_residual(cfg)
    symmetry = _symmetry_residual(h, cfg.M)
    endpoint = None
    if condition:
        spec = EvolutionSpec(cfg.t0)
        up = evolve(h, machine_input_state(cfg.M, 1.0, 0.0), spec)
        down = evolve(h, machine_input_state(cfg.M, 0.0, 1.0), spec)
        endpoint = min(
            abs(overlap(target_output_state(cfg.M, True), up)),
            abs(overlap(target_output_state(cfg.M, False), down)),
        )
    ok = (
        condition
        and closure < CLOSURE_TOL * scale
        and symmetry < SYMMETRY_TOL * scale
        and endpoint is not None
        and endpoint >= 1 - ENDPOINT_TOL
    )
    report = {
        "M": cfg.M,
        "j1": cfg.j1,
        "j2": cfg.j2,
        "lambda1": cfg.lambda1,
        "lambda2": cfg.lambda2,
        "condition_satisfied": condition,
        "closure_residual": closure,
        "php_symmetry_residual": symmetry,
        "endpoint_overlap": endpoint,
        "t0": cfg.t0,
        "passed": bool(ok),
    }
    return report, bool(ok)


def cmd_verify(p: dict) -> int:
    try:
        cfg = CloneConfig(p["copies"], p["j1"], p["j2"], p["lambda1"], p["lambda2"])
    except SpinCloneError as exc:
        raise UsageError(str(exc)) from exc
    if cfg.j1 == 0:
        raise UsageError("j1 must be nonzero")
    report, ok = verify_report(cfg)
    _emit_json(report, p.get("out"), "verify", p)
    return EXIT_OK if ok else EXIT_VERIFY


def ground_state_report(cfg: PrepConfig) -> tuple[dict, bool]:
    ground = solve_ground_state(cfg, check_degeneracy=False)
    predicted = cfg.predicted_ground_energy
    ov = ground_state_overlap(ground, cfg.M)
    degenerate = ground.gap < 1e-9 * max(1.0, abs(ground.energy))
    ok = (
        abs(ground.energy - predicted) < ENERGY_TOL
        and ov > 1 - OVERLAP_TOL
        and not degenerate
    )
    report = {
        "M": cfg.M,
        "jprime": cfg.jprime,
        "delta": cfg.delta,
        "energy": ground.energy,
        "predicted_energy": predicted,
        "overlap_with_R": ov,
        "gap": ground.gap,
        "predicted_gap": predicted_gap(cfg),
        "degenerate": bool(degenerate),
        "passed": bool(ok),
    }
    if not cfg.sign_condition():
        report["warning"] = "sign condition J' < 0 and Delta > 0 violated"
    return report, bool(ok)


def cmd_ground_state(p: dict) -> int:
    try:
        cfg = PrepConfig(p["copies"], p["jprime"], p["delta"])
    except SpinCloneError as exc:
        raise UsageError(str(exc)) from exc
    report, ok = ground_state_report(cfg)
    _emit_json(report, p.get("out"), "ground-state", p)
    return EXIT_OK if ok else EXIT_PREP


def cmd_spectrum(p: dict) -> int:
    try:
        cfg = PrepConfig(p["copies"], p["jprime"], p["delta"])
    except SpinCloneError as exc:
        raise UsageError(str(exc)) from exc
    if not p.get("out"):
        raise UsageError("--out is required")
    _write_text(p["out"], spectrum_to_csv(enumerate_spectrum(cfg)))
    _write_manifest("spectrum", p, [p["out"]])
    return EXIT_OK


COMMANDS = {
    "fidelity-sweep": cmd_fidelity_sweep,
    "verify": cmd_verify,
    "ground-state": cmd_ground_state,
    "spectrum": cmd_spectrum,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinclone", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("-M", "--copies", type=int, default=3)
        sp.add_argument("--config", help="JSON file supplying any option; flags override it")
        sp.add_argument("--out", default=None)

    sw = sub.add_parser("fidelity-sweep", help="fidelity vs rescaled time")
    common(sw)
    sw.add_argument("--phi-min", type=float, default=0.0)
    sw.add_argument("--phi-max", type=float, default=2 * math.pi)
    sw.add_argument("--steps", type=int, default=100)
    sw.add_argument("--inputs", type=int, default=20, help="number of random input states")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--coupling", type=float, default=1.0)
    sw.add_argument("--method", choices=[m.value for m in Method], default=None)

    vf = sub.add_parser("verify", help="check the optimal-machine conditions")
    common(vf)
    vf.add_argument("--j1", type=float, default=1.0)
    vf.add_argument("--j2", type=float, default=-1.0)
    vf.add_argument("--lambda1", type=float, default=2.0)
    vf.add_argument("--lambda2", type=float, default=-2.0)

    for name, helptext in (("ground-state", "solve the preparation Hamiltonian"),
                           ("spectrum", "closed-form preparation spectrum")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--jprime", type=float, default=-1.0)
        sp.add_argument("--delta", type=float, default=1.0)
    return parser


def parse_params(argv: list[str]) -> tuple[str, dict, bool]:
    """Parse ``argv``; values from ``--config`` act as defaults."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a command is required")
    if args.config:
        try:
            with open(args.config) as fh:
                file_values = json.load(fh)
        except OSError as exc:
            raise IOError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from exc
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        values = {k.replace("-", "_"): v for k, v in file_values.items()}
        if "M" in values:
            values["copies"] = values.pop("M")
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "verbose", "config")}
    return args.command, params, args.verbose


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        command, params, verbose = parse_params(argv)
        logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)
        return COMMANDS[command](params)
    except UsageError as exc:
        print(f"spinclone: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IOError as exc:
        print(f"spinclone: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SpinCloneError as exc:
        print(f"spinclone: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())

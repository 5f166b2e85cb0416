"""Command-line front end.

    freequbit <command> --config PATH [--out DIR] [--seed U64] [--shots N] [--broaden MEV]

Exit codes: 0 success, 2 invalid input or config, 3 numerical failure.
Set ``FREEQUBIT_LOG_LEVEL`` (e.g. ``DEBUG``) to change logging verbosity.
"""

import argparse
import json
import logging
import math
import os
import sys
import warnings

import jsonschema
import numpy as np

from . import __version__, units
from .coupling import (
    coupling_g,
    coupling_vs_impact_parameter,
    magnus_order_estimate,
    optimal_velocity,
)
from .errors import FreeQubitError, ValidationError
from .experiments import ExperimentConfig, parse_grid, physical_from_dict, run_t1_scan, run_t2_scan, tomography
from .fitting import fit_exp_decay
from .manifest import RunManifest, config_digest, write_atomic
from .oracle import TrajectoryGrid, exact_coupling, random_params
from .qubit import evolve
from .scattering import eels_spectrum
from .superradiance import DickeEnsemble, dicke_decay, gain_scan, reconstruct_emission

log = logging.getLogger("freequbit")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
ORACLE_TOL = 1e-2

COMMANDS = {
    "coupling": "coupling constant and optimal-velocity report",
    "spectrum": "post-interaction EELS spectrum",
    "t1": "population-decay scan and fit",
    "t2": "coherence-decay scan with a duo electron and fit",
    "tomography": "Bloch-angle reconstruction from a duo-phase scan",
    "superradiance": "Dicke cascade decay and gain-scan reconstruction",
    "oracle-check": "compare the closed-form coupling with the brute-force propagator",
}

_NUM = {"type": "number"}
_GRID = {
    "oneOf": [
        {"type": "array", "items": _NUM, "minItems": 1},
        {
            "type": "object",
            "required": ["start", "stop", "num"],
            "properties": {"start": _NUM, "stop": _NUM, "num": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "physical": {
            "type": "object",
            "required": ["dipole_debye", "gap_ev", "r_perp_nm"],
            "properties": {
                "dipole_debye": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
                "gap_ev": {"type": "number", "exclusiveMinimum": 0},
                "r_perp_nm": {"type": "number", "exclusiveMinimum": 0},
                "beta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "kinetic_energy_kev": {"type": "number", "exclusiveMinimum": 0},
            },
            "oneOf": [{"required": ["beta"]}, {"required": ["kinetic_energy_kev"]}],
            "additionalProperties": False,
        },
        "coupling": {
            "type": "object",
            "required": ["magnitude"],
            "properties": {"magnitude": {"type": "number", "minimum": 0}, "phase": _NUM, "kappa": _NUM},
            "additionalProperties": False,
        },
        "gap_ev": {"type": "number", "exclusiveMinimum": 0},
        "decay": {
            "type": "object",
            "required": ["t1", "t2"],
            "properties": {"t1": _NUM, "t2": _NUM, "omega0": _NUM},
            "additionalProperties": False,
        },
        "pump": {
            "type": "object",
            "properties": {
                "theta_a": _NUM,
                "phi_a": _NUM,
                "rotations": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["axis", "angle"],
                        "properties": {
                            "axis": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
                            "angle": _NUM,
                        },
                    },
                },
            },
            "additionalProperties": False,
        },
        "probe": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["unshaped", "duo", "pinem"]},
                "phi_e": _NUM,
                "g_pinem": {"type": "number", "minimum": 0},
                "phi": _NUM,
                "chi": _NUM,
            },
            "additionalProperties": False,
        },
        "tau_grid": _GRID,
        "phi_e_grid": _GRID,
        "shots": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "t1_readout": {"enum": ["gain", "pulse"]},
        "r_perp_scan_nm": _GRID,
        "superradiance": {
            "type": "object",
            "required": ["n_qubits"],
            "properties": {
                "n_qubits": {"type": "integer", "minimum": 1},
                "gamma": {"type": "number", "minimum": 0},
                "initial": {"oneOf": [{"enum": ["excited", "ground"]}, {"type": "array", "items": _NUM}]},
            },
            "additionalProperties": False,
        },
        "oracle": {
            "type": "object",
            "properties": {
                "random_sets": {"type": "integer", "minimum": 0},
                "seed": {"type": "integer", "minimum": 0},
                "steps": {"type": "integer", "minimum": 1001},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


class Run:
    """Per-invocation context: parsed config, output directory, manifest."""

    def __init__(self, command, args):
        self.command = command
        self.args = args
        try:
            with open(args.config, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read config {args.config!r}: {exc.strerror}") from exc
        try:
            cfg = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from exc
        try:
            jsonschema.validate(cfg, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ValidationError(f"config error at {where}: {exc.message}") from exc
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.shots is not None:
            cfg["shots"] = args.shots
        self.cfg = cfg
        self.manifest = RunManifest(command, config_digest(raw), int(cfg.get("seed", 0)), __version__)

    def write(self, name, text):
        path = os.path.join(self.args.out, name)
        write_atomic(path, text)
        self.manifest.outputs.append(name)
        log.info("wrote %s", path)

    def finish(self):
        self.write("manifest.json", self.manifest.to_json() + "\n")

    def physical(self):
        if "physical" not in self.cfg:
            raise ValidationError(f"'{self.command}' needs a 'physical' section")
        return physical_from_dict(self.cfg["physical"])

    def experiment(self):
        return ExperimentConfig.from_dict(self.cfg)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _quantum_mev(run):
    if "physical" in run.cfg:
        return run.cfg["physical"]["gap_ev"] * 1e3
    if "gap_ev" in run.cfg:
        return run.cfg["gap_ev"] * 1e3
    raise ValidationError("--broaden needs the qubit gap: give 'physical' or 'gap_ev' in the config")


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_coupling(run):
    p = run.physical()
    g = coupling_g(p)
    orient = "x" if abs(p.dipole_x) >= abs(p.dipole_z) else "z"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        opt = optimal_velocity(orient, p.omega0, p.impact_parameter)
    report = {
        "coupling": g.to_dict(),
        "g_re": g.value.real,
        "g_im": g.value.imag,
        "beta": p.beta,
        "optimal_velocity": {"orientation": orient, "u_star": opt.u_star, "beta": opt.beta, "warning": opt.warning},
        "magnus_order2_estimate": magnus_order_estimate(2, p),
        "warnings": [str(w.message) for w in caught],
    }
    if g.magnitude == 0.0:
        report["warnings"].append("zero dipole: the electron does not couple to this qubit")
    print(f"|g| = {g.magnitude:.6g}  phase = {g.phase:.6g} rad  (beta = {p.beta:.4g})")
    print(f"optimal velocity ({orient}-dipole): u* = {opt.u_star:.5f}, beta_opt = {opt.beta:.5f}")
    if "r_perp_scan_nm" in run.cfg:
        grid = parse_grid(run.cfg["r_perp_scan_nm"])
        mags = coupling_vs_impact_parameter(p, grid * units.NM)
        k = int(np.argmax(mags))
        report["r_perp_scan"] = {
            "r_perp_nm": grid.tolist(),
            "magnitude": mags.tolist(),
            "max_magnitude": float(mags[k]),
            "max_at_nm": float(grid[k]),
        }
        print(f"r_perp scan: max |g| = {mags[k]:.4g} at r_perp = {grid[k]:.4g} nm (indicative)")
    for msg in report["warnings"]:
        print(f"warning: {msg}", file=sys.stderr)
    run.write("coupling.json", _json(report))


def cmd_spectrum(run):
    cfg = run.experiment()
    rho = evolve(cfg.pump.state(), cfg.tau_grid[0], cfg.decay)
    e = cfg.probe.build()
    spec = eels_spectrum(e, rho, cfg.coupling).trimmed()
    run.write("spectrum.csv", spec.to_csv())
    run.write("spectrum.json", spec.to_json() + "\n")
    print(f"{len(spec)} sidebands, total probability {spec.total:.12f}")
    if run.args.broaden is not None:
        if run.args.broaden <= 0:
            raise ValidationError("--broaden must be > 0 meV")
        quantum = _quantum_mev(run)
        sigma = run.args.broaden / quantum
        grid = np.linspace(spec.labels.min() - 1 - 4 * sigma, spec.labels.max() + 1 + 4 * sigma, 801)
        dens = spec.broadened(sigma, grid) / quantum
        lines = ["energy_mev,intensity_per_mev"] + [f"{float(x * quantum)!r},{float(y)!r}" for x, y in zip(grid, dens)]
        run.write("spectrum_broadened.csv", "\n".join(lines) + "\n")


def _scan_command(run, scan_fn, stem):
    cfg = run.experiment()
    series = scan_fn(cfg)
    run.write(f"{stem}_scan.csv", series.to_csv())
    if len(series) >= 4:
        fit = fit_exp_decay(series)
        run.write(f"{stem}_fit.json", fit.to_json() + "\n")
        print(f"{stem.upper()} = {1.0 / fit.rate:.6g} +- {fit.rate_stderr / fit.rate**2:.2g}")
    else:
        print(f"{len(series)} points written (fit needs >= 4)")


def cmd_t1(run):
    _scan_command(run, run_t1_scan, "t1")


def cmd_t2(run):
    _scan_command(run, run_t2_scan, "t2")


def cmd_tomography(run):
    cfg = run.experiment()
    grid = parse_grid(run.cfg.get("phi_e_grid", {"start": 0.0, "stop": 2 * math.pi * 11 / 12, "num": 12}))
    res = tomography(cfg, grid)
    run.write("tomography.json", _json(res.to_dict()))
    print(f"theta_a = {res.theta_a:.6f}  phi_a = {res.phi_a:.6f}  hemisphere = {res.hemisphere}")


def cmd_superradiance(run):
    sr = run.cfg.get("superradiance")
    if sr is None:
        raise ValidationError("'superradiance' section missing")
    n = sr["n_qubits"]
    gamma = sr.get("gamma", 1.0)
    init = sr.get("initial", "excited")
    if init == "excited":
        ens = DickeEnsemble.all_excited(n, gamma)
    elif init == "ground":
        ens = DickeEnsemble.all_ground(n, gamma)
    else:
        ens = DickeEnsemble(n, init, gamma)
    tau = parse_grid(run.cfg.get("tau_grid", {"start": 0.0, "stop": 5.0 / max(gamma * n, 1e-300), "num": 201}))
    dec = dicke_decay(ens, tau)
    run.write("superradiance.csv", dec.to_csv())
    t_star, i_peak = dec.peak()
    summary = {"tau_peak": t_star, "intensity_peak": i_peak, "emitted": float(dec.emitted[-1])}
    if "coupling" in run.cfg or "physical" in run.cfg:
        g = run.experiment().coupling
        scan = gain_scan(ens, tau, g)
        run.write("gain_scan.csv", scan.to_csv())
        rec = reconstruct_emission(scan, g)
        lines = ["tau,intensity"] + [f"{float(t)!r},{float(v)!r}" for t, v in zip(scan.tau, rec)]
        run.write("reconstructed.csv", "\n".join(lines) + "\n")
        summary["reconstructed_tau_peak"] = float(scan.tau[int(np.argmax(rec))])
    run.write("superradiance.json", _json(summary))
    print(f"intensity peak {i_peak:.6g} at tau = {t_star:.6g}")


def cmd_oracle_check(run):
    sets = []
    if "physical" in run.cfg:
        sets.append(run.physical())
    oc = run.cfg.get("oracle", {})
    rng = np.random.default_rng(oc.get("seed", run.cfg.get("seed", 0)))
    sets.extend(random_params(rng) for _ in range(oc.get("random_sets", 0)))
    if not sets:
        raise ValidationError("oracle-check needs 'physical' or oracle.random_sets > 0")
    grid = TrajectoryGrid(steps=oc.get("steps", TrajectoryGrid.steps))
    rows = []
    ok = True
    for p in sets:
        g = coupling_g(p)
        ex = exact_coupling(p, grid)
        rel = abs(ex.G - g.value) / g.magnitude if g.magnitude > 0 else abs(ex.G)
        passed = rel <= ORACLE_TOL
        ok &= passed
        rows.append(
            {
                "g_closed": [g.value.real, g.value.imag],
                "G_oracle": [ex.G.real, ex.G.imag],
                "K_oracle": ex.K,
                "relative_difference": rel,
                "refinement_change": ex.refinement_change,
                "pass": passed,
            }
        )
        print(f"{'PASS' if passed else 'FAIL'} |dG|/|g| = {rel:.3e} (<= {ORACLE_TOL:.0e}), |g| = {g.magnitude:.4g}, K = {ex.K:.3e}")
    run.write("oracle.json", _json({"tolerance": ORACLE_TOL, "results": rows}))
    return EXIT_OK if ok else EXIT_NUMERIC


HANDLERS = {
    "coupling": cmd_coupling,
    "spectrum": cmd_spectrum,
    "t1": cmd_t1,
    "t2": cmd_t2,
    "tomography": cmd_tomography,
    "superradiance": cmd_superradiance,
    "oracle-check": cmd_oracle_check,
}


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("shots must be >= 0")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS, help="JSON config file")
    common.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--seed", metavar="U64", type=_u64, default=argparse.SUPPRESS)
    common.add_argument("--shots", metavar="N", type=_nonneg_int, default=argparse.SUPPRESS)
    common.add_argument("--broaden", metavar="MEV", type=float, default=argparse.SUPPRESS,
                        help="Gaussian display broadening (sigma, meV) for spectrum output")
    parser = argparse.ArgumentParser(prog="freequbit", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, text in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None):
    logging.basicConfig(level=os.environ.get("FREEQUBIT_LOG_LEVEL", "WARNING").upper(), format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("config", None), ("out", "."), ("seed", None), ("shots", None), ("broaden", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.config is None:
        parser.error("--config is required")
    try:
        run = Run(args.command, args)
        code = HANDLERS[args.command](run)
        run.finish()
        return EXIT_OK if code is None else code
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (FreeQubitError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

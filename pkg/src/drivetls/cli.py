"""Command-line front end.

Every subcommand writes ``<out>.csv`` (data) and ``<out>.json`` (metadata with
the fully resolved parameters).  Parameters come from, in increasing
precedence: built-in defaults, ``--from-metadata`` JSON, ``--config`` key=value
file, explicit flags.  All energies are in units of Delta; beta is hbar*beta*Delta.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import os
import sys
import warnings
from dataclasses import asdict
from importlib import metadata as importlib_metadata
from pathlib import Path

import numpy as np

from .bath_dissipation import BathParams, default_harmonic_cutoff, numeric_position_table, position_table, rates
from .dynamics_analysis import (
    ScenarioConfig,
    deviation_map,
    fourier_spectrum,
    photon_number,
    run_scenario,
    survival_trajectory,
    time_grid,
    worker_count,
)
from .errors import NumericalError, ParameterError, TruncationWarning
from .floquet_engine import TruncationConfig, build_floquet_matrix, diagonalize_floquet, fold_quasienergy
from .special_functions import SystemParams
from .vanvleck import ResonanceContext, solve_vanvleck

log = logging.getLogger("drivetls")

FORMAT_VERSION = 1
EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3
TIERS = ("rwa", "vv1", "vv2", "vv2_averaged", "numeric")


class ConfigError(ParameterError):
    pass


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


# ---------------------------------------------------------------------------
# value types


def parse_range(text: str) -> tuple[float, float, float]:
    """'start:stop:step' with stop included."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must look like start:stop:step, got {text!r}")
    try:
        a, b, h = (float(x) for x in parts)
    except ValueError as exc:
        raise ConfigError(f"bad number in range {text!r}") from exc
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(h)) or h <= 0 or b < a:
        raise ConfigError(f"range needs finite start <= stop and step > 0, got {text!r}")
    return a, b, h


def range_values(spec: tuple[float, float, float]) -> np.ndarray:
    a, b, h = spec
    n = int(math.floor((b - a) / h + 1e-9)) + 1
    return a + h * np.arange(n)


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_list(text) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(str(x) for x in text)
    return tuple(x.strip() for x in str(text).split(",") if x.strip())


def parse_int_list(text) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in parse_list(text))
    except ValueError as exc:
        raise ConfigError(f"not a list of integers: {text!r}") from exc


def _opt(kind):
    def conv(text):
        if text is None or (isinstance(text, str) and text.strip().lower() in ("", "none", "auto")):
            return None
        return kind(text)

    return conv


def _num(kind):
    def conv(text):
        try:
            return kind(text)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"expected {kind.__name__}, got {text!r}") from exc

    return conv


FLOAT, INT = _num(float), _num(int)

# name -> (converter, default, help)
COMMON = {
    "l_max": (INT, 40, "cutoff of the dressed-tunneling sums"),
    "out": (str, None, "output prefix (default: the command name)"),
}
COMMANDS = {
    "spectrum": {
        "omega": (FLOAT, 2.0, "drive frequency"),
        "amp": (FLOAT, 3.0, "drive amplitude A"),
        "eps_range": (parse_range, "0:8:0.02", "static bias grid start:stop:step"),
    },
    "dynamics": {
        "eps": (FLOAT, 4.1, "static bias"),
        "omega": (FLOAT, 2.0, "drive frequency"),
        "amp": (FLOAT, 3.0, "drive amplitude A"),
        "m": (_opt(INT), None, "resonance order (default round(eps/omega))"),
        "kappa": (FLOAT, 0.0, "Ohmic coupling"),
        "beta": (FLOAT, 10.0, "inverse temperature hbar*beta*Delta"),
        "t_max": (FLOAT, 200.0, "final time"),
        "points_per_period": (INT, 64, "grid points per drive period"),
        "tiers": (parse_list, "rwa,vv2,numeric", "comma list of rwa, vv1, vv2, vv2_averaged, numeric"),
        "target": (str, "down", "initial and final state: down or up"),
    },
    "rates": {
        "eps": (FLOAT, 4.1, "static bias"),
        "omega": (FLOAT, 2.0, "drive frequency"),
        "kappa": (FLOAT, 0.01, "Ohmic coupling"),
        "beta": (FLOAT, 10.0, "inverse temperature hbar*beta*Delta"),
        "amp_range": (parse_range, "0:20:0.05", "amplitude grid start:stop:step"),
        "m": (_opt(INT), None, "resonance order (default round(eps/omega))"),
        "vv2_method": (str, "vv2_mrwa", "vv2_mrwa (full coefficient sums) or vv2 (expanded closed forms)"),
    },
    "xcoeffs": {
        "eps": (FLOAT, 4.0, "static bias"),
        "omega": (FLOAT, 2.0, "drive frequency"),
        "amp_range": (parse_range, "0:12:0.1", "amplitude grid start:stop:step"),
        "harmonics": (parse_int_list, "0,2,-2,4", "comma list of Fourier indices n"),
        "m": (_opt(INT), None, "resonance order (default round(eps/omega))"),
    },
    "fourier": {
        "eps": (FLOAT, 4.0, "static bias"),
        "omega": (FLOAT, 4.0, "drive frequency"),
        "amp": (FLOAT, 4.1, "drive amplitude A"),
        "m": (_opt(INT), None, "resonance order (default round(eps/omega))"),
        "kappa": (FLOAT, 0.0, "Ohmic coupling"),
        "beta": (FLOAT, 10.0, "inverse temperature hbar*beta*Delta"),
        "t_max": (FLOAT, 300.0, "final time"),
        "points_per_period": (INT, 64, "grid points per drive period"),
        "tiers": (parse_list, "rwa,vv2,numeric", "comma list of tiers"),
        "window": (str, "hann", "none or hann"),
        "subtract_asymptote": (_opt(parse_bool), None, "fit and remove the long-time drive lines (default: on when kappa > 0)"),
        "threshold": (FLOAT, 0.01, "peak threshold relative to the largest line"),
        "max_nu": (_opt(FLOAT), None, "largest frequency written to the CSV"),
    },
    "validity": {
        "eps": (FLOAT, 4.0, "static bias"),
        "omega_range": (parse_range, "0.5:6:0.055", "drive frequency grid"),
        "amp_range": (parse_range, "0:12:0.12", "amplitude grid"),
        "reference": (str, "vv2", "vv2 (RWA vs vv2) or numeric (vv2 vs numeric gap)"),
        "clip": (FLOAT, 0.15, "reporting clip level"),
    },
    "scenario": {
        "kind": (str, None, "cdt or dito"),
        "m": (INT, 3, "resonance order"),
        "omega": (FLOAT, 2.0, "drive frequency"),
        "kappa": (FLOAT, 0.0, "Ohmic coupling"),
        "beta": (FLOAT, 10.0, "inverse temperature hbar*beta*Delta"),
        "amp": (_opt(FLOAT), None, "drive amplitude (dito: required; cdt: default at a Bessel zero)"),
        "eps": (_opt(FLOAT), None, "static bias override"),
        "zero_index": (INT, 1, "which zero of J_m fixes A for cdt"),
        "t_max": (_opt(FLOAT), None, "final time (cdt 50, dito 200)"),
        "points_per_period": (INT, 256, "grid points per drive period"),
        "detuned_omega": (_opt(FLOAT), None, "comparison drive frequency (dito default omega - 0.1)"),
        "tiers": (parse_list, "rwa,vv2,numeric", "comma list of tiers"),
    },
}


def _spec(cmd: str) -> dict:
    out = dict(COMMON)
    out.update(COMMANDS[cmd])
    return out


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="drivetls", description="Driven two-level system: Floquet, Van Vleck and dissipative dynamics.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")
    for cmd, spec in COMMANDS.items():
        sp = sub.add_parser(cmd, argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="key = value configuration file")
        sp.add_argument("--from-metadata", dest="from_metadata", help="replay the run described by a metadata JSON")
        for name, (_, default, help_text) in {**COMMON, **spec}.items():
            if cmd == "scenario" and name == "kind":
                sp.add_argument("kind", nargs="?", help=help_text)
                continue
            sp.add_argument(_flag(name), dest=name, help=f"{help_text} [default: {default}]")
    return parser


# ---------------------------------------------------------------------------
# configuration


def read_config(path: str) -> dict:
    """Key = value lines (optionally under one section header); '#' comments."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        if not text.lstrip().startswith("["):
            text = "[run]\n" + text
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    out = {}
    for section in cp.sections():
        for key, value in cp.items(section):
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def read_metadata(path: str) -> dict:
    try:
        meta = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read metadata {path}: {exc}") from exc
    if not isinstance(meta, dict) or "command" not in meta or "params" not in meta:
        raise ConfigError(f"{path} is not a run metadata file")
    return meta


def resolve_params(cmd: str, cli: dict) -> dict:
    """Merge defaults < metadata < config < explicit flags and convert types."""
    spec = _spec(cmd)
    raw: dict = {k: v[1] for k, v in spec.items()}
    if cli.get("from_metadata"):
        meta = read_metadata(cli["from_metadata"])
        if meta["command"] != cmd:
            raise ConfigError(f"metadata is for {meta['command']!r}, not {cmd!r}")
        raw.update({k: v for k, v in meta["params"].items() if k in spec})
    if cli.get("config"):
        conf = read_config(cli["config"])
        unknown = sorted(set(conf) - set(spec))
        if unknown:
            raise ConfigError(f"unknown config keys for {cmd}: {', '.join(unknown)}")
        raw.update(conf)
    raw.update({k: v for k, v in cli.items() if k in spec})
    params = {}
    for name, (conv, _, _) in spec.items():
        value = raw[name]
        if value is None:
            params[name] = None
        elif conv is parse_range and isinstance(value, (list, tuple)):
            params[name] = parse_range(":".join(str(x) for x in value))
        else:
            params[name] = conv(value)
    if params["out"] is None:
        params["out"] = cmd if cmd != "scenario" else f"scenario_{params.get('kind')}"
    _validate(cmd, params)
    return params


def _validate(cmd: str, p: dict) -> None:
    if p["l_max"] < 1:
        raise ConfigError("l_max must be >= 1")
    for key in ("omega", "beta"):
        if key in p and p[key] is not None and not p[key] > 0:
            raise ConfigError(f"{key} must be positive")
    for key in ("kappa", "amp"):
        if key in p and p[key] is not None and not p[key] >= 0:
            raise ConfigError(f"{key} must be non-negative")
    if "tiers" in p:
        bad = [t for t in p["tiers"] if t not in TIERS]
        if bad or not p["tiers"]:
            raise ConfigError(f"unknown tiers {bad}; choose from {', '.join(TIERS)}")
    if "target" in p and p["target"] not in ("down", "up"):
        raise ConfigError("target must be down or up")
    if "points_per_period" in p and p["points_per_period"] < 4:
        raise ConfigError("points_per_period must be >= 4")
    if cmd == "rates" and p["vv2_method"] not in ("vv2", "vv2_mrwa"):
        raise ConfigError("vv2_method must be vv2 or vv2_mrwa")
    if cmd == "fourier" and p["window"] not in ("none", "hann"):
        raise ConfigError("window must be none or hann")
    if cmd == "validity" and p["reference"] not in ("vv2", "numeric"):
        raise ConfigError("reference must be vv2 or numeric")
    if cmd == "validity" and p["omega_range"][0] <= 0:
        raise ConfigError("omega grid must be positive")
    if cmd == "scenario" and p["kind"] not in ("cdt", "dito"):
        raise ConfigError("scenario kind must be cdt or dito")
    if cmd in ("dynamics", "fourier") and p["t_max"] <= 0:
        raise ConfigError("t_max must be positive")


def _jsonable(value):
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


# ---------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    return "%.17g" % float(x)


def format_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _check_writable(prefix: str) -> Path:
    path = Path(prefix)
    parent = path.parent if str(path.parent) else Path(".")
    try:
        parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {parent}: {exc}") from exc
    if not os.access(parent, os.W_OK):
        raise ConfigError(f"output directory {parent} is not writable")
    return path


def library_version() -> str:
    try:
        return importlib_metadata.version("artifact")
    except importlib_metadata.PackageNotFoundError:
        return "0+unknown"


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands; each returns (csv files {suffix: text}, diagnostics dict)


def _params(eps: float, omega: float, amp: float) -> SystemParams:
    return SystemParams(1.0, eps, amp, omega)


def _m_for(p: dict) -> int:
    return p["m"] if p.get("m") is not None else photon_number(p["eps"], p["omega"])


def _central_pair(p: SystemParams) -> tuple[float, float]:
    tr = TruncationConfig.default_for(p)
    s = diagonalize_floquet(build_floquet_matrix(p, tr))
    order = np.argsort(np.abs(s.energies))
    f = s.folded
    first = f[order[0]]
    second = next((f[i] for i in order[1:] if abs(fold_quasienergy(f[i] - first, p.omega)) > 1e-9), first)
    return tuple(sorted((float(first), float(second))))


def cmd_spectrum(p: dict):
    rows, singular = [], 0
    for eps in range_values(p["eps_range"]):
        sp = _params(eps, p["omega"], p["amp"])
        m = photon_number(eps, p["omega"])
        e0, e1 = _central_pair(sp)
        try:
            ctx = ResonanceContext(m, sp, l_max=p["l_max"])
            em, ep = solve_vanvleck(ctx).quasienergies(m, p["omega"], "vv2")
            vm, vp = fold_quasienergy(em, p["omega"]), fold_quasienergy(ep, p["omega"])
        except NumericalError:
            vm = vp = math.nan
            singular += 1
        rows.append((eps, m, e0, e1, vm, vp))
    header = ["eps", "m", "e_numeric_0", "e_numeric_1", "e_vv2_minus", "e_vv2_plus"]
    return {"": format_csv(header, rows)}, {"singular_points": singular, "points": len(rows)}


def _trajectories(p: dict):
    sp = _params(p["eps"], p["omega"], p["amp"])
    m = _m_for(p)
    bath = BathParams(p["kappa"], p["beta"]) if p["kappa"] > 0 else None
    t = time_grid(sp, p["t_max"], p["points_per_period"])
    return sp, m, t, {tier: survival_trajectory(sp, m, tier, t, bath, p["target"] if "target" in p else "down", p["l_max"]) for tier in p["tiers"]}


def cmd_dynamics(p: dict):
    sp, m, t, trajs = _trajectories(p)
    header = ["t"] + [f"P_{tier}" for tier in trajs]
    rows = zip(t, *[tr.values for tr in trajs.values()])
    diag = {"m": m, "rabi": {tier: tr.meta["rabi"] for tier, tr in trajs.items()}, "points": len(t)}
    diag["truncation_n_tr"] = TruncationConfig.default_for(sp).n_tr
    return {"": format_csv(header, rows)}, diag


def cmd_fourier(p: dict):
    sp, m, t, trajs = _trajectories({**p, "target": "down"})
    sub = p["subtract_asymptote"] if p["subtract_asymptote"] is not None else p["kappa"] > 0
    spectra = {tier: fourier_spectrum(tr, p["window"], sub, threshold=p["threshold"]) for tier, tr in trajs.items()}
    first = next(iter(spectra.values()))
    keep = np.ones(len(first.frequencies), dtype=bool)
    if p["max_nu"] is not None:
        keep = first.frequencies <= p["max_nu"]
    header = ["nu"] + [f"F_{tier}" for tier in spectra]
    rows = zip(first.frequencies[keep], *[s.magnitudes[keep] for s in spectra.values()])
    peaks = {
        tier: [
            {"nu": pk.nu, "height": pk.height, "width": pk.width, "class": pk.kind,
             "coefficient": None if pk.coefficient is None else [pk.coefficient.real, pk.coefficient.imag]}
            for pk in s.peaks
        ]
        for tier, s in spectra.items()
    }
    return {"": format_csv(header, rows)}, {"m": m, "subtract_asymptote": sub, "peaks": peaks, "resolution": first.resolution}


def cmd_rates(p: dict):
    b = BathParams(p["kappa"], p["beta"])
    rows, worst = [], 0.0
    for amp in range_values(p["amp_range"]):
        sp = _params(p["eps"], p["omega"], amp)
        m = _m_for(p)
        ctx = ResonanceContext(m, sp, l_max=p["l_max"])
        r_rwa = rates(ctx, b, method="rwa")
        r_vv2 = rates(ctx, b, method=p["vv2_method"])
        worst = max(worst, r_vv2.gamma_rel / 2 - r_vv2.gamma_deph)
        rows.append((amp, r_rwa.gamma_rel, r_vv2.gamma_rel, r_rwa.gamma_deph, r_vv2.gamma_deph))
    header = ["A", "grel_rwa", "grel_vv2", "gdeph_rwa", "gdeph_vv2"]
    return {"": format_csv(header, rows)}, {"max_rel_half_minus_deph": worst}


def cmd_xcoeffs(p: dict):
    header = ["A"]
    for n in p["harmonics"]:
        for ab in ("mm", "mp"):
            header += [f"X{ab}_{n}_vv1", f"X{ab}_{n}_vv2", f"X{ab}_{n}_numeric"]
    rows, tails = [], 0.0
    for amp in range_values(p["amp_range"]):
        sp = _params(p["eps"], p["omega"], amp)
        m = _m_for(p)
        ctx = ResonanceContext(m, sp, l_max=p["l_max"])
        n_max = max(max(abs(n) for n in p["harmonics"]), default_harmonic_cutoff(sp) + abs(m))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            xn, _ = numeric_position_table(sp, m, n_max)
        tails = max(tails, xn.tail_fraction())
        x1 = position_table(ctx, "vv1", n_max)
        x2 = position_table(ctx, "vv2", n_max)
        row = [amp]
        for n in p["harmonics"]:
            for a, b in ((0, 0), (0, 1)):
                row += [float(np.real(x1(a, b, n))), float(np.real(x2(a, b, n))), float(np.real(xn(a, b, n)))]
        rows.append(row)
    return {"": format_csv(header, rows)}, {"max_tail_fraction": tails, "numeric_sign_note": "numeric X_-+ carries the eigenvector gauge"}


def cmd_validity(p: dict):
    omegas = range_values(p["omega_range"])
    amps = range_values(p["amp_range"])
    dm = deviation_map(omegas, amps, p["eps"], p["reference"], p["clip"], l_max=p["l_max"])
    clipped = dm.clipped()
    rows = []
    for i, om in enumerate(omegas):
        for j, amp in enumerate(amps):
            rows.append((om, amp, int(dm.photon_numbers[i, j]), dm.values[i, j], clipped[i, j], bool(dm.singular[i, j])))
    header = ["omega", "A", "m", "deviation", "deviation_clipped", "singular"]
    return {"": format_csv(header, rows)}, {"singular_cells": int(dm.singular.sum()), "cells": dm.values.size, "threads": worker_count()}


def cmd_scenario(p: dict):
    cfg = ScenarioConfig(
        m=p["m"], omega=p["omega"], kappa=p["kappa"], beta=p["beta"], amp=p["amp"], epsilon=p["eps"],
        zero_index=p["zero_index"], t_max=p["t_max"], points_per_period=p["points_per_period"],
        detuned_omega=p["detuned_omega"], tiers=p["tiers"], l_max=p["l_max"],
    )
    rep = run_scenario(p["kind"], cfg)
    files = {}
    tr0 = next(iter(rep.trajectories.values()))
    files[""] = format_csv(["t"] + [f"P_{k}" for k in rep.trajectories], zip(tr0.times, *[tr.values for tr in rep.trajectories.values()]))
    if rep.detuned:
        d0 = next(iter(rep.detuned.values()))
        files[".detuned"] = format_csv(["t"] + [f"P_{k}" for k in rep.detuned], zip(d0.times, *[tr.values for tr in rep.detuned.values()]))
    peaks = {tier: [{"nu": pk.nu, "height": pk.height, "class": pk.kind} for pk in s.peaks] for tier, s in rep.spectra.items()}
    return files, {"numbers": rep.numbers, "system": asdict(rep.params), "peaks": peaks}


HANDLERS = {
    "spectrum": cmd_spectrum,
    "dynamics": cmd_dynamics,
    "rates": cmd_rates,
    "xcoeffs": cmd_xcoeffs,
    "fourier": cmd_fourier,
    "validity": cmd_validity,
    "scenario": cmd_scenario,
}


def execute(cmd: str, params: dict) -> list[Path]:
    prefix = _check_writable(params["out"])
    files, diagnostics = HANDLERS[cmd](params)
    written = []
    for suffix, text in files.items():
        path = prefix.with_name(prefix.name + suffix + ".csv")
        _write(path, text)
        written.append(path)
    meta = {
        "format_version": FORMAT_VERSION,
        "command": cmd,
        "library": "drivetls",
        "version": library_version(),
        "units": "energies in Delta, beta as hbar*beta*Delta",
        "params": {k: _jsonable(v) for k, v in params.items()},
        "outputs": [p.name for p in written],
        "diagnostics": json.loads(json.dumps(diagnostics, default=_jsonable)),
        "threads_env": os.environ.get("DRIVETLS_THREADS"),
    }
    mpath = prefix.with_name(prefix.name + ".json")
    _write(mpath, json.dumps(meta, indent=2, sort_keys=True, default=_jsonable) + "\n")
    written.append(mpath)
    return written


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # bare replay: drivetls --from-metadata run.json
    if argv[:1] == ["--from-metadata"] and len(argv) >= 2:
        try:
            meta = read_metadata(argv[1])
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        head = [meta["command"]]
        if meta["command"] == "scenario":
            head.append(str(meta["params"].get("kind")))
        argv = head + ["--from-metadata", argv[1]] + argv[2:]
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if ns.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    if not ns.command:
        parser.print_usage(sys.stderr)
        return EXIT_VALIDATION
    cli = {k: v for k, v in vars(ns).items() if k not in ("command", "verbose")}
    try:
        params = resolve_params(ns.command, cli)
        paths = execute(ns.command, params)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in paths:
        log.info("wrote %s", path)
        print(path)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

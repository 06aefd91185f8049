"""Command-line front end.

Subcommands wire targets through the encoders and write circuit files
plus JSON/CSV reports. Exit codes: 0 success, 2 invalid configuration,
3 numerical failure (a diagnostic report is still written when
possible). All outputs are written atomically (temp file + rename) and
are byte-deterministic for a fixed config and seed, apart from the
wall-time fields.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .circuit import from_json as circuit_from_json
from .circuit import from_qasm, metrics, qsd_block_cost, simulate_dense, to_json, to_qasm
from .encoders import ExactSequentialEncoder, MpdEncoder, MpdTnoEncoder
from .errors import MpsEncError
from .mps import fidelity, load_mps, save_mps, schmidt_spectrum, truncate
from .targets import (
    TargetSpec,
    bundled_phantom_path,
    discretise,
    ingest_image,
    make_family,
    target_mps,
)
from .tci import tci_build

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_FAMILY_PARAM_KEYS = ("sigma", "gamma", "k", "eps", "strike", "degree",
                      "intervals", "knots", "seed", "discontinuous", "coeffs")


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    command: str = ""
    kind: str = "function"
    family: str = "gaussian"
    sigma: float | None = None
    gamma: float | None = None
    k: float | None = None
    eps: float | None = None
    strike: float | None = None
    degree: int | None = None
    intervals: int | None = None
    knots: int | None = None
    coeffs: str | None = None
    discontinuous: bool = True
    seed: int = 0
    domain_min: float = -1.0
    domain_max: float = 1.0
    n_qubits: int = 12
    chi_max: int | None = None
    chi: int | None = None
    svd_threshold: float = 1e-10
    method: str = "mpd"
    layers: int = 1
    max_iters: int | None = None
    tol: float = 1e-10
    output_dir: str = "runs"
    formats: tuple = ("qasm", "json", "csv")
    image_path: str | None = None
    image_format: str | None = None
    run_id: str | None = None
    chi_list: tuple = ()
    bonds: tuple = ()
    chi_cap: int = 8
    tci_tol: float = 1e-12
    manifest: str | None = None
    workers: int | None = None
    input: str | None = None

    def family_params(self) -> dict:
        params = {}
        for key in _FAMILY_PARAM_KEYS:
            value = getattr(self, key, None)
            if value is None:
                continue
            if key == "coeffs":
                params[key] = tuple(float(c) for c in str(value).split(","))
            elif key == "discontinuous":
                params[key] = bool(value)
            else:
                params[key] = value
        # only pass what the family understands; builders reject leftovers
        return params

    def target_spec(self) -> TargetSpec:
        if self.kind == "function":
            params = _prune_family_params(self.family, self.family_params())
            return TargetSpec.function(
                self.family, self.n_qubits,
                domain=(self.domain_min, self.domain_max), **params
            )
        if self.kind == "image":
            path = self.image_path or bundled_phantom_path()
            return ingest_image(path, self.image_format)
        if self.kind == "random-mps":
            return TargetSpec.random(self.n_qubits, self.chi or 5, self.seed)
        raise MpsEncError(f"unknown target kind {self.kind!r}")

    def default_run_id(self) -> str:
        bits = [self.command]
        if self.kind == "function":
            bits.append(self.family)
        elif self.kind == "image" and self.image_path:
            bits.append(os.path.splitext(os.path.basename(self.image_path))[0])
        bits.append(f"n{self.n_qubits}")
        if self.command in ("encode-function", "encode-image"):
            bits += [self.method, f"L{self.layers}"]
        if self.chi_max is not None:
            bits.append(f"chi{self.chi_max}")
        bits.append(f"s{self.seed}")
        return "-".join(str(b) for b in bits)


_FAMILY_KNOWN_PARAMS = {
    "gaussian": {"sigma"},
    "cauchy": {"gamma"},
    "sine": {"k"},
    "cosine": {"k"},
    "log-shifted": {"eps"},
    "hockey-stick": {"strike"},
    "polynomial": {"coeffs"},
    "uniform-roots-poly": {"degree", "seed"},
    "cubic-spline": {"knots", "seed"},
    "piecewise-poly": {"intervals", "degree", "seed", "discontinuous"},
    "piecewise-chebyshev": {"intervals", "degree", "seed"},
}


def _prune_family_params(family: str, params: dict) -> dict:
    allowed = _FAMILY_KNOWN_PARAMS.get(family.lower().replace("_", "-"), set())
    return {k: v for k, v in params.items() if k in allowed}


def load_config_file(path: str) -> dict:
    """Parse a key=value config file; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise MpsEncError(f"malformed config line: {raw.strip()!r}")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


_CONFIG_TYPES = {
    "sigma": float, "gamma": float, "k": float, "eps": float, "strike": float,
    "degree": int, "intervals": int, "knots": int, "seed": int,
    "domain_min": float, "domain_max": float, "n_qubits": int,
    "chi_max": int, "chi": int, "svd_threshold": float, "layers": int,
    "max_iters": int, "tol": float, "chi_cap": int, "tci_tol": float,
    "workers": int, "discontinuous": lambda s: s.lower() in ("1", "true", "yes"),
}


def apply_config(cfg: RunConfig, values: dict) -> RunConfig:
    for key, value in values.items():
        if not hasattr(cfg, key):
            raise MpsEncError(f"unknown config key {key!r}")
        if isinstance(value, str):
            caster = _CONFIG_TYPES.get(key)
            if caster is not None:
                value = caster(value)
            elif key in ("formats", "chi_list", "bonds"):
                value = tuple(value.split(","))
        setattr(cfg, key, value)
    if cfg.chi_list:
        cfg.chi_list = tuple(int(c) for c in cfg.chi_list)
    if cfg.bonds:
        cfg.bonds = tuple(int(b) for b in cfg.bonds)
    return cfg


# ---------------------------------------------------------------------------
# Atomic output helpers
# ---------------------------------------------------------------------------

def _atomic_write(path: str, data) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Encode commands
# ---------------------------------------------------------------------------

@dataclass
class EncodeReport:
    """Summary of one encoding run, mirrored into report.json."""

    target: str
    method: str
    n_qubits: int
    layers: int
    chi_max: int | None
    fidelity: float
    cnot_count: int
    single_qubit_count: int
    total_gates: int
    depth: int
    parameter_count: int
    per_layer_fidelity: tuple = ()
    fidelity_method: str = "mps"
    optimization: dict | None = None
    modeled: bool = False
    wall_time_seconds: float = 0.0

    def payload(self) -> dict:
        body = {
            "target": self.target,
            "method": self.method,
            "n_qubits": self.n_qubits,
            "layers": self.layers,
            "chi_max": self.chi_max,
            "fidelity": self.fidelity,
            "infidelity": 1.0 - self.fidelity,
            "cnot_count": self.cnot_count,
            "single_qubit_count": self.single_qubit_count,
            "total_gates": self.total_gates,
            "depth": self.depth,
            "parameter_count": self.parameter_count,
            "per_layer_fidelity": list(self.per_layer_fidelity),
            "fidelity_method": self.fidelity_method,
            "modeled_counts": self.modeled,
            "wall_time_seconds": self.wall_time_seconds,
        }
        if self.optimization is not None:
            body["optimization"] = self.optimization
        return body


def _build_encoder(cfg: RunConfig):
    if cfg.method == "mpd":
        return MpdEncoder(n_layers=cfg.layers, chi_max=cfg.chi_max,
                          svd_threshold=cfg.svd_threshold)
    if cfg.method == "mpd-tno":
        iters = cfg.max_iters
        if iters is None:
            iters = 400 if cfg.kind == "image" else 500
        return MpdTnoEncoder(n_layers=cfg.layers, chi_max=cfg.chi_max,
                             svd_threshold=cfg.svd_threshold,
                             max_iters=iters, tol=cfg.tol)
    if cfg.method == "exact":
        return ExactSequentialEncoder(chi_max=cfg.chi_max,
                                      svd_threshold=cfg.svd_threshold)
    raise MpsEncError(f"unknown method {cfg.method!r}")


def run_encode(cfg: RunConfig) -> dict:
    """Shared body of encode-function / encode-image."""
    t0 = time.perf_counter()
    spec = cfg.target_spec()
    if cfg.kind == "image" and cfg.chi_max is None:
        cfg.chi_max = 32
    cfg.n_qubits = spec.n_qubits
    encoder = _build_encoder(cfg)
    encoder.fit(spec)

    circuit = encoder.circuit_
    mets = metrics(circuit)
    fid = encoder.fidelity_
    fidelity_method = f"mps(chi={encoder.sim_chi_max_ or 'exact'})"
    if circuit.n <= 14 and circuit.is_elementary():
        exact_target = target_mps(spec)  # uncapped reference state
        vec = simulate_dense(circuit)
        fid = float(abs(np.vdot(exact_target.to_statevector(), vec)) ** 2)
        fidelity_method = "dense"
    fid = min(max(fid, 0.0), 1.0)

    optimization = None
    if hasattr(encoder, "optimization_report_"):
        rep = encoder.optimization_report_
        optimization = {
            "initial_cost": rep.initial_cost,
            "final_cost": rep.final_cost,
            "iterations": rep.iterations,
            "evaluations": rep.evaluations,
            "gradient_evaluations": rep.gradient_evaluations,
            "converged": rep.converged,
            "message": rep.message,
            "wall_time_seconds": rep.wall_time,
        }

    report = EncodeReport(
        target=spec.describe(),
        method=cfg.method,
        n_qubits=spec.n_qubits,
        layers=getattr(encoder, "n_layers", 0),
        chi_max=cfg.chi_max,
        fidelity=fid,
        cnot_count=mets.cnot_count,
        single_qubit_count=mets.single_qubit_count,
        total_gates=mets.total_gates,
        depth=mets.depth,
        parameter_count=mets.parameter_count,
        per_layer_fidelity=tuple(
            getattr(encoder, "layer_stack_", None).per_layer_fidelity
            if hasattr(encoder, "layer_stack_") else ()
        ),
        fidelity_method=fidelity_method,
        optimization=optimization,
        modeled=mets.modeled,
        wall_time_seconds=time.perf_counter() - t0,
    )

    run_dir = os.path.join(cfg.output_dir, cfg.run_id or cfg.default_run_id())
    payload = report.payload()
    if "qasm" in cfg.formats and circuit.is_elementary():
        _atomic_write(os.path.join(run_dir, "circuit.qasm"), to_qasm(circuit))
    if "json" in cfg.formats:
        _atomic_write(os.path.join(run_dir, "circuit.json"), to_json(circuit))
    _atomic_write(os.path.join(run_dir, "report.json"), _dump_json(payload))
    if "csv" in cfg.formats:
        lines = ["layer,fidelity"]
        for i, f in enumerate(report.per_layer_fidelity, start=1):
            lines.append(f"{i},{f:.17g}")
        _atomic_write(os.path.join(run_dir, "trace.csv"), "\n".join(lines) + "\n")
        if optimization is not None:
            _atomic_write(os.path.join(run_dir, "opt_trace.csv"),
                          encoder.optimization_report_.trace_csv())
    if cfg.kind == "image":
        recon = encoder.reconstruction()
        side = int(np.sqrt(len(recon)))
        mat = np.abs(recon.reshape(side, side))
        rows = "\n".join(",".join(f"{v:.9g}" for v in row) for row in mat)
        _atomic_write(os.path.join(run_dir, "reconstruction.csv"), rows + "\n")
    payload["run_dir"] = run_dir
    return payload


# ---------------------------------------------------------------------------
# Scan / TCI / benchmark / inspect commands
# ---------------------------------------------------------------------------

def run_truncation_scan(cfg: RunConfig) -> dict:
    spec = cfg.target_spec()
    exact = target_mps(spec, svd_threshold=cfg.svd_threshold)
    chis = cfg.chi_list or tuple(
        c for c in (1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64)
        if c <= exact.max_bond
    )
    run_dir = os.path.join(cfg.output_dir, cfg.run_id or cfg.default_run_id())
    lines = ["chi,truncation_error,fidelity"]
    for chi in chis:
        truncated, _ = truncate(exact, chi, cfg.svd_threshold)
        fid = fidelity(truncated, exact)
        lines.append(f"{chi},{1.0 - fid:.17g},{fid:.17g}")
    _atomic_write(os.path.join(run_dir, "truncation_scan.csv"),
                  "\n".join(lines) + "\n")

    bonds = cfg.bonds or (exact.n_sites // 2,)
    spectra = ["bond,index,singular_value"]
    for bond in bonds:
        spectrum = schmidt_spectrum(exact, int(bond))
        for i, s in enumerate(spectrum.singular_values):
            spectra.append(f"{bond},{i},{s:.17g}")
    _atomic_write(os.path.join(run_dir, "schmidt_spectra.csv"),
                  "\n".join(spectra) + "\n")
    summary = {"run_dir": run_dir, "target": spec.describe(),
               "chi_values": list(chis), "max_bond": exact.max_bond}
    _atomic_write(os.path.join(run_dir, "report.json"), _dump_json(summary))
    return summary


def run_tci(cfg: RunConfig) -> dict:
    params = _prune_family_params(cfg.family, cfg.family_params())
    family = make_family(cfg.family, domain=(cfg.domain_min, cfg.domain_max),
                         **params)
    result = tci_build(
        family, cfg.n_qubits, cfg.chi_cap, tol=cfg.tci_tol, seed=cfg.seed,
        domain=(cfg.domain_min, cfg.domain_max),
    )
    run_dir = os.path.join(cfg.output_dir, cfg.run_id or cfg.default_run_id())
    save_path = os.path.join(run_dir, "target.mps")
    os.makedirs(run_dir, exist_ok=True)
    save_mps(result.mps, save_path)
    payload = {
        "target": family.describe(),
        "n_qubits": cfg.n_qubits,
        "chi_cap": cfg.chi_cap,
        "max_bond": result.mps.max_bond,
        "est_error": result.est_error,
        "samples_used": result.samples_used,
        "evaluations_total": result.evaluations_total,
        "sample_fraction": result.samples_used / 2.0 ** cfg.n_qubits,
        "sweeps": result.sweeps,
        "converged": result.converged,
        "mps_file": save_path,
    }
    _atomic_write(os.path.join(run_dir, "report.json"), _dump_json(payload))
    payload["run_dir"] = run_dir
    return payload


def _benchmark_one(line_cfg: dict, output_dir: str) -> dict:
    cfg = RunConfig(command="encode", output_dir=output_dir)
    apply_config(cfg, line_cfg)
    t0 = time.perf_counter()
    try:
        if cfg.kind == "random-mps":
            spec = cfg.target_spec()
            target = target_mps(spec, chi_max=cfg.chi_max)
            encoder = _build_encoder(cfg)
            encoder.fit(target)
            mets = metrics(encoder.circuit_)
            return {
                "run_id": cfg.run_id or cfg.default_run_id(),
                "target": spec.describe(), "method": cfg.method,
                "layers": cfg.layers, "fidelity": encoder.fidelity_,
                "cnots": mets.cnot_count, "depth": mets.depth,
                "seconds": time.perf_counter() - t0, "status": "ok",
            }
        payload = run_encode(cfg)
        return {
            "run_id": cfg.run_id or cfg.default_run_id(),
            "target": payload["target"], "method": cfg.method,
            "layers": cfg.layers, "fidelity": payload["fidelity"],
            "cnots": payload["cnot_count"], "depth": payload["depth"],
            "seconds": time.perf_counter() - t0, "status": "ok",
        }
    except Exception as exc:  # isolate per-run failures
        return {
            "run_id": cfg.run_id or cfg.default_run_id(), "target": cfg.kind,
            "method": cfg.method, "layers": cfg.layers, "fidelity": "",
            "cnots": "", "depth": "",
            "seconds": time.perf_counter() - t0,
            "status": f"failed: {exc}",
        }


def parse_manifest(path: str) -> list[dict]:
    """One run per line: whitespace-separated key=value pairs."""
    runs = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            entry = {}
            for token in line.split():
                if "=" not in token:
                    raise MpsEncError(f"malformed manifest token {token!r}")
                key, value = token.split("=", 1)
                entry[key.replace("-", "_")] = value
            runs.append(entry)
    return runs


def run_benchmark(cfg: RunConfig) -> dict:
    runs = parse_manifest(cfg.manifest)
    workers = cfg.workers or int(os.environ.get("MPSENC_THREADS") or 0) \
        or min(4, os.cpu_count() or 1)
    results = []
    if runs:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_benchmark_one, entry, cfg.output_dir)
                       for entry in runs]
            results = [f.result() for f in futures]
    header = ["run_id", "target", "method", "layers", "fidelity", "cnots",
              "depth", "seconds", "status"]
    lines = [",".join(header)]
    for row in results:
        lines.append(",".join(_csv_cell(row[h]) for h in header))
    os.makedirs(cfg.output_dir, exist_ok=True)
    summary_path = os.path.join(cfg.output_dir, "summary.csv")
    _atomic_write(summary_path, "\n".join(lines) + "\n")
    n_failed = sum(1 for r in results if r["status"] != "ok")
    return {"summary": summary_path, "runs": len(results), "failed": n_failed}


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    text = str(value)
    return '"' + text.replace('"', "'") + '"' if "," in text else text


def run_inspect(cfg: RunConfig) -> dict:
    path = cfg.input
    if path is None:
        raise MpsEncError("inspect needs --input")
    with open(path, "rb") as fh:
        head = fh.read(16)
    if head.startswith(b"MPS1"):
        mps = load_mps(path)
        return {
            "type": "mps", "n_qubits": mps.n_sites,
            "bond_dims": list(mps.bond_dims), "max_bond": mps.max_bond,
            "norm": mps.norm(),
        }
    text = open(path).read()
    if head.startswith(b"OPENQASM"):
        circuit = from_qasm(text)
    else:
        payload = json.loads(text)
        if "gates" not in payload:
            return {"type": "report", **payload}
        circuit = circuit_from_json(text)
    mets = metrics(circuit)
    return {
        "type": "circuit", "n_qubits": circuit.n, "gates": circuit.n_gates,
        "cnot_count": mets.cnot_count, "depth": mets.depth,
        "parameter_count": mets.parameter_count,
        "provenance": circuit.provenance,
    }


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_target_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", default="gaussian")
    p.add_argument("--sigma", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--k", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--strike", type=float)
    p.add_argument("--degree", type=int)
    p.add_argument("--intervals", type=int)
    p.add_argument("--knots", type=int)
    p.add_argument("--coeffs")
    p.add_argument("--continuous", dest="discontinuous", action="store_false")
    p.add_argument("--domain-min", type=float, default=-1.0)
    p.add_argument("--domain-max", type=float, default=1.0)
    p.add_argument("--n-qubits", type=int, default=12)


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chi-max", type=int)
    p.add_argument("--svd-threshold", type=float, default=1e-10)
    p.add_argument("--output-dir", default="runs")
    p.add_argument("--run-id")
    p.add_argument("--formats", default="qasm,json,csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpsenc",
        description="Compile functions and images into shallow quantum circuits",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode-function", help="compile a discretised function")
    _add_target_args(p)
    _add_common_args(p)
    p.add_argument("--method", choices=("mpd", "mpd-tno", "exact"), default="mpd")
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("encode-image", help="compile a grayscale image")
    _add_common_args(p)
    p.add_argument("--image", dest="image_path",
                   help="PGM/CSV/raw file (bundled phantom if omitted)")
    p.add_argument("--image-format", choices=("pgm", "csv", "raw"))
    p.add_argument("--method", choices=("mpd", "mpd-tno", "exact"), default="mpd")
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("truncation-scan", help="bond-sweep error curves")
    _add_target_args(p)
    _add_common_args(p)
    p.add_argument("--chi-list", help="comma-separated bond dimensions")
    p.add_argument("--bonds", help="comma-separated bonds for spectra")

    p = sub.add_parser("tci-build", help="cross-interpolate a function")
    _add_target_args(p)
    _add_common_args(p)
    p.add_argument("--chi-cap", type=int, default=8)
    p.add_argument("--tci-tol", type=float, default=1e-12)

    p = sub.add_parser("benchmark", help="run a manifest of encodings")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output-dir", default="runs")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("inspect", help="summarize an MPS/circuit/report file")
    p.add_argument("--input", required=True)
    return parser


_RUNNERS = {
    "encode-function": run_encode,
    "encode-image": run_encode,
    "truncation-scan": run_truncation_scan,
    "tci-build": run_tci,
    "benchmark": run_benchmark,
    "inspect": run_inspect,
}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if args.command == "encode-image":
        cfg.kind = "image"
    file_values = {}
    if getattr(args, "config", None):
        file_values = load_config_file(args.config)
    apply_config(cfg, file_values)
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        if key == "formats" and isinstance(value, str):
            value = tuple(value.split(","))
        if key in ("chi_list", "bonds") and isinstance(value, str):
            value = tuple(int(x) for x in value.split(","))
        if hasattr(cfg, key):
            setattr(cfg, key, value)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (MpsEncError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    runner = _RUNNERS[cfg.command]
    try:
        payload = runner(cfg)
    except (MpsEncError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        diag = {"status": "numerical-failure", "detail": str(exc)}
        try:
            run_dir = os.path.join(cfg.output_dir,
                                   cfg.run_id or cfg.default_run_id())
            _atomic_write(os.path.join(run_dir, "report.json"),
                          _dump_json(diag))
        except OSError:
            pass
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(json.dumps(payload, indent=1, sort_keys=True, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

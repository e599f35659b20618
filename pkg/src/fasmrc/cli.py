"""Experiment runner: parameter sweeps across estimation methods with
machine-readable CSV/JSON output.

A sweep varies exactly one of {phi_db, K, M, W} over a strictly increasing
value list and evaluates every requested method at every point.  Rows are
emitted in deterministic (point, method) order regardless of how many
worker threads computed them; per-point failures are recorded in the
status column without aborting the sweep.

Exit codes: 0 full success, 1 spec validation failure, 2 if any row has a
non-ok status.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources

from .analytic import QuadratureConfig, SeriesTruncation, outage_gc
from .bounds import outage_asymptotic, outage_lower_bound
from .channel import SystemConfig, correlation_mu
from .errors import FasmrcError
from .montecarlo import McConfig, estimate_outage
from .results import OutageEstimate

SWEEP_VARS = ("phi_db", "K", "M", "W")
METHODS = ("mc", "gc", "lb", "asy")
ANALYTIC_METHODS = ("gc", "lb", "asy")

#: CSV schema; column order is part of the output contract.
CSV_COLUMNS = ["sweep_var", "sweep_value", "M", "K", "W", "R", "phi_db",
               "method", "value", "ci_low", "ci_high", "diag_tail",
               "diag_nodes", "samples", "status", "wall_ms"]

OUTPUT_DIR_ENV = "FASMRC_OUTPUT_DIR"


@dataclass
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass
class ExperimentSpec:
    """One sweep: a base scenario, the swept variable, methods and budgets.

    phi_db is the average SNR in power decibels (phi = 10**(phi_db/10)).
    The base value of the swept variable is ignored at each sweep point.
    """

    M: int = 4
    K: int = 2
    W: float = 5.0
    R: float = 5.0
    phi_db: float = 10.0
    sweep: str = "phi_db"
    sweep_values: list = field(default_factory=list)
    methods: list = field(default_factory=lambda: ["mc"])
    mc_samples: int = 1_000_000
    seed: int = 12345
    chunk_size: int = 250_000
    n_max: int = 40
    tail_tol: float = 1e-8
    term_cap: int = 2_000_000
    quad_h: float | None = None
    u_p: int = 400
    u_l: int = 100
    output_path: str | None = None
    output_format: str = "csv"
    name: str = "experiment"

    def point_scenario(self, value) -> dict:
        """Scenario fields with the swept variable replaced by `value`."""
        fields = {"M": self.M, "K": self.K, "W": self.W, "R": self.R,
                  "phi_db": self.phi_db}
        fields[self.sweep] = value
        if self.sweep in ("M", "K"):
            fields[self.sweep] = int(value)
        return fields

    def truncation(self) -> SeriesTruncation:
        return SeriesTruncation(n_max=self.n_max, tail_tol=self.tail_tol,
                                term_cap=self.term_cap)

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(h=self.quad_h, u_p=self.u_p, u_l=self.u_l)


def _scenario_violations(fields: dict, methods, context: str) -> list[Violation]:
    out = []
    if fields["W"] <= 0:
        out.append(Violation("NONPOSITIVE_APERTURE",
                             f"{context}: W={fields['W']} must be > 0"))
    if fields["R"] <= 0:
        out.append(Violation("NONPOSITIVE_RATE",
                             f"{context}: R={fields['R']} must be > 0"))
    if fields["M"] < 1:
        out.append(Violation("NONPOSITIVE_PORTS",
                             f"{context}: M={fields['M']} must be >= 1"))
    if fields["K"] < 1:
        out.append(Violation("NONPOSITIVE_ACTIVE_PORTS",
                             f"{context}: K={fields['K']} must be >= 1"))
    elif fields["K"] > fields["M"]:
        out.append(Violation("K_EXCEEDS_M",
                             f"{context}: K={fields['K']} > M={fields['M']}"))
    elif fields["K"] == fields["M"] and any(m in ANALYTIC_METHODS for m in methods):
        out.append(Violation(
            "ANALYTIC_REQUIRES_K_LT_M",
            f"{context}: methods {sorted(set(methods) & set(ANALYTIC_METHODS))} "
            f"need K <= M-1, got K=M={fields['M']}"))
    return out


def validate_spec(spec: ExperimentSpec) -> list[Violation]:
    """All violations in a spec (never raises).  Empty list means valid."""
    out: list[Violation] = []
    if not spec.methods:
        out.append(Violation("EMPTY_METHODS", "no estimation method requested"))
    unknown = [m for m in spec.methods if m not in METHODS]
    if unknown:
        out.append(Violation("UNKNOWN_METHOD",
                             f"unknown methods {unknown}; choose from {METHODS}"))
    if spec.sweep not in SWEEP_VARS:
        out.append(Violation("UNKNOWN_SWEEP_VAR",
                             f"sweep={spec.sweep!r}; choose from {SWEEP_VARS}"))
        return out
    if not spec.sweep_values:
        out.append(Violation("EMPTY_SWEEP", "sweep_values is empty"))
    elif any(b <= a for a, b in zip(spec.sweep_values, spec.sweep_values[1:])):
        out.append(Violation("SWEEP_NOT_INCREASING",
                             f"sweep_values must be strictly increasing: "
                             f"{spec.sweep_values}"))
    if spec.mc_samples < 1:
        out.append(Violation("NONPOSITIVE_SAMPLES",
                             f"mc_samples={spec.mc_samples} must be >= 1"))
    if spec.output_format not in ("csv", "json"):
        out.append(Violation("UNKNOWN_FORMAT",
                             f"output_format={spec.output_format!r}; "
                             f"choose csv or json"))
    methods = [m for m in spec.methods if m in METHODS]
    for value in spec.sweep_values:
        fields = spec.point_scenario(value)
        out.extend(_scenario_violations(
            fields, methods, f"{spec.sweep}={value}"))
    return out


def _blank_row(spec: ExperimentSpec, value, method: str) -> dict:
    fields = spec.point_scenario(value)
    return {"sweep_var": spec.sweep, "sweep_value": value,
            "M": fields["M"], "K": fields["K"], "W": fields["W"],
            "R": fields["R"], "phi_db": fields["phi_db"], "method": method,
            "value": None, "ci_low": None, "ci_high": None,
            "diag_tail": None, "diag_nodes": None, "samples": None,
            "status": "ok", "wall_ms": 0}


def _fill_row(row: dict, est: OutageEstimate):
    row["value"] = est.value
    row["ci_low"] = est.ci_low
    row["ci_high"] = est.ci_high
    d = est.diagnostics
    if est.method == "gc":
        row["diag_tail"] = d.get("tail_max")
        row["diag_nodes"] = est.samples_or_nodes
    elif est.method == "lb":
        row["diag_tail"] = d.get("cancellation")
        row["diag_nodes"] = est.samples_or_nodes
    elif est.method == "asy":
        row["diag_tail"] = d.get("log10_value")
    else:
        row["samples"] = est.samples_or_nodes


def _eval_point(spec: ExperimentSpec, point_index: int, value) -> list[dict]:
    fields = spec.point_scenario(value)
    rows = []
    for method in spec.methods:
        row = _blank_row(spec, value, method)
        t0 = time.perf_counter()
        try:
            cfg = SystemConfig(M=fields["M"], K=fields["K"], W=fields["W"],
                               R=fields["R"],
                               phi=10.0 ** (fields["phi_db"] / 10.0))
            if method == "mc":
                # per-point sub-seed keeps points independent yet reproducible
                mc = McConfig(samples=spec.mc_samples,
                              seed=spec.seed + point_index,
                              chunk_size=spec.chunk_size)
                est = estimate_outage(cfg, mc)
            elif method == "gc":
                est = outage_gc(cfg, trunc=spec.truncation(),
                                quad=spec.quadrature())
            elif method == "lb":
                est = outage_lower_bound(cfg)
            elif method == "asy":
                est = outage_asymptotic(cfg)
            else:
                raise ValueError(f"unknown method {method!r}")
            _fill_row(row, est)
        except (FasmrcError, ValueError) as exc:
            row["status"] = type(exc).__name__
        row["wall_ms"] = int(round(1000.0 * (time.perf_counter() - t0)))
        rows.append(row)
    return rows


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> list[dict]:
    """Evaluate the sweep; one row per (sweep point, method).

    Sweep points are independent jobs, run concurrently up to `jobs`; rows
    come back in spec order regardless of completion order.  Raises
    ValueError when the spec fails validation.
    """
    violations = validate_spec(spec)
    if violations:
        raise ValueError("invalid experiment spec: "
                         + "; ".join(str(v) for v in violations))
    points = list(enumerate(spec.sweep_values))
    if jobs <= 1 or len(points) == 1:
        nested = [_eval_point(spec, i, v) for i, v in points]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_eval_point, spec, i, v) for i, v in points]
            nested = [f.result() for f in futures]
    return [row for rows in nested for row in rows]


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    """17-significant-digit serialization: floats round-trip exactly."""
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def rows_to_csv(rows: list[dict], timestamp: bool = True) -> str:
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {time.strftime('%Y-%m-%dT%H:%M:%S%z')}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: list[dict], timestamp: bool = True) -> str:
    doc = {"columns": CSV_COLUMNS,
           "rows": [{c: row[c] for c in CSV_COLUMNS} for row in rows]}
    if timestamp:
        doc["generated"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def read_csv_rows(text: str) -> list[dict]:
    """Inverse of :func:`rows_to_csv` (numeric fields back to float/int)."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    out = []
    float_cols = {"sweep_value", "W", "R", "phi_db", "value", "ci_low",
                  "ci_high", "diag_tail"}
    int_cols = {"M", "K", "diag_nodes", "samples", "wall_ms"}
    for rec in reader:
        row = {}
        for col, raw in rec.items():
            if raw == "":
                row[col] = None
            elif col in float_cols:
                row[col] = float(raw)
            elif col in int_cols:
                row[col] = int(raw)
            else:
                row[col] = raw
        out.append(row)
    return out


def _strip_timing(rows: list[dict]) -> list[dict]:
    return [{**row, "wall_ms": 0} for row in rows]


def write_output(rows: list[dict], path: str | None, fmt: str,
                 timestamp: bool) -> str:
    """Render rows and write them to `path` (or stdout when None).

    With timestamps suppressed the wall_ms column is zeroed as well, so
    identical experiments produce byte-identical files.
    """
    if not timestamp:
        rows = _strip_timing(rows)
    text = rows_to_csv(rows, timestamp) if fmt == "csv" \
        else rows_to_json(rows, timestamp)
    if path is None:
        sys.stdout.write(text)
        return "<stdout>"
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if out_dir and not os.path.isabs(path):
        path = os.path.join(out_dir, path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


# ---------------------------------------------------------------------------
# config files and presets
# ---------------------------------------------------------------------------

def _spec_from_dict(doc: dict, name: str) -> ExperimentSpec:
    known = {f for f in ExperimentSpec.__dataclass_fields__}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown spec fields {sorted(unknown)}")
    return ExperimentSpec(**{**{"name": name}, **doc})


def load_config(text: str, name: str = "experiment") -> list[ExperimentSpec]:
    """Parse a JSON config: either one spec object or
    {"experiments": [spec, ...]} with optional shared "defaults"."""
    doc = json.loads(text)
    if "experiments" in doc:
        defaults = doc.get("defaults", {})
        return [_spec_from_dict({**defaults, **exp},
                                exp.get("name", f"{name}-{i}"))
                for i, exp in enumerate(doc["experiments"])]
    doc.pop("description", None)
    return [_spec_from_dict(doc, doc.pop("name", name))]


def load_preset(name: str) -> list[ExperimentSpec]:
    ref = resources.files("fasmrc") / "presets" / f"{name}.json"
    if not ref.is_file():
        available = sorted(p.name[:-5] for p in
                           (resources.files("fasmrc") / "presets").iterdir()
                           if p.name.endswith(".json"))
        raise ValueError(f"unknown preset {name!r}; available: {available}")
    return load_config(ref.read_text(encoding="utf-8"), name)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_run_flags(sub):
    sub.add_argument("--seed", type=int, help="override RNG seed")
    sub.add_argument("--samples", type=int, help="override MC sample count")
    sub.add_argument("--jobs", type=int, default=1,
                     help="concurrent sweep points (default 1)")
    sub.add_argument("--format", choices=("csv", "json"), default=None,
                     help="output format (default: config value, else csv)")
    sub.add_argument("--no-timestamp", action="store_true",
                     help="suppress the timestamp header and zero wall_ms "
                          "for byte-identical reruns")
    sub.add_argument("--output", default=None,
                     help="output file (default: config value, else stdout); "
                     f"relative paths resolve under ${OUTPUT_DIR_ENV} if set")


def _apply_overrides(specs: list[ExperimentSpec], args) -> list[ExperimentSpec]:
    out = []
    for spec in specs:
        if args.seed is not None:
            spec = replace(spec, seed=args.seed)
        if args.samples is not None:
            spec = replace(spec, mc_samples=args.samples)
        out.append(spec)
    return out


def _run_specs(specs: list[ExperimentSpec], args) -> int:
    all_violations = [(s.name, v) for s in specs for v in validate_spec(s)]
    if all_violations:
        for name, v in all_violations:
            print(f"{name}: {v}", file=sys.stderr)
        return 1
    rows: list[dict] = []
    for spec in specs:
        rows.extend(run_experiment(spec, jobs=args.jobs))
    # flags override the (first) spec's own output settings
    path = args.output if args.output is not None else specs[0].output_path
    fmt = args.format if args.format is not None else specs[0].output_format
    dest = write_output(rows, path, fmt, timestamp=not args.no_timestamp)
    bad = sum(1 for r in rows if r["status"] != "ok")
    if dest != "<stdout>":
        print(f"wrote {len(rows)} rows to {dest}"
              + (f" ({bad} failed)" if bad else ""), file=sys.stderr)
    return 2 if bad else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fasmrc",
        description="Outage-probability experiments for fluid antenna "
                    "systems with best-K port selection and MRC.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_run = subs.add_parser("run", help="run a sweep from a JSON config file")
    p_run.add_argument("config")
    _add_run_flags(p_run)

    p_pre = subs.add_parser("preset", help="run a named built-in preset")
    p_pre.add_argument("preset_name")
    _add_run_flags(p_pre)

    p_val = subs.add_parser("validate", help="validate a config, print violations")
    p_val.add_argument("config")

    p_mu = subs.add_parser("mu", help="print the correlation factor mu(W)")
    p_mu.add_argument("--aperture", type=float, required=True, metavar="W")

    args = parser.parse_args(argv)

    if args.command == "mu":
        print(_fmt(correlation_mu(args.aperture)))
        return 0

    if args.command == "validate":
        with open(args.config, encoding="utf-8") as fh:
            specs = load_config(fh.read(), os.path.basename(args.config))
        violations = [(s.name, v) for s in specs for v in validate_spec(s)]
        for name, v in violations:
            print(f"{name}: {v}")
        if not violations:
            print("ok")
        return 1 if violations else 0

    if args.command == "run":
        with open(args.config, encoding="utf-8") as fh:
            specs = load_config(fh.read(), os.path.basename(args.config))
        return _run_specs(_apply_overrides(specs, args), args)

    # preset
    specs = load_preset(args.preset_name)
    return _run_specs(_apply_overrides(specs, args), args)


if __name__ == "__main__":
    sys.exit(main())

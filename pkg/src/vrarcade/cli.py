"""Experiment runner: scenario files, parameter sweeps, figure presets, CSV output."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .config import SCHEMES, ConfigError, Scenario, load_scenario, validate_config
from .engine import CSV_COLUMNS, TraceSink, results_row, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

WORKERS_ENV = "VRARCADE_WORKERS"

SWEEP_AXES = {
    "n_players": int,
    "cache_capacity": int,
    "action_intensity": float,
    "d_th": float,          # seconds, like the scenario file
}

# Figure-reproduction presets: the swept axis plus the fixed parameters of the
# corresponding experiment (4 APs and 8 edge servers throughout; fig4/fig5b use
# 16 players, fig5a uses 8).
PRESETS = {
    "fig3": {"axis": "n_players", "values": [4, 8, 12, 16],
             "schemes": list(SCHEMES), "fixed": {"n_aps": 4, "n_servers": 8}},
    "fig4": {"axis": "d_th", "values": [0.005, 0.010, 0.020, 0.040],
             "schemes": ["Proposed"], "fixed": {"n_aps": 4, "n_servers": 8, "n_players": 16}},
    "fig5a": {"axis": "cache_capacity", "values": [0, 8, 32, 128],
              "schemes": list(SCHEMES), "fixed": {"n_aps": 4, "n_servers": 8, "n_players": 8}},
    "fig5b": {"axis": "action_intensity", "values": [0.5, 1.0, 2.0, 4.0],
              "schemes": list(SCHEMES), "fixed": {"n_aps": 4, "n_servers": 8, "n_players": 16}},
}

TRACE_HEADERS = {
    "links": ["slot", "player", "ap", "blocked", "sinr_db", "rate_bps"],
    "compute": ["slot", "task_class", "player", "d_comp", "cache_hit", "invalidations"],
    "matching": ["slot", "user", "serving_aps", "slack_ms", "rate_bps"],
}


@dataclass(frozen=True)
class SweepSpec:
    """One swept axis with the schemes to run at every value."""

    axis: str
    values: list
    schemes: list[str]

    def __post_init__(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep axis: unknown axis {self.axis!r}; "
                              f"expected one of {', '.join(SWEEP_AXES)}")
        if not self.values:
            raise ConfigError("sweep values: must be non-empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("sweep values: must be strictly increasing")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"scheme: unknown scheme {s!r}; expected one of {', '.join(SCHEMES)}")


def parse_sweep(text: str) -> tuple[str, list]:
    if "=" not in text:
        raise ConfigError(f"sweep: expected AXIS=v1,v2,..., got {text!r}")
    axis, _, rest = text.partition("=")
    axis = axis.strip()
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep axis: unknown axis {axis!r}; expected one of {', '.join(SWEEP_AXES)}")
    cast = SWEEP_AXES[axis]
    try:
        values = [cast(v) for v in rest.split(",") if v.strip() != ""]
    except ValueError as e:
        raise ConfigError(f"sweep values: {e}") from e
    return axis, values


def apply_axis(scenario: Scenario, axis: str, value) -> Scenario:
    if axis == "d_th":
        return scenario.replace(latency={"d_th": value, "epsilon": scenario.epsilon})
    return scenario.replace(**{axis: value})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vrarcade",
                                description="Run arcade latency/reliability experiments and "
                                            "append one CSV row per (scheme, sweep point).")
    p.add_argument("--config", metavar="PATH", help="JSON scenario file (defaults used otherwise)")
    p.add_argument("--sweep", metavar="AXIS=v1,v2,...",
                   help=f"sweep one axis: {', '.join(SWEEP_AXES)}")
    p.add_argument("--schemes", metavar="LIST", help="comma-separated subset of " + ",".join(SCHEMES))
    p.add_argument("--out", metavar="PATH", default="results.csv", help="results CSV (appended)")
    p.add_argument("--seed", type=int, metavar="N", help="override the scenario seed")
    p.add_argument("--replications", type=int, metavar="N", help="override replication count")
    p.add_argument("--preset", choices=sorted(PRESETS), help="figure-reproduction preset")
    p.add_argument("--trace", choices=sorted(TRACE_HEADERS), action="append", default=[],
                   help="emit a per-slot trace of replication 0 for every run point")
    return p


def _open_sink(out: Path, scheme: str, axis: str, value, kinds: list[str]):
    files, writers = [], {}
    for kind in kinds:
        path = out.with_name(f"{out.stem}.trace_{kind}.{scheme}.{axis}{value}.csv")
        f = path.open("w", newline="", encoding="utf-8")
        w = csv.writer(f)
        w.writerow(TRACE_HEADERS[kind])
        files.append(f)
        writers[kind] = w
    sink = TraceSink(links=writers.get("links"), compute=writers.get("compute"),
                     matching=writers.get("matching"))
    return sink, files


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        base = load_scenario(args.config) if args.config else validate_config({})
        overrides = {}
        preset = PRESETS.get(args.preset) if args.preset else None
        if preset:
            overrides.update(preset["fixed"])
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.replications is not None:
            overrides["n_replications"] = args.replications
        if overrides:
            base = base.replace(**overrides)

        if args.sweep:
            axis, values = parse_sweep(args.sweep)
        elif preset:
            axis, values = preset["axis"], list(preset["values"])
        else:
            axis, values = None, [None]

        if args.schemes:
            schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
        elif preset:
            schemes = list(preset["schemes"])
        else:
            schemes = [base.scheme]
        spec = SweepSpec(axis=axis or "n_players", values=values if axis else [base.n_players],
                         schemes=schemes)
        if axis is None:
            spec = SweepSpec(axis="n_players", values=[base.n_players], schemes=schemes)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    workers = None
    env_workers = os.environ.get(WORKERS_ENV)
    if env_workers:
        try:
            workers = max(1, int(env_workers))
        except ValueError:
            print(f"error: {WORKERS_ENV} must be an integer, got {env_workers!r}", file=sys.stderr)
            return EXIT_CONFIG

    out = Path(args.out)
    try:
        rows, sidecar_runs = [], []
        for scheme in spec.schemes:
            for value in spec.values:
                scenario = base.replace(scheme=scheme)
                if axis is not None:
                    scenario = apply_axis(scenario, spec.axis, value)
                sink, files = (None, [])
                if args.trace:
                    sink, files = _open_sink(out, scheme, spec.axis if axis else "single",
                                             value if axis is not None else "", args.trace)
                try:
                    summary = run_experiment(scenario, max_workers=workers, sink=sink)
                finally:
                    for f in files:
                        f.close()
                rows.append(results_row(scenario, summary))
                sidecar_runs.append({"scheme": scheme, "axis": spec.axis if axis else None,
                                     "value": value, "config": scenario.to_resolved_dict()})
        _append_rows(out, rows)
        _append_sidecar(out, sidecar_runs)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: cannot write results: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as e:  # noqa: BLE001 - surface anything else as a runtime failure
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _append_rows(out: Path, rows: list[dict]) -> None:
    if out.parent and not out.parent.exists():
        raise OSError(f"output directory {out.parent} does not exist")
    new_file = not out.exists() or out.stat().st_size == 0
    with out.open("a", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        if new_file:
            writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _append_sidecar(out: Path, runs: list[dict]) -> None:
    sidecar = out.with_name(out.name + ".runs.json")
    existing = []
    if sidecar.exists():
        try:
            existing = json.loads(sidecar.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            existing = []
    existing.extend(runs)
    sidecar.write_text(json.dumps(existing, indent=2) + "\n", encoding="utf-8")


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

"""Benchmark CLI and trace I/O.

Subcommands: run (execute one adaptive run and write its trace),
fci (print the oracle energy), pool (list the operator pool),
sample (draw a determinant multiset from a saved ansatz), plot
(render convergence figures from existing traces).

Traces are JSONL by default, written append-only while the run is in
flight so an aborted run still leaves usable partial data; CSV is
available for spreadsheet work.  Both carry the same fixed column set,
and identical invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from .fock import ExcitationOperator, build_pool, hf_determinant
from .hamio import resolve_system, to_spin_orbitals
from .simcore import prepare_reference, sample_determinants
from .solver import (
    IterationRecord,
    RunAborted,
    RunConfig,
    fci_ground_energy,
    run_adaptive,
)

TRACE_COLUMNS = (
    "iteration",
    "method",
    "mode",
    "shots_per_eval",
    "energy_hartree",
    "error_vs_fci_hartree",
    "n_params",
    "n_cnots",
    "cumulative_shots",
    "selected_operator",
    "seed",
)

_INT_COLUMNS = {"iteration", "shots_per_eval", "n_params", "n_cnots", "cumulative_shots", "seed"}
_FLOAT_COLUMNS = {"energy_hartree", "error_vs_fci_hartree"}


def trace_row(rec: IterationRecord) -> dict:
    """IterationRecord -> ordered column dict (weights stay in-process)."""
    return {col: getattr(rec, col) for col in TRACE_COLUMNS}


def _jsonl_line(rec: IterationRecord) -> str:
    return json.dumps(trace_row(rec)) + "\n"


def emit_trace(records, format: str = "jsonl", sink=None) -> None:
    """Write one row per iteration; JSONL keys match the CSV columns."""
    if not records:
        raise ValueError("emit_trace needs at least one record")
    if sink is None:
        sink = sys.stdout
    if format == "jsonl":
        for rec in records:
            sink.write(_jsonl_line(rec))
    elif format == "csv":
        # fixed lineterminator so reruns are byte-identical across platforms
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for rec in records:
            writer.writerow([getattr(rec, col) for col in TRACE_COLUMNS])
    else:
        raise ValueError(f"unknown trace format {format!r}")


def _coerce(col: str, val: str):
    if col in _INT_COLUMNS:
        return int(val)
    if col in _FLOAT_COLUMNS:
        return float(val)
    return val


def parse_trace(source, format: str | None = None) -> list[IterationRecord]:
    """Inverse of emit_trace; accepts a string or a text stream.

    Format is sniffed from the first character when not given.  The
    in-process weights dict is not part of the interchange format, so
    parsed records carry an empty one.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    text = source.read()
    if not text.strip():
        return []
    if format is None:
        format = "jsonl" if text.lstrip()[0] == "{" else "csv"
    rows: list[dict] = []
    if format == "jsonl":
        for line in text.splitlines():
            if line.strip():
                rows.append(json.loads(line))
    elif format == "csv":
        reader = csv.DictReader(io.StringIO(text))
        for raw in reader:
            rows.append({col: _coerce(col, raw[col]) for col in TRACE_COLUMNS})
    else:
        raise ValueError(f"unknown trace format {format!r}")
    return [IterationRecord(**{col: row[col] for col in TRACE_COLUMNS}) for row in rows]


# ---------------------------------------------------------------------
# saved ansatz files (for the sample subcommand)
# ---------------------------------------------------------------------

def save_ansatz(path: str, system: str, ansatz) -> None:
    payload = {
        "system": system,
        "operators": [
            {"kind": el.op.kind, "occ_idx": list(el.op.occ_idx), "virt_idx": list(el.op.virt_idx)}
            for el in ansatz
        ],
        "thetas": [el.theta for el in ansatz],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_ansatz(path: str):
    """Returns (system spec, operator list, theta array)."""
    with open(path) as fh:
        payload = json.load(fh)
    mi = resolve_system(payload["system"])
    n_so = 2 * mi.n_orb
    ops = [
        ExcitationOperator(d["kind"], tuple(d["occ_idx"]), tuple(d["virt_idx"]), n_so)
        for d in payload["operators"]
    ]
    thetas = np.asarray(payload["thetas"], dtype=float)
    if len(thetas) != len(ops):
        raise ValueError(f"{path}: {len(ops)} operators but {len(thetas)} angles")
    return payload["system"], ops, thetas


# ---------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------

@dataclass
class BenchmarkSuite:
    """A grid of runs sharing FCI baselines per system."""

    configs: list[RunConfig]
    out_dir: str
    baselines: dict[str, float] = field(default_factory=dict)

    def baseline(self, system: str) -> float:
        if system not in self.baselines:
            mi = resolve_system(system)
            self.baselines[system] = fci_ground_energy(to_spin_orbitals(mi), mi.n_elec, mi.ms2)
        return self.baselines[system]


def run_suite(suite: BenchmarkSuite, format: str = "jsonl") -> dict[str, list[IterationRecord]]:
    """Execute every config, write one trace per run, return the records.

    Trace names encode method/mode/shots/seed.  Each run's implied
    baseline (energy minus error) is checked against the suite's shared
    per-system FCI value.
    """
    import os

    os.makedirs(suite.out_dir, exist_ok=True)
    results: dict[str, list[IterationRecord]] = {}
    for cfg in suite.configs:
        e_fci = suite.baseline(cfg.system)
        name = f"{cfg.method}_{cfg.mode}_S{cfg.shots}_seed{cfg.seed}"
        records = run_adaptive(cfg)
        for rec in records:
            drift = abs((rec.energy_hartree - rec.error_vs_fci_hartree) - e_fci)
            if drift > 1e-9:
                raise AssertionError(f"{name}: baseline drift {drift:.2e}")
        ext = "csv" if format == "csv" else "jsonl"
        with open(os.path.join(suite.out_dir, f"{name}.{ext}"), "w") as fh:
            emit_trace(records, format, fh)
        results[name] = records
    return results


# ---------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------

_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def _build_run_config(args) -> RunConfig:
    """Merge precedence: CLI flags > config file > RunConfig defaults."""
    merged: dict = {}
    if args.config:
        with open(args.config) as fh:
            file_vals = json.load(fh)
        unknown = set(file_vals) - _CONFIG_KEYS
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        merged.update(file_vals)
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    if "system" not in merged:
        raise ValueError("no system given (use --system or a config file)")
    return RunConfig(**merged)


def _out_format(args) -> str:
    if args.format:
        return args.format
    if args.out and args.out.endswith(".csv"):
        return "csv"
    return "jsonl"


def cmd_run(args) -> int:
    cfg = _build_run_config(args)
    fmt = _out_format(args)
    if args.plot and not args.out:
        raise ValueError("--plot needs --out to anchor the figure path")

    capture: dict = {}
    records: list[IterationRecord] = []
    aborted: RunAborted | None = None

    sink = open(args.out, "w") if args.out else sys.stdout
    weights_sink = open(args.weights_out, "w") if args.weights_out else None
    try:
        def on_record(rec):
            records.append(rec)
            if fmt == "jsonl":
                sink.write(_jsonl_line(rec))
                sink.flush()
            if weights_sink is not None:
                weights_sink.write(
                    json.dumps(
                        {
                            "iteration": rec.iteration,
                            "weights": {str(i): w for i, w in sorted(rec.weights.items())},
                        }
                    )
                    + "\n"
                )

        try:
            run_adaptive(cfg, on_record=on_record, capture=capture)
        except RunAborted as exc:
            aborted = exc
        if fmt == "csv" and records:
            emit_trace(records, "csv", sink)
    finally:
        if args.out:
            sink.close()
        if weights_sink is not None:
            weights_sink.close()

    if aborted is not None:
        print(f"error: run incomplete after {len(records)} iteration(s): {aborted.cause}", file=sys.stderr)
        return 1
    if not records:
        print("error: no operator cleared the selection threshold; empty trace", file=sys.stderr)
        return 1

    if args.save_ansatz:
        save_ansatz(args.save_ansatz, cfg.system, capture["ansatz"])
    if args.plot:
        from .plotting import convergence_figure

        fig_path = args.out.rsplit(".", 1)[0] + ".png"
        convergence_figure([records], fig_path, title=cfg.system)
        print(f"figure written to {fig_path}")

    last = records[-1]
    print(
        f"{cfg.method} {cfg.mode} on {cfg.system}: E = {last.energy_hartree:.12f} Ha, "
        f"|E - E_FCI| = {abs(last.error_vs_fci_hartree):.3e}, "
        f"{last.n_params} operators, {last.cumulative_shots} shots"
    )
    return 0


def cmd_fci(args) -> int:
    mi = resolve_system(args.system)
    e = fci_ground_energy(to_spin_orbitals(mi), mi.n_elec, mi.ms2)
    print(f"{e:.16f}")
    return 0


def cmd_pool(args) -> int:
    mi = resolve_system(args.system)
    n_so = 2 * mi.n_orb
    ref = hf_determinant(mi.n_elec, mi.ms2, n_so)
    pool = build_pool(ref, n_so)
    print(f"# reference {ref}, {len(pool.ops)} operators")
    for i, op in enumerate(pool.ops):
        print(f"{i:4d}  {op.kind:6s}  {op}")
    return 0


def cmd_sample(args) -> int:
    system, ops, thetas = load_ansatz(args.ansatz)
    mi = resolve_system(system)
    n_so = 2 * mi.n_orb
    state = prepare_reference(hf_determinant(mi.n_elec, mi.ms2, n_so), n_so)
    from .simcore import apply_qeb_evolution

    for op, th in zip(ops, thetas):
        state = apply_qeb_evolution(state, op, float(th))
    rng = np.random.default_rng(args.seed)
    sample = sample_determinants(state, args.shots, rng)
    # heaviest first; bit pattern breaks ties so output is reproducible
    for det, count in sorted(sample.items(), key=lambda kv: (-kv[1], kv[0].occ)):
        print(f"{count:8d}  {det}")
    return 0


def cmd_plot(args) -> int:
    from .plotting import convergence_figure

    trace_sets = []
    for path in args.traces:
        with open(path) as fh:
            records = parse_trace(fh)
        if records:
            trace_sets.append(records)
    if not trace_sets:
        raise ValueError("no non-empty traces given")
    convergence_figure(trace_sets, args.out, title=args.title)
    print(f"figure written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fastvqe",
        description="Adaptive VQE benchmark harness (ADAPT and sampling-based selection).",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one adaptive run and write its trace")
    run.add_argument("--system", help="FCIDUMP path, fixture name, or synth:SEED:NORB:NELEC")
    run.add_argument("--method", choices=["adapt", "fast-hg", "fast-hsci"])
    run.add_argument("--mode", choices=["statevector", "finite", "finite-shot"])
    run.add_argument("--shots", type=int, help="shots per expectation value / population sample")
    run.add_argument("--max-ops", type=int, dest="max_ops")
    run.add_argument("--epsilon", type=float, help="selection threshold")
    run.add_argument("--vqe-gtol", type=float, dest="vqe_gtol")
    run.add_argument("--vqe-maxiter", type=int, dest="vqe_maxiter")
    run.add_argument("--seed", type=int)
    run.add_argument("--config", help="JSON file with RunConfig fields (flags override)")
    run.add_argument("--out", help="trace path; stdout when omitted")
    run.add_argument("--format", choices=["jsonl", "csv"], help="default: by --out suffix, else jsonl")
    run.add_argument("--save-ansatz", dest="save_ansatz", help="write the final ansatz as JSON")
    run.add_argument("--weights-out", dest="weights_out", help="write per-iteration selection weights as JSONL")
    run.add_argument("--plot", action="store_true", help="render a convergence figure next to --out")
    run.set_defaults(fn=cmd_run)

    fci = sub.add_parser("fci", help="print the FCI ground-state energy in Hartree")
    fci.add_argument("--system", required=True)
    fci.set_defaults(fn=cmd_fci)

    pool = sub.add_parser("pool", help="print the spin-conserving excitation pool")
    pool.add_argument("--system", required=True)
    pool.set_defaults(fn=cmd_pool)

    sample = sub.add_parser("sample", help="sample determinants from a saved ansatz")
    sample.add_argument("--ansatz", required=True, help="JSON file from run --save-ansatz")
    sample.add_argument("--shots", type=int, default=1000)
    sample.add_argument("--seed", type=int, default=0)
    sample.set_defaults(fn=cmd_sample)

    plot = sub.add_parser("plot", help="render convergence figures from trace files")
    plot.add_argument("--traces", nargs="+", required=True)
    plot.add_argument("--out", required=True, help="figure path (png)")
    plot.add_argument("--title")
    plot.set_defaults(fn=cmd_plot)

    return p


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

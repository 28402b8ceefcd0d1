"""Command-line harness: dataset generation, trace replay, differential runs
against the set-semantics oracle, and throughput benchmarking.

Subcommands:
    gen    write a synthetic dataset plus store/infer traces
    run    replay a trace through the device and report per-record results
    diff   replay a trace (or a seeded fuzz stream) through device and oracle
           in lockstep; exit 2 on the first divergence
    bench  per-op wall-time sweep across storage sizes

Exit codes: 0 ok, 1 input or parse error, 2 divergence found.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .oracle import AbstractResponse, Oracle
from .preprocess import CommandKind, InputError, MacroCommand, PaddingMode
from .rtcam import LookupScope, MatchMode
from .sdr import Bits, LayoutError, SdrLayout, concat
from .state_machine import Outcome
from .system import DEFAULT_LAYOUT, NertcamConfig, Response, System
from .traces import (ParseError, TraceRecord, load_config, load_trace,
                     record_to_command)


# --- dataset generation ------------------------------------------------------

@dataclass
class Dataset:
    """Synthetic per-class sensory maps on a location grid.

    maps[(class_index, sample_index)] is a dict location -> feature. Within
    one (class, location) cell the samples carry distinct features, so every
    generated triplet is unique and a full store trace fills exactly
    classes * samples * grid_size entries.
    """

    layout: SdrLayout
    grid: tuple[int, int]
    classes: int
    samples: int
    feature_pool: int
    seed: int
    maps: dict[tuple[int, int], dict[int, int]] = field(default_factory=dict)

    def to_json(self) -> str:
        obj = {
            "layout": [self.layout.feature_bits, self.layout.location_bits,
                       self.layout.class_bits],
            "grid": list(self.grid),
            "classes": self.classes,
            "samples": self.samples,
            "feature_pool": self.feature_pool,
            "seed": self.seed,
            "maps": {
                f"{c}/{s}": {str(loc): feat for loc, feat in sorted(m.items())}
                for (c, s), m in sorted(self.maps.items())
            },
        }
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def generate_dataset(classes: int, grid: tuple[int, int], feature_pool: int,
                     samples: int, layout: SdrLayout, seed: int = 0) -> Dataset:
    rows, cols = grid
    locations = rows * cols
    if locations != layout.location_bits:
        raise ValueError(f"grid {rows}x{cols} does not cover "
                         f"{layout.location_bits} location bits")
    if feature_pool > layout.feature_bits:
        raise ValueError(f"feature pool {feature_pool} exceeds "
                         f"{layout.feature_bits} feature bits")
    if classes > layout.class_bits:
        raise ValueError(f"{classes} classes exceed {layout.class_bits} class bits")
    if not 1 <= samples <= feature_pool:
        raise ValueError(f"samples must be in [1, {feature_pool}], got {samples}")
    rng = random.Random(seed)
    ds = Dataset(layout, grid, classes, samples, feature_pool, seed)
    for c in range(classes):
        for s in range(samples):
            ds.maps[(c, s)] = {}
        for loc in range(locations):
            feats = rng.sample(range(feature_pool), samples)
            for s in range(samples):
                ds.maps[(c, s)][loc] = feats[s]
    return ds


def store_trace(ds: Dataset) -> list[TraceRecord]:
    out = []
    for (c, s) in sorted(ds.maps):
        for loc, feat in sorted(ds.maps[(c, s)].items()):
            out.append(TraceRecord(op="STORE", feature=feat, location=loc, class_=c))
    return out


def infer_trace(ds: Dataset, order: str = "sequential", seed: int = 0) -> list[TraceRecord]:
    """Per object: a RESET then one INFER per location, in the given order."""
    if order not in ("sequential", "random"):
        raise ValueError(f"order must be sequential or random, got {order!r}")
    rng = random.Random(seed)
    out = []
    for (c, s) in sorted(ds.maps):
        sensing = sorted(ds.maps[(c, s)])
        if order == "random":
            rng.shuffle(sensing)
        out.append(TraceRecord(op="RESET"))
        for loc in sensing:
            out.append(TraceRecord(op="INFER", feature=ds.maps[(c, s)][loc],
                                   location=loc))
    return out


# --- trace replay -------------------------------------------------------------

INPUT_ERROR = "INPUT_ERROR"


@dataclass
class ReplaySummary:
    records: int = 0
    total_cycles: int = 0
    identifications: int = 0
    sensations_to_one_hot: list[int] = field(default_factory=list)
    context_switches: int = 0
    errors: dict[str, int] = field(default_factory=dict)
    input_errors: int = 0

    def to_dict(self) -> dict:
        mean = (sum(self.sensations_to_one_hot) / len(self.sensations_to_one_hot)
                if self.sensations_to_one_hot else None)
        return {
            "records": self.records,
            "total_cycles": self.total_cycles,
            "identifications": self.identifications,
            "mean_sensations_to_one_hot": mean,
            "context_switches": self.context_switches,
            "errors": dict(sorted(self.errors.items())),
            "input_errors": self.input_errors,
        }


def _record_report(seq: int, rec: TraceRecord, resp: Response | None,
                   outcome: str) -> dict:
    rep: dict[str, object] = {"seq": seq, "op": rec.op}
    for name, value in (("feature", rec.feature), ("feature_bits", rec.feature_bits),
                        ("location", rec.location), ("class", rec.class_)):
        if value is not None:
            rep[name] = value
    if rec.padding:
        rep["padding"] = rec.padding
    rep["outcome"] = outcome
    if resp is not None:
        rep["classes"] = list(resp.classes.hot_positions or
                              resp.prediction.classes.hot_positions)
        rep["features"] = list(resp.prediction.features.hot_positions)
        rep["locations"] = list(resp.prediction.locations.hot_positions)
        rep["cycles"] = resp.cycles
        rep["full"] = resp.full
    return rep


def replay_records(system: System, records: list[TraceRecord],
                   emit=None, trace_cycles: bool = False) -> tuple[list[dict], ReplaySummary]:
    """Replay a trace; input errors are reported per record and do not stop the run.

    Identification accounting: sensations count INFERs since the current
    identification began; an identification completes at the first one-hot
    class output. Context switches start a new identification at that same
    sensation; stores, deletes, resets, clears and failed infers start a
    fresh cycle at zero.
    """
    summary = ReplaySummary()
    sensations = 0
    identified = False
    reports = []
    for seq, rec in enumerate(records):
        summary.records += 1
        try:
            cmd = record_to_command(rec, system.layout)
            if trace_cycles:
                system.submit(cmd)
                while system.busy:
                    t = system.step()
                    if emit and t:
                        emit(json.dumps({
                            "cycle": t.cycle, "from": t.state_from.value,
                            "to": t.state_to.value, "micro_op": t.micro_op,
                            "valid_entry": t.valid_entry,
                            "outcome": t.outcome.value if t.outcome else None,
                        }, sort_keys=True, separators=(",", ":")))
                resp = system.response
            else:
                resp = system.run(cmd)
        except (InputError, ParseError, LayoutError) as exc:
            summary.input_errors += 1
            rep = _record_report(seq, rec, None, INPUT_ERROR)
            rep["detail"] = str(exc)
            reports.append(rep)
            if emit:
                emit(json.dumps(rep, sort_keys=True, separators=(",", ":")))
            continue
        summary.total_cycles += resp.cycles
        if resp.error:
            summary.errors[resp.outcome.value] = summary.errors.get(resp.outcome.value, 0) + 1
        kind = CommandKind(rec.op)
        if kind is CommandKind.INFER:
            sensations += 1
            if resp.outcome is Outcome.CONTEXT_SWITCH:
                summary.context_switches += 1
                sensations = 1
                identified = False
            if resp.outcome in (Outcome.SUCCESS, Outcome.CONTEXT_SWITCH):
                if resp.classes.popcount == 1 and not identified:
                    summary.identifications += 1
                    summary.sensations_to_one_hot.append(sensations)
                    identified = True
            else:
                sensations = 0
                identified = False
        elif kind is not CommandKind.PREDICT_FEATURE and kind is not CommandKind.PREDICT_LOCATION:
            sensations = 0
            identified = False
        rep = _record_report(seq, rec, resp, resp.outcome.value)
        reports.append(rep)
        if emit:
            emit(json.dumps(rep, sort_keys=True, separators=(",", ":")))
    return reports, summary


# --- differential runs ---------------------------------------------------------

@dataclass(frozen=True)
class Divergence:
    seq: int
    record: TraceRecord
    fields: tuple[str, ...]
    system_value: str
    oracle_value: str


def _compare(kind: CommandKind, resp: Response, abst: AbstractResponse) -> list[str]:
    bad = []
    if resp.outcome is not abst.outcome:
        bad.append("outcome")
    if kind is CommandKind.INFER:
        sys_classes = set(resp.classes.hot_positions)
    else:
        sys_classes = set(resp.prediction.classes.hot_positions)
    if sys_classes != set(abst.classes):
        bad.append("classes")
    if set(resp.prediction.features.hot_positions) != set(abst.features):
        bad.append("features")
    if set(resp.prediction.locations.hot_positions) != set(abst.locations):
        bad.append("locations")
    if resp.full != abst.full:
        bad.append("full")
    return bad


def _valid_bits_mirror_oracle(system: System, oracle: Oracle) -> bool:
    """At macro-op boundaries the device's per-row valid bits must be exactly
    the indicator of that row's class being in the oracle's valid set."""
    layout = system.layout
    for e in system.memory.entries:
        if e.empty:
            continue
        klass = layout.split(e.sdr)[2].hot_positions[0]
        if e.valid != (klass in oracle.valid):
            return False
    return True


def diff_records(system: System, oracle: Oracle,
                 records: list[TraceRecord]) -> Divergence | None:
    """Run both models in lockstep; return the first divergence, if any."""
    for seq, rec in enumerate(records):
        try:
            cmd = record_to_command(rec, system.layout)
            resp = system.run(cmd)
        except (InputError, ParseError, LayoutError):
            continue  # oracle only models validated commands
        abst = oracle.apply(cmd)
        bad = _compare(cmd.kind, resp, abst)
        if not _valid_bits_mirror_oracle(system, oracle):
            bad.append("valid_bits")
        if bad:
            sys_view = (f"outcome={resp.outcome.value} "
                        f"classes={sorted(resp.classes.hot_positions) or sorted(resp.prediction.classes.hot_positions)} "
                        f"features={sorted(resp.prediction.features.hot_positions)} "
                        f"locations={sorted(resp.prediction.locations.hot_positions)} "
                        f"full={resp.full}")
            ora_view = (f"outcome={abst.outcome.value} classes={sorted(abst.classes)} "
                        f"features={sorted(abst.features)} "
                        f"locations={sorted(abst.locations)} full={abst.full}")
            return Divergence(seq, rec, tuple(bad), sys_view, ora_view)
    return None


_FUZZ_OPS = (
    (CommandKind.STORE, 22),
    (CommandKind.DELETE, 12),
    (CommandKind.INFER, 33),
    (CommandKind.PREDICT_FEATURE, 10),
    (CommandKind.PREDICT_LOCATION, 10),
    (CommandKind.RESET, 10),
    (CommandKind.CLEAR, 3),
)


def fuzz_records(layout: SdrLayout, count: int, seed: int = 0,
                 khot_features: bool = False, max_padding: int = 0) -> list[TraceRecord]:
    """Seeded stream of well-formed random commands."""
    rng = random.Random(seed)
    kinds = [k for k, w in _FUZZ_OPS for _ in range(w)]
    out = []
    for _ in range(count):
        kind = rng.choice(kinds)
        feature = feature_bits = location = class_ = None
        padding = 0
        if kind in (CommandKind.STORE, CommandKind.DELETE, CommandKind.INFER,
                    CommandKind.PREDICT_LOCATION):
            if khot_features:
                value = rng.randrange(1, 1 << layout.feature_bits)
                feature_bits = format(value, f"0{layout.feature_bits}b")
            else:
                feature = rng.randrange(layout.feature_bits)
        if kind in (CommandKind.STORE, CommandKind.DELETE, CommandKind.INFER,
                    CommandKind.PREDICT_FEATURE):
            location = rng.randrange(layout.location_bits)
        if kind in (CommandKind.STORE, CommandKind.DELETE):
            class_ = rng.randrange(layout.class_bits)
        if kind is CommandKind.PREDICT_FEATURE and max_padding:
            padding = rng.randrange(max_padding + 1)
        out.append(TraceRecord(op=kind.value, feature=feature, feature_bits=feature_bits,
                               location=location, class_=class_, padding=padding))
    return out


def oracle_for(config: NertcamConfig) -> Oracle:
    grid = ((config.padding_mode.rows, config.padding_mode.cols)
            if config.padding_mode.is_grid else None)
    return Oracle(config.layout.feature_bits, config.layout.location_bits,
                  config.layout.class_bits, config.capacity, grid=grid)


# --- benchmarking ---------------------------------------------------------------

def run_bench(layout: SdrLayout, entries_list: list[int], iterations: int,
              seed: int = 0) -> list[dict]:
    """Per-op mean wall time for each storage size.

    The lookup row times the raw array scan (a full-width exact search that
    touches every row); store/infer/predict rows time whole commands through
    the device, cycles included.
    """
    results = []
    for n in entries_list:
        combos = layout.feature_bits * layout.location_bits * layout.class_bits
        if n > combos:
            raise ValueError(f"cannot fill {n} entries: layout has {combos} triplets")
        rng = random.Random(seed)
        config = NertcamConfig(layout=layout, capacity=n)
        system = System(config)
        triplets = []
        seen = set()
        while len(triplets) < n:
            t = (rng.randrange(layout.feature_bits), rng.randrange(layout.location_bits),
                 rng.randrange(layout.class_bits))
            if t not in seen:
                seen.add(t)
                triplets.append(t)

        def _cmd(kind: CommandKind, f=None, l=None, c=None, padding=0) -> MacroCommand:
            sections = concat(
                Bits.one_hot(layout.feature_bits, f) if f is not None
                else Bits.zeros(layout.feature_bits),
                Bits.one_hot(layout.location_bits, l) if l is not None
                else Bits.zeros(layout.location_bits),
                Bits.one_hot(layout.class_bits, c) if c is not None
                else Bits.zeros(layout.class_bits))
            return MacroCommand(kind, sections, padding=padding)

        t0 = time.perf_counter()
        for f, l, c in triplets:
            system.run(_cmd(CommandKind.STORE, f, l, c))
        store_s = time.perf_counter() - t0
        results.append({"entries": n, "op": "store", "iterations": len(triplets),
                        "mean_us": store_s / len(triplets) * 1e6,
                        "ops_per_s": len(triplets) / store_s})

        probe = concat(Bits.one_hot(layout.feature_bits, triplets[0][0]),
                       Bits.one_hot(layout.location_bits, triplets[0][1]),
                       Bits.one_hot(layout.class_bits, triplets[0][2]))
        dc = Bits.zeros(layout.total)
        t0 = time.perf_counter()
        for _ in range(iterations):
            system.memory.micro_lookup(probe, dc, LookupScope.ALL, MatchMode.EQUALITY)
        lookup_s = time.perf_counter() - t0
        system.memory.micro_reset()
        results.append({"entries": n, "op": "lookup", "iterations": iterations,
                        "mean_us": lookup_s / iterations * 1e6,
                        "ops_per_s": iterations / lookup_s})

        infer_s = 0.0
        for i in range(iterations):
            f, l, c = triplets[i % len(triplets)]
            cmd = _cmd(CommandKind.INFER, f, l)
            t0 = time.perf_counter()
            system.run(cmd)
            infer_s += time.perf_counter() - t0
            system.run(_cmd(CommandKind.RESET))
        results.append({"entries": n, "op": "infer_hit", "iterations": iterations,
                        "mean_us": infer_s / iterations * 1e6,
                        "ops_per_s": iterations / infer_s})

        t0 = time.perf_counter()
        for i in range(iterations):
            system.run(_cmd(CommandKind.PREDICT_FEATURE, l=triplets[i % len(triplets)][1]))
        predict_s = time.perf_counter() - t0
        results.append({"entries": n, "op": "predict_feature", "iterations": iterations,
                        "mean_us": predict_s / iterations * 1e6,
                        "ops_per_s": iterations / predict_s})
    return results


# --- argument plumbing -----------------------------------------------------------

def _parse_ints(text: str, n: int, what: str) -> tuple[int, ...]:
    parts = text.split(",")
    if len(parts) != n or not all(p.strip().lstrip("-").isdigit() for p in parts):
        raise argparse.ArgumentTypeError(f"{what} must be {n} comma-separated integers")
    return tuple(int(p) for p in parts)


def build_config(args: argparse.Namespace) -> NertcamConfig:
    """Config file first, then flag overrides."""
    if getattr(args, "config", None):
        config = load_config(args.config)
        layout, capacity = config.layout, config.capacity
        mode, khot = config.padding_mode, config.khot_features
    else:
        layout, capacity = DEFAULT_LAYOUT, 1024
        mode, khot = PaddingMode.linear(), False
    if getattr(args, "layout", None):
        f, l, c = _parse_ints(args.layout, 3, "--layout")
        layout = SdrLayout(f, l, c)
    if getattr(args, "entries", None):
        capacity = args.entries
    if getattr(args, "grid", None):
        r, c = _parse_ints(args.grid, 2, "--grid")
        mode = PaddingMode.grid(r, c)
    if getattr(args, "khot", False):
        khot = True
    config = NertcamConfig(layout=layout, capacity=capacity, padding_mode=mode,
                           khot_features=khot)
    config.validate()
    return config


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--layout", metavar="F,L,C", help="section widths override")
    p.add_argument("--entries", type=int, help="storage capacity override")
    p.add_argument("--grid", metavar="R,C", help="2-D location grid for padding")
    p.add_argument("--khot", action="store_true", help="accept k-hot feature sections")


def cmd_gen(args: argparse.Namespace) -> int:
    f, l, c = _parse_ints(args.layout, 3, "--layout") if args.layout else (128, 25, 10)
    layout = SdrLayout(f, l, c)
    rows, cols = _parse_ints(args.grid, 2, "--grid") if args.grid else (5, 5)
    ds = generate_dataset(args.classes, (rows, cols), args.features, args.samples,
                          layout, seed=args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "dataset.json").write_text(ds.to_json())
    (out / "store.trace").write_text(
        "".join(r.to_json() + "\n" for r in store_trace(ds)))
    (out / "infer.trace").write_text(
        "".join(r.to_json() + "\n" for r in infer_trace(ds, args.order, args.seed)))
    print(f"wrote dataset.json, store.trace, infer.trace to {out}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config = build_config(args)
    records = [r for path in args.trace for r in load_trace(path)]
    system = System(config)
    _, summary = replay_records(system, records, emit=print,
                                trace_cycles=args.trace_cycles)
    print(json.dumps({"summary": summary.to_dict()}, sort_keys=True,
                     separators=(",", ":")))
    return 1 if summary.input_errors else 0


def cmd_diff(args: argparse.Namespace) -> int:
    config = build_config(args)
    if args.trace:
        records = [r for path in args.trace for r in load_trace(path)]
    else:
        records = fuzz_records(config.layout, args.ops, seed=args.seed,
                               khot_features=config.khot_features,
                               max_padding=args.max_padding)
    system = System(config)
    oracle = oracle_for(config)
    div = diff_records(system, oracle, records)
    if div is None:
        print(json.dumps({"divergences": 0, "records": len(records)}))
        return 0
    print(json.dumps({
        "divergences": 1, "seq": div.seq, "record": json.loads(div.record.to_json()),
        "fields": list(div.fields), "system": div.system_value,
        "oracle": div.oracle_value,
    }, sort_keys=True))
    return 2


def cmd_bench(args: argparse.Namespace) -> int:
    f, l, c = _parse_ints(args.layout, 3, "--layout") if args.layout else (128, 25, 10)
    layout = SdrLayout(f, l, c)
    entries = ([int(x) for x in args.entries.split(",")] if args.entries
               else [64, 128, 256, 512, 1024])
    if args.iterations < 1:
        print(json.dumps({"results": []}))
        return 0
    for row in run_bench(layout, entries, args.iterations, seed=args.seed):
        print(json.dumps(row, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nertcam",
        description="Reverse-ternary CAM reference-frame memory model")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset and traces")
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--features", type=int, default=128, help="feature pool size")
    p.add_argument("--samples", type=int, default=1, help="samples per class")
    p.add_argument("--order", choices=("sequential", "random"), default="sequential")
    p.add_argument("--layout", metavar="F,L,C")
    p.add_argument("--grid", metavar="R,C")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="replay a trace and report results")
    _add_config_flags(p)
    p.add_argument("--trace", required=True, action="append",
                   help="trace file; repeat to replay several in order")
    p.add_argument("--trace-cycles", action="store_true",
                   help="emit one record per clock cycle")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("diff", help="lockstep device-vs-oracle comparison")
    _add_config_flags(p)
    p.add_argument("--trace", action="append",
                   help="trace file; repeat to replay several (omit to fuzz)")
    p.add_argument("--ops", type=int, default=10000, help="fuzz command count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-padding", type=int, default=0)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("bench", help="per-op timing across storage sizes")
    p.add_argument("--layout", metavar="F,L,C")
    p.add_argument("--entries", help="comma-separated capacities")
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, InputError, LayoutError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

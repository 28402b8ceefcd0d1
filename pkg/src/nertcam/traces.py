"""Line-delimited trace, config, and report formats for the CLI harness.

Traces are JSON objects, one per line. Sections are given as hot-bit
indices (the readable form for one-hot data); a k-hot feature section may
be given as a bit string under "feature_bits". Examples:

    {"op": "STORE", "feature": 5, "location": 12, "class": 3}
    {"op": "INFER", "feature": 5, "location": 12}
    {"op": "PREDICT_FEATURE", "location": 12, "padding": 1}
    {"op": "PREDICT_LOCATION", "feature": 5}
    {"op": "RESET"}

Config files are a single JSON object with the device parameters; CLI flags
override file values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .preprocess import CommandKind, MacroCommand, PaddingMode
from .sdr import Bits, LayoutError, SdrLayout, concat
from .system import ConfigError, DEFAULT_LAYOUT, NertcamConfig


class ParseError(ValueError):
    """Bad trace or config input; message carries the line number."""


_OPTIONAL_FIELDS = {"feature", "feature_bits", "location", "class", "padding"}


@dataclass(frozen=True)
class TraceRecord:
    """One replayable command with index-encoded sections."""

    op: str
    feature: int | None = None
    feature_bits: str | None = None
    location: int | None = None
    class_: int | None = None
    padding: int = 0
    line: int = 0

    def to_json(self) -> str:
        obj: dict[str, object] = {"op": self.op}
        if self.feature is not None:
            obj["feature"] = self.feature
        if self.feature_bits is not None:
            obj["feature_bits"] = self.feature_bits
        if self.location is not None:
            obj["location"] = self.location
        if self.class_ is not None:
            obj["class"] = self.class_
        if self.padding:
            obj["padding"] = self.padding
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def parse_record(text: str, line: int = 0) -> TraceRecord:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {line}: not valid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict) or "op" not in obj:
        raise ParseError(f"line {line}: each record needs an 'op' field")
    op = obj["op"]
    if op not in CommandKind._value2member_map_:
        raise ParseError(f"line {line}: unknown op {op!r}")
    unknown = set(obj) - _OPTIONAL_FIELDS - {"op"}
    if unknown:
        raise ParseError(f"line {line}: unknown fields {sorted(unknown)}")

    def _index(name: str) -> int | None:
        v = obj.get(name)
        if v is None:
            return None
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ParseError(f"line {line}: {name} must be a non-negative integer")
        return v

    fb = obj.get("feature_bits")
    if fb is not None and (not isinstance(fb, str) or set(fb) - {"0", "1"}):
        raise ParseError(f"line {line}: feature_bits must be a 0/1 string")
    return TraceRecord(op=op, feature=_index("feature"), feature_bits=fb,
                       location=_index("location"), class_=_index("class"),
                       padding=_index("padding") or 0, line=line)


def parse_trace(lines: Iterable[str]) -> Iterator[TraceRecord]:
    for n, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        yield parse_record(text, line=n)


def load_trace(path: str | Path) -> list[TraceRecord]:
    with open(path) as fh:
        return list(parse_trace(fh))


def record_to_command(rec: TraceRecord, layout: SdrLayout) -> MacroCommand:
    """Build the full-width command SDR from a record's indices."""

    def _one_hot(width: int, index: int | None, name: str) -> Bits:
        if index is None:
            return Bits.zeros(width)
        if index >= width:
            raise ParseError(f"line {rec.line}: {name} index {index} "
                             f"outside width {width}")
        return Bits.one_hot(width, index)

    if rec.feature_bits is not None:
        if rec.feature is not None:
            raise ParseError(f"line {rec.line}: give feature or feature_bits, not both")
        try:
            feature = Bits.parse(rec.feature_bits, width=layout.feature_bits)
        except LayoutError as exc:
            raise ParseError(f"line {rec.line}: {exc}") from exc
    else:
        feature = _one_hot(layout.feature_bits, rec.feature, "feature")
    location = _one_hot(layout.location_bits, rec.location, "location")
    class_ = _one_hot(layout.class_bits, rec.class_, "class")
    return MacroCommand(CommandKind(rec.op), concat(feature, location, class_),
                        padding=rec.padding)


# --- config files ----------------------------------------------------------

def config_to_json(config: NertcamConfig) -> str:
    obj = {
        "feature_bits": config.layout.feature_bits,
        "location_bits": config.layout.location_bits,
        "class_bits": config.layout.class_bits,
        "entries": config.capacity,
        "khot_features": config.khot_features,
    }
    if config.padding_mode.is_grid:
        obj["grid"] = [config.padding_mode.rows, config.padding_mode.cols]
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def config_from_json(text: str) -> NertcamConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config is not valid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise ParseError("config must be a JSON object")
    known = {"feature_bits", "location_bits", "class_bits", "entries",
             "grid", "khot_features"}
    unknown = set(obj) - known
    if unknown:
        raise ParseError(f"unknown config fields {sorted(unknown)}")
    layout = SdrLayout(
        feature_bits=int(obj.get("feature_bits", DEFAULT_LAYOUT.feature_bits)),
        location_bits=int(obj.get("location_bits", DEFAULT_LAYOUT.location_bits)),
        class_bits=int(obj.get("class_bits", DEFAULT_LAYOUT.class_bits)),
    )
    grid = obj.get("grid")
    if grid is not None:
        if (not isinstance(grid, list) or len(grid) != 2
                or not all(isinstance(g, int) for g in grid)):
            raise ParseError("grid must be a two-element integer list [rows, cols]")
        mode = PaddingMode.grid(grid[0], grid[1])
    else:
        mode = PaddingMode.linear()
    config = NertcamConfig(layout=layout, capacity=int(obj.get("entries", 1024)),
                           padding_mode=mode,
                           khot_features=bool(obj.get("khot_features", False)))
    try:
        config.validate()
    except ConfigError as exc:
        raise ParseError(str(exc)) from exc
    return config


def load_config(path: str | Path) -> NertcamConfig:
    return config_from_json(Path(path).read_text())

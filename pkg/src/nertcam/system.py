"""Top-level device model: preprocess -> memory -> controller -> prediction map.

One System instance is one logical device. Commands are submitted while the
device is idle; each step() call advances exactly one clock cycle. The
preprocess and prediction-map blocks are combinational and consume no
cycles; only controller transitions do. run() is the submit-then-step-
until-idle convenience and returns the same Response a manual step loop
would observe.
"""

from __future__ import annotations

from dataclasses import dataclass

from .preprocess import (LINEAR_1D, MacroCommand, PaddingMode, build_dc,
                         validate_command)
from .prediction_map import PredictionOutput, condense, empty_output
from .rtcam import MemoryArray
from .sdr import Bits, SdrLayout
from .state_machine import (Controller, CycleTrace, ERROR_OUTCOMES, Outcome,
                            StatusOut)

#: Section widths used for the benchmark-scale configuration (165-bit rows
#: once the valid and empty bits are counted).
DEFAULT_LAYOUT = SdrLayout(feature_bits=128, location_bits=25, class_bits=10)


class ConfigError(ValueError):
    """Invalid device configuration."""


class BusyError(RuntimeError):
    """run() was called while a command is still in flight."""


@dataclass(frozen=True)
class NertcamConfig:
    layout: SdrLayout
    capacity: int
    padding_mode: PaddingMode = LINEAR_1D
    khot_features: bool = False

    def validate(self) -> None:
        if self.capacity < 1:
            raise ConfigError(f"capacity must be >= 1, got {self.capacity}")
        pm = self.padding_mode
        if pm.is_grid and pm.rows * pm.cols != self.layout.location_bits:
            raise ConfigError(
                f"grid {pm.rows}x{pm.cols} does not cover "
                f"{self.layout.location_bits} location bits")


@dataclass(frozen=True)
class Response:
    """Per-command result: status, k-hot outputs, and the cycle count."""

    status: StatusOut
    classes: Bits                 # k-hot valid classes (INFER paths)
    prediction: PredictionOutput  # k-hot outputs (PREDICT paths)
    cycles: int

    @property
    def outcome(self) -> Outcome:
        return self.status.outcome

    @property
    def error(self) -> bool:
        return self.status.error

    @property
    def full(self) -> bool:
        return self.status.full


@dataclass(frozen=True)
class SystemStatus:
    busy: bool
    full: bool
    last_outcome: Outcome | None
    occupancy: int


class System:
    """The device facade: submit/step/run plus status and memory images."""

    def __init__(self, config: NertcamConfig):
        config.validate()
        self.config = config
        self.memory = MemoryArray(config.layout, config.capacity)
        self.controller = Controller(self.memory)
        self.total_cycles = 0
        self.response: Response | None = None

    @property
    def layout(self) -> SdrLayout:
        return self.config.layout

    @property
    def busy(self) -> bool:
        return self.controller.busy

    def submit(self, cmd: MacroCommand) -> bool:
        """Validate, build the DC mask, and arm the controller.

        Returns False (and changes nothing) when the device is busy. Raises
        InputError / LayoutError for malformed commands; nothing is armed
        in that case either.
        """
        validate_command(cmd, self.layout, self.config.khot_features)
        dc = build_dc(cmd, self.layout, self.config.padding_mode)
        accepted = self.controller.accept(cmd.kind, cmd.sdr, dc)
        if accepted:
            self.response = None
        return accepted

    def step(self) -> CycleTrace | None:
        """Advance one clock cycle; returns None when idle."""
        trace = self.controller.step()
        if trace is None:
            return None
        self.total_cycles += 1
        done = self.controller.completion
        if done is not None:
            status = StatusOut(done.outcome, done.outcome in ERROR_OUTCOMES,
                               self.memory.full)
            prediction = condense(done.matched, done.kind, self.layout)
            self.response = Response(status, done.classes, prediction, done.cycles)
            self.controller.completion = None
        return trace

    def run(self, cmd: MacroCommand) -> Response:
        """submit() followed by step() until idle; returns the Response."""
        if self.busy:
            raise BusyError("run() requires an idle device")
        self.submit(cmd)
        while self.busy:
            self.step()
        assert self.response is not None
        return self.response

    def status(self) -> SystemStatus:
        last = self.response.outcome if self.response else None
        return SystemStatus(self.busy, self.memory.full, last, self.memory.occupancy)

    # --- memory images -----------------------------------------------------

    def save_image(self) -> str:
        return self.memory.to_image()

    def load_image(self, text: str) -> None:
        """Replace memory contents from an image; capacity must match."""
        mem = MemoryArray.from_image(text, self.layout)
        if mem.capacity != self.config.capacity:
            raise ConfigError(
                f"image has {mem.capacity} rows, device capacity is {self.config.capacity}")
        self.memory = mem
        self.controller = Controller(self.memory)
        self.response = None


def rejected_busy_response(layout: SdrLayout, full: bool) -> Response:
    """Response used by replay harnesses when a command is refused while busy."""
    status = StatusOut(Outcome.REJECTED_BUSY, False, full, busy=True)
    return Response(status, Bits.zeros(layout.class_bits), empty_output(layout), 0)

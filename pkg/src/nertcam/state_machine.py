"""Mealy controller sequencing macro commands into per-cycle micro-ops.

Four states; the starting state is the only one that accepts new commands
(the device is busy everywhere else). Every transition executes exactly one
micro-op, and the lookup result (V = some row matched, NV = none) picks the
branch taken on the next cycle:

    state  command            micro-op                 next   result
    -----  -----------------  -----------------------  -----  --------------------
    SS     CLEAR              clear                    SS     Success (1 cycle)
    SS     RESET              reset                    SS     Success (1 cycle)
    SS     PREDICT_F / _L     lookup (non-destructive) SS     Success (1 cycle)
    SS     STORE / DELETE     lookup, all rows, exact  FL
    SS     INFER              lookup, valid rows       FL
    FL     STORE        V     reset                    SS     Store_Failed (2)
    FL     STORE        NV    store                    IR
    FL     DELETE       V     delete                   IR
    FL     DELETE       NV    reset                    SS     Delete_Failed (2)
    FL     INFER        V     validate                 SS     Success (2)
    FL     INFER        NV    reset                    IR
    IR     STORE / DELETE     reset                    SS     Success (3), or
                                                              Store_Failed + full
    IR     INFER              lookup (all rows valid)  SL
    SL     INFER        V     validate                 SS     Context_Switch (4)
    SL     INFER        NV    reset                    SS     Infer_Failed (4)

The store micro-op can find no empty row; that is detected on cycle 2 and
reported on cycle 3 with the full flag asserted, keeping the success-path
length. PREDICT's lookup restores the valid bits within its single cycle so
a prediction never disturbs an identification in progress.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .preprocess import CommandKind
from .rtcam import Entry, LookupScope, MatchMode, MemoryArray
from .sdr import Bits


class ControllerState(Enum):
    SS = "SS"   # starting state, accepts commands
    FL = "FL"   # first lookup issued
    IR = "IR"   # internal reset / store / delete bookkeeping
    SL = "SL"   # second lookup (context-switch probe)


class Outcome(str, Enum):
    SUCCESS = "SUCCESS"
    STORE_FAILED = "STORE_FAILED"
    DELETE_FAILED = "DELETE_FAILED"
    INFER_FAILED = "INFER_FAILED"
    CONTEXT_SWITCH = "CONTEXT_SWITCH"
    REJECTED_BUSY = "REJECTED_BUSY"


#: Outcomes that assert the error status bit.
ERROR_OUTCOMES = frozenset(
    {Outcome.STORE_FAILED, Outcome.DELETE_FAILED, Outcome.INFER_FAILED}
)


@dataclass(frozen=True)
class StatusOut:
    """Status signals reported back to the agent for one command."""

    outcome: Outcome
    error: bool
    full: bool
    busy: bool = False


@dataclass(frozen=True)
class CycleTrace:
    """One clock cycle of controller activity, for trace output."""

    cycle: int
    state_from: ControllerState
    state_to: ControllerState
    micro_op: str
    valid_entry: bool
    outcome: Outcome | None


@dataclass
class Completion:
    """Result of a finished command, consumed by the system facade."""

    kind: CommandKind
    outcome: Outcome
    cycles: int
    classes: Bits
    matched: list[Entry] = field(default_factory=list)


@dataclass
class _Pending:
    kind: CommandKind
    query: Bits
    dc: Bits
    cycles: int = 0
    store_full: bool = False


class Controller:
    """Owns the memory for the duration of a command; one transition per step."""

    def __init__(self, memory: MemoryArray):
        self.memory = memory
        self.state = ControllerState.SS
        self.cycle_count = 0
        self._pending: _Pending | None = None
        self.completion: Completion | None = None

    @property
    def busy(self) -> bool:
        return self._pending is not None or self.state is not ControllerState.SS

    def accept(self, kind: CommandKind, query: Bits, dc: Bits) -> bool:
        """Arm a command. Rejected (no effect at all) unless idle in SS."""
        if self.busy:
            return False
        self._pending = _Pending(kind, query, dc)
        self.completion = None
        return True

    def step(self) -> CycleTrace | None:
        """Advance one clock cycle; no-op when idle."""
        p = self._pending
        if p is None:
            return None
        before = self.state
        self.cycle_count += 1
        p.cycles += 1
        mem = self.memory
        if before is ControllerState.SS:
            micro = self._step_ss(p)
        elif before is ControllerState.FL:
            micro = self._step_fl(p)
        elif before is ControllerState.IR:
            micro = self._step_ir(p)
        else:
            micro = self._step_sl(p)
        outcome = self.completion.outcome if self.completion else None
        return CycleTrace(self.cycle_count, before, self.state, micro,
                          mem.valid_entry, outcome)

    # --- per-state actions -------------------------------------------------

    def _step_ss(self, p: _Pending) -> str:
        kind = p.kind
        mem = self.memory
        if kind is CommandKind.CLEAR:
            mem.micro_clear()
            self._finish(p, Outcome.SUCCESS)
            return "clear"
        if kind is CommandKind.RESET:
            mem.micro_reset()
            self._finish(p, Outcome.SUCCESS)
            return "reset"
        if kind in (CommandKind.PREDICT_FEATURE, CommandKind.PREDICT_LOCATION):
            saved = mem.snapshot_valid()
            mem.micro_lookup(p.query, p.dc, LookupScope.VALID_ONLY, MatchMode.EQUALITY)
            matched = mem.matched_rows()
            mem.restore_valid(saved)
            self._finish(p, Outcome.SUCCESS, matched=matched)
            return "lookup"
        if kind in (CommandKind.STORE, CommandKind.DELETE):
            # duplicate / target search: exact match over every row
            mem.micro_lookup(p.query, p.dc, LookupScope.ALL, MatchMode.EQUALITY)
        else:  # INFER narrows within the currently valid rows
            mem.micro_lookup(p.query, p.dc, LookupScope.VALID_ONLY, MatchMode.EQUALITY)
        self.state = ControllerState.FL
        return "lookup"

    def _step_fl(self, p: _Pending) -> str:
        mem = self.memory
        hit = mem.valid_entry
        if p.kind is CommandKind.STORE:
            if hit:
                mem.micro_reset()
                self._finish(p, Outcome.STORE_FAILED)
                return "reset"
            p.store_full = mem.micro_store(p.query) is None
            self.state = ControllerState.IR
            return "store"
        if p.kind is CommandKind.DELETE:
            if hit:
                mem.micro_delete()
                self.state = ControllerState.IR
                return "delete"
            mem.micro_reset()
            self._finish(p, Outcome.DELETE_FAILED)
            return "reset"
        # INFER
        if hit:
            classes = mem.micro_validate()
            self._finish(p, Outcome.SUCCESS, classes=classes)
            return "validate"
        mem.micro_reset()
        self.state = ControllerState.IR
        return "reset"

    def _step_ir(self, p: _Pending) -> str:
        mem = self.memory
        if p.kind in (CommandKind.STORE, CommandKind.DELETE):
            mem.micro_reset()
            outcome = Outcome.STORE_FAILED if p.store_full else Outcome.SUCCESS
            self._finish(p, outcome)
            return "reset"
        # INFER retry: every valid bit is 1 here, so this searches everything
        mem.micro_lookup(p.query, p.dc, LookupScope.VALID_ONLY, MatchMode.EQUALITY)
        self.state = ControllerState.SL
        return "lookup"

    def _step_sl(self, p: _Pending) -> str:
        mem = self.memory
        if mem.valid_entry:
            classes = mem.micro_validate()
            self._finish(p, Outcome.CONTEXT_SWITCH, classes=classes)
            return "validate"
        mem.micro_reset()
        self._finish(p, Outcome.INFER_FAILED)
        return "reset"

    def _finish(self, p: _Pending, outcome: Outcome,
                classes: Bits | None = None, matched: list[Entry] | None = None) -> None:
        if classes is None:
            classes = Bits.zeros(self.memory.layout.class_bits)
        self.completion = Completion(p.kind, outcome, p.cycles, classes, matched or [])
        self.state = ControllerState.SS
        self._pending = None

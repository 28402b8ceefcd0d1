"""Controller sequencing: per-command cycle counts, state paths, busy rule,
and the error taxonomy."""

import pytest

from nertcam import (Bits, CommandKind, Controller, ControllerState,
                     MemoryArray, Outcome, SdrLayout)

L333 = SdrLayout(3, 3, 3)
ZERO_DC = Bits.zeros(9)
INFER_DC = Bits.parse("000000111")
PF_DC = Bits.parse("111000111")


def B(text):
    return Bits.parse(text)


def controller_with(*triplets):
    mem = MemoryArray(L333, 4)
    for t in triplets:
        mem.micro_store(B(t))
    return Controller(mem), mem


def drive(ctrl, kind, query, dc):
    """Run one command to completion, returning (completion, traces)."""
    assert ctrl.accept(kind, query, dc)
    traces = []
    while ctrl.busy:
        traces.append(ctrl.step())
    done = ctrl.completion
    assert done is not None
    return done, traces


# --- acceptance / busy ---------------------------------------------------------


def test_accept_only_in_starting_state():
    ctrl, _ = controller_with("001|010|100")
    assert ctrl.accept(CommandKind.INFER, B("001|010|000"), INFER_DC)
    # armed but not yet stepped: still busy for new commands
    assert not ctrl.accept(CommandKind.RESET, B("000|000|000"), ZERO_DC)
    ctrl.step()
    assert ctrl.state is ControllerState.FL
    assert not ctrl.accept(CommandKind.RESET, B("000|000|000"), ZERO_DC)
    ctrl.step()
    assert ctrl.state is ControllerState.SS
    assert not ctrl.busy
    assert ctrl.accept(CommandKind.RESET, B("000|000|000"), ZERO_DC)


def test_rejected_command_has_no_effect():
    ctrl, mem = controller_with("001|010|100")
    ctrl.accept(CommandKind.INFER, B("001|010|000"), INFER_DC)
    image = mem.to_image()
    assert not ctrl.accept(CommandKind.CLEAR, B("000|000|000"), ZERO_DC)
    assert mem.to_image() == image
    while ctrl.busy:
        ctrl.step()
    assert ctrl.completion.kind is CommandKind.INFER


def test_busy_until_return_to_ss():
    ctrl, _ = controller_with()
    ctrl.accept(CommandKind.STORE, B("001|010|100"), ZERO_DC)
    assert ctrl.busy
    ctrl.step()
    assert ctrl.busy and ctrl.state is ControllerState.FL
    ctrl.step()
    assert ctrl.busy and ctrl.state is ControllerState.IR
    ctrl.step()
    assert not ctrl.busy and ctrl.state is ControllerState.SS


def test_idle_step_is_a_no_op():
    ctrl, mem = controller_with("001|010|100")
    image = mem.to_image()
    assert ctrl.step() is None
    assert ctrl.cycle_count == 0
    assert mem.to_image() == image


# --- cycle-count table ------------------------------------------------------------


def test_clear_takes_one_cycle():
    ctrl, mem = controller_with("001|010|100")
    done, traces = drive(ctrl, CommandKind.CLEAR, B("000|000|000"), ZERO_DC)
    assert (done.outcome, done.cycles) == (Outcome.SUCCESS, 1)
    assert [t.micro_op for t in traces] == ["clear"]
    assert mem.occupancy == 0


def test_reset_takes_one_cycle():
    ctrl, _ = controller_with("001|010|100")
    done, traces = drive(ctrl, CommandKind.RESET, B("000|000|000"), ZERO_DC)
    assert (done.outcome, done.cycles) == (Outcome.SUCCESS, 1)
    assert [t.micro_op for t in traces] == ["reset"]


@pytest.mark.parametrize("kind", [CommandKind.PREDICT_FEATURE,
                                  CommandKind.PREDICT_LOCATION])
def test_predict_takes_one_cycle(kind):
    ctrl, _ = controller_with("001|010|100")
    query = B("000|010|000") if kind is CommandKind.PREDICT_FEATURE else B("001|000|000")
    dc = PF_DC if kind is CommandKind.PREDICT_FEATURE else B("000111111")
    done, traces = drive(ctrl, kind, query, dc)
    assert (done.outcome, done.cycles) == (Outcome.SUCCESS, 1)
    assert [t.micro_op for t in traces] == ["lookup"]


def test_store_fresh_takes_three_cycles():
    ctrl, mem = controller_with("001|010|100")
    done, traces = drive(ctrl, CommandKind.STORE, B("010|100|010"), ZERO_DC)
    assert (done.outcome, done.cycles) == (Outcome.SUCCESS, 3)
    assert [t.micro_op for t in traces] == ["lookup", "store", "reset"]
    assert [(t.state_from, t.state_to) for t in traces] == [
        (ControllerState.SS, ControllerState.FL),
        (ControllerState.FL, ControllerState.IR),
        (ControllerState.IR, ControllerState.SS)]
    assert mem.occupancy == 2


def test_store_duplicate_takes_two_cycles():
    ctrl, mem = controller_with("001|010|100")
    done, traces = drive(ctrl, CommandKind.STORE, B("001|010|100"), ZERO_DC)
    assert (done.outcome, done.cycles) == (Outcome.STORE_FAILED, 2)
    assert [t.micro_op for t in traces] == ["lookup", "reset"]
    assert mem.occupancy == 1


def test_store_into_full_memory_reports_full_at_three_cycles():
    mem = MemoryArray(L333, 2)
    mem.micro_store(B("001|010|100"))
    mem.micro_store(B("001|100|010"))
    ctrl = Controller(mem)
    done, traces = drive(ctrl, CommandKind.STORE, B("010|001|001"), ZERO_DC)
    assert (done.outcome, done.cycles) == (Outcome.STORE_FAILED, 3)
    assert [t.micro_op for t in traces] == ["lookup", "store", "reset"]
    assert mem.full and mem.occupancy == 2


def test_delete_present_takes_three_cycles():
    ctrl, mem = controller_with("001|010|100", "001|100|010")
    done, traces = drive(ctrl, CommandKind.DELETE, B("001|100|010"), ZERO_DC)
    assert (done.outcome, done.cycles) == (Outcome.SUCCESS, 3)
    assert [t.micro_op for t in traces] == ["lookup", "delete", "reset"]
    assert mem.occupancy == 1


def test_delete_absent_takes_two_cycles():
    ctrl, mem = controller_with("001|010|100")
    done, traces = drive(ctrl, CommandKind.DELETE, B("010|100|010"), ZERO_DC)
    assert (done.outcome, done.cycles) == (Outcome.DELETE_FAILED, 2)
    assert [t.micro_op for t in traces] == ["lookup", "reset"]
    assert mem.occupancy == 1


def test_infer_hit_takes_two_cycles():
    ctrl, _ = controller_with("001|010|100", "001|100|010")
    done, traces = drive(ctrl, CommandKind.INFER, B("001|010|000"), INFER_DC)
    assert (done.outcome, done.cycles) == (Outcome.SUCCESS, 2)
    assert [t.micro_op for t in traces] == ["lookup", "validate"]
    assert str(done.classes) == "100"


def test_infer_context_switch_takes_four_cycles():
    ctrl, mem = controller_with("001|010|100", "010|100|010")
    done, _ = drive(ctrl, CommandKind.INFER, B("001|010|000"), INFER_DC)
    assert done.outcome is Outcome.SUCCESS
    # the pair below is valid only under the other object
    done, traces = drive(ctrl, CommandKind.INFER, B("010|100|000"), INFER_DC)
    assert (done.outcome, done.cycles) == (Outcome.CONTEXT_SWITCH, 4)
    assert [t.micro_op for t in traces] == ["lookup", "reset", "lookup", "validate"]
    assert [(t.state_from, t.state_to) for t in traces] == [
        (ControllerState.SS, ControllerState.FL),
        (ControllerState.FL, ControllerState.IR),
        (ControllerState.IR, ControllerState.SL),
        (ControllerState.SL, ControllerState.SS)]
    assert str(done.classes) == "010"


def test_infer_unknown_pair_fails_in_four_cycles():
    ctrl, mem = controller_with("001|010|100", "010|100|010")
    done, traces = drive(ctrl, CommandKind.INFER, B("100|001|000"), INFER_DC)
    assert (done.outcome, done.cycles) == (Outcome.INFER_FAILED, 4)
    assert [t.micro_op for t in traces] == ["lookup", "reset", "lookup", "reset"]
    # a failed identification leaves every valid bit set for a fresh start
    assert all(e.valid for e in mem.entries)


def test_infer_on_empty_memory_fails():
    ctrl, _ = controller_with()
    done, _ = drive(ctrl, CommandKind.INFER, B("001|010|000"), INFER_DC)
    assert (done.outcome, done.cycles) == (Outcome.INFER_FAILED, 4)


# --- terminal micro-op and valid-bit hygiene -----------------------------------------


def test_multicycle_commands_end_with_reset_or_validate():
    scenarios = [
        (CommandKind.STORE, B("010|100|010"), ZERO_DC),
        (CommandKind.STORE, B("001|010|100"), ZERO_DC),
        (CommandKind.DELETE, B("001|010|100"), ZERO_DC),
        (CommandKind.DELETE, B("100|001|001"), ZERO_DC),
        (CommandKind.INFER, B("001|010|000"), INFER_DC),
        (CommandKind.INFER, B("100|001|000"), INFER_DC),
    ]
    for kind, query, dc in scenarios:
        ctrl, _ = controller_with("001|010|100")
        done, traces = drive(ctrl, kind, query, dc)
        assert traces[-1].micro_op in ("reset", "validate")


def test_context_switch_equals_reset_then_infer():
    stored = ("001|010|100", "010|100|010", "100|001|010")
    query = B("010|100|000")

    a, mem_a = controller_with(*stored)
    drive(a, CommandKind.INFER, B("001|010|000"), INFER_DC)  # narrow to class 100
    done_a, _ = drive(a, CommandKind.INFER, query, INFER_DC)

    b, mem_b = controller_with(*stored)
    drive(b, CommandKind.INFER, B("001|010|000"), INFER_DC)
    drive(b, CommandKind.RESET, B("000|000|000"), ZERO_DC)
    done_b, _ = drive(b, CommandKind.INFER, query, INFER_DC)

    assert done_a.outcome is Outcome.CONTEXT_SWITCH
    assert done_b.outcome is Outcome.SUCCESS
    assert done_a.classes == done_b.classes
    assert [e.valid for e in mem_a.entries] == [e.valid for e in mem_b.entries]


def test_predict_lookup_is_non_destructive():
    ctrl, mem = controller_with("001|010|100", "010|100|010")
    drive(ctrl, CommandKind.INFER, B("001|010|000"), INFER_DC)
    valid_before = [e.valid for e in mem.entries]
    done, _ = drive(ctrl, CommandKind.PREDICT_FEATURE, B("000|100|000"), PF_DC)
    assert [e.valid for e in mem.entries] == valid_before
    # the matched rows were still captured for the prediction map
    assert [str(e.sdr) for e in done.matched] == []
    done, _ = drive(ctrl, CommandKind.PREDICT_FEATURE, B("000|010|000"), PF_DC)
    assert [str(e.sdr) for e in done.matched] == ["001010100"]
    assert [e.valid for e in mem.entries] == valid_before

"""Lockstep device-vs-oracle runs over seeded fuzz streams and fault injection."""

from nertcam import NertcamConfig, PaddingMode, SdrLayout, System
from nertcam.cli import diff_records, fuzz_records, oracle_for
from nertcam.traces import TraceRecord


def run_diff(config, records):
    return diff_records(System(config), oracle_for(config), records)


def test_fuzz_small_layout_no_divergence():
    config = NertcamConfig(layout=SdrLayout(4, 4, 4), capacity=16)
    records = fuzz_records(config.layout, 10_000, seed=1234)
    assert run_diff(config, records) is None


def test_fuzz_medium_layout_no_divergence():
    config = NertcamConfig(layout=SdrLayout(8, 8, 8), capacity=64)
    records = fuzz_records(config.layout, 1_000, seed=99)
    assert run_diff(config, records) is None


def test_fuzz_with_linear_padding():
    config = NertcamConfig(layout=SdrLayout(4, 8, 4), capacity=24)
    records = fuzz_records(config.layout, 3_000, seed=7, max_padding=3)
    assert run_diff(config, records) is None


def test_fuzz_with_grid_padding():
    config = NertcamConfig(layout=SdrLayout(4, 9, 4), capacity=24,
                           padding_mode=PaddingMode.grid(3, 3))
    records = fuzz_records(config.layout, 3_000, seed=21, max_padding=2)
    assert run_diff(config, records) is None


def test_fuzz_with_khot_features():
    config = NertcamConfig(layout=SdrLayout(4, 4, 4), capacity=16,
                           khot_features=True)
    records = fuzz_records(config.layout, 3_000, seed=5, khot_features=True)
    assert run_diff(config, records) is None


def test_fuzz_is_seed_deterministic():
    layout = SdrLayout(4, 4, 4)
    assert fuzz_records(layout, 200, seed=3) == fuzz_records(layout, 200, seed=3)
    assert fuzz_records(layout, 200, seed=3) != fuzz_records(layout, 200, seed=4)


def test_corrupted_memory_diverges_at_first_affected_record():
    config = NertcamConfig(layout=SdrLayout(4, 4, 4), capacity=8)
    system = System(config)
    oracle = oracle_for(config)
    stores = [TraceRecord(op="STORE", feature=f, location=l, class_=c)
              for f, l, c in [(0, 0, 0), (1, 1, 1), (2, 2, 2)]]
    assert diff_records(system, oracle, stores) is None

    # flip the stored feature bit of row 1 behind the device's back
    image = system.save_image().splitlines()
    assert image[1].startswith("1 0100|0100|0100")
    image[1] = image[1].replace("0100|0100|0100", "0010|0100|0100")
    system.load_image("\n".join(image) + "\n")

    probes = [
        TraceRecord(op="INFER", feature=0, location=0),  # row 0 intact: agrees
        TraceRecord(op="RESET"),
        TraceRecord(op="INFER", feature=1, location=1),  # touches the corrupt row
        TraceRecord(op="INFER", feature=2, location=2),
    ]
    div = diff_records(system, oracle, probes)
    assert div is not None
    assert div.seq == 2
    assert "outcome" in div.fields

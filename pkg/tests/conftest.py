import numpy as np
import pytest

from sspcast import DepthSchedule, Hyperparams, SynthSpec, assemble_series, synth_generate

# Small 10-level grid spanning the full 0..1975 m column; keeps test-scale
# trainings fast while exercising the same code paths as the 58-level grid.
DESK_DEPTHS = [0.0, 50.0, 100.0, 200.0, 400.0, 700.0, 1000.0, 1300.0, 1600.0, 1975.0]


def desk_series(**kw):
    """Synthetic layered series on the desk grid; kwargs override SynthSpec."""
    kw.setdefault("depths", np.array(DESK_DEPTHS))
    spec = SynthSpec(**kw)
    return assemble_series(synth_generate(spec), DepthSchedule(spec.depths.copy()))


@pytest.fixture
def desk_schedule():
    return DepthSchedule(np.array(DESK_DEPTHS))


@pytest.fixture
def make_series():
    return desk_series


@pytest.fixture
def fast_hp():
    return Hyperparams(hidden_size=12, epochs=80)


# The acceptance module records one line per criterion; echoing them in the
# terminal summary keeps the pass/fail ledger visible even when pytest
# captures per-test stdout.
ACCEPTANCE_LINES = []


def record_criterion(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

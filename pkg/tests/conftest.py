"""Shared fixtures: one small end-to-end collection run reused across tests."""

from __future__ import annotations

import pytest

from srampuf.chipnet.collector import collect
from srampuf.chipnet.server import ChipServer
from srampuf.floorplan import DEFAULT_DESIGNS
from srampuf.simchip import ProcessParams

SMALL_SEED = 99
SMALL_CHIPS = 4
SMALL_CYCLES = 3


@pytest.fixture(scope="session")
def small_run(tmp_path_factory):
    """Dump directory for a 4-chip, 3-cycle run of the default floorplan."""
    out = tmp_path_factory.mktemp("small") / "dumps"
    params = ProcessParams()
    with ChipServer(DEFAULT_DESIGNS, params, SMALL_SEED) as server:
        files = collect(server.endpoint, SMALL_CHIPS, SMALL_CYCLES, out,
                        designs=DEFAULT_DESIGNS, params=params, seed=SMALL_SEED)
    return {
        "dumps": out,
        "files": files,
        "chips": SMALL_CHIPS,
        "cycles": SMALL_CYCLES,
        "seed": SMALL_SEED,
    }


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            name = nodeid.split("::")[-1].split("[")[0]
            if outcome == "passed":
                results.setdefault(name, "PASS")
            else:
                results[name] = "FAIL"
    if results:
        terminalreporter.section("acceptance criteria")
        for name in sorted(results):
            terminalreporter.write_line(f"{name}: {results[name]}")

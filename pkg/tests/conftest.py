"""Shared fixtures: bundled data and a single cached full-table run."""

import pytest

from heegnercert.verifier import bundled_path, load_curves, load_golden, run_table


@pytest.fixture(scope="session")
def curves():
    with bundled_path("curves.csv").open(encoding="utf-8") as fh:
        return load_curves(fh)


@pytest.fixture(scope="session")
def golden():
    with bundled_path("table_golden.csv").open(encoding="utf-8") as fh:
        return load_golden(fh)


@pytest.fixture(scope="session")
def table_run():
    """One full verification run over the bundled 19-row table."""
    import time

    start = time.monotonic()
    reports, mismatches = run_table()
    elapsed = time.monotonic() - start
    return reports, mismatches, elapsed

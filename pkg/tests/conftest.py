from __future__ import annotations

import os
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
RUNNER = REPO_ROOT / "solver" / "smtlib_runner.js"

sys.path.insert(0, str(Path(__file__).resolve().parent))

SETUP_HINT = (
    "SMT solver runner not available. Run `npm install` inside solver/ "
    "(see README), or point COTCHECK_SOLVER at an SMT-LIB v2 stdio solver."
)


def solver_command() -> tuple[str, list[str]]:
    override = os.environ.get("COTCHECK_SOLVER")
    if override:
        parts = override.split()
        return parts[0], parts[1:]
    if not RUNNER.exists() or not (RUNNER.parent / "node_modules").exists():
        pytest.fail(SETUP_HINT, pytrace=False)
    return str(RUNNER), []


@pytest.fixture(scope="session")
def solver_cfg():
    from cotcheck.solver import SolverConfig

    path, args = solver_command()
    return SolverConfig(path=path, args=args, timeout_ms=10000)


@pytest.fixture(scope="session")
def shared_driver(solver_cfg):
    """One long-lived driver for read-only query tests; sessions are still
    fresh per query, so tests cannot interfere with each other."""
    from cotcheck.solver import SolverDriver

    driver = SolverDriver(solver_cfg)
    yield driver
    driver.close()


FAKES = Path(__file__).resolve().parent / "fake_solvers"


def fake_solver_cfg(name: str, *extra_args: str, **kwargs):
    from cotcheck.solver import SolverConfig

    defaults = dict(timeout_ms=500)
    defaults.update(kwargs)
    return SolverConfig(
        path=sys.executable,
        args=[str(FAKES / name), *extra_args],
        **defaults,
    )

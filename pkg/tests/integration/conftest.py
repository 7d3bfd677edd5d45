"""Shared fixtures for the integration test suite.

The integration tests invoke `sphcov` via `python -m src.cli.main` in a
subprocess, from a scratch working directory and with HOME pointed at it so no
user-level defaults leak into a run.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
from collections.abc import Callable
from pathlib import Path

import pytest


REPO_ROOT: Path = Path(__file__).resolve().parents[2]

SphcovCompleted = subprocess.CompletedProcess[str]
SphcovRunner = Callable[..., SphcovCompleted]

# Short chains: enough retained draws to summarize, small enough to run in seconds.
QUICK_RUN = {"iterations": 130, "burn_in": 30, "thin": 1, "t_max": 15, "adapt_fraction": 0.2}


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture
def workdir(tmp_path: Path) -> Path:
    path = tmp_path / "work"
    path.mkdir()
    return path


@pytest.fixture
def sphcov_env(repo_root: Path, workdir: Path) -> dict[str, str]:
    """`os.environ`-shaped dict that lets `python -m src.cli.main` resolve `src.*`."""
    env = os.environ.copy()
    env["PYTHONPATH"] = str(repo_root)
    env["HOME"] = str(workdir)
    return env


@pytest.fixture(scope="session")
def sphcov_argv() -> list[str]:
    return [sys.executable, "-m", "src.cli.main"]


@pytest.fixture
def sphcov_run(sphcov_argv: list[str], sphcov_env: dict[str, str], workdir: Path) -> SphcovRunner:
    """Return a `subprocess.run`-style callable preconfigured for sphcov.

    Usage::

        sphcov_run("gen-periodic", "-d", "2", "--out", "periodic")

    Output is captured as text and the working directory defaults to `workdir`.
    """

    def _run(*args: str, **kwargs: object) -> SphcovCompleted:
        kwargs.setdefault("env", sphcov_env)
        kwargs.setdefault("cwd", workdir)
        kwargs.setdefault("capture_output", True)
        kwargs.setdefault("text", True)
        return subprocess.run([*sphcov_argv, *args], **kwargs)  # type: ignore[call-overload, no-any-return]

    return _run


@pytest.fixture
def quick_config(workdir: Path) -> Callable[..., Path]:
    """Write an experiment document with the quick schedule plus any overrides."""

    def _write(name: str = "quick.json", **overrides: object) -> Path:
        path = workdir / name
        path.write_text(json.dumps({**QUICK_RUN, **overrides}))
        return path

    return _write

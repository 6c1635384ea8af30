"""Bundled modules, drivers, and spec files used by the tests and demos.

Each scenario in scenarios.json names an internal module, an external
module, a spec, a driver, and the verdict a fresh run is expected to
produce.  The files are packaged data, so everything is loadable by
name regardless of where the package is installed.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Any


def read_text(name: str) -> str:
    """Return the contents of a bundled corpus file as UTF-8 text."""
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def scenarios() -> list[dict[str, Any]]:
    """Return the scenario manifest, one dict per scenario."""
    return json.loads(read_text("scenarios.json"))["scenarios"]

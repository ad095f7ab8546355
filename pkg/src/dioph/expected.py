"""Access to the embedded reference values shipped in ``data/expected.json``."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=None)
def load() -> dict:
    with resources.files("dioph").joinpath("data/expected.json").open() as fh:
        return json.load(fh)


def recorded_strategies() -> dict[int, list[int]]:
    """Sieve strategy (A-set orders) recorded for each prime in the two tables."""
    data = load()
    out = {p: labels for p, labels in data["table3"]}
    out.update({p: labels for p, _, labels in data["table4"]})
    return out

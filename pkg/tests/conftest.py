from __future__ import annotations

import numpy as np
import pytest

from esspec.config import Config, parse_config
from esspec.presets import diagonal_config, film_config

# Water parameters shared by the anchor-value oracles.
DELTA, ETA, C0 = 0.98, 0.01, 1.15


def match_error(found, expected) -> float:
    """Greedy multiset matching; max distance over matched pairs."""
    pool = [complex(z) for z in expected]
    assert len(pool) == len(list(found))
    worst = 0.0
    for z in found:
        j = min(range(len(pool)), key=lambda k: abs(pool[k] - z))
        worst = max(worst, abs(pool[j] - complex(z)))
        pool.pop(j)
    return worst


@pytest.fixture(scope="session")
def film_cfg() -> Config:
    return parse_config(film_config())


@pytest.fixture(scope="session")
def film_perturbed_cfg() -> Config:
    return parse_config(film_config(perturbed=True))


@pytest.fixture(scope="session")
def diagonal_cfg() -> Config:
    return parse_config(diagonal_config())


def film_limits() -> dict[str, dict[int, complex]]:
    """Coefficient limits of the film entries, written out by hand."""
    return {
        "a": {2: 9 * ETA / (2 * DELTA), 1: C0 - 17 / 21, 0: -5 / (2 * DELTA)},
        "b": {3: 5 / (6 * DELTA), 2: -2 * ETA / DELTA, 1: 1 / 7, 0: 5 / (2 * DELTA)},
        "c": {1: -1.0},
        "d": {1: C0},
    }


def eval_limit_entry(name: str, xi: float) -> complex:
    """Independent brute-force evaluation of one limiting entry."""
    total = 0j
    for power, coeff in film_limits()[name].items():
        total += coeff * (1j * xi) ** power
    return total


def random_complex(rng, lo: float = 0.1, hi: float = 10.0) -> complex:
    mag = rng.uniform(lo, hi)
    ang = rng.uniform(0.0, 2.0 * np.pi)
    return mag * complex(np.cos(ang), np.sin(ang))

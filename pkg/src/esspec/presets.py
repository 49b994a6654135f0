"""Shipped operator presets as config dictionaries.

The falling-film system has a second-order first diagonal entry, a
third-order upper off-diagonal entry, and first-order entries -D and c0*D
below; the physical parameters delta (reduced Reynolds number), eta
(viscous dispersion) and c0 (pulse speed) enter the coefficient limits.
The diagonal preset (-D^2 and D, zero off-diagonals) is the minimal
decoupled example whose two limit curves meet exactly at the origin.
"""

from __future__ import annotations

WATER = {"delta": 0.98, "eta": 0.01, "c0": 1.15}

_FILM_LIMITS = {
    "a": {2: "9*eta/(2*delta)", 1: "c0 - 17/21", 0: "-5/(2*delta)"},
    "b": {3: "5/(6*delta)", 2: "-2*eta/delta", 1: "1/7", 0: "5/(2*delta)"},
    "c": {1: "-1"},
    "d": {1: "c0"},
}


def film_config(delta: float = 0.98, eta: float = 0.01, c0: float = 1.15,
                perturbed: bool = False, amplitude: float = 0.1) -> dict:
    """Film-system config; ``perturbed`` adds a Gaussian-enveloped decaying
    perturbation of the given amplitude to every coefficient."""
    if delta <= 0 or eta <= 0:
        raise ValueError("delta and eta must be positive")
    entries: dict = {}
    for name, powers in _FILM_LIMITS.items():
        rows = []
        for power in sorted(powers, reverse=True):
            row = {"power": power, "limit": powers[power]}
            if perturbed:
                row["perturbation"] = f"{amplitude!r}*exp(-x^2)"
            rows.append(row)
        entries[name] = rows
    return {
        "params": {"delta": delta, "eta": eta, "c0": c0},
        "entries": entries,
    }


def diagonal_config() -> dict:
    """Decoupled preset: diagonal entries -D^2 and D, zero off-diagonals."""
    return {
        "params": {},
        "entries": {
            "a": [{"power": 2, "limit": "-1"}],
            "b": [],
            "c": [],
            "d": [{"power": 1, "limit": "1"}],
        },
    }

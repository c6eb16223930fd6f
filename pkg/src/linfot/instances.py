"""Built-in desk-scale instances and a seeded random instance generator."""
from __future__ import annotations

import numpy as np

from .measures import Measure1D, measure_from_pieces


def e1() -> tuple[Measure1D, Measure1D]:
    """Pure translation: U[0,1] to U[1,2]."""
    return measure_from_pieces([(0, 1, 1)]), measure_from_pieces([(1, 2, 1)])


def e2() -> tuple[Measure1D, Measure1D]:
    """U[0,2] to an even split over [0,1] and [3,4]."""
    return measure_from_pieces([(0, 2, 0.5)]), measure_from_pieces([(0, 1, 0.5), (3, 4, 0.5)])


def e3() -> tuple[Measure1D, Measure1D]:
    """U[0,1] split outward: left half moves by -1, right half by +1."""
    return measure_from_pieces([(0, 1, 1)]), measure_from_pieces([(-1, -0.5, 1), (1.5, 2, 1)])


def e4() -> tuple[Measure1D, Measure1D]:
    """Rigid part on [1.5,2] plus one free component [0,1.5] -> [0,2]."""
    return (
        measure_from_pieces([(0, 2, 0.5)]),
        measure_from_pieces([(0, 1, 0.5), (1, 2, 0.25), (2, 2.5, 0.5)]),
    )


BUILTIN = {"E1": e1, "E2": e2, "E3": e3, "E4": e4}


def builtin(name: str) -> tuple[Measure1D, Measure1D]:
    return BUILTIN[name.upper()]()


def random_measure(rng: np.random.Generator, max_pieces: int = 6, span: float = 4.0) -> Measure1D:
    """Piecewise-uniform probability measure with 1..max_pieces pieces.

    Endpoints lie on a 1/8 grid and densities are small integers (1..4) up to a
    common normalisation, so no piece is more than four times lighter than any
    other.
    """
    k = int(rng.integers(1, max_pieces + 1))
    cells = np.sort(rng.choice(np.arange(int(span * 8) + 1), size=2 * k, replace=False)) / 8.0
    cells += float(rng.integers(-8, 9)) / 4.0
    lefts, rights = cells[0::2], cells[1::2]
    if rng.random() < 0.5:
        # make some pieces adjacent so densities jump inside the support
        for i in range(1, k):
            if rng.random() < 0.5:
                lefts[i] = rights[i - 1]
    raw = rng.integers(1, 5, size=k).astype(float)
    total = float(np.sum(raw * (rights - lefts)))
    return measure_from_pieces([(a, b, d / total) for a, b, d in zip(lefts, rights, raw)])


def random_instance(seed: int, max_pieces: int = 6) -> tuple[Measure1D, Measure1D]:
    rng = np.random.default_rng(seed)
    return random_measure(rng, max_pieces), random_measure(rng, max_pieces)

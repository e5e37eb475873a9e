"""Seeded random streams.

Every random draw in the package goes through :func:`stream`. A stream is a
Philox counter-based generator keyed by a ``numpy.random.SeedSequence`` built
from the master seed and a tuple of non-negative integer keys (a purpose tag
followed by realization indices). Distinct key tuples give statistically
independent streams, so Monte Carlo batches can be evaluated in any order or
on any number of workers and still reproduce bit for bit.
"""

import numpy as np

# purpose tags, first element of the spawn key
DATA = 0
NULL = 1
GAF = 2
POISSON = 3


def stream(seed, *keys):
    """Return the generator for ``(seed, *keys)``."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))

"""Deterministic random-stream derivation.

Every stochastic operation in the package draws from a counter-based Philox
generator whose key is derived from ``(seed, stream tag, block index)`` via
``numpy.random.SeedSequence``.  Sample index ``i`` of a run always lands in
block ``i // BLOCK_SAMPLES``, so results are a pure function of the seed and
never depend on how blocks are distributed over workers.

The derivation path (SeedSequence entropy/spawn_key -> Philox) and the
consumption rules documented on each sampling function are a frozen public
contract: golden files in the test suite pin the exact byte streams.
"""

from __future__ import annotations

import numpy as np

# Samples per substream block. Fixed: changing it changes every stream.
BLOCK_SAMPLES = 1 << 16

# Stream tags. Fixed: part of the stream-derivation contract.
STREAM_PBAR = 0      # rescaled-probability draws of the XEB engine
STREAM_BITS = 1      # readout bitstring words of the XEB engine
STREAM_STATE = 2     # full-state sampling (probabilities, phases, permutation)
STREAM_ORACLE = 3    # Gaussian-sphere oracle draws
STREAM_VERIFY = 4    # verify-mode component draws


def substream(seed: int, stream: int, block: int = 0) -> np.random.Generator:
    """Return the Philox generator for one (seed, stream, block) cell."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream, block))
    return np.random.Generator(np.random.Philox(ss))


def open_unit(rng: np.random.Generator, size=None):
    """Uniform draws from the open interval (0, 1).

    Endpoint values are rejected and redrawn in place: exact zeros occur
    with probability 2^-53 per draw and would make log(x) infinite (ones
    cannot occur with ``Generator.random`` but are excluded for symmetry).
    Bulk fills are the canonical consumption order; the redraw pass
    re-fills rejected positions in index order.
    """
    if size is None:
        x = rng.random()
        while x == 0.0 or x == 1.0:
            x = rng.random()
        return x
    x = rng.random(size)
    bad = (x == 0.0) | (x == 1.0)
    while bad.any():
        x[bad] = rng.random(int(bad.sum()))
        bad = (x == 0.0) | (x == 1.0)
    return x

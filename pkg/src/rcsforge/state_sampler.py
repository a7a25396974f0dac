"""Full random-state sampling for small systems.

A state is drawn in three stages that consume one generator stream in a
fixed, documented order:

1. ``D - 1`` open-interval uniforms, turned into simplex probabilities by
   recursive stick-breaking: after k components the remaining mass is the
   running product of x_l^(1/(D-l)), and component k is the difference of
   consecutive remaining masses.  The last component is assigned the exact
   remainder, so the probabilities always sum to 1 up to summation rounding.
2. ``D`` uniforms scaled to phase angles in [0, 2*pi).
3. A uniform permutation of range(D) via ``Generator.permutation``
   (Fisher-Yates with bounded-integer draws from the same stream).

This order is a frozen public contract; golden files depend on it.  The
running-product form avoids the catastrophic cancellation a running *sum*
of D components of size ~1/D would suffer, and consecutive remaining masses
are so close for large D that their difference is computed exactly
(Sterbenz) -- the component-wise relative error stays at a few ulp.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import SystemDims
from .errors import CapacityError
from .streams import open_unit

# 2^26 complex doubles is 1 GiB; beyond that full states stop being a
# desk-scale object. Callers may raise the cap explicitly.
DEFAULT_MAX_FULL_STATE_QUBITS = 26

# Largest count * D a batched call may allocate (half a GiB per array).
_MAX_BATCH_ELEMENTS = 1 << 26


@dataclass(frozen=True)
class SimplexState:
    """The D component probabilities of one state (non-negative, sum 1)."""

    probs: np.ndarray

    @property
    def dim(self) -> int:
        return self.probs.shape[-1]


@dataclass(frozen=True)
class RandomState:
    """A fully sampled state: probabilities, phases and index permutation.

    ``perm`` is a bijection on range(D); the physical component at basis
    index b has probability ``probs.probs[perm[b]]`` and phase
    ``phases[b]``.
    """

    probs: SimplexState
    phases: np.ndarray
    perm: np.ndarray


def _check_capacity(dims: SystemDims, max_qubits: int):
    if dims.n > max_qubits:
        raise CapacityError(
            f"full-state sampling capped at {max_qubits} qubits, got n={dims.n}"
        )


def _stick_break(x: np.ndarray, d: int) -> np.ndarray:
    """Map uniforms of shape (..., D-1) to probabilities of shape (..., D)."""
    np.log(x, out=x)
    x /= np.arange(d - 1, 0, -1, dtype=np.float64)  # exponents 1/(D-k)
    np.exp(x, out=x)
    rem = np.cumprod(x, axis=-1, out=x)  # remaining mass after each cut
    probs = np.empty(x.shape[:-1] + (d,))
    probs[..., 0] = 1.0 - rem[..., 0]
    probs[..., 1 : d - 1] = rem[..., :-1] - rem[..., 1:]
    probs[..., d - 1] = rem[..., -1]  # exact remainder
    return probs


def sample_probabilities(
    dims: SystemDims,
    rng: np.random.Generator,
    *,
    max_qubits: int = DEFAULT_MAX_FULL_STATE_QUBITS,
) -> SimplexState:
    """Sample the D component probabilities of a uniform random state.

    The joint law is uniform on the probability simplex, i.e. the law of
    component probabilities of a state drawn uniformly from the unit sphere.
    Consumes exactly D - 1 open-unit draws.
    """
    _check_capacity(dims, max_qubits)
    d = int(dims.dim)
    x = open_unit(rng, d - 1)
    return SimplexState(probs=_stick_break(x, d))


def sample_probabilities_batch(
    dims: SystemDims,
    count: int,
    rng: np.random.Generator,
    *,
    max_qubits: int = DEFAULT_MAX_FULL_STATE_QUBITS,
) -> np.ndarray:
    """Probabilities of ``count`` independent states, shape (count, D).

    Row i consumes the same draws as the i-th sequential call of
    :func:`sample_probabilities` on the same stream.
    """
    _check_capacity(dims, max_qubits)
    d = int(dims.dim)
    if count * d > _MAX_BATCH_ELEMENTS:
        raise CapacityError(
            f"batch of {count} states at n={dims.n} exceeds the "
            f"{_MAX_BATCH_ELEMENTS}-element allocation cap; use fewer states"
        )
    x = open_unit(rng, (count, d - 1))
    return _stick_break(x, d)


def sample_state(
    dims: SystemDims,
    rng: np.random.Generator,
    *,
    max_qubits: int = DEFAULT_MAX_FULL_STATE_QUBITS,
) -> RandomState:
    """Sample a full random state: probabilities, phases, permutation."""
    probs = sample_probabilities(dims, rng, max_qubits=max_qubits)
    d = int(dims.dim)
    phases = rng.random(d)
    phases *= 2.0 * np.pi
    perm = rng.permutation(d)
    return RandomState(probs=probs, phases=phases, perm=perm)


def state_amplitudes(state: RandomState) -> np.ndarray:
    """Complex amplitudes of a sampled state (unit norm).

    Component b is sqrt(probs[perm[b]]) * (cos(theta_b) + i sin(theta_b)).
    """
    mag = np.sqrt(state.probs.probs[state.perm])
    return mag * (np.cos(state.phases) + 1j * np.sin(state.phases))

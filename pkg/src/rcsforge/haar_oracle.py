"""Brute-force uniform-sphere sampler and goodness-of-fit tests.

Normalizing a vector of 2D independent standard normals gives a point that
is exactly uniform on the unit sphere in R^(2D), i.e. a uniform random
state of a D-dimensional system.  This construction shares nothing with the
analytic stick-breaking sampler, which makes it the correctness oracle for
it: if both are right, their component-probability laws agree, and the
Kolmogorov-Smirnov tests below can detect it if they do not.

Frozen transform for the normals (reproducibility across platforms): the
Box-Muller map of uniform pairs.  For m normals, ceil(m/2) open-unit
uniforms u1 are drawn as one block, then the same number of [0,1) uniforms
u2; pair j yields

    z[2j]   = sqrt(-2 ln u1[j]) * cos(2*pi*u2[j])
    z[2j+1] = sqrt(-2 ln u1[j]) * sin(2*pi*u2[j])

and the sequence is truncated to m values when m is odd.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import SystemDims
from .errors import CapacityError, DomainError
from .streams import open_unit

# The oracle exists to cross-check small systems; a full state costs 2^(n+1)
# normal draws, so n is hard-capped well below the analytic samplers.
MAX_ORACLE_QUBITS = 20

# Largest count * D a batched call may allocate (half a GiB per array).
_MAX_BATCH_ELEMENTS = 1 << 26

# Asymptotic Kolmogorov-Smirnov critical coefficients c(alpha): the test
# rejects when the statistic exceeds c(alpha)/sqrt(N) (one-sample) or
# c(alpha)*sqrt((n_a+n_b)/(n_a*n_b)) (two-sample).
KS_CRITICAL_COEFF = {0.05: 1.358, 0.01: 1.628}


@dataclass(frozen=True)
class KsReport:
    """Outcome of one Kolmogorov-Smirnov test."""

    statistic: float
    n_a: int
    n_b: int | None
    alpha: float
    critical_value: float
    reject: bool


def standard_normals(rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` standard normals via the frozen Box-Muller transform."""
    pairs = (count + 1) // 2
    u1 = open_unit(rng, pairs)
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = (2.0 * np.pi) * u2
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(theta)
    z[1::2] = r * np.sin(theta)
    return z[:count]


def _check_oracle_capacity(n: int):
    if n > MAX_ORACLE_QUBITS:
        raise CapacityError(f"oracle sampling capped at {MAX_ORACLE_QUBITS} qubits, got n={n}")


def sample_oracle_state(dims: SystemDims, rng: np.random.Generator) -> np.ndarray:
    """One uniform random state as a unit-norm complex vector of length D.

    Component b takes Box-Muller pair b: real part z[2b], imaginary part
    z[2b+1]; the vector is then normalized.
    """
    _check_oracle_capacity(dims.n)
    d = int(dims.dim)
    z = standard_normals(rng, 2 * d)
    v = z[0::2] + 1j * z[1::2]
    v /= np.sqrt(z @ z)
    return v


def oracle_component_probabilities(
    dims: SystemDims,
    count: int,
    rng: np.random.Generator,
    index: int = 0,
) -> np.ndarray:
    """Component probability |v_index|^2 of ``count`` independent oracle states.

    Vectorized over states: one Box-Muller fill of shape (count, 2D) (u1
    block, then u2 block, row-major), so the draws differ from ``count``
    sequential :func:`sample_oracle_state` calls but are deterministic per
    (stream, count).
    """
    _check_oracle_capacity(dims.n)
    d = int(dims.dim)
    if count * d > _MAX_BATCH_ELEMENTS:
        raise CapacityError(
            f"oracle batch of {count} states at n={dims.n} exceeds the "
            f"{_MAX_BATCH_ELEMENTS}-element allocation cap; use fewer samples"
        )
    u1 = open_unit(rng, (count, d))
    u2 = rng.random((count, d))
    np.log(u1, out=u1)
    u1 *= -2.0
    np.sqrt(u1, out=u1)  # radius of each pair
    u2 *= 2.0 * np.pi
    re = u1 * np.cos(u2)
    im = u1 * np.sin(u2)
    p = re * re
    p += im * im  # squared magnitude per component
    return p[:, index] / p.sum(axis=1)


def _critical_coeff(alpha: float) -> float:
    try:
        return KS_CRITICAL_COEFF[alpha]
    except KeyError:
        raise DomainError(
            f"alpha must be one of {sorted(KS_CRITICAL_COEFF)}, got {alpha}"
        ) from None


def ks_one_sample(samples, cdf, alpha: float) -> KsReport:
    """One-sample KS test of ``samples`` against a reference CDF.

    The statistic is the largest deviation between the empirical CDF and
    ``cdf`` evaluated at the sorted sample points, checked from both sides
    of each step.  ``cdf`` must be monotone into [0, 1] and accept arrays.
    """
    coeff = _critical_coeff(alpha)
    s = np.sort(np.asarray(samples, dtype=np.float64))
    n = s.size
    if n == 0:
        raise DomainError("ks_one_sample requires a non-empty sample")
    f = np.asarray(cdf(s), dtype=np.float64)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    statistic = float(max(np.abs(hi - f).max(), np.abs(lo - f).max()))
    critical = coeff / np.sqrt(n)
    return KsReport(
        statistic=statistic,
        n_a=int(n),
        n_b=None,
        alpha=alpha,
        critical_value=float(critical),
        reject=bool(statistic > critical),
    )


def ks_two_sample(a, b, alpha: float) -> KsReport:
    """Two-sample KS test: largest deviation between the two empirical CDFs."""
    coeff = _critical_coeff(alpha)
    sa = np.sort(np.asarray(a, dtype=np.float64))
    sb = np.sort(np.asarray(b, dtype=np.float64))
    n_a, n_b = sa.size, sb.size
    if n_a == 0 or n_b == 0:
        raise DomainError("ks_two_sample requires two non-empty samples")
    grid = np.concatenate([sa, sb])
    ecdf_a = np.searchsorted(sa, grid, side="right") / n_a
    ecdf_b = np.searchsorted(sb, grid, side="right") / n_b
    statistic = float(np.abs(ecdf_a - ecdf_b).max())
    critical = coeff * np.sqrt((n_a + n_b) / (n_a * n_b))
    return KsReport(
        statistic=statistic,
        n_a=int(n_a),
        n_b=int(n_b),
        alpha=alpha,
        critical_value=float(critical),
        reject=bool(statistic > critical),
    )

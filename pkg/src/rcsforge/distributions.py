"""Probability laws for component probabilities of uniform random states.

For an n-qubit system with Hilbert-space dimension D = 2^n, the probability
mass remaining after one component of a uniform random state is fixed has
density (D-1) p^(D-2) on [0, 1], so a single component probability q = 1 - p
has density (D-1)(1-q)^(D-2), and the rescaled component probability
pbar = q*D converges to the exponential (Porter-Thomas) law exp(-pbar) as
D grows.

Three dimension regimes keep evaluation stable from 1 qubit up to 2^20:

* ``EXACT_SMALL``  (n <= 53):   D = 2^n held as an exact integer.
* ``FLOAT_LARGE``  (54 <= n <= 1000): D carried as a binary double; 2^n is a
  power of two and therefore exact, while D-1 rounds to D (relative error
  2^-54, far below double resolution of any result).
* ``PORTER_THOMAS_LIMIT``  (n > 1000): D overflows a double at n >= 1024, so
  only the limiting exponential law is available.

All powers p^(D-1), x^(1/(D-k)) are evaluated through exp/log, never by
direct ``pow``: D can be as large as 2^1000 where direct exponentiation is
meaningless.  Functions accept scalars or numpy arrays in the variate
argument and return the matching kind.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeError


class Regime(enum.Enum):
    """Evaluation regime implied by the qubit count."""

    EXACT_SMALL = "exact_small"
    FLOAT_LARGE = "float_large"
    PORTER_THOMAS_LIMIT = "porter_thomas_limit"


# Regime thresholds. 53 is the last n with 2^n - 1 exact in a double
# mantissa; 1000 is the documented switch to the limit law (a double
# overflows at 2^1024 regardless).
MAX_EXACT_QUBITS = 53
MAX_FLOAT_QUBITS = 1000


@dataclass(frozen=True)
class SystemDims:
    """Qubit count plus derived dimension handling.

    ``dim`` is an exact ``int`` in the EXACT_SMALL regime, a ``float`` in
    FLOAT_LARGE, and unavailable (RegimeError) in PORTER_THOMAS_LIMIT.
    """

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise DomainError(f"qubit count must be an integer, got {self.n!r}")
        if self.n < 1:
            raise DomainError(f"qubit count must be >= 1, got {self.n}")

    @property
    def regime(self) -> Regime:
        if self.n <= MAX_EXACT_QUBITS:
            return Regime.EXACT_SMALL
        if self.n <= MAX_FLOAT_QUBITS:
            return Regime.FLOAT_LARGE
        return Regime.PORTER_THOMAS_LIMIT

    @property
    def dim(self):
        """Hilbert-space dimension D = 2^n (int or float depending on regime)."""
        regime = self.regime
        if regime is Regime.EXACT_SMALL:
            return 1 << self.n
        if regime is Regime.FLOAT_LARGE:
            return 2.0 ** self.n
        raise RegimeError(
            f"D = 2^{self.n} is not representable; only the Porter-Thomas "
            "limit law is available for n > 1000"
        )


def _require_not_limit(dims: SystemDims, op: str) -> float:
    """Return D as a float, rejecting the limit regime."""
    if dims.regime is Regime.PORTER_THOMAS_LIMIT:
        raise RegimeError(f"{op} is undefined in the Porter-Thomas limit regime (n={dims.n})")
    return float(dims.dim)


def _as_array(x, name: str):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _scalar_out(x, out):
    return float(out) if np.ndim(x) == 0 else out


def eval_component_pdf(q, dims: SystemDims):
    """Density of a single component probability: (D-1)(1-q)^(D-2).

    Evaluated in log space as exp(ln(D-1) + (D-2) ln(1-q)); exponents below
    the double underflow threshold yield an exact 0.0 (the tail really is
    zero at this precision), never an error.
    """
    d = _require_not_limit(dims, "eval_component_pdf")
    arr = _as_array(q, "q")
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise DomainError("component probability q must lie in [0, 1]")
    if dims.n == 1:
        # D = 2: density is identically D - 1 = 1.
        return _scalar_out(q, np.ones_like(arr))
    log_dm1 = math.log(dims.dim - 1) if dims.regime is Regime.EXACT_SMALL else math.log(d)
    with np.errstate(divide="ignore"):
        exponent = log_dm1 + (d - 2.0) * np.log1p(-arr)
    return _scalar_out(q, np.exp(exponent))


def eval_remaining_cdf(p, dims: SystemDims):
    """CDF of the remaining probability mass: F(p) = p^(D-1).

    Computed as exp((D-1) ln p); exact 0.0 at p = 0 and 1.0 at p = 1.
    """
    d = _require_not_limit(dims, "eval_remaining_cdf")
    arr = _as_array(p, "p")
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise DomainError("remaining mass p must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        out = np.exp((d - 1.0) * np.log(arr))
    return _scalar_out(p, out)


def sample_component(x, dims: SystemDims):
    """Inverse-CDF sample of one component probability: q = 1 - x^(1/(D-1)).

    Evaluated as -expm1(ln x / (D-1)), which is the stable form of
    1 - exp(ln x / (D-1)).  Strictly decreasing in x.
    """
    d = _require_not_limit(dims, "sample_component")
    arr = _as_array(x, "x")
    if np.any((arr <= 0.0) | (arr >= 1.0)):
        raise DomainError("uniform variate x must lie strictly inside (0, 1)")
    out = -np.expm1(np.log(arr) / (d - 1.0))
    return _scalar_out(x, out)


def sample_rescaled(x, dims: SystemDims):
    """Inverse-CDF sample of the rescaled probability pbar = q*D.

    For n <= 1000 this is -D*expm1(ln x / (D-1)); beyond that the exact law
    is indistinguishable from its limit and pbar = -ln x is returned
    (Porter-Thomas sampling).  Strictly decreasing in x.
    """
    arr = _as_array(x, "x")
    if np.any((arr <= 0.0) | (arr >= 1.0)):
        raise DomainError("uniform variate x must lie strictly inside (0, 1)")
    if dims.regime is Regime.PORTER_THOMAS_LIMIT:
        out = -np.log(arr)
    else:
        d = float(dims.dim)
        out = -d * np.expm1(np.log(arr) / (d - 1.0))
    return _scalar_out(x, out)


def porter_thomas_pdf(pbar):
    """Limit density of the rescaled component probability: exp(-pbar)."""
    arr = _as_array(pbar, "pbar")
    if np.any(arr < 0.0):
        raise DomainError("rescaled probability pbar must be >= 0")
    return _scalar_out(pbar, np.exp(-arr))


def theoretical_xeb(dims: SystemDims) -> float:
    """Ideal-state XEB fidelity (D-1)/(D+1), or its limit 1.0 for n > 1000.

    Computed as 1 - 2/(D+1) so the large-D value degrades gracefully to 1.0
    instead of losing all precision in a ratio of near-equal numbers.
    """
    if dims.regime is Regime.PORTER_THOMAS_LIMIT:
        return 1.0
    d = dims.dim
    return 1.0 - 2.0 / (d + 1)

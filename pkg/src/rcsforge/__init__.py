"""rcsforge: Monte Carlo simulation of ideal random-circuit-sampling output.

Samples uniform random quantum states (and their measurement outcomes)
directly instead of simulating circuits, and estimates cross-entropy
benchmarking (XEB) fidelity for systems from one qubit up to 2^20 qubits.
"""

__version__ = "0.1.0"

from .distributions import (
    Regime,
    SystemDims,
    eval_component_pdf,
    eval_remaining_cdf,
    porter_thomas_pdf,
    sample_component,
    sample_rescaled,
    theoretical_xeb,
)
from .errors import CapacityError, DomainError, RcsForgeError, RegimeError
from .haar_oracle import KsReport, ks_one_sample, ks_two_sample, sample_oracle_state
from .state_sampler import (
    RandomState,
    SimplexState,
    sample_probabilities,
    sample_state,
    state_amplitudes,
)
from .xeb_engine import (
    BitString,
    RescaledSample,
    XebAccumulator,
    XebEstimate,
    accumulate,
    merge,
    run_xeb,
    sample_bitstring,
    stream_samples,
)

__all__ = [
    "__version__",
    "Regime",
    "SystemDims",
    "eval_component_pdf",
    "eval_remaining_cdf",
    "porter_thomas_pdf",
    "sample_component",
    "sample_rescaled",
    "theoretical_xeb",
    "CapacityError",
    "DomainError",
    "RcsForgeError",
    "RegimeError",
    "KsReport",
    "ks_one_sample",
    "ks_two_sample",
    "sample_oracle_state",
    "RandomState",
    "SimplexState",
    "sample_probabilities",
    "sample_state",
    "state_amplitudes",
    "BitString",
    "RescaledSample",
    "XebAccumulator",
    "XebEstimate",
    "accumulate",
    "merge",
    "run_xeb",
    "sample_bitstring",
    "stream_samples",
]

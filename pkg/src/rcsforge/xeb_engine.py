"""Streamed XEB fidelity estimation for up to 2^20 qubits.

Each sample is a pair: a rescaled probability pbar drawn by inverse-transform
sampling, and an n-bit string drawn as ceil(n/64) uint64 words.  The two
parts come from *separate* substreams keyed by (seed, stream, block), with
sample i always in block ``i // BLOCK_SAMPLES``, so the fidelity estimate is
a pure function of (n, N, seed): it does not change with worker count, and
it does not change whether or not the bitstrings are materialized.

The estimator is the running mean of pbar^2 minus one, with a three-sigma
error bar from the sample variance of pbar^2.  Per-block sums use numpy's
pairwise summation and blocks are combined along a fixed pairwise merge
tree over block indices, which keeps the result bit-identical across any
partitioning of blocks over workers and holds rounding error to
O(eps * log N) even at N = 10^9.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .distributions import SystemDims, sample_rescaled, theoretical_xeb
from .errors import CapacityError, DomainError
from .streams import BLOCK_SAMPLES, STREAM_BITS, STREAM_PBAR, open_unit, substream

DEFAULT_MAX_XEB_QUBITS = 1 << 20

# Bitstring words are generated in chunks of at most this many uint64s
# (32 MiB); chunking never changes the drawn values, only peak memory.
_BIT_CHUNK_WORDS = 1 << 22


@dataclass(frozen=True)
class BitString:
    """A packed n-bit string: qubit 0 in the least significant bit of byte 0."""

    n: int
    data: bytes

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"bitstring length must be >= 1, got {self.n}")
        nbytes = (self.n + 7) // 8
        if len(self.data) != nbytes:
            raise DomainError(
                f"bitstring of {self.n} bits needs {nbytes} bytes, got {len(self.data)}"
            )
        rem = self.n & 7
        if rem and self.data[-1] >> rem:
            raise DomainError("pad bits beyond the bitstring length must be zero")

    def hex(self) -> str:
        """Lowercase hex of the packed bytes (the wire serialization)."""
        return self.data.hex()

    def bit(self, i: int) -> int:
        return (self.data[i >> 3] >> (i & 7)) & 1


@dataclass(frozen=True)
class RescaledSample:
    """One engine sample: rescaled probability plus readout bitstring."""

    pbar: float
    bits: BitString


@dataclass(frozen=True)
class XebAccumulator:
    """Mergeable sums for the XEB estimator: count, sum pbar^2, sum pbar^4."""

    count: int = 0
    sum_sq: float = 0.0
    sum_quad: float = 0.0


@dataclass(frozen=True)
class XebEstimate:
    """XEB fidelity estimate with a 3-sigma error bar and its ideal value."""

    n_qubits: int
    samples: int
    f_xeb: float
    three_sigma: float
    theoretical: float


def accumulate(acc: XebAccumulator, pbar: float) -> XebAccumulator:
    """Fold one rescaled probability into the estimator sums."""
    if pbar < 0.0:
        raise DomainError(f"rescaled probability must be >= 0, got {pbar}")
    sq = pbar * pbar
    return XebAccumulator(acc.count + 1, acc.sum_sq + sq, acc.sum_quad + sq * sq)


def fold_rescaled(pbar: np.ndarray) -> XebAccumulator:
    """Fold a whole array of rescaled probabilities (pairwise summation)."""
    arr = np.asarray(pbar, dtype=np.float64)
    sq = arr * arr
    quad = sq * sq
    return XebAccumulator(int(arr.size), float(np.sum(sq)), float(np.sum(quad)))


def merge(a: XebAccumulator, b: XebAccumulator) -> XebAccumulator:
    """Combine two accumulators componentwise."""
    return XebAccumulator(a.count + b.count, a.sum_sq + b.sum_sq, a.sum_quad + b.sum_quad)


def merge_tree(accs: Iterable[XebAccumulator]) -> XebAccumulator:
    """Merge accumulators pairwise in list order until one remains.

    This fixed tree (adjacent pairs per pass, odd tail carried forward) is
    the documented merge order: any worker assignment that produces the
    same per-block accumulators yields bit-identical totals.
    """
    items = list(accs)
    if not items:
        return XebAccumulator()
    while len(items) > 1:
        merged = [merge(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            merged.append(items[-1])
        items = merged
    return items[0]


def estimate(acc: XebAccumulator, dims: SystemDims) -> XebEstimate:
    """Turn accumulator sums into the fidelity estimate and error bar."""
    n = acc.count
    if n < 1:
        raise DomainError("cannot estimate from an empty accumulator")
    m2 = acc.sum_sq / n
    m4 = acc.sum_quad / n
    return XebEstimate(
        n_qubits=dims.n,
        samples=n,
        f_xeb=m2 - 1.0,
        three_sigma=3.0 * math.sqrt(max(0.0, m4 - m2 * m2) / n),
        theoretical=theoretical_xeb(dims),
    )


def _words_per_sample(n: int) -> int:
    return (n + 63) // 64


def _pack_words(words: np.ndarray, n: int) -> np.ndarray:
    """Pack uint64 words (count, W) into bytes (count, ceil(n/8)), LSB first."""
    nbytes = (n + 7) // 8
    raw = np.ascontiguousarray(words).astype("<u8", copy=False).view(np.uint8)
    out = raw.reshape(words.shape[0], -1)[:, :nbytes].copy()
    rem = n & 7
    if rem:
        out[:, -1] &= (1 << rem) - 1
    return out


def _check_bit_capacity(n: int, max_qubits: int):
    if n < 1:
        raise DomainError(f"bitstring length must be >= 1, got {n}")
    if n > max_qubits:
        raise CapacityError(f"bitstring sampling capped at {max_qubits} bits, got n={n}")


def sample_bitstrings(
    n: int,
    count: int,
    rng: np.random.Generator,
    *,
    max_qubits: int = DEFAULT_MAX_XEB_QUBITS,
) -> np.ndarray:
    """``count`` uniform n-bit strings as packed bytes, shape (count, ceil(n/8)).

    Each sample draws exactly ceil(n/64) uint64 words, sample-major, so the
    output is a pure function of the stream position; pad bits are cleared.
    """
    _check_bit_capacity(n, max_qubits)
    w = _words_per_sample(n)
    words = rng.integers(0, 1 << 64, size=(count, w), dtype=np.uint64)
    return _pack_words(words, n)


def sample_bitstring(
    n: int,
    rng: np.random.Generator,
    *,
    max_qubits: int = DEFAULT_MAX_XEB_QUBITS,
) -> BitString:
    """One uniform n-bit string."""
    row = sample_bitstrings(n, 1, rng, max_qubits=max_qubits)
    return BitString(n=n, data=row[0].tobytes())


def _blocks(total: int) -> list[tuple[int, int]]:
    """(block index, sample count) pairs covering ``total`` samples."""
    out = []
    full, rem = divmod(total, BLOCK_SAMPLES)
    for i in range(full):
        out.append((i, BLOCK_SAMPLES))
    if rem:
        out.append((full, rem))
    return out


def _block_pbar(dims: SystemDims, seed: int, block: int, count: int) -> np.ndarray:
    rng = substream(seed, STREAM_PBAR, block)
    return sample_rescaled(open_unit(rng, count), dims)


def _block_bit_words(n: int, seed: int, block: int, count: int) -> Iterator[np.ndarray]:
    """Yield raw bitstring words for one block, chunked, in sample order."""
    rng = substream(seed, STREAM_BITS, block)
    w = _words_per_sample(n)
    rows = max(1, _BIT_CHUNK_WORDS // w)
    done = 0
    while done < count:
        m = min(rows, count - done)
        yield rng.integers(0, 1 << 64, size=(m, w), dtype=np.uint64)
        done += m


def _run_block(dims: SystemDims, seed: int, block: int, count: int) -> XebAccumulator:
    acc = fold_rescaled(_block_pbar(dims, seed, block, count))
    # Readout bitstring words are drawn per sample but their content is not
    # needed for the estimate, so they are dropped without packing.
    for _ in _block_bit_words(dims.n, seed, block, count):
        pass
    return acc


def stream_samples(
    n: int,
    total: int,
    seed: int,
    *,
    max_qubits: int = DEFAULT_MAX_XEB_QUBITS,
) -> Iterator[RescaledSample]:
    """Yield the (pbar, bitstring) sample stream for a run, in sample order.

    Draws come from the same substreams as :func:`run_xeb`, so accumulating
    the yielded pbar values reproduces its estimate exactly.
    """
    _check_bit_capacity(n, max_qubits)
    if total < 0:
        raise DomainError(f"sample count must be >= 0, got {total}")
    if seed < 0:
        raise DomainError(f"seed must be >= 0, got {seed}")
    dims = SystemDims(n)
    for block, count in _blocks(total):
        pbar = _block_pbar(dims, seed, block, count)
        offset = 0
        for words in _block_bit_words(n, seed, block, count):
            packed = _pack_words(words, n)
            for row in range(packed.shape[0]):
                yield RescaledSample(
                    pbar=float(pbar[offset + row]),
                    bits=BitString(n=n, data=packed[row].tobytes()),
                )
            offset += packed.shape[0]


def run_xeb(
    n: int,
    samples: int,
    seed: int,
    partitions: int = 1,
    *,
    max_qubits: int = DEFAULT_MAX_XEB_QUBITS,
) -> XebEstimate:
    """Estimate XEB fidelity from ``samples`` Monte Carlo draws.

    ``partitions`` is the worker count; blocks of ``BLOCK_SAMPLES`` samples
    are distributed over a thread pool and merged along the fixed tree, so
    the result is bit-identical for any ``partitions`` value.
    """
    _check_bit_capacity(n, max_qubits)
    if samples < 2:
        raise DomainError(f"at least 2 samples required, got {samples}")
    if partitions < 1:
        raise DomainError(f"partitions must be >= 1, got {partitions}")
    if seed < 0:
        raise DomainError(f"seed must be >= 0, got {seed}")
    dims = SystemDims(n)
    jobs = _blocks(samples)
    if partitions == 1 or len(jobs) == 1:
        accs = [_run_block(dims, seed, block, count) for block, count in jobs]
    else:
        with ThreadPoolExecutor(max_workers=partitions) as pool:
            accs = list(pool.map(lambda bc: _run_block(dims, seed, *bc), jobs))
    return estimate(merge_tree(accs), dims)

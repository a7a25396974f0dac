"""Command-line front end: ``rcsforge <xeb|state|verify|hist>``.

Data records go to stdout (or ``--out PATH``); exactly one run manifest --
config echo, tool version, wall-clock duration, result summary -- goes to
stderr as a JSONL record, alongside any diagnostics.  Keeping timing out of
the data stream makes the data stream byte-identical across repeated runs
and thread counts.

Exit status: 0 success, 1 runtime failure, 2 argument error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .distributions import SystemDims, eval_remaining_cdf
from .errors import CapacityError, RcsForgeError
from .haar_oracle import (
    MAX_ORACLE_QUBITS,
    KsReport,
    ks_one_sample,
    ks_two_sample,
    oracle_component_probabilities,
)
from .records import FORMATS, emit_records, format_float
from .state_sampler import (
    DEFAULT_MAX_FULL_STATE_QUBITS,
    sample_probabilities,
    sample_probabilities_batch,
    sample_state,
)
from .streams import STREAM_ORACLE, STREAM_STATE, STREAM_VERIFY, substream
from .xeb_engine import DEFAULT_MAX_XEB_QUBITS, run_xeb

VERIFY_ALPHA = 0.01

# Histogram range [0, 16): the exponential tail mass beyond 16 is ~1e-7 per
# component and lands in a trailing open-ended bin.
HIST_RANGE_MAX = 16.0
DEFAULT_HIST_BINS = 128

_DEFAULT_CAPS = {
    "xeb": DEFAULT_MAX_XEB_QUBITS,
    "state": DEFAULT_MAX_FULL_STATE_QUBITS,
    "hist": DEFAULT_MAX_FULL_STATE_QUBITS,
    "verify": MAX_ORACLE_QUBITS,
}

# Verify-mode batches hold count x dim elements in memory per array.
_MAX_VERIFY_ELEMENTS = 1 << 26


class UsageError(Exception):
    """Bad command-line arguments (exit status 2)."""


@dataclass(frozen=True)
class RunConfig:
    """Fully validated run configuration for one command invocation."""

    command: str
    qubits: int
    samples: int | None
    seed: int
    threads: int
    out: str | None
    format: str
    bins: int | None
    phases: bool


@dataclass(frozen=True)
class RunManifest:
    """Config echo plus version, wall-clock duration and a result summary."""

    config: RunConfig
    version: str
    duration_s: float
    summary: str

    def record(self) -> dict:
        cfg = self.config
        return {
            "schema": "run_manifest/1",
            "command": cfg.command,
            "qubits": cfg.qubits,
            "samples": cfg.samples,
            "seed": cfg.seed,
            "threads": cfg.threads,
            "format": cfg.format,
            "out": cfg.out if cfg.out is not None else "-",
            "bins": cfg.bins,
            "phases": cfg.phases,
            "version": self.version,
            "duration_s": self.duration_s,
            "summary": self.summary,
        }


def _command_cap(command: str) -> int:
    env = os.environ.get("RCSFORGE_MAX_QUBITS")
    if env is None:
        return _DEFAULT_CAPS[command]
    try:
        cap = int(env)
    except ValueError:
        raise UsageError(f"RCSFORGE_MAX_QUBITS must be an integer, got {env!r}") from None
    if cap < 1:
        raise UsageError(f"RCSFORGE_MAX_QUBITS must be >= 1, got {cap}")
    if command == "verify":
        # The Gaussian-sphere oracle is hard-capped; the env var cannot lift it.
        return min(cap, MAX_ORACLE_QUBITS)
    return cap


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcsforge",
        description="Monte Carlo sampler for ideal random-circuit-sampling output",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, samples_help=None):
        p.add_argument("--qubits", type=int, required=True, help="system size n")
        if samples_help is not None:
            p.add_argument("--samples", type=int, required=True, help=samples_help)
        p.add_argument("--seed", type=int, required=True, help="64-bit run seed")
        p.add_argument("--format", choices=FORMATS, default="jsonl")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("xeb", help="estimate XEB fidelity (streamed sampling)")
    common(p, "number of Monte Carlo samples")
    p.add_argument("--threads", default="auto", help="worker count or 'auto'")

    p = sub.add_parser("state", help="sample one full random state")
    common(p)
    p.add_argument("--phases", action="store_true", help="emit phase angles too")

    p = sub.add_parser("verify", help="run the sampler-vs-oracle KS suite")
    common(p, "states per sampler")

    p = sub.add_parser("hist", help="histogram of rescaled component probabilities")
    common(p, "number of states to histogram")
    p.add_argument("--bins", type=int, default=DEFAULT_HIST_BINS,
                   help=f"bins over [0, {HIST_RANGE_MAX:g}) plus an overflow row")

    return parser


def _resolve_threads(raw) -> int:
    if raw == "auto":
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except (TypeError, ValueError):
        raise UsageError(f"--threads must be an integer or 'auto', got {raw!r}") from None
    if threads < 1:
        raise UsageError(f"--threads must be >= 1, got {threads}")
    return threads


def build_config(args: argparse.Namespace) -> RunConfig:
    cap = _command_cap(args.command)
    if args.qubits < 1:
        raise UsageError(f"--qubits must be >= 1, got {args.qubits}")
    if args.qubits > cap:
        raise UsageError(
            f"--qubits {args.qubits} exceeds the {args.command} cap of {cap} "
            "(see RCSFORGE_MAX_QUBITS)"
        )
    if not 0 <= args.seed < 1 << 64:
        raise UsageError(f"--seed must be a 64-bit unsigned integer, got {args.seed}")

    samples = getattr(args, "samples", None)
    if args.command == "xeb" and samples < 2:
        raise UsageError(f"xeb needs --samples >= 2, got {samples}")
    if args.command in ("verify", "hist") and samples < 1:
        raise UsageError(f"--samples must be >= 1, got {samples}")

    bins = getattr(args, "bins", None)
    if bins is not None and bins < 1:
        raise UsageError(f"--bins must be >= 1, got {bins}")

    threads = _resolve_threads(getattr(args, "threads", 1))
    return RunConfig(
        command=args.command,
        qubits=args.qubits,
        samples=samples,
        seed=args.seed,
        threads=threads,
        out=args.out,
        format=args.format,
        bins=bins,
        phases=bool(getattr(args, "phases", False)),
    )


def _run_xeb(config: RunConfig, stream) -> str:
    est = run_xeb(
        config.qubits,
        config.samples,
        config.seed,
        partitions=config.threads,
        max_qubits=_command_cap("xeb"),
    )
    record = {
        "schema": "xeb_estimate/1",
        "qubits": est.n_qubits,
        "samples": est.samples,
        "seed": config.seed,
        "f_xeb": est.f_xeb,
        "three_sigma": est.three_sigma,
        "theoretical": est.theoretical,
    }
    emit_records([record], config.format, stream)
    return (
        f"f_xeb={format_float(est.f_xeb)} three_sigma={format_float(est.three_sigma)} "
        f"theoretical={format_float(est.theoretical)}"
    )


def _run_state(config: RunConfig, stream) -> str:
    dims = SystemDims(config.qubits)
    rng = substream(config.seed, STREAM_STATE, 0)
    state = sample_state(dims, rng, max_qubits=_command_cap("state"))
    d = int(dims.dim)
    nbytes = (config.qubits + 7) // 8
    permuted = state.probs.probs[state.perm]  # component probability at basis index b
    schema = "state_row_phase/1" if config.phases else "state_row/1"

    def rows():
        for i in range(d):
            record = {
                "schema": schema,
                "index": i,
                "bitstring": i.to_bytes(nbytes, "little").hex(),
                "p": float(permuted[i]),
            }
            if config.phases:
                record["phase"] = float(state.phases[i])
            yield record

    emit_records(rows(), config.format, stream)
    return f"rows={d}"


def _verify_reports(qubits: int, samples: int, seed: int) -> list[tuple[str, KsReport]]:
    """The oracle-equivalence KS suite: sampler and oracle vs the exact law."""
    dims = SystemDims(qubits)
    d = int(dims.dim)
    if samples * d > _MAX_VERIFY_ELEMENTS:
        raise CapacityError(
            f"verify at n={qubits} with {samples} samples exceeds the "
            f"{_MAX_VERIFY_ELEMENTS}-element batch cap; use fewer samples"
        )
    sampler_side = sample_probabilities_batch(
        dims, samples, substream(seed, STREAM_VERIFY, 0)
    )[:, 0]
    oracle_side = oracle_component_probabilities(
        dims, samples, substream(seed, STREAM_ORACLE, 0)
    )

    def component_cdf(q):
        return 1.0 - eval_remaining_cdf(1.0 - q, dims)

    return [
        ("sampler_vs_exact", ks_one_sample(sampler_side, component_cdf, VERIFY_ALPHA)),
        ("oracle_vs_exact", ks_one_sample(oracle_side, component_cdf, VERIFY_ALPHA)),
        ("sampler_vs_oracle", ks_two_sample(sampler_side, oracle_side, VERIFY_ALPHA)),
    ]


def _run_verify(config: RunConfig, stream) -> str:
    reports = _verify_reports(config.qubits, config.samples, config.seed)
    records = [
        {
            "schema": "ks_report/1",
            "test": name,
            "qubits": config.qubits,
            "samples": config.samples,
            "statistic": rep.statistic,
            "n_a": rep.n_a,
            "n_b": rep.n_b,
            "alpha": rep.alpha,
            "critical_value": rep.critical_value,
            "reject": rep.reject,
        }
        for name, rep in reports
    ]
    emit_records(records, config.format, stream)
    rejects = sum(1 for _, rep in reports if rep.reject)
    return f"reports={len(records)} rejects={rejects}"


def _run_hist(config: RunConfig, stream) -> str:
    dims = SystemDims(config.qubits)
    d = int(dims.dim)
    cap = _command_cap("hist")
    edges = np.linspace(0.0, HIST_RANGE_MAX, config.bins + 1)
    counts = np.zeros(config.bins, dtype=np.int64)
    overflow = 0
    for s in range(config.samples):
        rng = substream(config.seed, STREAM_STATE, s)
        pbar = sample_probabilities(dims, rng, max_qubits=cap).probs * d
        inside = pbar < HIST_RANGE_MAX
        hist, _ = np.histogram(pbar[inside], bins=edges)
        counts += hist
        overflow += int(pbar.size - inside.sum())

    def rows():
        for i in range(config.bins):
            yield {
                "schema": "hist_bin/1",
                "bin_left": float(edges[i]),
                "bin_right": float(edges[i + 1]),
                "count": int(counts[i]),
            }
        yield {
            "schema": "hist_bin/1",
            "bin_left": HIST_RANGE_MAX,
            "bin_right": None,
            "count": overflow,
        }

    emit_records(rows(), config.format, stream)
    total = int(counts.sum()) + overflow
    return f"states={config.samples} total_count={total}"


_DISPATCH = {
    "xeb": _run_xeb,
    "state": _run_state,
    "verify": _run_verify,
    "hist": _run_hist,
}


def run_command(config: RunConfig, out_stream=None, err_stream=None) -> int:
    """Execute one configured run; emit records, then the manifest to stderr."""
    out_stream = sys.stdout if out_stream is None else out_stream
    err_stream = sys.stderr if err_stream is None else err_stream
    started = time.perf_counter()
    try:
        if config.out is None:
            summary = _DISPATCH[config.command](config, out_stream)
        else:
            with open(config.out, "w", encoding="utf-8", newline="") as fh:
                summary = _DISPATCH[config.command](config, fh)
    except RcsForgeError as exc:
        print(f"rcsforge: error: {exc}", file=err_stream)
        return 1
    except OSError as exc:
        print(f"rcsforge: i/o error: {exc}", file=err_stream)
        return 1
    manifest = RunManifest(
        config=config,
        version=__version__,
        duration_s=time.perf_counter() - started,
        summary=summary,
    )
    emit_records([manifest.record()], "jsonl", err_stream)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = build_config(args)
    except UsageError as exc:
        print(f"rcsforge: error: {exc}", file=sys.stderr)
        return 2
    return run_command(config)


if __name__ == "__main__":
    sys.exit(main())

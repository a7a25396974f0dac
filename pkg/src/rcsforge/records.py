"""Bit-exact record formats: JSONL and CSV emission plus the parser.

Every record is a flat mapping with a leading ``schema`` field naming its
versioned layout.  Field order and types are fixed by the registry below;
floats are serialized with 17 significant digits (``%.17g``), which
round-trips every binary64 value exactly, so ``parse(emit(x)) == x`` bit
for bit.  JSONL writes one object per line with keys in registry order;
CSV writes one header row plus data rows with RFC-4180 quoting and LF line
ends.  Bitstrings travel as lowercase hex of their packed bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable

from .errors import DomainError

# Field types: plain scalars plus "?"-suffixed nullable variants.
_STR = "str"
_INT = "int"
_FLOAT = "float"
_BOOL = "bool"
_OPT_INT = "int?"
_OPT_FLOAT = "float?"

SCHEMAS: dict[str, tuple[tuple[str, str], ...]] = {
    "xeb_estimate/1": (
        ("schema", _STR),
        ("qubits", _INT),
        ("samples", _INT),
        ("seed", _INT),
        ("f_xeb", _FLOAT),
        ("three_sigma", _FLOAT),
        ("theoretical", _FLOAT),
    ),
    "state_row/1": (
        ("schema", _STR),
        ("index", _INT),
        ("bitstring", _STR),
        ("p", _FLOAT),
    ),
    "state_row_phase/1": (
        ("schema", _STR),
        ("index", _INT),
        ("bitstring", _STR),
        ("p", _FLOAT),
        ("phase", _FLOAT),
    ),
    "ks_report/1": (
        ("schema", _STR),
        ("test", _STR),
        ("qubits", _INT),
        ("samples", _INT),
        ("statistic", _FLOAT),
        ("n_a", _INT),
        ("n_b", _OPT_INT),
        ("alpha", _FLOAT),
        ("critical_value", _FLOAT),
        ("reject", _BOOL),
    ),
    "hist_bin/1": (
        ("schema", _STR),
        ("bin_left", _FLOAT),
        ("bin_right", _OPT_FLOAT),
        ("count", _INT),
    ),
    "rescaled_sample/1": (
        ("schema", _STR),
        ("pbar", _FLOAT),
        ("bitstring", _STR),
    ),
    "run_manifest/1": (
        ("schema", _STR),
        ("command", _STR),
        ("qubits", _INT),
        ("samples", _OPT_INT),
        ("seed", _INT),
        ("threads", _INT),
        ("format", _STR),
        ("out", _STR),
        ("bins", _OPT_INT),
        ("phases", _BOOL),
        ("version", _STR),
        ("duration_s", _FLOAT),
        ("summary", _STR),
    ),
}

FORMATS = ("jsonl", "csv")


def format_float(value: float) -> str:
    """17-significant-digit decimal form; exact round-trip for binary64."""
    if not math.isfinite(value):
        raise DomainError(f"cannot serialize non-finite float {value!r}")
    return "%.17g" % value


def _check_value(value, ftype: str, key: str):
    if value is None:
        if not ftype.endswith("?"):
            raise DomainError(f"field {key!r} of type {ftype} cannot be null")
        return
    base = ftype.rstrip("?")
    ok = {
        _STR: lambda v: isinstance(v, str),
        _BOOL: lambda v: isinstance(v, bool),
        _INT: lambda v: isinstance(v, int) and not isinstance(v, bool),
        _FLOAT: lambda v: isinstance(v, float),
    }[base](value)
    if not ok:
        raise DomainError(f"field {key!r} expected {base}, got {value!r}")


def _json_token(value, ftype: str) -> str:
    if value is None:
        return "null"
    base = ftype.rstrip("?")
    if base == _FLOAT:
        return format_float(value)
    if base == _BOOL:
        return "true" if value else "false"
    if base == _INT:
        return str(value)
    return json.dumps(value)


def _csv_token(value, ftype: str) -> str:
    if value is None:
        return ""
    base = ftype.rstrip("?")
    if base == _FLOAT:
        return format_float(value)
    if base == _BOOL:
        return "true" if value else "false"
    if base == _INT:
        return str(value)
    return value


def _schema_fields(schema: str) -> tuple[tuple[str, str], ...]:
    try:
        return SCHEMAS[schema]
    except KeyError:
        raise DomainError(f"unknown record schema {schema!r}") from None


def emit_records(records: Iterable[dict], fmt: str, stream, *, schema: str | None = None):
    """Write homogeneous records to a text stream in the given format.

    ``schema`` is only needed when ``records`` may be empty (CSV still gets
    its header); otherwise it is read from the first record.  Records must
    carry exactly the registry fields, in order.
    """
    if fmt not in FORMATS:
        raise DomainError(f"format must be one of {FORMATS}, got {fmt!r}")
    it = iter(records)
    first = next(it, None)
    if first is not None:
        schema = first["schema"]
    if schema is None:
        raise DomainError("empty record stream needs an explicit schema")
    fields = _schema_fields(schema)

    writer = csv.writer(stream, lineterminator="\n") if fmt == "csv" else None
    if writer is not None:
        writer.writerow([key for key, _ in fields])

    def write_one(record: dict):
        if record["schema"] != schema:
            raise DomainError("records in one stream must share a schema")
        if tuple(record.keys()) != tuple(key for key, _ in fields):
            raise DomainError(f"record fields do not match schema {schema!r}")
        for key, ftype in fields:
            _check_value(record[key], ftype, key)
        if writer is not None:
            writer.writerow([_csv_token(record[key], ftype) for key, ftype in fields])
        else:
            body = ",".join(
                f"{json.dumps(key)}:{_json_token(record[key], ftype)}" for key, ftype in fields
            )
            stream.write("{" + body + "}\n")

    if first is not None:
        write_one(first)
        for record in it:
            write_one(record)


def _parse_typed(raw, ftype: str, key: str, from_csv: bool):
    nullable = ftype.endswith("?")
    base = ftype.rstrip("?")
    if from_csv:
        if raw == "" and nullable:
            return None
        if base == _FLOAT:
            return float(raw)
        if base == _INT:
            return int(raw)
        if base == _BOOL:
            if raw not in ("true", "false"):
                raise DomainError(f"field {key!r}: invalid bool token {raw!r}")
            return raw == "true"
        return raw
    if raw is None:
        if not nullable:
            raise DomainError(f"field {key!r} cannot be null")
        return None
    if base == _FLOAT:
        if not isinstance(raw, (int, float)) or isinstance(raw, bool):
            raise DomainError(f"field {key!r} expected number, got {raw!r}")
        return float(raw)
    if base == _INT:
        if not isinstance(raw, int) or isinstance(raw, bool):
            raise DomainError(f"field {key!r} expected int, got {raw!r}")
        return raw
    if base == _BOOL:
        if not isinstance(raw, bool):
            raise DomainError(f"field {key!r} expected bool, got {raw!r}")
        return raw
    if not isinstance(raw, str):
        raise DomainError(f"field {key!r} expected string, got {raw!r}")
    return raw


def parse_records(text: str, fmt: str) -> list[dict]:
    """Parse emitted output back into typed records (inverse of emit)."""
    if fmt not in FORMATS:
        raise DomainError(f"format must be one of {FORMATS}, got {fmt!r}")
    out = []
    if fmt == "jsonl":
        for line in text.splitlines():
            if not line:
                continue
            obj = json.loads(line)
            fields = _schema_fields(obj["schema"])
            out.append(
                {key: _parse_typed(obj[key], ftype, key, False) for key, ftype in fields}
            )
        return out
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return out
    header = rows[0]
    for row in rows[1:]:
        values = dict(zip(header, row))
        fields = _schema_fields(values["schema"])
        if [key for key, _ in fields] != header:
            raise DomainError("CSV header does not match record schema")
        out.append(
            {key: _parse_typed(values[key], ftype, key, True) for key, ftype in fields}
        )
    return out

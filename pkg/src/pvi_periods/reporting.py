"""Check records and deterministic report serialization.

Every verification suite produces a flat list of CheckRecord values; a
Report bundles them with the echoed configuration and renders to JSON or
CSV.  Rendering is canonical — records sorted by (check_id, inputs), keys
sorted, floats in shortest round-trip form — so identical configurations
produce byte-identical files.

Complex values cross the wire as "a+bi" / "a-bi" strings with no spaces.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError

_SKIP_PREFIX = "skipped"


# ---------------------------------------------------------------------------
# Wire format for complex scalars


def format_complex(z):
    """Render a complex number as "a+bi" / "a-bi" with no spaces."""
    z = complex(z)
    re, im = z.real, z.imag
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"{re!r}{sign}{abs(im)!r}i"


def parse_complex(text):
    """Parse "a+bi" (or a plain real) back into a complex number."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    cleaned = str(text).strip().replace(" ", "")
    try:
        return complex(cleaned.replace("i", "j"))
    except ValueError:
        raise DomainError(f"cannot parse {text!r} as a complex number") from None


def encode_value(value):
    """JSON-safe encoding of a scalar or (possibly nested) sequence.

    Complex values become wire strings, Fractions become "p/q", tuples
    become lists; everything else passes through.
    """
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, complex):
        return format_complex(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [encode_value(v) for v in value]
    if isinstance(value, dict):
        return {str(k): encode_value(v) for k, v in value.items()}
    return str(value)


def _inputs_key(encoded_inputs):
    return json.dumps(encoded_inputs, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Records


@dataclass(frozen=True)
class CheckRecord:
    """One verified identity: its residual, gate, verdict and annotations.

    passed is residual < tol except for records flagged "skipped", which a
    suite emits when a movable pole (or a rejected convention) makes the
    check meaningless at that point; skipped records never pass and never
    count against the exit status.
    """

    check_id: str
    inputs: dict
    residual: float | None
    tol: float
    passed: bool
    notes: tuple = ()

    @classmethod
    def from_residual(cls, check_id, inputs, residual, tol, notes=()):
        residual = float(residual)
        return cls(check_id, dict(inputs), residual, float(tol), residual < tol, tuple(notes))

    @classmethod
    def skipped(cls, check_id, inputs, tol, note):
        note = str(note)
        if not note.startswith(_SKIP_PREFIX):
            note = f"{_SKIP_PREFIX}: {note}"
        return cls(check_id, dict(inputs), None, float(tol), False, (note,))

    @property
    def is_skipped(self):
        return any(n.startswith(_SKIP_PREFIX) for n in self.notes)

    def encoded(self):
        residual = self.residual
        if residual is not None and not math.isfinite(residual):
            # Strict JSON has no Infinity; a domain-error record carries it
            # as the string "inf" (pass is already False).
            residual = repr(residual)
        return {
            "check_id": self.check_id,
            "inputs": encode_value(self.inputs),
            "residual": residual,
            "tol": self.tol,
            "pass": self.passed,
            "notes": list(self.notes),
        }


def sort_records(records):
    """Canonical report order: by check_id, then by the encoded inputs."""
    return sorted(records, key=lambda r: (r.check_id, _inputs_key(encode_value(r.inputs))))


@dataclass
class Report:
    """A configuration echo plus its check records, in canonical order."""

    config: dict
    records: list = field(default_factory=list)

    def __post_init__(self):
        self.records = sort_records(self.records)

    @property
    def summary(self):
        skipped = sum(r.is_skipped for r in self.records)
        passed = sum(r.passed for r in self.records)
        return {
            "total": len(self.records),
            "passed": passed,
            "failed": len(self.records) - passed - skipped,
            "skipped": skipped,
        }

    @property
    def all_passed(self):
        return self.summary["failed"] == 0

    def payload(self):
        return {
            "config": encode_value(self.config),
            "records": [r.encoded() for r in self.records],
            "summary": self.summary,
        }


# ---------------------------------------------------------------------------
# Rendering


def render_json(payload):
    """Canonical JSON bytes-as-text: sorted keys, two-space indent."""
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _inputs_cell(encoded_inputs):
    return ";".join(f"{k}={encoded_inputs[k]}" for k in sorted(encoded_inputs))


def render_csv(payload):
    """One CheckRecord per row; complex values already in wire form."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["check_id", "inputs", "residual", "tol", "pass", "notes"])
    for rec in payload["records"]:
        residual = rec["residual"]
        if residual is None:
            residual = ""
        elif not isinstance(residual, str):
            residual = repr(residual)
        writer.writerow(
            [
                rec["check_id"],
                _inputs_cell(rec["inputs"]),
                residual,
                repr(rec["tol"]),
                "true" if rec["pass"] else "false",
                " | ".join(rec["notes"]),
            ]
        )
    return out.getvalue()


def render_sweep_json(payload):
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def render_sweep_csv(payload):
    """Plot-data rows: x, Re y, Im y, Re y', Im y', |residual|."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["x", "re_y", "im_y", "re_yp", "im_yp", "abs_residual"])
    for row in payload["rows"]:
        writer.writerow([row[0]] + [repr(v) for v in row[1:]])
    return out.getvalue()

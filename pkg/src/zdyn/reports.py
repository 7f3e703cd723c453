"""Uniform verdict reports for the property checkers."""

from __future__ import annotations

from dataclasses import dataclass, field

HOLDS = "HOLDS"
FAILS = "FAILS"
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Report:
    """A (tag, verdict, witnesses) triple with optional extra details.

    ``tag`` names the property being checked, ``verdict`` is one of HOLDS,
    FAILS or UNKNOWN (checkers with richer outcomes document their own
    vocabulary), and ``witnesses`` carries whatever finite evidence the
    verdict rests on.
    """

    tag: str
    verdict: str
    witnesses: tuple = ()
    details: dict = field(default_factory=dict, hash=False)

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "verdict": self.verdict,
            "witnesses": [_plain(w) for w in self.witnesses],
            "details": {k: _plain(v) for k, v in self.details.items()},
        }


def _plain(value):
    """Recursively turn report payloads into JSON-friendly structures."""
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    if hasattr(value, "to_json"):
        return value.to_json()
    return str(value)

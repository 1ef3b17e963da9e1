"""CSV text helpers shared by the writers."""

from __future__ import annotations

from .errors import FracsimError


def fmt17(x) -> str:
    """17 significant digits: round-trip exact for 64-bit values."""
    return format(float(x), ".17g")


def open_for_write(path):
    """Text handle with fixed newline discipline; failures name the path."""
    try:
        return open(path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise FracsimError(f"cannot write {path}: {exc}") from exc

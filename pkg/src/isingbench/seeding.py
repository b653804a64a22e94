"""Deterministic seed derivation for solver runs and benchmark cells."""

from __future__ import annotations

import hashlib


def derive_seed(*parts):
    """Stable 31-bit seed from the given parts (SHA-256 of their text form).

    Used to fan a single run seed out into independent per-read, per-restart,
    and per-cell streams without correlated low bits.
    """
    text = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:4], "big") & 0x7FFFFFFF

"""Binary words and partially erased words.

A bit word is a ``bytes`` object whose entries are 0 or 1.  A received word
over the erasure channel is also ``bytes`` but may additionally contain the
value :data:`ERASED`.  Bytes are used (rather than lists or arrays) so that
words are immutable, hashable and cheap to compare; numpy views are taken
where bulk arithmetic is needed.
"""

from __future__ import annotations

import numpy as np

ERASED = 2


class LengthMismatch(ValueError):
    """Two words that must have equal length do not."""


def parse_bits(text: str) -> bytes:
    """Turn ``"0110"`` into a bit word."""
    out = bytearray()
    for ch in text:
        if ch == "0":
            out.append(0)
        elif ch == "1":
            out.append(1)
        else:
            raise ValueError(f"invalid bit character {ch!r}")
    return bytes(out)


def bits_str(word: bytes) -> str:
    """Render a bit word (or erased word) as text; erasures print as '?'."""
    return "".join("?" if b == ERASED else str(b) for b in word)


def constant_word(bit: int, length: int) -> bytes:
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    if length <= 0:
        raise ValueError("length must be positive")
    return bytes([bit]) * length


def as_array(word: bytes) -> np.ndarray:
    return np.frombuffer(word, dtype=np.uint8)


def hamming(a: bytes, b: bytes) -> int:
    if len(a) != len(b):
        raise LengthMismatch(f"length {len(a)} vs {len(b)}")
    return int(np.count_nonzero(as_array(a) != as_array(b)))


def erasure_count(received: bytes) -> int:
    return received.count(ERASED)


def apply_erasures(word: bytes, mask: np.ndarray) -> bytes:
    """Erase the positions of ``word`` where ``mask`` is true."""
    if len(mask) != len(word):
        raise LengthMismatch(f"mask length {len(mask)} vs word length {len(word)}")
    out = as_array(word).copy()
    out[np.asarray(mask, dtype=bool)] = ERASED
    return out.tobytes()


def mask_str(mask: np.ndarray) -> str:
    """Encode an erasure mask as a 0/1 string (1 = erased)."""
    return "".join("1" if m else "0" for m in np.asarray(mask, dtype=bool))


def parse_mask(text: str) -> np.ndarray:
    return np.array([ch == "1" for ch in text], dtype=bool)


def consistent(word: bytes, received: bytes) -> bool:
    """True iff every non-erased symbol of ``received`` matches ``word``."""
    if len(word) != len(received):
        raise LengthMismatch(f"length {len(word)} vs {len(received)}")
    w = as_array(word)
    r = as_array(received)
    visible = r != ERASED
    return bool(np.array_equal(w[visible], r[visible]))


def visible_bits(received: bytes) -> list[tuple[int, int]]:
    """(position, bit) pairs for the non-erased symbols, in order."""
    return [(i, b) for i, b in enumerate(received) if b != ERASED]


def last_visible_bit(received: bytes) -> int | None:
    """Rightmost non-erased symbol of a received word, or None."""
    for b in reversed(received):
        if b != ERASED:
            return b
    return None

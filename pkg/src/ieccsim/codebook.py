"""Small binary codebooks with certified distance properties.

A codebook is an indexed family of equal-length bit words used as a message
space over the erasure channel.  Construction is a seeded randomized greedy
accumulation: candidate words are drawn uniformly and kept only if they meet
the pairwise-distance requirement against every accepted word and every
forbidden word.  The result is then certified by an explicit distance scan;
nothing is trusted from the construction itself.

Distance thresholds round toward the stricter side: required distances are
ceilings, allowed overlaps are floors.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rationals import ceil_mul, count_less_than, floor_mul, fraction_str, parse_fraction
from .words import ERASED, LengthMismatch, as_array, bits_str, parse_bits


class ConstructionFailed(RuntimeError):
    """Randomized construction could not satisfy the distance constraints."""


class IndexOutOfRange(IndexError):
    """Codeword index outside 0..count-1."""


# Above this many words, verify_distance falls back to sampled triple scans.
EXHAUSTIVE_TRIPLE_LIMIT = 200


@dataclass(frozen=True)
class Codebook:
    """An indexed set of equal-length bit words plus its construction inputs.

    ``epsilon`` is the distance tolerance: pairwise and forbidden-word
    distances must be at least ceil((1/2 - epsilon) * length).
    """

    words: tuple[bytes, ...]
    length: int
    epsilon: Fraction
    forbidden: tuple[bytes, ...]
    seed: int

    @property
    def count(self) -> int:
        return len(self.words)

    def required_distance(self) -> int:
        return ceil_mul(Fraction(1, 2) - self.epsilon, self.length)

    def allowed_triple_overlap(self) -> int:
        return floor_mul(Fraction(1, 4) + Fraction(3, 2) * self.epsilon, self.length)

    def decode_erasure_bound(self) -> Fraction:
        """Erasure fraction below which list decoding returns at most 2 words."""
        return Fraction(3, 4) - Fraction(3, 2) * self.epsilon


@dataclass(frozen=True)
class DistanceReport:
    min_pairwise: int
    min_forbidden: int
    max_triple_overlap: int
    triple_samples: int | None  # None = exhaustive scan
    certified: bool


def codebook_from_words(
    words: list[bytes] | tuple[bytes, ...],
    epsilon: Fraction,
    forbidden: tuple[bytes, ...] = (),
    seed: int = 0,
) -> Codebook:
    """Wrap externally supplied words as a Codebook (no certification)."""
    words = tuple(words)
    if not words:
        raise ValueError("codebook needs at least one word")
    length = len(words[0])
    if length == 0:
        raise ValueError("words must be nonempty")
    for w in tuple(words) + tuple(forbidden):
        if len(w) != length:
            raise LengthMismatch("all words must share one length")
        if any(b not in (0, 1) for b in w):
            raise ValueError("words must be binary")
    if not (0 <= epsilon < Fraction(1, 4)):
        raise ValueError("epsilon must lie in [0, 1/4)")
    return Codebook(words, length, epsilon, tuple(forbidden), seed)


def encode(cb: Codebook, index: int) -> bytes:
    if not 0 <= index < cb.count:
        raise IndexOutOfRange(f"index {index} outside 0..{cb.count - 1}")
    return cb.words[index]


def consistent(word: bytes, received: bytes) -> bool:
    """Erasure-channel consistency: non-erased symbols of received match word."""
    from .words import consistent as _consistent

    return _consistent(word, received)


class ListDecoder:
    """Brute-force erasure list decoder over a codebook plus extra words.

    Candidates are returned in canonical order: codebook indices ascending,
    then extra words (labelled ``"extra0"``, ``"extra1"``, ...) in declaration
    order.
    """

    def __init__(self, cb: Codebook, extra_words: tuple[bytes, ...] = ()):
        for w in extra_words:
            if len(w) != cb.length:
                raise LengthMismatch("extra word length differs from codebook length")
        self.codebook = cb
        self.extra_words = tuple(extra_words)
        self.labels: list[int | str] = list(range(cb.count)) + [
            f"extra{k}" for k in range(len(extra_words))
        ]
        pool = list(cb.words) + list(extra_words)
        self._array = np.array([list(w) for w in pool], dtype=np.uint8)

    def decode(self, received: bytes) -> list[int | str]:
        if len(received) != self.codebook.length:
            raise LengthMismatch("received length differs from codebook length")
        r = as_array(received)
        visible = r != ERASED
        ok = (self._array[:, visible] == r[visible]).all(axis=1)
        return [label for label, good in zip(self.labels, ok) if good]


@functools.lru_cache(maxsize=128)
def _cached_decoder(cb: Codebook, extra_words: tuple[bytes, ...]) -> ListDecoder:
    return ListDecoder(cb, extra_words)


def erasure_list_decode(
    cb: Codebook, received: bytes, extra_words: tuple[bytes, ...] = ()
) -> list[int | str]:
    """All codebook/extra words consistent with the received word."""
    return _cached_decoder(cb, tuple(extra_words)).decode(received)


def _packed(pool: list[bytes], length: int) -> tuple[np.ndarray, np.ndarray]:
    """Bit-pack words into uint8 rows plus a padding mask for the tail byte."""
    arr = np.array([list(w) for w in pool], dtype=np.uint8)
    packed = np.packbits(arr, axis=1)
    pad_mask = np.unpackbits(np.full(packed.shape[1], 0xFF, dtype=np.uint8))[:length]
    keep = np.packbits(pad_mask)
    return packed, keep


def _max_triple_overlap_exhaustive(pool: list[bytes], length: int) -> int:
    n = len(pool)
    if n < 3:
        return 0
    packed, keep = _packed(pool, length)
    best = 0
    for i in range(n - 2):
        # eq[r] has a 1 exactly where word r agrees with word i
        eq = (~(packed ^ packed[i]) & keep).astype(np.uint8)
        for j in range(i + 1, n - 1):
            both = eq[j] & eq[j + 1 :]
            counts = np.bitwise_count(both).sum(axis=1)
            m = int(counts.max())
            if m > best:
                best = m
    return best


def _max_triple_overlap_sampled(
    pool: list[bytes], length: int, samples: int, seed: int
) -> int:
    n = len(pool)
    if n < 3:
        return 0
    rng = np.random.default_rng(seed)
    arr = np.array([list(w) for w in pool], dtype=np.uint8)
    best = 0
    idx = rng.integers(0, n, size=(samples, 3))
    # resample degenerate triples deterministically by shifting
    for a, b, c in idx:
        if a == b or b == c or a == c:
            b = (a + 1) % n
            c = (a + 2) % n
        overlap = int(np.count_nonzero((arr[a] == arr[b]) & (arr[a] == arr[c])))
        if overlap > best:
            best = overlap
    return best


def verify_distance(
    cb: Codebook,
    triple_mode: str = "auto",
    sample_count: int = 20000,
    sample_seed: int = 0,
) -> DistanceReport:
    """Recompute and certify the codebook's distance properties.

    ``triple_mode`` is one of ``"auto"``, ``"exhaustive"``, ``"sampled"``.
    The triple scan runs over the codebook words together with the forbidden
    words, because decoding treats both as candidates.
    """
    arr = np.array([list(w) for w in cb.words], dtype=np.uint8)
    if cb.count >= 2:
        diffs = (arr[:, None, :] != arr[None, :, :]).sum(axis=2)
        diffs[np.arange(cb.count), np.arange(cb.count)] = cb.length + 1
        min_pairwise = int(diffs.min())
    else:
        min_pairwise = cb.length  # sentinel for the vacuous single-word case
    if cb.forbidden:
        farr = np.array([list(w) for w in cb.forbidden], dtype=np.uint8)
        min_forbidden = int((arr[:, None, :] != farr[None, :, :]).sum(axis=2).min())
    else:
        min_forbidden = cb.length

    pool = list(cb.words) + list(cb.forbidden)
    if triple_mode == "auto":
        triple_mode = "exhaustive" if len(pool) <= EXHAUSTIVE_TRIPLE_LIMIT else "sampled"
    if triple_mode == "exhaustive":
        max_overlap = _max_triple_overlap_exhaustive(pool, cb.length)
        samples = None
    elif triple_mode == "sampled":
        max_overlap = _max_triple_overlap_sampled(pool, cb.length, sample_count, sample_seed)
        samples = sample_count
    else:
        raise ValueError(f"unknown triple mode {triple_mode!r}")

    required = cb.required_distance()
    certified = (
        min_pairwise >= required
        and min_forbidden >= required
        and max_overlap <= cb.allowed_triple_overlap()
    )
    return DistanceReport(min_pairwise, min_forbidden, max_overlap, samples, certified)


def build_codebook(
    message_count: int,
    length: int,
    epsilon: Fraction,
    forbidden: tuple[bytes, ...] = (),
    seed: int = 0,
    triple_mode: str = "auto",
    max_attempts: int = 8,
) -> Codebook:
    """Randomized greedy construction of a certified codebook.

    Deterministic for fixed arguments.  Raises ConstructionFailed when the
    requested size appears infeasible at this length and tolerance.
    """
    if message_count < 1:
        raise ValueError("message_count must be positive")
    if length < 1:
        raise ValueError("length must be positive")
    if not (0 <= epsilon < Fraction(1, 4)):
        raise ValueError("epsilon must lie in [0, 1/4)")
    for w in forbidden:
        if len(w) != length:
            raise LengthMismatch("forbidden word length differs")

    required = ceil_mul(Fraction(1, 2) - epsilon, length)
    allowed = floor_mul(Fraction(1, 4) + Fraction(3, 2) * epsilon, length)
    fixed = np.array([list(w) for w in forbidden], dtype=np.uint8).reshape(
        len(forbidden), length
    )

    for attempt in range(max_attempts):
        rng = np.random.default_rng([seed, attempt, message_count, length])
        pool = [fixed[i] for i in range(len(forbidden))]  # forbidden words first
        accepted: list[np.ndarray] = []
        # packed agreement rows of the pool against itself are rebuilt lazily
        draws_left = 400 * message_count + 2000
        while len(accepted) < message_count and draws_left > 0:
            draws_left -= 1
            cand = rng.integers(0, 2, size=length, dtype=np.uint8)
            if pool:
                mat = np.stack(pool)
                dists = (cand != mat).sum(axis=1)
                if dists.min() < required:
                    continue
                # triple constraint: the candidate together with any existing
                # pair must not share more than the allowed overlap
                if len(pool) >= 2 and allowed < length:
                    eq = np.packbits(cand == mat, axis=-1)
                    ok = True
                    for i in range(len(pool) - 1):
                        both = eq[i] & eq[i + 1 :]
                        if int(np.bitwise_count(both).sum(axis=1).max()) > allowed:
                            ok = False
                            break
                    if not ok:
                        continue
            accepted.append(cand)
            pool.append(cand)
        if len(accepted) < message_count:
            continue
        cb = Codebook(
            tuple(w.tobytes() for w in accepted), length, epsilon, tuple(forbidden), seed
        )
        if verify_distance(cb, triple_mode).certified:
            return cb
    raise ConstructionFailed(
        f"no certified codebook with {message_count} words of length {length} "
        f"at epsilon {epsilon} after {max_attempts} attempts"
    )


def list_size_guard(cb: Codebook, received: bytes) -> bool:
    """True when the received word is decodable with a list-size-2 guarantee."""
    return count_less_than(
        received.count(ERASED), cb.length, cb.decode_erasure_bound()
    )


def dump_codebook(cb: Codebook) -> str:
    lines = [
        f"iecc-codebook v1 count={cb.count} length={cb.length} "
        f"epsilon={fraction_str(cb.epsilon)} seed={cb.seed}"
    ]
    lines.extend(bits_str(w) for w in cb.words)
    lines.append("forbidden:")
    lines.extend(bits_str(w) for w in cb.forbidden)
    return "\n".join(lines) + "\n"


def load_codebook(text: str) -> Codebook:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split()
    if header[:2] != ["iecc-codebook", "v1"]:
        raise ValueError("not an iecc-codebook v1 file")
    fields = dict(part.split("=", 1) for part in header[2:])
    count = int(fields["count"])
    length = int(fields["length"])
    epsilon = parse_fraction(fields["epsilon"])
    seed = int(fields["seed"])
    words = [parse_bits(ln) for ln in lines[1 : 1 + count]]
    if lines[1 + count] != "forbidden:":
        raise ValueError("missing forbidden section")
    forbidden = [parse_bits(ln) for ln in lines[2 + count :]]
    for w in words + forbidden:
        if len(w) != length:
            raise ValueError("word length disagrees with header")
    return Codebook(tuple(words), length, epsilon, tuple(forbidden), seed)


def save_codebook(cb: Codebook, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_codebook(cb))


def read_codebook(path: str) -> Codebook:
    with open(path, encoding="ascii") as fh:
        return load_codebook(fh.read())

"""State machines for the 6/11-resilient interactive protocol.

Each chunk, Alice sends an M-bit word from her codebook (or, after she has
committed to a terminal answer bit, a constant word) and Bob replies with one
of four fixed (3M/8)-bit words of pairwise relative distance 2/3.  Bob drives
Alice's counter toward the first index where his two candidate inputs differ
by flipping between his first two words; his last two words ask for the value
of her input at the counter or for the counter's parity.

Both machines are pure step functions over immutable state values; the
input word is carried inside the state so that steps are self-contained.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from fractions import Fraction

from .channel import Position, SessionConfig
from .codebook import Codebook, ListDecoder, build_codebook
from .rationals import count_at_least
from .words import bits_str, consistent, constant_word, erasure_count, last_visible_bit

# Bob's four codewords, as repeating 3-bit patterns (relative distance 2/3).
BOB_PATTERNS = ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))


def bob_codeword(symbol: int, M: int) -> bytes:
    """Bob's word for symbol 0..3: pattern repeated to length 3M/8."""
    return bytes(BOB_PATTERNS[symbol]) * (M // 8)


class Codec611:
    """Joint (input, counter) codebook plus the fixed extra words."""

    def __init__(self, n: int, M: int, code_epsilon: Fraction, codebook_seed: int):
        self.n = n
        self.M = M
        zero = constant_word(0, M)
        one = constant_word(1, M)
        count = (2**n) * (n + 1)
        mode = "exhaustive" if count + 2 <= 400 else "sampled"
        self.codebook: Codebook = build_codebook(
            count, M, code_epsilon, forbidden=(zero, one), seed=codebook_seed,
            triple_mode=mode,
        )
        self.extras = (zero, one)
        self.decoder = ListDecoder(self.codebook, self.extras)
        self.bob_words = tuple(bob_codeword(s, M) for s in range(4))
        self.bob_len = 3 * M // 8

    def index_of(self, x: bytes, cnt: int) -> int:
        x_int = 0
        for bit in x:
            x_int = (x_int << 1) | bit
        return x_int * (self.n + 1) + cnt

    def fields_of(self, index: int) -> tuple[bytes, int]:
        x_int, cnt = divmod(index, self.n + 1)
        x = bytes((x_int >> (self.n - 1 - i)) & 1 for i in range(self.n))
        return x, cnt

    def encode(self, x: bytes, cnt: int) -> bytes:
        return self.codebook.words[self.index_of(x, cnt)]


@functools.lru_cache(maxsize=32)
def get_codec611(n: int, M: int, code_epsilon: Fraction, codebook_seed: int) -> Codec611:
    return Codec611(n, M, code_epsilon, codebook_seed)


@dataclass(frozen=True)
class Alice611State:
    x: bytes
    cnt: int
    mes: int  # Bob's last word (0 or 1) that got through, initially 0
    terminal: int | None
    last_sent: bytes


@dataclass(frozen=True)
class Bob611State:
    phase: int  # 1 or 2
    xhat: bytes | None
    xhat0: bytes | None
    xhat1: bytes | None
    i: int | None
    mes: int  # last word (0 or 1) sent, initially 0
    last: int
    ques: int | None
    par: int | None
    last_received_bit: int | None


def alice611_initial(codec: Codec611, x: bytes) -> Alice611State:
    return Alice611State(x=x, cnt=0, mes=0, terminal=None, last_sent=codec.encode(x, 0))


def alice611_step(
    codec: Codec611, st: Alice611State, received: bytes, pos: Position
) -> tuple[Alice611State, bytes, list[dict]]:
    """One chunk of Alice's behaviour given Bob's latest (masked) word."""
    events: list[dict] = []
    if st.terminal is not None:
        return st, st.last_sent, events

    L = codec.bob_len
    e = erasure_count(received)
    if 3 * e >= 2 * L:
        # Too erased to decide between Bob's words: repeat the last message.
        return st, st.last_sent, events

    cands = [s for s in range(4) if consistent(codec.bob_words[s], received)]
    events.append({"kind": "decode", "candidates": cands})
    if len(cands) != 1:
        events.append({"kind": "flag", "name": "bob_word_ambiguous"})
        return st, st.last_sent, events
    s = cands[0]

    if s in (0, 1):
        if s == st.mes:
            return st, st.last_sent, events
        cnt = st.cnt + 1
        if cnt > codec.n:
            events.append({"kind": "flag", "name": "cnt_overflow"})
            cnt = codec.n
        word = codec.encode(st.x, cnt)
        return replace(st, cnt=cnt, mes=s, last_sent=word), word, events

    if s == 2:
        idx = st.cnt
        if idx > codec.n - 1:
            events.append({"kind": "flag", "name": "answer_index_clamped"})
            idx = codec.n - 1
        bit = st.x[idx]
    else:  # s == 3
        bit = st.cnt % 2
    word = constant_word(bit, codec.M)
    return replace(st, terminal=bit, last_sent=word), word, events


def _first_diff(a: bytes, b: bytes) -> int:
    for k, (u, v) in enumerate(zip(a, b)):
        if u != v:
            return k
    raise ValueError("words do not differ")


def bob611_initial() -> Bob611State:
    return Bob611State(
        phase=1, xhat=None, xhat0=None, xhat1=None, i=None,
        mes=0, last=0, ques=None, par=None, last_received_bit=None,
    )


def bob611_step(
    codec: Codec611, st: Bob611State, received: bytes, pos: Position
) -> tuple[Bob611State, bytes, list[dict]]:
    events: list[dict] = []
    lvb = last_visible_bit(received)
    if lvb is not None:
        st = replace(st, last_received_bit=lvb)

    if st.xhat is not None:
        return st, codec.bob_words[1], events
    if st.phase == 2:
        return st, codec.bob_words[st.ques], events

    M = codec.M
    e = erasure_count(received)
    if count_at_least(e, M, codec.codebook.decode_erasure_bound()):
        return st, codec.bob_words[st.mes], events

    labels = codec.decoder.decode(received)
    events.append({"kind": "decode", "candidates": labels})
    if len(labels) > 2:
        events.append({"kind": "flag", "name": "list_size_exceeded"})
        return st, codec.bob_words[st.mes], events

    ecc = [lab for lab in labels if isinstance(lab, int)]
    if len(ecc) <= 1:
        # Unique decode, possibly next to one constant word: the codeword
        # candidate must be Alice's true message.
        if len(ecc) == 1:
            x, _cnt = codec.fields_of(ecc[0])
            st = replace(st, xhat=x)
            events.append({"kind": "xhat_set", "via": "case2", "x": bits_str(x)})
            return st, codec.bob_words[1], events
        events.append({"kind": "flag", "name": "zero_codeword_candidates"})
        return st, codec.bob_words[st.mes], events

    pair = [codec.fields_of(lab) for lab in ecc]

    if st.xhat0 is None:
        # First decode to two codewords: Alice cannot have incremented yet.
        (xa, ca), (xb, cb) = pair
        if ca != 0 or cb != 0:
            zero_worlds = [w for w in pair if w[1] == 0]
            if len(zero_worlds) == 1:
                x = zero_worlds[0][0]
                st = replace(st, xhat=x)
                events.append({"kind": "xhat_set", "via": "first_decode_nonzero_cnt", "x": bits_str(x)})
            else:
                events.append({"kind": "flag", "name": "first_decode_no_zero_cnt"})
                st = replace(st, xhat=xa)
                events.append({"kind": "xhat_set", "via": "flagged_fallback", "x": bits_str(xa)})
            return st, codec.bob_words[1], events
        i = _first_diff(xa, xb)
        st = replace(st, xhat0=xa, xhat1=xb, i=i)
        if i == 0:
            # The target index is already reached at counter 0; asking for the
            # value immediately keeps the counter in sync with the question.
            st = replace(st, phase=2, ques=2)
            return st, codec.bob_words[2], events
        st = replace(st, mes=1)
        return st, codec.bob_words[1], events

    # Subsequent two-codeword decode: align the pair with the stored worlds.
    (xa, ca), (xb, cb) = pair
    if xa == st.xhat0 or xb == st.xhat1:
        worlds = [(xa, ca), (xb, cb)]
    elif xa == st.xhat1 or xb == st.xhat0:
        worlds = [(xb, cb), (xa, ca)]
    else:
        worlds = [(xa, ca), (xb, cb)]
    stored = (st.xhat0, st.xhat1)
    bad = [
        b for b in (0, 1)
        if worlds[b][0] != stored[b] or worlds[b][1] not in (st.last, st.last + 1)
    ]
    if bad:
        if len(bad) == 2:
            events.append({"kind": "flag", "name": "both_worlds_inconsistent"})
            x = worlds[0][0]
            st = replace(st, xhat=x)
            events.append({"kind": "xhat_set", "via": "flagged_fallback", "x": bits_str(x)})
        else:
            x = worlds[1 - bad[0]][0]
            st = replace(st, xhat=x)
            events.append({"kind": "xhat_set", "via": "case4_inconsistent_world", "x": bits_str(x)})
        return st, codec.bob_words[1], events

    c0, c1 = worlds[0][1], worlds[1][1]
    if c0 == c1 == st.last:
        return st, codec.bob_words[st.mes], events
    if c0 == c1 == st.last + 1:
        st = replace(st, last=c0)
        if st.last >= st.i:
            if st.last > st.i:
                events.append({"kind": "flag", "name": "counter_overshoot"})
            st = replace(st, phase=2, ques=2)
            return st, codec.bob_words[2], events
        st = replace(st, mes=1 - st.mes)
        return st, codec.bob_words[st.mes], events
    # Counters differ by exactly one: ask for the parity.
    st = replace(st, phase=2, ques=3, par=c1 % 2)
    return st, codec.bob_words[3], events


def bob611_finalize(codec: Codec611, st: Bob611State) -> tuple[bytes, list[str]]:
    if st.xhat is not None:
        return st.xhat, []
    if st.phase == 2:
        d = st.last_received_bit
        if d is not None:
            if st.ques == 2:
                pick = st.xhat0 if st.xhat0[st.i] == d else st.xhat1
                return pick, []
            pick = st.xhat1 if d == st.par else st.xhat0
            return pick, []
    # Never reached a decision: deterministic substitute for a random guess.
    fallback = st.xhat0 if st.xhat0 is not None else bytes(codec.n)
    return fallback, ["finalize_fallback"]


class Alice611:
    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.codec = get_codec611(cfg.n, cfg.M, cfg.code_epsilon, cfg.codebook_seed)
        self.receive_length = self.codec.bob_len
        self.message_length = cfg.M

    def initial_state(self) -> Alice611State:
        return alice611_initial(self.codec, self.cfg.input_x)

    def step(self, st, received, pos):
        return alice611_step(self.codec, st, received, pos)

    def snapshot(self, st: Alice611State) -> dict:
        return {"cnt": st.cnt, "mes": st.mes, "terminal": st.terminal}


class Bob611:
    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.codec = get_codec611(cfg.n, cfg.M, cfg.code_epsilon, cfg.codebook_seed)
        self.receive_length = cfg.M
        self.message_length = self.codec.bob_len

    def initial_state(self) -> Bob611State:
        return bob611_initial()

    def step(self, st, received, pos):
        return bob611_step(self.codec, st, received, pos)

    def finalize(self, st) -> tuple[bytes, list[str]]:
        return bob611_finalize(self.codec, st)

    def snapshot(self, st: Bob611State) -> dict:
        return {
            "phase": st.phase, "mes": st.mes, "last": st.last,
            "ques": st.ques, "par": st.par,
            "xhat": None if st.xhat is None else bits_str(st.xhat),
        }

    def true_world_label(self, alice_state: Alice611State) -> int | str:
        """Label Alice's current message would decode to (runner check)."""
        if alice_state.terminal is not None:
            return f"extra{alice_state.terminal}"
        return self.codec.index_of(alice_state.x, alice_state.cnt)

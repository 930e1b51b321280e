"""State machines for the 3/5-resilient interactive protocol.

Rounds are grouped into chunks (one 4M-bit Alice message, one M-bit Bob
message), blocks of C chunks (Alice's ``rec`` resets) and megablocks of B
blocks (Alice's active counter resets).  Bob only ever sends the two constant
words, so a single delivered symbol tells Alice which one he sent.

Alice moves through three stages: incrementing ``cnt``, incrementing ``knt``
to learn which question to answer, and sending a constant answer bit.  Bob
tracks two candidate worlds as sets S0/S1 of the messages Alice could send
next, pruning them on every 2-decode and growing them by simulating her step
for "heard" and "did not hear" after each of his own messages.

The question index is the doubled position of the first input disagreement,
counting positions from one, so that a counter value of zero stays reserved
for the answer-0 shortcut and every input position remains addressable.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from fractions import Fraction

from .channel import Position, RoundSchedule, SessionConfig, make_schedule
from .codebook import Codebook, ListDecoder, build_codebook
from .rationals import ceil_mul, count_less_than
from .words import ERASED, bits_str, constant_word, erasure_count, last_visible_bit


class UnknownWord(ValueError):
    """A word outside Alice's message space was handed to the simulator."""


@dataclass(frozen=True)
class Fields35:
    """The tuple of values Alice encodes into each non-constant message."""

    x: bytes
    cnt: int
    cnfm: bool
    rec: bool
    knt: int  # -1 before the question stage, else 0 or 1
    stg2: bool


def question_value_bit(x: bytes, cnt: int) -> int:
    """The input bit the value question asks about at an even counter >= 2."""
    return x[cnt // 2 - 1]


def _stage2_eligible(x: bytes, cnt: int, n: int) -> bool:
    return 2 <= cnt <= 2 * n and cnt % 2 == 0 and question_value_bit(x, cnt) == 1


class Codec35:
    """Field-tuple codebook for Alice plus Bob's two constant words.

    Only dynamically reachable field tuples are encoded: a question-stage
    tuple requires an even counter whose value question answers 1, and the
    entry-freeze flag only occurs with knt=0 and rec=false.  This keeps the
    message space closed under Alice's step function.
    """

    def __init__(self, n: int, M: int, cnt_max: int, code_epsilon: Fraction, codebook_seed: int):
        self.n = n
        self.M = M
        self.cnt_max = cnt_max
        self.alice_len = 4 * M
        tuples: list[Fields35] = []
        for x_int in range(2**n):
            x = bytes((x_int >> (n - 1 - i)) & 1 for i in range(n))
            for cnt in range(cnt_max + 1):
                for cnfm in (False, True):
                    for rec in (False, True):
                        tuples.append(Fields35(x, cnt, cnfm, rec, -1, False))
                        if _stage2_eligible(x, cnt, n):
                            tuples.append(Fields35(x, cnt, cnfm, rec, 0, False))
                            tuples.append(Fields35(x, cnt, cnfm, rec, 1, False))
                            if not rec:
                                tuples.append(Fields35(x, cnt, cnfm, rec, 0, True))
        self.fields: tuple[Fields35, ...] = tuple(tuples)
        self.index_of_fields = {f: i for i, f in enumerate(self.fields)}
        zero = constant_word(0, self.alice_len)
        one = constant_word(1, self.alice_len)
        mode = "exhaustive" if len(tuples) + 2 <= 400 else "sampled"
        self.codebook: Codebook = build_codebook(
            len(tuples), self.alice_len, code_epsilon, forbidden=(zero, one),
            seed=codebook_seed, triple_mode=mode,
        )
        self.extras = (zero, one)
        self.decoder = ListDecoder(self.codebook, self.extras)
        self.fields_by_word = {w: f for w, f in zip(self.codebook.words, self.fields)}
        self.bar_words = (constant_word(0, M), constant_word(1, M))

    def encode_fields(self, f: Fields35) -> bytes:
        return self.codebook.words[self.index_of_fields[f]]

    def fields_of_word(self, word: bytes) -> Fields35 | None:
        """Field tuple for a codebook word; None for the constant words."""
        return self.fields_by_word.get(word)

    def word_of_label(self, label: int | str) -> bytes:
        if isinstance(label, int):
            return self.codebook.words[label]
        return self.extras[int(label[5:])]

    def bar(self, bit: int) -> bytes:
        return self.bar_words[bit]


@functools.lru_cache(maxsize=32)
def get_codec35(
    n: int, M: int, cnt_max: int, code_epsilon: Fraction, codebook_seed: int
) -> Codec35:
    return Codec35(n, M, cnt_max, code_epsilon, codebook_seed)


def codec_for_config(cfg: SessionConfig) -> Codec35:
    cnt_max = ceil_mul(Fraction(cfg.n) / cfg.epsilon, 1)
    return get_codec35(cfg.n, cfg.M, cnt_max, cfg.code_epsilon, cfg.codebook_seed)


# ---------------------------------------------------------------------------
# Alice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Alice35State:
    x: bytes
    stage: int  # 1, 2 or 3
    cnt: int
    cnfm: bool
    rec: bool
    knt: int
    stg2: bool
    beta: int | None
    last_sent: bytes


def alice35_initial(codec: Codec35, x: bytes) -> Alice35State:
    first = Fields35(x, 0, True, False, -1, False)
    return Alice35State(
        x=x, stage=1, cnt=0, cnfm=True, rec=False, knt=-1, stg2=False,
        beta=None, last_sent=codec.encode_fields(first),
    )


def _encode_state(codec: Codec35, st: Alice35State) -> bytes:
    return codec.encode_fields(Fields35(st.x, st.cnt, st.cnfm, st.rec, st.knt, st.stg2))


def alice35_transition(
    codec: Codec35, st: Alice35State, received: bytes, pos: Position
) -> tuple[Alice35State, bytes, list[dict]]:
    """One chunk of Alice's behaviour.

    ``received`` is Bob's latest masked word; it is ignored whenever this
    chunk begins a block, because the first message of every block is sent
    unconditionally.
    """
    events: list[dict] = []
    if st.stage == 3:
        return st, st.last_sent, events

    if pos.megablock_start:
        if st.stage == 1:
            st = replace(st, cnt=0, cnfm=True, rec=False, knt=-1, stg2=False)
        else:
            st = replace(st, cnfm=True, rec=False, knt=0, stg2=False)

    if st.stage == 2 and st.stg2:
        # Megablock in which the question stage was entered: frozen output.
        return st, st.last_sent, events

    if pos.block_start:
        st = replace(st, rec=False)
        word = _encode_state(codec, st)
        return replace(st, last_sent=word), word, events

    e = erasure_count(received)
    if e == len(received):
        return st, st.last_sent, events
    seen = {b for b in received if b != ERASED}
    if len(seen) != 1:
        events.append({"kind": "flag", "name": "mixed_bob_symbols"})
        return st, st.last_sent, events
    bit = seen.pop()

    if bit == 1:
        st = replace(st, rec=True)
        if st.cnfm:
            if st.stage == 1:
                cnt = st.cnt + 1
                if cnt > codec.cnt_max:
                    events.append({"kind": "flag", "name": "cnt_overflow"})
                    cnt = codec.cnt_max
                st = replace(st, cnt=cnt, cnfm=False)
            else:
                knt = st.knt + 1
                if knt > 1:
                    events.append({"kind": "flag", "name": "knt_overflow"})
                    knt = 1
                st = replace(st, knt=knt, cnfm=False)
    elif st.rec:
        st = replace(st, cnfm=True)
    else:
        # First word heard this block is the all-zero word: advance.
        if st.stage == 1:
            if st.cnt % 2 == 1:
                st = replace(st, stage=3, beta=1)
            elif st.cnt == 0 or st.cnt > 2 * codec.n or question_value_bit(st.x, st.cnt) == 0:
                if st.cnt > 2 * codec.n:
                    events.append({"kind": "flag", "name": "question_out_of_range"})
                st = replace(st, stage=3, beta=0)
            else:
                st = replace(st, stage=2, knt=0, stg2=True)
        else:
            st = replace(st, stage=3, beta=1 if st.knt == 0 else 0)

    if st.stage == 3:
        word = constant_word(st.beta, codec.alice_len)
    else:
        word = _encode_state(codec, st)
    return replace(st, last_sent=word), word, events


def state_from_message(codec: Codec35, message: bytes) -> Alice35State:
    """Reconstruct the unique Alice state consistent with a sent message.

    For a constant (answer-stage) message the input is irrelevant to all
    future behaviour and is filled with zeros.
    """
    if message == codec.extras[0] or message == codec.extras[1]:
        beta = message[0]
        return Alice35State(
            x=bytes(codec.n), stage=3, cnt=0, cnfm=True, rec=False, knt=-1,
            stg2=False, beta=beta, last_sent=message,
        )
    f = codec.fields_of_word(message)
    if f is None:
        raise UnknownWord("message is not in Alice's message space")
    return Alice35State(
        x=f.x, stage=1 if f.knt == -1 else 2, cnt=f.cnt, cnfm=f.cnfm,
        rec=f.rec, knt=f.knt, stg2=f.stg2, beta=None, last_sent=message,
    )


def simulate_alice_step(
    codec: Codec35, message: bytes, hears: bool, bob_bit: int, pos: Position
) -> bytes:
    """The message Alice would send at ``pos`` after having sent ``message``,
    when she hears (or misses) Bob's constant word for ``bob_bit``."""
    st = state_from_message(codec, message)
    if hears:
        received = constant_word(bob_bit, codec.M)
    else:
        received = bytes([ERASED]) * codec.M
    _st, word, _events = alice35_transition(codec, st, received, pos)
    return word


# ---------------------------------------------------------------------------
# Bob
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Bob35State:
    phase: int
    xhat: bytes | None
    xhat0: bytes | None
    xhat1: bytes | None
    s0: frozenset | None
    s1: frozenset | None
    i_target: int | None
    pending: tuple | None       # (2, world) or (3, world, beta1, j)
    stage2_world: int | None
    stage3_world: int | None
    beta1: int | None
    j: int | None
    counter0: int | None
    window: tuple | None        # (bit, until, megablock)
    last_sent_bit: int
    last_received_bit: int | None
    last_bit_since_phase: int | None


def bob35_initial() -> Bob35State:
    return Bob35State(
        phase=1, xhat=None, xhat0=None, xhat1=None, s0=None, s1=None,
        i_target=None, pending=None, stage2_world=None, stage3_world=None,
        beta1=None, j=None, counter0=None, window=None, last_sent_bit=1,
        last_received_bit=None, last_bit_since_phase=None,
    )


def _first_diff(a: bytes, b: bytes) -> int:
    for k, (u, v) in enumerate(zip(a, b)):
        if u != v:
            return k
    raise ValueError("words do not differ")


def _set_xhat(st: Bob35State, x: bytes, via: str, events: list[dict]) -> Bob35State:
    events.append({"kind": "xhat_set", "via": via, "x": bits_str(x)})
    return replace(st, xhat=x)


def _s_checks(codec: Codec35, st: Bob35State, events: list[dict]) -> None:
    if st.s0 & st.s1:
        events.append({"kind": "flag", "name": "s_overlap"})
    knt_sets = 0
    for sset in (st.s0, st.s1):
        for w in sset:
            f = codec.fields_of_word(w)
            if f is not None and f.knt in (0, 1):
                knt_sets += 1
                break
    if knt_sets > 1:
        events.append({"kind": "flag", "name": "s_double_knt"})


def _initialize(codec, st, labels, events):
    infos = []
    for lab in labels:
        word = codec.word_of_label(lab)
        f = codec.fields_of_word(word)
        if f is None:
            infos.append((word, None, False))
        else:
            plausible = f.knt == -1 and not f.stg2 and (f.cnt, f.rec) != (0, True)
            infos.append((word, f, plausible))
    plaus = [info for info in infos if info[2]]
    if len(plaus) == 2:
        (w0, f0, _), (w1, f1, _) = infos
        if f0.x == f1.x:
            return _set_xhat(st, f0.x, "init_same_x", events), None
        st = replace(
            st,
            xhat0=f0.x, xhat1=f1.x,
            s0=frozenset({w0}), s1=frozenset({w1}),
            i_target=2 * (_first_diff(f0.x, f1.x) + 1),
        )
        _s_checks(codec, st, events)
        events.append({"kind": "s_update", "S0": 1, "S1": 1})
        return st, (w0, w1)
    if len(plaus) == 1:
        # Before initialization Bob has only ever sent his all-one word, so
        # Alice must still be incrementing: the sole plausible world is hers.
        return _set_xhat(st, plaus[0][1].x, "init_unique", events), None
    events.append({"kind": "flag", "name": "init_no_plausible_world"})
    return st, None


def _consume_decode(codec, st, received, events):
    labels = codec.decoder.decode(received)
    events.append({"kind": "decode", "candidates": labels})
    if len(labels) > 2:
        events.append({"kind": "flag", "name": "list_size_exceeded"})
        return st, None

    if len(labels) == 1:
        lab = labels[0]
        word = codec.word_of_label(lab)
        f = codec.fields_of_word(word)
        if f is not None:
            return _set_xhat(st, f.x, "unique_decode", events), None
        if st.s0 is not None:
            in0 = word in st.s0
            in1 = word in st.s1
            if in0 != in1:
                x = st.xhat0 if in0 else st.xhat1
                return _set_xhat(st, x, "unique_constant", events), None
            events.append({"kind": "flag", "name": "unique_constant_unmatched"})
        else:
            events.append({"kind": "flag", "name": "preinit_constant_unique"})
        return st, None

    if st.s0 is None:
        return _initialize(codec, st, labels, events)

    words = [codec.word_of_label(lab) for lab in labels]
    for w in words:
        if w in st.s0 and w in st.s1:
            events.append({"kind": "flag", "name": "s_overlap"})
    in0 = [w for w in words if w in st.s0]
    in1 = [w for w in words if w in st.s1]
    if not in0 and not in1:
        events.append({"kind": "flag", "name": "both_worlds_inconsistent"})
        return _set_xhat(st, st.xhat0, "flagged_fallback", events), None
    if not in0:
        return _set_xhat(st, st.xhat1, "inconsistent_rule", events), None
    if not in1:
        return _set_xhat(st, st.xhat0, "inconsistent_rule", events), None
    m0, m1 = in0[0], in1[0]
    st = replace(st, s0=frozenset({m0}), s1=frozenset({m1}))
    _s_checks(codec, st, events)
    events.append({"kind": "s_update", "S0": 1, "S1": 1})
    return st, (m0, m1)


def _phase1_dispatch(codec, st, pair, pos, events):
    f0 = codec.fields_of_word(pair[0])
    f1 = codec.fields_of_word(pair[1])
    advanced = [b for b, f in enumerate((f0, f1)) if f is None or f.knt >= 0]
    if advanced:
        st = replace(st, window=(1, "megablock", pos.megablock))
        const_worlds = [b for b in (0, 1) if (f0, f1)[b] is None]
        if const_worlds:
            b = const_worlds[0]
            other = 1 - b
            f_other = (f0, f1)[other]
            if f_other is None:
                events.append({"kind": "flag", "name": "both_worlds_constant"})
                return st, None
            beta1 = pair[b][0]
            j = 1 - beta1 if f_other.knt == -1 else beta1
            pending = (3, b, beta1, j)
        else:
            knt_worlds = [b for b in (0, 1) if (f0, f1)[b].knt >= 0]
            if len(knt_worlds) == 2:
                events.append({"kind": "flag", "name": "both_worlds_stage2"})
            pending = (2, knt_worlds[0])
        if st.pending is not None and st.pending[0] != pending[0]:
            events.append({"kind": "flag", "name": "pending_conflict"})
        st = replace(st, pending=pending)
        events.append({"kind": "case", "label": "P1-advanced"})
        return st, None
    if (f0.cnt == f1.cnt == st.i_target) or (f0.cnt != f1.cnt):
        st = replace(st, window=(0, "megablock", pos.megablock))
        events.append({"kind": "case", "label": "P1C5"})
        return st, None
    if f0.rec or f1.rec:
        events.append({"kind": "case", "label": "P1C7"})
        return st, 0
    events.append({"kind": "case", "label": "P1C6"})
    return st, 1


def _phase3_dispatch(codec, st, pair, pos, events):
    other = 1 - st.stage3_world
    f_other = codec.fields_of_word(pair[other])
    if f_other is None:
        events.append({"kind": "flag", "name": "phase3_other_world_constant"})
        return st, None
    c = f_other.cnt if f_other.knt == -1 else f_other.knt
    st = replace(st, counter0=c)
    if c == 0:
        events.append({"kind": "case", "label": "P3C3"})
        return st, 1
    if c > 1:
        events.append({"kind": "flag", "name": "phase3_counter_overrun"})
    st = replace(st, window=(0, "megablock", pos.megablock))
    events.append({"kind": "case", "label": "P3C4"})
    return st, None


def _expand_set(codec, sset, out_bit, npos):
    new = set()
    for m in sset:
        new.add(simulate_alice_step(codec, m, False, out_bit, npos))
        if not npos.block_start:
            new.add(simulate_alice_step(codec, m, True, out_bit, npos))
    return frozenset(new)


def bob35_step(
    codec: Codec35,
    schedule: RoundSchedule,
    st: Bob35State,
    received: bytes,
    pos: Position,
) -> tuple[Bob35State, bytes, list[dict]]:
    events: list[dict] = []
    if st.xhat is not None:
        return st, codec.bar(1), events

    if pos.megablock_start:
        if st.window is not None and st.window[1] == "megablock":
            st = replace(st, window=None)
        if st.phase == 1 and st.pending is not None:
            p = st.pending
            if p[0] == 2:
                st = replace(st, phase=2, stage2_world=p[1], pending=None,
                             last_bit_since_phase=None)
            else:
                st = replace(st, phase=3, stage3_world=p[1], beta1=p[2], j=p[3],
                             pending=None, last_bit_since_phase=None, counter0=0)
        elif st.phase == 3:
            st = replace(st, counter0=0)

    lvb = last_visible_bit(received)
    if lvb is not None:
        st = replace(st, last_received_bit=lvb, last_bit_since_phase=lvb)

    e = erasure_count(received)
    pair = None
    if count_less_than(e, codec.alice_len, codec.codebook.decode_erasure_bound()):
        st, pair = _consume_decode(codec, st, received, events)
        if st.xhat is not None:
            return st, codec.bar(1), events

    plain = None
    if st.phase == 1:
        if pair is not None:
            st, plain = _phase1_dispatch(codec, st, pair, pos, events)
    elif st.phase == 2:
        plain = 0
    else:
        if st.j == 0:
            plain = 0
        elif pair is not None:
            st, plain = _phase3_dispatch(codec, st, pair, pos, events)

    if st.window is not None:
        out = st.window[0]
    elif plain is not None:
        out = plain
    else:
        out = 1 if pos.block_start else st.last_sent_bit
    st = replace(st, last_sent_bit=out)

    if st.s0 is not None and st.xhat is None and pos.chunk + 1 < schedule.chunk_count:
        npos = schedule.position(pos.chunk + 1)
        st = replace(
            st,
            s0=_expand_set(codec, st.s0, out, npos),
            s1=_expand_set(codec, st.s1, out, npos),
        )
        _s_checks(codec, st, events)
        events.append({"kind": "s_update", "S0": len(st.s0), "S1": len(st.s1)})

    return st, codec.bar(out), events


def bob35_finalize(codec: Codec35, st: Bob35State) -> tuple[bytes, list[str]]:
    if st.xhat is not None:
        return st.xhat, []
    if st.phase == 2 and st.last_bit_since_phase is not None:
        d = st.last_bit_since_phase
        world = st.stage2_world if d == 1 else 1 - st.stage2_world
        return (st.xhat0, st.xhat1)[world], []
    if st.phase == 3 and st.last_bit_since_phase is not None:
        d = st.last_bit_since_phase
        world = st.stage3_world if d == st.beta1 else 1 - st.stage3_world
        return (st.xhat0, st.xhat1)[world], []
    fallback = st.xhat0 if st.xhat0 is not None else bytes(codec.n)
    return fallback, ["finalize_fallback"]


class Alice35:
    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.codec = codec_for_config(cfg)
        self.receive_length = cfg.M
        self.message_length = self.codec.alice_len

    def initial_state(self) -> Alice35State:
        return alice35_initial(self.codec, self.cfg.input_x)

    def step(self, st, received, pos):
        return alice35_transition(self.codec, st, received, pos)

    def snapshot(self, st: Alice35State) -> dict:
        return {
            "stage": st.stage, "cnt": st.cnt, "cnfm": st.cnfm, "rec": st.rec,
            "knt": st.knt, "stg2": st.stg2, "beta": st.beta,
        }


class Bob35:
    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.codec = codec_for_config(cfg)
        self.schedule = make_schedule(cfg)
        self.receive_length = self.codec.alice_len
        self.message_length = cfg.M

    def initial_state(self) -> Bob35State:
        return bob35_initial()

    def step(self, st, received, pos):
        return bob35_step(self.codec, self.schedule, st, received, pos)

    def finalize(self, st) -> tuple[bytes, list[str]]:
        return bob35_finalize(self.codec, st)

    def snapshot(self, st: Bob35State) -> dict:
        return {
            "phase": st.phase,
            "S0_size": None if st.s0 is None else len(st.s0),
            "S1_size": None if st.s1 is None else len(st.s1),
            "forced": None if st.window is None else f"{st.window[0]}:{st.window[1]}",
            "pending": None if st.pending is None else st.pending[0],
            "xhat": None if st.xhat is None else bits_str(st.xhat),
        }

"""Round schedules, erasure-channel semantics and the session runner.

A session is a deterministic, single-threaded execution of one protocol
instance against one adversary.  The adversary is online and white-box: for
every message it sees the full history and both parties' states before
committing to an erasure mask for that message.  The only corruption it can
apply is replacing delivered symbols with the erasure symbol.

Budget accounting and threshold comparisons are exact rational arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rationals import ceil_mul, fraction_str
from .words import ERASED, apply_erasures, bits_str, mask_str

P611 = "611"
P35 = "35"


class InvalidConfig(ValueError):
    """Session configuration violates a protocol precondition."""


class AdversaryProtocolError(RuntimeError):
    """An adversary produced a malformed erasure mask."""


@dataclass(frozen=True)
class Position:
    """Location of a chunk inside the nested round grouping."""

    chunk: int
    block: int | None
    megablock: int | None
    block_start: bool
    megablock_start: bool


@dataclass(frozen=True)
class RoundSchedule:
    protocol: str
    chunk_count: int
    alice_len: int
    bob_len: int
    chunks_per_block: int | None
    blocks_per_megablock: int | None
    megablock_count: int | None

    @property
    def rounds_per_chunk(self) -> int:
        return self.alice_len + self.bob_len

    @property
    def total_rounds(self) -> int:
        return self.chunk_count * self.rounds_per_chunk

    @property
    def bob_speaking_fraction(self) -> Fraction:
        return Fraction(self.bob_len, self.rounds_per_chunk)

    def position(self, chunk: int) -> Position:
        if self.protocol == P611:
            return Position(chunk, None, None, False, False)
        c = self.chunks_per_block
        bc = c * self.blocks_per_megablock
        return Position(
            chunk,
            chunk // c,
            chunk // bc,
            chunk % c == 0,
            chunk % bc == 0,
        )

    def segments(self):
        """Yield (speaker, length, labels) per message, in round order."""
        for chunk in range(self.chunk_count):
            pos = self.position(chunk)
            labels = {"chunk": chunk, "block": pos.block, "megablock": pos.megablock}
            yield ("alice", self.alice_len, labels)
            yield ("bob", self.bob_len, labels)

    def alice_round_start(self, chunk: int) -> int:
        return chunk * self.rounds_per_chunk

    def bob_round_start(self, chunk: int) -> int:
        return chunk * self.rounds_per_chunk + self.alice_len


@dataclass(frozen=True)
class SessionConfig:
    """Inputs that determine a session up to the adversary.

    ``epsilon`` drives the schedule lengths exactly as specified
    (T = ceil((n+1)/eps) chunks for the 6/11 protocol; A = ceil(1/eps)
    megablocks of B = ceil(n/eps) blocks of C = ceil(1/eps) chunks for the
    3/5 protocol).  ``code_epsilon`` is the tolerance used to construct and
    certify the underlying codebook and to derive the list-decoding erasure
    threshold; it must stay below 1/4 for the list-size-2 guarantee to be
    certifiable, which keeps sessions meaningful even when the schedule
    epsilon is as coarse as 1/2.
    """

    protocol: str
    n: int
    epsilon: Fraction
    M: int
    input_x: bytes
    seed: int = 0
    code_epsilon: Fraction = Fraction(1, 8)
    codebook_seed: int = 7
    adversary: object | None = None


def validate_config(cfg: SessionConfig) -> None:
    if cfg.protocol not in (P611, P35):
        raise InvalidConfig(f"unknown protocol {cfg.protocol!r}")
    if cfg.n < 1:
        raise InvalidConfig("n must be at least 1")
    if not (0 < cfg.epsilon <= Fraction(1, 2)):
        raise InvalidConfig("epsilon must lie in (0, 1/2]")
    if not (0 <= cfg.code_epsilon < Fraction(1, 4)):
        raise InvalidConfig("code_epsilon must lie in [0, 1/4)")
    if len(cfg.input_x) != cfg.n:
        raise InvalidConfig("input_x length must equal n")
    if any(b not in (0, 1) for b in cfg.input_x):
        raise InvalidConfig("input_x must be binary")
    if cfg.protocol == P611:
        if cfg.M < 8 or cfg.M % 8 != 0:
            raise InvalidConfig("the 6/11 protocol requires M divisible by 8")
    else:
        if cfg.M < 1:
            raise InvalidConfig("M must be positive")


def make_schedule(cfg: SessionConfig) -> RoundSchedule:
    validate_config(cfg)
    if cfg.protocol == P611:
        chunks = ceil_mul(Fraction(cfg.n + 1) / cfg.epsilon, 1)
        return RoundSchedule(P611, chunks, cfg.M, 3 * cfg.M // 8, None, None, None)
    a = ceil_mul(Fraction(1) / cfg.epsilon, 1)
    b = ceil_mul(Fraction(cfg.n) / cfg.epsilon, 1)
    c = ceil_mul(Fraction(1) / cfg.epsilon, 1)
    return RoundSchedule(P35, a * b * c, 4 * cfg.M, cfg.M, c, b, a)


@dataclass
class SessionResult:
    bob_output: bytes
    success: bool
    erased_alice_rounds: int
    erased_bob_rounds: int
    total_rounds: int
    invariant_violations: list[str]
    trace: list[dict]
    flags: list[str]  # informational (e.g. finalize_fallback), not violations
    unique_decode_events: int = 0
    two_decode_events: int = 0
    s_update_events: int = 0

    @property
    def total_erasure_fraction(self) -> Fraction:
        return Fraction(self.erased_alice_rounds + self.erased_bob_rounds, self.total_rounds)


def budget_fraction(result: SessionResult) -> Fraction:
    return result.total_erasure_fraction


@dataclass
class MessageContext:
    """Everything an online white-box adversary may inspect before masking."""

    cfg: SessionConfig
    schedule: RoundSchedule
    pos: Position
    speaker: str
    sent: bytes
    round_start: int
    alice_state: object
    bob_state: object


def make_machines(cfg: SessionConfig):
    if cfg.protocol == P611:
        from .p611 import Alice611, Bob611

        return Alice611(cfg), Bob611(cfg)
    from .p35 import Alice35, Bob35

    return Alice35(cfg), Bob35(cfg)


def enumerate_inputs(n: int) -> list[bytes]:
    return [bytes((v >> (n - 1 - i)) & 1 for i in range(n)) for v in range(2**n)]


_SOUND_REASONS = {
    "unique_decode",
    "case2",
    "inconsistent_rule",
    "first_decode_nonzero_cnt",
    "case4_inconsistent_world",
    "init_unique",
    "init_same_x",
    "init_one_plausible",
    "unique_constant",
}


def _mask_for(adversary, ctx: MessageContext) -> np.ndarray:
    mask = adversary.mask(ctx)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (len(ctx.sent),):
        raise AdversaryProtocolError(
            f"mask of shape {mask.shape} for a message of length {len(ctx.sent)}"
        )
    return mask


def run_session(
    cfg: SessionConfig,
    adversary=None,
    alice=None,
    bob=None,
    want_trace: bool = True,
) -> SessionResult:
    """Execute one full session and collect its result and checks.

    Deterministic for fixed (cfg, machines, adversary state, seeds).
    """
    schedule = make_schedule(cfg)
    if alice is None or bob is None:
        a, b = make_machines(cfg)
        alice = alice or a
        bob = bob or b
    if adversary is None:
        adversary = cfg.adversary
    if adversary is None:
        from .adversaries import strategy_null

        adversary = strategy_null()
    adversary.begin(cfg, schedule)

    a_state = alice.initial_state()
    b_state = bob.initial_state()
    last_bob_delivered = bytes([ERASED]) * schedule.bob_len

    trace: list[dict] = []
    violations: list[str] = []
    erased_alice = 0
    erased_bob = 0
    unique_decodes = 0
    two_decodes = 0
    s_updates = 0
    x = cfg.input_x

    def base(pos: Position, **extra) -> dict:
        ev = {
            "round": extra.pop("round"),
            "kind": extra.pop("kind"),
            "chunk": pos.chunk,
            "block": pos.block,
            "megablock": pos.megablock,
        }
        ev.update(extra)
        return ev

    for chunk in range(schedule.chunk_count):
        pos = schedule.position(chunk)
        a_round = schedule.alice_round_start(chunk)
        b_round = schedule.bob_round_start(chunk)
        if want_trace:
            trace.append(base(pos, round=a_round, kind="chunk_start"))

        prev_terminal = getattr(a_state, "terminal", None)
        prev_stage = getattr(a_state, "stage", None)
        a_state, a_word, a_events = alice.step(a_state, last_bob_delivered, pos)
        if len(a_word) != schedule.alice_len:
            raise RuntimeError("alice emitted a message of the wrong length")

        # Terminal absorption / stage monotonicity checks on Alice.
        if prev_terminal is not None:
            if a_state.terminal != prev_terminal or a_word != bytes([prev_terminal]) * len(a_word):
                violations.append("terminal_not_absorbing")
        if prev_stage is not None and getattr(a_state, "stage", prev_stage) < prev_stage:
            violations.append("stage_decreased")

        # True-world containment for the 3/5 protocol: Alice's actual next
        # message must lie in Bob's predicted set for her world.
        if cfg.protocol == P35 and getattr(b_state, "s0", None) is not None and b_state.xhat is None:
            if x == b_state.xhat0:
                sset = b_state.s0
            elif x == b_state.xhat1:
                sset = b_state.s1
            else:
                sset = None
            if sset is None or a_word not in sset:
                violations.append("true_world_escaped")

        ctx = MessageContext(cfg, schedule, pos, "alice", a_word, a_round, a_state, b_state)
        a_mask = _mask_for(adversary, ctx)
        erased_alice += int(a_mask.sum())
        delivered_a = apply_erasures(a_word, a_mask)
        if want_trace:
            trace.append(base(pos, round=a_round, kind="message_sent", speaker="alice", bits=bits_str(a_word)))
            trace.append(
                base(pos, round=a_round, kind="message_delivered", speaker="alice",
                     bits=bits_str(a_word), mask=mask_str(a_mask))
            )
            for ev in a_events:
                if ev["kind"] == "decode":
                    trace.append(base(pos, round=a_round, kind="decode_result", speaker="alice",
                                      candidates=ev["candidates"]))
            trace.append(base(pos, round=a_round, kind="state_snapshot", speaker="alice",
                              state=alice.snapshot(a_state)))
        for ev in a_events:
            if ev["kind"] == "flag":
                violations.append(ev["name"])

        prev_phase = getattr(b_state, "phase", None)
        b_state, b_word, b_events = bob.step(b_state, delivered_a, pos)
        if len(b_word) != schedule.bob_len:
            raise RuntimeError("bob emitted a message of the wrong length")

        if prev_phase is not None and getattr(b_state, "phase", prev_phase) < prev_phase:
            violations.append("phase_decreased")

        for ev in b_events:
            kind = ev["kind"]
            if kind == "flag":
                violations.append(ev["name"])
            elif kind == "decode":
                cands = ev["candidates"]
                if len(cands) == 1:
                    unique_decodes += 1
                elif len(cands) == 2:
                    two_decodes += 1
                    if cfg.protocol == P611:
                        true_label = bob.true_world_label(a_state)
                        if true_label not in cands:
                            violations.append("true_world_escaped")
            elif kind == "xhat_set":
                if ev["via"] in _SOUND_REASONS and ev["x"] != bits_str(x):
                    violations.append(f"{ev['via']}_unsound")
            elif kind == "s_update":
                s_updates += 1

        ctx = MessageContext(cfg, schedule, pos, "bob", b_word, b_round, a_state, b_state)
        b_mask = _mask_for(adversary, ctx)
        erased_bob += int(b_mask.sum())
        delivered_b = apply_erasures(b_word, b_mask)
        last_bob_delivered = delivered_b
        if want_trace:
            trace.append(base(pos, round=b_round, kind="message_sent", speaker="bob", bits=bits_str(b_word)))
            trace.append(
                base(pos, round=b_round, kind="message_delivered", speaker="bob",
                     bits=bits_str(b_word), mask=mask_str(b_mask))
            )
            for ev in b_events:
                if ev["kind"] == "decode":
                    trace.append(base(pos, round=b_round, kind="decode_result", speaker="bob",
                                      candidates=ev["candidates"]))
            trace.append(base(pos, round=b_round, kind="state_snapshot", speaker="bob",
                              state=bob.snapshot(b_state)))

    output, fin_flags = bob.finalize(b_state)
    success = output == x
    if unique_decodes > 0 and not success:
        violations.append("unique_decode_unsound")
    if want_trace:
        pos = schedule.position(schedule.chunk_count - 1)
        trace.append(
            base(pos, round=schedule.total_rounds, kind="finalize",
                 bits=bits_str(output), state={"success": success, "flags": list(fin_flags)})
        )
    return SessionResult(
        bob_output=output,
        success=success,
        erased_alice_rounds=erased_alice,
        erased_bob_rounds=erased_bob,
        total_rounds=schedule.total_rounds,
        invariant_violations=violations,
        trace=trace,
        flags=list(fin_flags),
        unique_decode_events=unique_decodes,
        two_decode_events=two_decodes,
        s_update_events=s_updates,
    )


def trace_lines(trace: list[dict]) -> str:
    """Serialize a trace as JSON lines with a stable key order."""
    return "".join(json.dumps(ev, sort_keys=True) + "\n" for ev in trace)


def write_trace(trace: list[dict], path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(trace_lines(trace))


def describe_result(result: SessionResult) -> str:
    frac = result.total_erasure_fraction
    return (
        f"success={result.success} output={bits_str(result.bob_output)} "
        f"erasure_fraction={fraction_str(frac)} "
        f"violations={len(result.invariant_violations)} "
        f"flags={len(result.flags)}"
    )

"""Erasure adversaries, attack generators and bounded fooling-plan search.

Adversaries are online and white-box: the runner hands them each outgoing
message together with both machines' states, and they commit to an erasure
mask for that message before delivery.  Everything here is deterministic
given its seeds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace as dc_replace
from fractions import Fraction

import numpy as np

from .channel import (
    MessageContext,
    RoundSchedule,
    SessionConfig,
    enumerate_inputs,
    make_machines,
    make_schedule,
    run_session,
)
from .rationals import fraction_str
from .words import ERASED, apply_erasures, bits_str, hamming, mask_str, parse_mask


class SearchSpaceTooLarge(RuntimeError):
    """Exhaustive search requested beyond the configured cap."""


class NonDeterministicMachine(RuntimeError):
    """Replay of a supposedly deterministic machine diverged."""


# ---------------------------------------------------------------------------
# Attack plans (concrete per-message masks)
# ---------------------------------------------------------------------------

@dataclass
class AttackPlan:
    """Deterministic description of which rounds an adversary erases."""

    masks: dict[tuple[int, str], np.ndarray]
    total_cost: int
    description: str
    params: dict = field(default_factory=dict)

    def to_jsonl(self) -> str:
        lines = [
            json.dumps(
                {"kind": "header", "description": self.description,
                 "total_cost": self.total_cost, "params": self.params},
                sort_keys=True,
            )
        ]
        for (chunk, speaker) in sorted(self.masks, key=lambda k: (k[0], k[1])):
            lines.append(
                json.dumps(
                    {"chunk": chunk, "speaker": speaker,
                     "mask": mask_str(self.masks[(chunk, speaker)])},
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "AttackPlan":
        lines = [json.loads(ln) for ln in text.splitlines() if ln.strip()]
        header = lines[0]
        masks = {}
        for rec in lines[1:]:
            masks[(rec["chunk"], rec["speaker"])] = parse_mask(rec["mask"])
        return cls(masks, header["total_cost"], header["description"], header["params"])

    def adversary(self) -> "ScriptedMasks":
        return ScriptedMasks(self.masks)


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------

class NullAdversary:
    def begin(self, cfg: SessionConfig, schedule: RoundSchedule) -> None:
        pass

    def mask(self, ctx: MessageContext) -> np.ndarray:
        return np.zeros(len(ctx.sent), dtype=bool)


class RandomErasures:
    """Erases floor(budget * total) uniformly chosen rounds, seeded."""

    def __init__(self, budget_fraction: Fraction, seed: int):
        if not 0 <= budget_fraction <= 1:
            raise ValueError("budget_fraction must lie in [0, 1]")
        self.budget_fraction = Fraction(budget_fraction)
        self.seed = seed
        self._erased: set[int] = set()

    def begin(self, cfg, schedule):
        total = schedule.total_rounds
        k = (self.budget_fraction.numerator * total) // self.budget_fraction.denominator
        rng = np.random.default_rng([self.seed, total])
        self._erased = set(rng.choice(total, size=k, replace=False).tolist()) if k else set()

    def mask(self, ctx):
        start = ctx.round_start
        return np.array([(start + i) in self._erased for i in range(len(ctx.sent))], dtype=bool)


class ScriptedMasks:
    """Plays back explicit masks keyed by (chunk, speaker); default no erasure."""

    def __init__(self, masks: dict[tuple[int, str], np.ndarray]):
        self.masks = masks

    def begin(self, cfg, schedule):
        pass

    def mask(self, ctx):
        m = self.masks.get((ctx.pos.chunk, ctx.speaker))
        if m is None:
            return np.zeros(len(ctx.sent), dtype=bool)
        return np.asarray(m, dtype=bool)


@dataclass(frozen=True)
class ChunkAction:
    """One chunk's worth of adversarial behaviour.

    kind is one of pass, confuse_pair, blind_alice, blind_bob,
    blind_bob_and_confuse.  For the confusing kinds, world_a/world_b name the
    two Alice inputs whose predicted codewords are to be merged; None stands
    for the session's true input.
    """

    kind: str
    world_a: bytes | None = None
    world_b: bytes | None = None


def _confusion_mask(sent: bytes, wa: bytes, wb: bytes, decoder) -> tuple[np.ndarray, bool]:
    """Erase exactly the positions where the two target words differ.

    Returns (mask, ok); ok is False when the masked word would not decode to
    exactly the two target words, in which case the caller falls back to a
    full erasure of the message.
    """
    a = np.frombuffer(wa, dtype=np.uint8)
    b = np.frombuffer(wb, dtype=np.uint8)
    if wa == wb:
        return np.ones(len(sent), dtype=bool), False
    mask = a != b
    masked = apply_erasures(sent, mask)
    labels = decoder.decode(masked)
    surviving = {decoder.codebook.words[lab] if isinstance(lab, int)
                 else decoder.extra_words[int(lab[5:])] for lab in labels}
    if surviving != {wa, wb}:
        return np.ones(len(sent), dtype=bool), False
    return mask, True


class ChunkActionAdversary:
    """Realizes a per-chunk action sequence against a running session.

    Confusion masks are computed against the two worlds' current predicted
    codewords; the adversary tracks a simulated Alice per referenced world,
    fed exactly the feedback words it delivers to the real Alice.
    """

    def __init__(self, actions: list[ChunkAction]):
        self.actions = list(actions)
        self.fallbacks: list[int] = []
        self.masks: dict[tuple[int, str], np.ndarray] = {}
        self.total_cost = 0

    def begin(self, cfg, schedule):
        if len(self.actions) != schedule.chunk_count:
            raise ValueError("need exactly one action per chunk")
        self.cfg = cfg
        self.schedule = schedule
        alice, _bob = make_machines(cfg)
        self._alice_machine = alice
        self._decoder = alice.codec.decoder
        worlds = set()
        for act in self.actions:
            for w in (act.world_a, act.world_b):
                if w is not None:
                    worlds.add(w)
        self._sims = {}
        for w in sorted(worlds):
            m, _ = make_machines(dc_replace(cfg, input_x=w, adversary=None))
            self._sims[w] = [m, m.initial_state(), None]
        self._pending_bob = bytes([ERASED]) * schedule.bob_len
        self._stepped_chunk = -1
        self._sim_words: dict[bytes, bytes] = {}

    def _advance_sims(self, pos):
        if self._stepped_chunk == pos.chunk:
            return
        self._stepped_chunk = pos.chunk
        self._sim_words = {}
        for w, rec in self._sims.items():
            machine, st, _ = rec
            st, word, _events = machine.step(st, self._pending_bob, pos)
            rec[1] = st
            self._sim_words[w] = word

    def _record(self, ctx, mask):
        self.masks[(ctx.pos.chunk, ctx.speaker)] = mask
        self.total_cost += int(mask.sum())
        return mask

    def mask(self, ctx):
        act = self.actions[ctx.pos.chunk]
        n = len(ctx.sent)
        if ctx.speaker == "alice":
            self._advance_sims(ctx.pos)
            if act.kind == "blind_alice":
                return self._record(ctx, np.ones(n, dtype=bool))
            if act.kind in ("confuse_pair", "blind_bob_and_confuse"):
                wa = ctx.sent if act.world_a is None else self._sim_words[act.world_a]
                wb = ctx.sent if act.world_b is None else self._sim_words[act.world_b]
                mask, ok = _confusion_mask(ctx.sent, wa, wb, self._decoder)
                if not ok:
                    self.fallbacks.append(ctx.pos.chunk)
                return self._record(ctx, mask)
            return self._record(ctx, np.zeros(n, dtype=bool))
        # bob's message
        if act.kind in ("blind_bob", "blind_bob_and_confuse"):
            mask = np.ones(n, dtype=bool)
        else:
            mask = np.zeros(n, dtype=bool)
        self._pending_bob = apply_erasures(ctx.sent, mask)
        return self._record(ctx, mask)

    def plan(self, description: str = "chunk actions") -> AttackPlan:
        if self.fallbacks:
            description += f" (fallback to blind_alice at chunks {self.fallbacks})"
        return AttackPlan(dict(self.masks), self.total_cost, description)


def strategy_null() -> NullAdversary:
    return NullAdversary()


def strategy_random(budget_fraction: Fraction, seed: int) -> RandomErasures:
    return RandomErasures(budget_fraction, seed)


def apply_chunk_actions(actions: list[ChunkAction]) -> ChunkActionAdversary:
    return ChunkActionAdversary(actions)


# ---------------------------------------------------------------------------
# Confusion attack over the erasure channel
# ---------------------------------------------------------------------------

@dataclass
class ConfusionVerdict:
    pair: tuple[str, str]
    views_identical: bool
    cost_rounds: int
    cost_fraction: Fraction
    bound: Fraction
    within_bound: bool
    outputs: tuple[str, str]
    fooled: bool


def _blackout_alice_transcript(cfg: SessionConfig, x: bytes) -> list[bytes]:
    """Alice's chunk words when every feedback word is fully erased."""
    schedule = make_schedule(cfg)
    alice, _ = make_machines(dc_replace(cfg, input_x=x, adversary=None))
    st = alice.initial_state()
    blank = bytes([ERASED]) * schedule.bob_len
    words = []
    for chunk in range(schedule.chunk_count):
        st, w, _ = alice.step(st, blank, schedule.position(chunk))
        words.append(w)
    return words


def bob_view(result) -> str:
    """Bob's received transcript (delivered symbols, '?' for erasures)."""
    parts = []
    for ev in result.trace:
        if ev["kind"] == "message_delivered" and ev["speaker"] == "alice":
            sent = ev["bits"]
            mask = ev["mask"]
            parts.append("".join("?" if m == "1" else s for s, m in zip(sent, mask)))
    return "|".join(parts)


def erasure_confusion_attack(cfg: SessionConfig) -> tuple[AttackPlan, ConfusionVerdict]:
    """Budget-(1+r)/2 attack: blind the quieter side, merge the two closest
    whole-session transcripts on the other side, then verify by replay."""
    schedule = make_schedule(cfg)
    r = schedule.bob_speaking_fraction
    total = schedule.total_rounds
    inputs = enumerate_inputs(cfg.n)

    masks: dict[tuple[int, str], np.ndarray] = {}
    if r <= Fraction(1, 3):
        transcripts = {x: _blackout_alice_transcript(cfg, x) for x in inputs}
        best = None
        for i in range(len(inputs)):
            for j in range(i + 1, len(inputs)):
                ti = b"".join(transcripts[inputs[i]])
                tj = b"".join(transcripts[inputs[j]])
                d = hamming(ti, tj)
                if best is None or d < best[0]:
                    best = (d, i, j)
        d, i, j = best
        xi, xj = inputs[i], inputs[j]
        for chunk in range(schedule.chunk_count):
            wa = np.frombuffer(transcripts[xi][chunk], dtype=np.uint8)
            wb = np.frombuffer(transcripts[xj][chunk], dtype=np.uint8)
            masks[(chunk, "alice")] = wa != wb
            masks[(chunk, "bob")] = np.ones(schedule.bob_len, dtype=bool)
        cost = schedule.chunk_count * schedule.bob_len + d
        description = "blind feedback, merge closest transcript pair"
    else:
        xi, xj = inputs[0], inputs[1]
        for chunk in range(schedule.chunk_count):
            masks[(chunk, "alice")] = np.ones(schedule.alice_len, dtype=bool)
            masks[(chunk, "bob")] = np.zeros(schedule.bob_len, dtype=bool)
        cost = schedule.chunk_count * schedule.alice_len
        description = "blind the dominant speaker entirely"

    plan = AttackPlan(masks, cost, description,
                      {"protocol": cfg.protocol, "n": cfg.n, "M": cfg.M,
                       "epsilon": fraction_str(cfg.epsilon)})
    res_i = run_session(dc_replace(cfg, input_x=xi, adversary=None), plan.adversary())
    res_j = run_session(dc_replace(cfg, input_x=xj, adversary=None), plan.adversary())
    views_identical = bob_view(res_i) == bob_view(res_j)
    realized = res_i.erased_alice_rounds + res_i.erased_bob_rounds
    fraction = Fraction(realized, total)
    bound = (1 + r) / 2
    verdict = ConfusionVerdict(
        pair=(bits_str(xi), bits_str(xj)),
        views_identical=views_identical,
        cost_rounds=realized,
        cost_fraction=fraction,
        bound=bound,
        within_bound=fraction <= bound,
        outputs=(bits_str(res_i.bob_output), bits_str(res_j.bob_output)),
        fooled=(not res_i.success) or (not res_j.success),
    )
    return plan, verdict


# ---------------------------------------------------------------------------
# Bit-flip attack (pigeonhole construction over a flip channel)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BitFlipProtocol:
    """A deterministic two-party machine pair over a bit-flip channel.

    ``alice_fn(x, feedback)`` returns Alice's chunk message given the
    feedback messages received so far; ``bob_fn(received)`` returns Bob's
    feedback message given the Alice messages received so far.
    """

    chunk_count: int
    alice_len: int
    bob_len: int
    alice_fn: object
    bob_fn: object

    @property
    def alice_rounds(self) -> int:
        return self.chunk_count * self.alice_len

    @property
    def bob_rounds(self) -> int:
        return self.chunk_count * self.bob_len


def strawman_bitflip_protocol(n: int, repetitions: int = 4, chunk_count: int = 4) -> BitFlipProtocol:
    """Repetition code from Alice, single parity-bit echo from Bob."""

    def alice_fn(x: bytes, feedback: tuple[bytes, ...]) -> bytes:
        return bytes(x) * repetitions

    def bob_fn(received: tuple[bytes, ...]) -> bytes:
        total = sum(sum(m) for m in received)
        return bytes([total % 2])

    return BitFlipProtocol(chunk_count, n * repetitions, 1, alice_fn, bob_fn)


@dataclass
class BitFlipAttackResult:
    pair: tuple[int, int]
    corrupted_alice: list[bytes]   # R_k for the chosen pair
    corrupted_bob: list[bytes]     # S_k (majority feedback)
    cost_i: int
    cost_j: int
    bound_rounds: Fraction         # B/2 + A/4
    odd_split_slack: int
    views_identical: bool


def _equidistant(a: bytes, b: bytes) -> tuple[bytes, int]:
    """Word agreeing with both where they agree, alternating elsewhere.

    Disagrees with ``a`` on floor(d/2) positions and with ``b`` on ceil(d/2);
    returns the word and the odd-distance slack (0 or 1).
    """
    out = bytearray(a)
    rank = 0
    for p, (u, v) in enumerate(zip(a, b)):
        if u != v:
            out[p] = u if rank % 2 == 0 else v
            rank += 1
    return bytes(out), rank % 2


def bitflip_attack_generate(
    proto: BitFlipProtocol, inputs: list[bytes]
) -> BitFlipAttackResult:
    """Pigeonhole attack: equidistant corrupted uplinks and majority feedback
    make Bob's view identical for some input pair at low average cost."""
    if len(inputs) < 2 or len(set(inputs)) != len(inputs):
        raise ValueError("inputs must be at least two distinct values")
    N = len(inputs)
    pairs = [(i, j) for i in range(N) for j in range(i + 1, N)]

    S: list[bytes] = []
    A: dict[int, list[bytes]] = {i: [] for i in range(N)}
    R: dict[tuple[int, int], list[bytes]] = {p: [] for p in pairs}
    B: dict[tuple[int, int], list[bytes]] = {p: [] for p in pairs}
    slack: dict[tuple[int, int], int] = {p: 0 for p in pairs}

    for k in range(proto.chunk_count):
        for i in range(N):
            msg = proto.alice_fn(inputs[i], tuple(S))
            if len(msg) != proto.alice_len:
                raise ValueError("alice_fn produced a message of the wrong length")
            A[i].append(msg)
        for p in pairs:
            i, j = p
            r_k, odd = _equidistant(A[i][k], A[j][k])
            R[p].append(r_k)
            slack[p] += odd
            fb = proto.bob_fn(tuple(R[p]))
            if len(fb) != proto.bob_len:
                raise ValueError("bob_fn produced a message of the wrong length")
            B[p].append(fb)
        counts = np.zeros(proto.bob_len, dtype=int)
        for p in pairs:
            counts += np.frombuffer(B[p][k], dtype=np.uint8)
        majority = (counts * 2 > len(pairs)).astype(np.uint8)  # ties resolve to 0
        S.append(majority.tobytes())

    def cost(i: int, j: int) -> int:
        p = (min(i, j), max(i, j))
        c = 0
        for k in range(proto.chunk_count):
            c += hamming(S[k], B[p][k])
            c += hamming(R[p][k], A[i][k])
        return c

    best = None
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            c = cost(i, j)
            if best is None or c < best[0]:
                best = (c, i, j)
    _c, bi, bj = best
    p = (min(bi, bj), max(bi, bj))

    # Replay both inputs under the attack and verify Bob's view is identical
    # and the machines are deterministic.
    def replay(idx: int) -> tuple[list[bytes], int]:
        flips = 0
        feedback_seen: list[bytes] = []
        bob_received: list[bytes] = []
        for k in range(proto.chunk_count):
            msg = proto.alice_fn(inputs[idx], tuple(feedback_seen))
            if msg != A[idx][k]:
                raise NonDeterministicMachine("alice diverged on replay")
            flips += hamming(msg, R[p][k])
            bob_received.append(R[p][k])
            fb = proto.bob_fn(tuple(bob_received))
            if fb != B[p][k]:
                raise NonDeterministicMachine("bob diverged on replay")
            flips += hamming(fb, S[k])
            feedback_seen.append(S[k])
        return bob_received, flips

    view_i, cost_i = replay(bi)
    view_j, cost_j = replay(bj)
    views_identical = view_i == view_j

    bound = Fraction(proto.bob_rounds, 2) + Fraction(proto.alice_rounds, 4)
    return BitFlipAttackResult(
        pair=(bi, bj),
        corrupted_alice=list(R[p]),
        corrupted_bob=list(S),
        cost_i=cost_i,
        cost_j=cost_j,
        bound_rounds=bound,
        odd_split_slack=slack[p],
        views_identical=views_identical,
    )


# ---------------------------------------------------------------------------
# Bounded search for fooling plans
# ---------------------------------------------------------------------------

def search_menu(cfg: SessionConfig) -> list[ChunkAction]:
    """Per-chunk action alphabet, most aggressive first (search order)."""
    alts = enumerate_inputs(cfg.n)
    menu = [ChunkAction("blind_alice"), ChunkAction("blind_bob")]
    menu += [ChunkAction("blind_bob_and_confuse", None, alt) for alt in alts]
    menu += [ChunkAction("confuse_pair", None, alt) for alt in alts]
    menu.append(ChunkAction("pass"))
    return menu


@dataclass
class _SearchSession:
    """One live session per candidate input, advanced chunk by chunk."""

    x: bytes
    alice_state: object
    bob_state: object
    sims: dict  # alt input -> simulated alice state
    pending_bob: bytes
    cost: int
    masks: tuple


def _search_step(cfg, schedule, machines, sess: _SearchSession, action: ChunkAction, chunk: int):
    alice, bob = machines
    pos = schedule.position(chunk)
    a_state, a_word, _ = alice.step(sess.alice_state, sess.pending_bob, pos)
    sim_states = {}
    sim_words = {}
    for alt, (machine, st) in sess.sims.items():
        st2, w, _ = machine.step(st, sess.pending_bob, pos)
        sim_states[alt] = (machine, st2)
        sim_words[alt] = w

    n_a = len(a_word)
    if action.kind == "blind_alice":
        a_mask = np.ones(n_a, dtype=bool)
    elif action.kind in ("confuse_pair", "blind_bob_and_confuse"):
        wa = a_word if action.world_a is None else sim_words[action.world_a]
        wb = a_word if action.world_b is None else sim_words[action.world_b]
        a_mask, ok = _confusion_mask(a_word, wa, wb, alice.codec.decoder)
        if not ok:
            a_mask = np.ones(n_a, dtype=bool)
    else:
        a_mask = np.zeros(n_a, dtype=bool)
    delivered_a = apply_erasures(a_word, a_mask)

    b_state, b_word, _ = bob.step(sess.bob_state, delivered_a, pos)
    if action.kind in ("blind_bob", "blind_bob_and_confuse"):
        b_mask = np.ones(len(b_word), dtype=bool)
    else:
        b_mask = np.zeros(len(b_word), dtype=bool)
    delivered_b = apply_erasures(b_word, b_mask)

    cost = sess.cost + int(a_mask.sum()) + int(b_mask.sum())
    masks = sess.masks + (((chunk, "alice"), a_mask), ((chunk, "bob"), b_mask))
    return _SearchSession(sess.x, a_state, b_state, sim_states, delivered_b, cost, masks)


def _initial_sessions(cfg, schedule, menu):
    alts = sorted({a.world_b for a in menu if a.world_b is not None})
    sessions = []
    machines_by_x = {}
    for x in enumerate_inputs(cfg.n):
        c = dc_replace(cfg, input_x=x, adversary=None)
        machines = make_machines(c)
        machines_by_x[x] = machines
        sims = {}
        for alt in alts:
            m, _ = make_machines(dc_replace(cfg, input_x=alt, adversary=None))
            sims[alt] = (m, m.initial_state())
        sessions.append(
            _SearchSession(
                x, machines[0].initial_state(), machines[1].initial_state(),
                sims, bytes([ERASED]) * schedule.bob_len, 0, (),
            )
        )
    return sessions, machines_by_x


def _fooling_plan(cfg, schedule, machines_by_x, sessions, budget: Fraction, actions):
    total = schedule.total_rounds
    for sess in sessions:
        if sess.cost * budget.denominator > budget.numerator * total:
            continue
        _alice, bob = machines_by_x[sess.x]
        output, _flags = bob.finalize(sess.bob_state)
        if output != sess.x:
            return AttackPlan(
                dict(sess.masks), sess.cost,
                f"fooling plan for input {bits_str(sess.x)}: "
                + ",".join(a.kind for a in actions),
                {"protocol": cfg.protocol, "budget": fraction_str(budget)},
            )
    return None


def attack_search(
    cfg: SessionConfig,
    budget_fraction: Fraction,
    method: str = "exhaustive",
    beam_width: int = 16,
    seed: int = 0,
    cap: int = 2_000_000,
) -> AttackPlan | None:
    """Search chunk-action sequences for a within-budget fooling plan.

    A plan counts as fooling when, for some input, the realized cost stays
    within budget and Bob's output is wrong.  Deterministic given the method
    parameters; returns the first fooling plan in search order, or None.
    """
    schedule = make_schedule(cfg)
    menu = search_menu(cfg)
    chunks = schedule.chunk_count
    if method == "exhaustive":
        if len(menu) ** chunks > cap:
            raise SearchSpaceTooLarge(
                f"{len(menu)}^{chunks} action sequences exceed the cap of {cap}"
            )
        sessions, machines_by_x = _initial_sessions(cfg, schedule, menu)
        total = schedule.total_rounds

        def dfs(depth: int, sessions, actions):
            if depth == chunks:
                return _fooling_plan(cfg, schedule, machines_by_x, sessions,
                                     budget_fraction, actions)
            for action in menu:
                nxt = [
                    _search_step(cfg, schedule, machines_by_x[s.x], s, action, depth)
                    for s in sessions
                ]
                # prune when no input could still be fooled within budget
                if all(
                    s.cost * budget_fraction.denominator
                    > budget_fraction.numerator * total
                    for s in nxt
                ):
                    continue
                found = dfs(depth + 1, nxt, actions + (action,))
                if found is not None:
                    return found
            return None

        return dfs(0, sessions, ())

    if method == "beam":
        rng = np.random.default_rng(seed)
        order = list(range(len(menu)))
        sessions, machines_by_x = _initial_sessions(cfg, schedule, menu)
        total = schedule.total_rounds
        frontier = [(0, (), sessions)]
        for depth in range(chunks):
            rng.shuffle(order)
            expanded = []
            for _score, actions, sess_list in frontier:
                for mi in order:
                    action = menu[mi]
                    nxt = [
                        _search_step(cfg, schedule, machines_by_x[s.x], s, action, depth)
                        for s in sess_list
                    ]
                    in_budget = [
                        s.cost for s in nxt
                        if s.cost * budget_fraction.denominator
                        <= budget_fraction.numerator * total
                    ]
                    if not in_budget:
                        continue
                    # prefer the heaviest attacks that some input can still
                    # afford: fooling needs erasure, not thrift
                    score = -max(in_budget)
                    expanded.append((score, actions + (action,), nxt))
            expanded.sort(key=lambda t: (t[0], [a.kind for a in t[1]]))
            frontier = expanded[:beam_width]
            if not frontier:
                return None
        for _score, actions, sess_list in frontier:
            plan = _fooling_plan(cfg, schedule, machines_by_x, sess_list,
                                 budget_fraction, actions)
            if plan is not None:
                return plan
        return None

    raise ValueError(f"unknown search method {method!r}")

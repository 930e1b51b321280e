"""ieccsim: interactive error-correcting codes over adversarial erasure channels.

A desk-scale laboratory: certified small codebooks with erasure list
decoding, two interactive protocols (resilience targets 6/11 and 3/5 of the
total communication) as deterministic state machines, a set of seeded and
white-box adversaries including the matching impossibility-bound attack
constructions, and a CLI harness for sessions, budget sweeps and searches.
"""

from .channel import (
    AdversaryProtocolError,
    describe_result,
    InvalidConfig,
    MessageContext,
    Position,
    RoundSchedule,
    SessionConfig,
    SessionResult,
    budget_fraction,
    enumerate_inputs,
    make_machines,
    make_schedule,
    run_session,
    trace_lines,
    write_trace,
)
from .codebook import (
    Codebook,
    ConstructionFailed,
    DistanceReport,
    IndexOutOfRange,
    ListDecoder,
    build_codebook,
    codebook_from_words,
    consistent,
    dump_codebook,
    encode,
    erasure_list_decode,
    load_codebook,
    read_codebook,
    save_codebook,
    verify_distance,
)
from .adversaries import (
    AttackPlan,
    search_menu,
    BitFlipAttackResult,
    BitFlipProtocol,
    ChunkAction,
    ChunkActionAdversary,
    ConfusionVerdict,
    NonDeterministicMachine,
    NullAdversary,
    RandomErasures,
    ScriptedMasks,
    SearchSpaceTooLarge,
    apply_chunk_actions,
    attack_search,
    bitflip_attack_generate,
    bob_view,
    erasure_confusion_attack,
    strategy_null,
    strategy_random,
    strawman_bitflip_protocol,
)
from .rationals import fraction_str, parse_fraction
from .words import ERASED, LengthMismatch, bits_str, constant_word, hamming, parse_bits

__all__ = [name for name in dir() if not name.startswith("_")]

"""Bounded fooling-plan search and the runtime invariant checkers.

The searcher walks per-chunk action sequences, pruning prefixes no input
can afford, and reports the first plan that makes the receiver output the
wrong value within budget.  Absence of a plan is evidence, not proof.

Every session also self-checks the analysis invariants: the receiver's two
candidate world-sets stay disjoint, at most one world ever looks like it is
in the question stage, the true sender's next message is always predicted,
and a unique decode always ends with the true input.
"""

from fractions import Fraction

from ieccsim import (
    ChunkAction,
    SessionConfig,
    apply_chunk_actions,
    attack_search,
    enumerate_inputs,
    make_schedule,
    parse_bits,
    run_session,
    strategy_random,
)

cfg = SessionConfig(protocol="611", n=2, epsilon=Fraction(1, 2), M=32,
                    input_x=parse_bits("00"))
print(f"search space: {make_schedule(cfg).chunk_count} chunks")

for budget in (Fraction(0), Fraction(1, 4), Fraction(1)):
    plan = attack_search(cfg, budget)
    if plan is None:
        print(f"  budget {budget}: no fooling plan found (evidence only)")
    else:
        print(f"  budget {budget}: fooling plan, cost {plan.total_cost} rounds")
        print(f"    {plan.description}")

# -- Invariant checkers under heavy fuzz -------------------------------------

print("\nfuzzing the 3/5 protocol with mixed adversaries:")
violations = 0
s_updates = 0
sessions = 0
menu = [ChunkAction("pass"), ChunkAction("blind_alice"), ChunkAction("blind_bob")]
menu += [ChunkAction("confuse_pair", None, alt) for alt in enumerate_inputs(2)]
base = SessionConfig(protocol="35", n=2, epsilon=Fraction(1, 2), M=16,
                     input_x=parse_bits("10"))
sched = make_schedule(base)
import numpy as np
for seed in range(300):
    rng = np.random.default_rng(seed)
    actions = [menu[int(rng.integers(0, len(menu)))] for _ in range(sched.chunk_count)]
    for adversary in (strategy_random(Fraction(2, 5), seed), apply_chunk_actions(actions)):
        res = run_session(base, adversary, want_trace=False)
        sessions += 1
        violations += len(res.invariant_violations)
        s_updates += res.s_update_events
print(f"  {sessions} sessions, {s_updates} world-set updates,"
      f" invariant violations: {violations}")

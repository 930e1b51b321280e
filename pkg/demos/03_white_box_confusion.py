"""White-box chunk actions: keeping the receiver two-minded on purpose.

The strongest per-chunk move against these protocols is to erase exactly
the positions where two candidate sender words differ, so the receiver
list-decodes to both worlds and must work to tell them apart.
"""

from fractions import Fraction

from ieccsim import ChunkAction, SessionConfig, apply_chunk_actions, make_schedule, parse_bits, run_session

x, alt = parse_bits("10"), parse_bits("11")
cfg = SessionConfig(protocol="611", n=2, epsilon=Fraction(1, 2), M=32,
                    input_x=x, codebook_seed=9)
chunks = make_schedule(cfg).chunk_count

# Confuse every chunk between the true input and the alternative.
adv = apply_chunk_actions([ChunkAction("confuse_pair", None, alt)] * chunks)
res = run_session(cfg, adv)
print(f"confuse '10' with '11' on every chunk:")
print(f"  2-decode events: {res.two_decode_events}")
print(f"  realized erasure fraction: {res.total_erasure_fraction}")
print(f"  receiver output: {res.bob_output == x and 'correct' or 'wrong'}")
print(f"  fallback chunks (answer phase is unconfusable): {adv.fallbacks}")

bob_states = [ev["state"] for ev in res.trace
              if ev["kind"] == "state_snapshot" and "last" in ev.get("state", {})]
print("  receiver per chunk:",
      [(s["phase"], s["last"], s["ques"]) for s in bob_states])

# Stop attacking once the question is out: hearing one answer bit suffices,
# and the attack cost collapses to the two codeword distances.
actions = [ChunkAction("confuse_pair", None, alt)] * 2 + \
          [ChunkAction("pass")] * (chunks - 2)
adv = apply_chunk_actions(actions)
res = run_session(cfg, adv, want_trace=False)
print(f"\nconfuse only the first two chunks, then listen:")
print(f"  success={res.success}, erased rounds={res.erased_alice_rounds}"
      f" (exactly the two pairwise distances), fraction={res.total_erasure_fraction}")

"""The two impossibility-bound attack constructions, executed and verified.

Over the erasure channel, blinding the quieter party entirely and merging
the closest pair of sender transcripts costs at most (1+r)/2 of the rounds
(r = the quieter party's speaking fraction) and leaves the receiver unable
to distinguish two inputs.  Over a bit-flip channel, equidistant corrupted
uplinks plus majority feedback fool some input pair at an average cost of
half the feedback rounds plus a quarter of the uplink rounds.
"""

from fractions import Fraction

from ieccsim import (
    SessionConfig,
    bitflip_attack_generate,
    enumerate_inputs,
    erasure_confusion_attack,
    strawman_bitflip_protocol,
)
from ieccsim.rationals import fraction_str

# -- Erasure confusion against both protocols --------------------------------

for protocol, n, M in (("611", 3, 64), ("35", 2, 32)):
    cfg = SessionConfig(protocol=protocol, n=n, epsilon=Fraction(1, 2), M=M,
                        input_x=bytes(n))
    plan, verdict = erasure_confusion_attack(cfg)
    print(f"protocol {protocol}: confuse inputs {verdict.pair}")
    print(f"  cost {fraction_str(verdict.cost_fraction)}"
          f" <= bound {fraction_str(verdict.bound)} : {verdict.within_bound}")
    print(f"  receiver views byte-identical: {verdict.views_identical};"
          f" both runs output {verdict.outputs[0]} -> fooled: {verdict.fooled}")

# -- Bit-flip pigeonhole attack against a strawman ---------------------------

proto = strawman_bitflip_protocol(3)
result = bitflip_attack_generate(proto, enumerate_inputs(3))
print(f"\nbit-flip strawman (repetition + parity echo), 8 inputs:")
print(f"  chosen pair {result.pair},"
      f" flips if first input: {result.cost_i}, if second: {result.cost_j}")
print(f"  bound {fraction_str(result.bound_rounds)} rounds"
      f" + odd-split slack {result.odd_split_slack}")
print(f"  receiver views identical under both inputs: {result.views_identical}")

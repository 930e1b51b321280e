"""Codebooks with certified distances, and erasure list decoding.

Small message spaces over the binary erasure channel get their power from
two certified properties: every pair of words is far apart, and no three
words share too many positions.  The first bounds when unique decoding
works; the second bounds the list size when the channel erases more.
"""

from fractions import Fraction

import numpy as np

from ieccsim import (
    build_codebook,
    codebook_from_words,
    constant_word,
    erasure_list_decode,
    verify_distance,
)
from ieccsim.words import apply_erasures, bits_str

# -- A tiny hand-made codebook: four words at relative distance 2/3 ---------

words = [bytes(p) * 8 for p in ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))]
cb4 = codebook_from_words(words, Fraction(0))
report = verify_distance(cb4, "exhaustive")
print("four fixed words of length 24:")
for w in words:
    print("  ", bits_str(w))
print(f"  min pairwise distance {report.min_pairwise} (= 2/3 of 24),"
      f" max triple overlap {report.max_triple_overlap}")

# -- A randomized construction, certified after the fact --------------------

forbidden = (constant_word(0, 256), constant_word(1, 256))
cb = build_codebook(32, 256, Fraction(1, 5), forbidden=forbidden, seed=7)
report = verify_distance(cb, "exhaustive")
print("\nrandomized 32-word codebook of length 256 (seed 7):")
print(f"  min pairwise {report.min_pairwise}, min vs constants {report.min_forbidden},"
      f" max triple overlap {report.max_triple_overlap}, certified={report.certified}")

# -- Erasures only remove information: the sent word always survives --------

rng = np.random.default_rng(1)
sent_index = 11
mask = np.zeros(256, dtype=bool)
mask[rng.choice(256, size=100, replace=False)] = True
received = apply_erasures(cb.words[sent_index], mask)
print(f"\nerase 100 of 256 symbols of word {sent_index}:"
      f" candidates = {erasure_list_decode(cb, received)}")

# Push the erasure count just under the list-decoding threshold: the
# candidate list may grow to two, never more.
bound = cb.decode_erasure_bound()
limit = (bound.numerator * 256) // bound.denominator
sizes = []
for trial in range(2000):
    mask = np.zeros(256, dtype=bool)
    mask[rng.choice(256, size=limit, replace=False)] = True
    received = apply_erasures(cb.words[sent_index], mask)
    sizes.append(len(erasure_list_decode(cb, received)))
print(f"2000 trials at {limit} erasures (threshold {bound} of 256):"
      f" max list size = {max(sizes)}, sent word always present")

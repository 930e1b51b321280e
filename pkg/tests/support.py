"""Shared test adversaries beyond the library's stock strategies."""

from dataclasses import replace as dc_replace

import numpy as np

from ieccsim.adversaries import _confusion_mask
from ieccsim.channel import make_machines
from ieccsim.words import ERASED, apply_erasures


class DeafAltConfusion:
    """Confuse the true sender with an alternative world whose simulated copy
    stops hearing feedback from a chosen chunk onward.

    While both copies hear the same feedback they evolve in lockstep and the
    receiver drives them together; once the alternative goes deaf it freezes
    in the incrementation stage while the true sender advances, which is the
    cheapest way to show the receiver a stage-1/stage-2 world pair.
    """

    def __init__(self, alt_x: bytes, deaf_from: int):
        self.alt_x = alt_x
        self.deaf_from = deaf_from

    def begin(self, cfg, schedule):
        self.schedule = schedule
        machine, _ = make_machines(dc_replace(cfg, input_x=self.alt_x, adversary=None))
        self.machine = machine
        self.decoder = machine.codec.decoder
        self.state = machine.initial_state()
        self.pending = bytes([ERASED]) * schedule.bob_len
        self.stepped = -1
        self.word = None

    def mask(self, ctx):
        n = len(ctx.sent)
        if ctx.speaker == "alice":
            if self.stepped != ctx.pos.chunk:
                self.stepped = ctx.pos.chunk
                self.state, self.word, _ = self.machine.step(
                    self.state, self.pending, ctx.pos)
            mask, _ok = _confusion_mask(ctx.sent, ctx.sent, self.word, self.decoder)
            return mask  # full erasure on postcondition failure is intended
        mask = np.zeros(n, dtype=bool)
        if ctx.pos.chunk >= self.deaf_from:
            self.pending = bytes([ERASED]) * n
        else:
            self.pending = apply_erasures(ctx.sent, mask)
        return mask


def final_bob_snapshot(result):
    last = None
    for ev in result.trace:
        if ev["kind"] == "state_snapshot" and "S0_size" in ev.get("state", {}):
            last = ev["state"]
    return last

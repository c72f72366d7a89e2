"""Central table of numerical tolerances and run defaults."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

DEFAULT_N = 100_000
DEFAULT_PHASES = 256
DEFAULT_GRID_STEPS = 24
MAX_REFINE_DEPTH = 4


@dataclass(frozen=True)
class Tolerances:
    # |slope/2pi - nearest integer| below which a gap counts as quantized
    slope: float = 0.1
    # gaps further than this from an integer slope are bisected
    refine: float = 0.02
    # line-intercept matching for the Fig. 1 / Fig. 2 tests, in nats
    intercept: float = 0.05
    # additive slack on top of 3 * stdError for bound checks
    bound: float = 0.02
    # L(0) below 3 * stdError + zero_le is reported as zero exponent
    zero_le: float = 2e-3
    # midpoint convexity slack
    convexity: float = 0.01
    # |L(eps) - (4 pi eps + ln|a2|)| at the asymptote
    asymptote: float = 5e-3
    # multiplier on stdError in every one-sided check
    sigmas: float = 3.0

    def override(self, **items: str | float) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = set(items) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: float(v) for k, v in items.items()})

    @classmethod
    def parse(cls, pairs) -> "Tolerances":
        """Build from ``KEY=VAL`` strings."""
        items = {}
        for pair in pairs or ():
            key, sep, val = pair.partition("=")
            if not sep:
                raise ValueError(f"expected KEY=VAL, got {pair!r}")
            items[key.strip()] = float(val)
        return cls().override(**items)


DEFAULT_TOLERANCES = Tolerances()

"""Central configuration: numeric tolerances, defaults, and seed splitting."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances used across the package, kept in one place."""

    norm: float = 1e-10          # statevector norm drift
    state_phase: float = 1e-9    # state equality up to global phase
    matrix: float = 1e-12        # exact matrix identities (2x2/4x4 algebra)
    exact_dist: float = 1e-12    # distributions that must match exactly
    angle_snap: float = 1e-9     # recognising dyadic multiples of pi


TOL = Tolerances()

# Hardware-scale reference averages, reported alongside bench output for
# context; not reproducible at desk scale (they depend on device noise).
REFERENCE_TVD = 0.7
REFERENCE_NORM_GED = 0.88

DEFAULT_SAMPLES = 64        # random points per sampled equivalence check
DEFAULT_RATIO = 0.10        # mutation ratio for negative testing
RATIO_RANGE = (0.05, 0.15)  # accepted mutation ratio band
DEFAULT_SHOTS = 10_000
DEFAULT_SIM_CAP = 16        # dense simulation width cap (qubits)
DEFAULT_REPEATS = 10        # bench repetitions averaged per entry
DEFAULT_GED_BUDGET = 12     # max node count for exact graph edit distance


@dataclass
class PipelineConfig:
    """Knobs shared by the CLI commands; loadable from a JSON file."""

    seed: int = 0
    zz_merge: bool = False            # the obfuscation/decoupling trade-off flag
    durations: dict[str, float] | None = None
    samples: int = DEFAULT_SAMPLES
    ratio: float = DEFAULT_RATIO
    shots: int = DEFAULT_SHOTS
    cap: int = DEFAULT_SIM_CAP
    repeats: int = DEFAULT_REPEATS
    extras: dict = field(default_factory=dict)

    def validate(self, allow_wide_ratio: bool = False) -> None:
        lo, hi = RATIO_RANGE
        if not allow_wide_ratio and not (lo <= self.ratio <= hi):
            raise ValueError(
                f"mutation ratio {self.ratio} outside [{lo}, {hi}]; "
                "pass --allow-wide-ratio to override"
            )
        if not 0.0 < self.ratio <= 1.0:
            raise ValueError(f"mutation ratio must be in (0, 1], got {self.ratio}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


def stage_seed(root: int, stage: str) -> int:
    """Derive a per-stage child seed from the root seed, stably across runs."""
    digest = hashlib.sha256(f"{root}/{stage}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1

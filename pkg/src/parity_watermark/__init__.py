"""Block-parity binary watermarking, the three-step parity attack, and an
exhaustive verification harness for small instances."""

from .adversary import AttackAction, AttackTrace, ClaimOutcome, Verdict, evaluate_claim, li_attack
from .core import BitMatrix, BlockGrid, CheckBit, PixelImage, check_bit, complement_image, make_grid
from .errors import (
    DimensionMismatch,
    FormatError,
    IntractableDomain,
    InvariantViolation,
    ValidationError,
    WatermarkError,
)
from .harness import (
    CounterexampleReport,
    Scenario,
    SweepReport,
    builtin_paper_scenario,
    exhaustive_sweep,
    run_counterexample,
    verify_attack_outcome_theorem,
)
from .scheme import EmbeddingResult, EmbedRule, embed, extract_blind_parity, extract_informed

__version__ = "0.1.0"

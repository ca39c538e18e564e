"""The three-step parity attack and the judge for its replacement claim.

The attack compares the check bits of the genuine host and of the attacker's
host.  Equal bits leave the target alone; unequal bits complement every pixel
of the target.  It is claimed that afterwards the genuine watermark reads as
the attacker's; ``evaluate_claim`` decides whether that actually happened.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import BitMatrix, CheckBit, PixelImage, check_bit, complement_image, same_geometry
from .errors import DimensionMismatch


class AttackAction(enum.Enum):
    NOOP = "noop"
    COMPLEMENT_ALL = "complement_all"


class Verdict(enum.Enum):
    REPLACED_WITH_ATTACKER = "replaced_with_attacker"
    ORIGINAL_SURVIVES = "original_survives"
    NEITHER_WATERMARK = "neither_watermark"


@dataclass(frozen=True)
class AttackTrace:
    b: CheckBit
    b_tilde: CheckBit
    action: AttackAction
    attacked: PixelImage


@dataclass(frozen=True)
class ClaimOutcome:
    verdict: Verdict
    extracted: BitMatrix


def li_attack(target: PixelImage, original_host: PixelImage, attacker_host: PixelImage) -> AttackTrace:
    """Run the attack on ``target`` (normally the genuine watermarked image).

    Check bits come from the two hosts, not from ``target``.  To try the
    alternate reading where the genuine check bit is taken after embedding,
    pass the watermarked image as ``original_host``.
    """
    same_geometry(target, original_host, attacker_host)
    b = check_bit(original_host)
    b_tilde = check_bit(attacker_host)
    if b == b_tilde:
        return AttackTrace(b, b_tilde, AttackAction.NOOP, target)
    return AttackTrace(b, b_tilde, AttackAction.COMPLEMENT_ALL, complement_image(target))


def evaluate_claim(extracted: BitMatrix, original_wm: BitMatrix, attacker_wm: BitMatrix) -> ClaimOutcome:
    # Replacement is tested first, so W == W~ counts as the claim holding.
    if not extracted.shape == original_wm.shape == attacker_wm.shape:
        raise DimensionMismatch(
            f"shapes differ: extracted {extracted.shape}, W {original_wm.shape}, W~ {attacker_wm.shape}"
        )
    if extracted.bits == attacker_wm.bits:
        verdict = Verdict.REPLACED_WITH_ATTACKER
    elif extracted.bits == original_wm.bits:
        verdict = Verdict.ORIGINAL_SURVIVES
    else:
        verdict = Verdict.NEITHER_WATERMARK
    return ClaimOutcome(verdict, extracted)

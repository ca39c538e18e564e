"""Counterexample reproduction and exhaustive small-instance sweeps."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence, Union

from .adversary import AttackAction, ClaimOutcome, Verdict, evaluate_claim, li_attack
from .core import BitMatrix, CheckBit, PixelImage, make_grid, same_geometry
from .errors import DimensionMismatch, IntractableDomain
from .scheme import EmbedRule, embed, extract

COMPONENTS = ("host", "watermark", "attacker_host", "attacker_watermark")

MAX_PIXELS = 9
MAX_SWEEP_DEPTH = 2
MAX_INSTANCES = 1 << 24

# The published 2x2, depth-2 counterexample: inputs, then expected artifacts.
PUBLISHED_DEPTH = 2
PUBLISHED_HOST = ((0, 1), (2, 3))
PUBLISHED_WATERMARK = ((0, 0), (1, 1))
PUBLISHED_ATTACKER_HOST = ((0, 1), (2, 3))
PUBLISHED_ATTACKER_WATERMARK = ((1, 1), (1, 1))
PUBLISHED_CHECK_BIT = 0
PUBLISHED_WATERMARKED = ((0, 1), (1, 0))
PUBLISHED_ATTACKER_WATERMARKED = ((3, 2), (1, 0))
PUBLISHED_EXTRACTED = ((0, 0), (1, 1))
PUBLISHED_ATTACKER_EXTRACTED = ((1, 1), (1, 1))

Component = Union[PixelImage, BitMatrix]


@dataclass(frozen=True)
class Scenario:
    depth: int
    host: PixelImage
    watermark: BitMatrix
    attacker_host: PixelImage
    attacker_watermark: BitMatrix
    rule: EmbedRule = EmbedRule.COMPLEMENT

    def __post_init__(self) -> None:
        if self.host.bit_depth != self.depth:
            raise DimensionMismatch(f"host depth {self.host.bit_depth} != scenario depth {self.depth}")
        same_geometry(self.host, self.attacker_host)
        if self.watermark.shape != self.attacker_watermark.shape:
            raise DimensionMismatch(
                f"watermark {self.watermark.shape} and attacker watermark "
                f"{self.attacker_watermark.shape} differ in shape"
            )
        make_grid(self.host, self.watermark)
        make_grid(self.attacker_host, self.attacker_watermark)

    @property
    def wm_shape(self) -> tuple[int, int]:
        return self.watermark.shape

    def replace(self, **changes) -> Scenario:
        fields_ = {name: getattr(self, name) for name in ("depth", *COMPONENTS, "rule")}
        fields_.update(changes)
        return Scenario(**fields_)


def builtin_paper_scenario() -> Scenario:
    """The published counterexample: identical hosts, W = [[0,0],[1,1]], W~ all ones."""
    d = PUBLISHED_DEPTH
    return Scenario(
        depth=d,
        host=PixelImage.from_rows(PUBLISHED_HOST, d),
        watermark=BitMatrix.from_rows(PUBLISHED_WATERMARK),
        attacker_host=PixelImage.from_rows(PUBLISHED_ATTACKER_HOST, d),
        attacker_watermark=BitMatrix.from_rows(PUBLISHED_ATTACKER_WATERMARK),
        rule=EmbedRule.COMPLEMENT,
    )


@dataclass(frozen=True)
class CounterexampleReport:
    scenario: Scenario
    b: CheckBit
    b_tilde: CheckBit
    action: AttackAction
    watermarked: PixelImage
    attacker_watermarked: PixelImage
    attacked: PixelImage
    extracted: BitMatrix
    attacker_extracted: BitMatrix
    verdict: ClaimOutcome
    # Empty unless the scenario is the published one (or flags were requested).
    paper_match: Mapping[str, bool] = field(default_factory=dict)

    @property
    def all_paper_match(self) -> bool:
        return bool(self.paper_match) and all(self.paper_match.values())


def paper_match_flags(report: CounterexampleReport) -> dict[str, bool]:
    """Compare every input and artifact of ``report`` with the published values."""
    s = report.scenario
    return {
        "depth": s.depth == PUBLISHED_DEPTH,
        "rule": s.rule is EmbedRule.COMPLEMENT,
        "host": _rows_of(s.host) == PUBLISHED_HOST,
        "watermark": _rows_of(s.watermark) == PUBLISHED_WATERMARK,
        "attacker_host": _rows_of(s.attacker_host) == PUBLISHED_ATTACKER_HOST,
        "attacker_watermark": _rows_of(s.attacker_watermark) == PUBLISHED_ATTACKER_WATERMARK,
        "check_bits": report.b == PUBLISHED_CHECK_BIT and report.b_tilde == PUBLISHED_CHECK_BIT,
        "watermarked": _rows_of(report.watermarked) == PUBLISHED_WATERMARKED,
        "attacker_watermarked": _rows_of(report.attacker_watermarked) == PUBLISHED_ATTACKER_WATERMARKED,
        "extracted": _rows_of(report.extracted) == PUBLISHED_EXTRACTED,
        "attacker_extracted": _rows_of(report.attacker_extracted) == PUBLISHED_ATTACKER_EXTRACTED,
        "extracted_differs": report.extracted != report.attacker_extracted,
    }


def _rows_of(x: Component) -> tuple[tuple[int, ...], ...]:
    rows = x.rows() if isinstance(x, PixelImage) else x.to_rows()
    return tuple(tuple(r) for r in rows)


def run_counterexample(s: Scenario, *, compare_with_paper: bool | None = None) -> CounterexampleReport:
    """Embed both watermarks, attack the genuine image, extract, and judge.

    ``compare_with_paper`` defaults to "only for the builtin scenario".
    """
    dims = s.wm_shape
    genuine = embed(s.host, s.watermark, s.rule)
    forged = embed(s.attacker_host, s.attacker_watermark, s.rule)
    trace = li_attack(genuine.watermarked, s.host, s.attacker_host)
    extracted = extract(trace.attacked, s.rule, dims, s.host, genuine.check_bit)
    attacker_extracted = extract(forged.watermarked, s.rule, dims, s.attacker_host, forged.check_bit)
    outcome = evaluate_claim(extracted, s.watermark, s.attacker_watermark)
    report = CounterexampleReport(
        scenario=s,
        b=trace.b,
        b_tilde=trace.b_tilde,
        action=trace.action,
        watermarked=genuine.watermarked,
        attacker_watermarked=forged.watermarked,
        attacked=trace.attacked,
        extracted=extracted,
        attacker_extracted=attacker_extracted,
        verdict=outcome,
    )
    if compare_with_paper is None:
        compare_with_paper = s == builtin_paper_scenario()
    if compare_with_paper:
        report = _with_flags(report, paper_match_flags(report))
    return report


def _with_flags(report: CounterexampleReport, flags: dict[str, bool]) -> CounterexampleReport:
    return CounterexampleReport(**{**report.__dict__, "paper_match": flags})


# --------------------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class Tally:
    total: int = 0
    replaced: int = 0
    survives: int = 0
    neither: int = 0
    identical_watermarks: int = 0

    def __add__(self, other: Tally) -> Tally:
        return Tally(
            self.total + other.total,
            self.replaced + other.replaced,
            self.survives + other.survives,
            self.neither + other.neither,
            self.identical_watermarks + other.identical_watermarks,
        )


@dataclass(frozen=True)
class SweepReport:
    width: int
    height: int
    depth: int
    rule: EmbedRule
    wm_rows: int
    wm_cols: int
    total_instances: int
    replaced_count: int
    survives_count: int
    neither_count: int
    # Instances with W == W~, which count as "replaced" vacuously.
    identical_watermark_count: int
    fixed: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        assert self.replaced_count + self.survives_count + self.neither_count == self.total_instances

    @property
    def success_rate(self) -> Fraction:
        return Fraction(self.replaced_count, self.total_instances)


def all_images(width: int, height: int, depth: int) -> Iterator[PixelImage]:
    for pixels in itertools.product(range(1 << depth), repeat=width * height):
        yield PixelImage._trusted(width, height, depth, pixels)


def all_watermarks(rows: int, cols: int) -> Iterator[BitMatrix]:
    for bits in itertools.product((0, 1), repeat=rows * cols):
        yield BitMatrix(rows, cols, bits)


def _guard(width: int, height: int, depth: int) -> None:
    if width < 1 or height < 1 or depth < 1:
        raise DimensionMismatch(f"bad domain {width}x{height} at depth {depth}")
    if width * height > MAX_PIXELS or depth > MAX_SWEEP_DEPTH:
        raise IntractableDomain(
            f"{width}x{height} at depth {depth} exceeds the exhaustive limit "
            f"({MAX_PIXELS} pixels, depth {MAX_SWEEP_DEPTH})"
        )


def fix_all_but(s: Scenario, *names: str) -> dict[str, Component]:
    """Fixed-component mapping taking everything from ``s`` except ``names``."""
    unknown = set(names) - set(COMPONENTS)
    if unknown:
        raise ValueError(f"unknown components {sorted(unknown)}; choose from {COMPONENTS}")
    return {name: getattr(s, name) for name in COMPONENTS if name not in names}


def _axes(
    width: int, height: int, depth: int, wm_shape: tuple[int, int], fix: Mapping[str, Component]
) -> list[list[Component]]:
    unknown = set(fix) - set(COMPONENTS)
    if unknown:
        raise ValueError(f"unknown components {sorted(unknown)}; choose from {COMPONENTS}")
    probe = PixelImage._trusted(width, height, depth, (0,) * (width * height))
    make_grid(probe, wm_shape)
    axes = []
    for name in COMPONENTS:
        is_image = name.endswith("host")
        if name in fix:
            value = fix[name]
            if is_image:
                if not isinstance(value, PixelImage):
                    raise DimensionMismatch(f"fixed {name} must be an image")
                same_geometry(probe, value)
            elif not isinstance(value, BitMatrix) or value.shape != tuple(wm_shape):
                raise DimensionMismatch(f"fixed {name} must be a {wm_shape[0]}x{wm_shape[1]} bit matrix")
            axes.append([value])
        elif is_image:
            axes.append(list(all_images(width, height, depth)))
        else:
            axes.append(list(all_watermarks(*wm_shape)))
    return axes


def _tally_range(axes: Sequence[Sequence[Component]], depth: int, rule: EmbedRule, start: int, stop: int) -> Tally:
    total = replaced = survives = neither = identical = 0
    for host, wm, a_host, a_wm in itertools.islice(itertools.product(*axes), start, stop):
        s = Scenario(depth, host, wm, a_host, a_wm, rule)
        verdict = run_counterexample(s, compare_with_paper=False).verdict.verdict
        total += 1
        if verdict is Verdict.REPLACED_WITH_ATTACKER:
            replaced += 1
            identical += wm == a_wm
        elif verdict is Verdict.ORIGINAL_SURVIVES:
            survives += 1
        else:
            neither += 1
    return Tally(total, replaced, survives, neither, identical)


def _split(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n))
    step, extra = divmod(n, parts)
    bounds, lo = [], 0
    for k in range(parts):
        hi = lo + step + (k < extra)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def exhaustive_sweep(
    width: int,
    height: int,
    depth: int,
    rule: EmbedRule = EmbedRule.COMPLEMENT,
    fix: Mapping[str, Component] | None = None,
    *,
    wm_shape: tuple[int, int] | None = None,
    workers: int = 1,
    max_instances: int = MAX_INSTANCES,
) -> SweepReport:
    """Run the full pipeline on every instance of a small domain and tally verdicts.

    Components absent from ``fix`` range over all values.  The watermark
    shape defaults to one bit per pixel.  ``workers > 1`` partitions the
    instance space over processes; the result does not depend on it.
    """
    _guard(width, height, depth)
    fix = dict(fix or {})
    wm_shape = tuple(wm_shape or (height, width))
    axes = _axes(width, height, depth, wm_shape, fix)
    n = 1
    for axis in axes:
        n *= len(axis)
    if n > max_instances:
        raise IntractableDomain(f"{n} instances exceeds the limit of {max_instances}")

    if workers <= 1:
        tally = _tally_range(axes, depth, rule, 0, n)
    else:
        chunks = _split(n, workers * 4)
        with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1)) as pool:
            futures = [pool.submit(_tally_range, axes, depth, rule, lo, hi) for lo, hi in chunks]
            tally = sum((f.result() for f in futures), Tally())

    return SweepReport(
        width=width,
        height=height,
        depth=depth,
        rule=rule,
        wm_rows=wm_shape[0],
        wm_cols=wm_shape[1],
        total_instances=tally.total,
        replaced_count=tally.replaced,
        survives_count=tally.survives,
        neither_count=tally.neither,
        identical_watermark_count=tally.identical_watermarks,
        fixed=tuple(name for name in COMPONENTS if name in fix),
    )


# --------------------------------------------------------------------------- theorem


@dataclass(frozen=True)
class TheoremCounterexample:
    host: PixelImage
    watermark: BitMatrix
    attacker_host: PixelImage
    expected: BitMatrix
    extracted: BitMatrix


@dataclass(frozen=True)
class TheoremResult:
    holds: bool
    instances: int
    counterexample: TheoremCounterexample | None = None

    def __bool__(self) -> bool:
        return self.holds


def _expected_after_attack(wm: BitMatrix, complemented: bool, rule: EmbedRule, block_size: int) -> BitMatrix:
    if not complemented:
        return wm
    if rule is EmbedRule.COMPLEMENT:
        return wm.inverted()
    # Complementing a block flips its parity iff it has an odd pixel count.
    return wm.inverted() if block_size & 1 else wm


def _theorem_range(
    hosts: Sequence[PixelImage],
    watermarks: Sequence[BitMatrix],
    rule: EmbedRule,
    wm_shape: tuple[int, int],
    block_size: int,
) -> tuple[int, TheoremCounterexample | None]:
    checked = 0
    for host in hosts:
        b = sum(host.pixels) % 2
        for wm in watermarks:
            emb = embed(host, wm, rule)
            for a_host in _hosts_like(host):
                trace = li_attack(emb.watermarked, host, a_host)
                got = extract(trace.attacked, rule, wm_shape, host, emb.check_bit)
                complemented = b != sum(a_host.pixels) % 2
                want = _expected_after_attack(wm, complemented, rule, block_size)
                checked += 1
                if got != want:
                    return checked, TheoremCounterexample(host, wm, a_host, want, got)
    return checked, None


_ALL_HOSTS: dict[tuple[int, int, int], list[PixelImage]] = {}


def _hosts_like(like: PixelImage) -> list[PixelImage]:
    key = (like.width, like.height, like.bit_depth)
    if key not in _ALL_HOSTS:
        _ALL_HOSTS[key] = list(all_images(*key))
    return _ALL_HOSTS[key]


def verify_attack_outcome_theorem(
    width: int,
    height: int,
    depth: int,
    rule: EmbedRule = EmbedRule.COMPLEMENT,
    *,
    wm_shape: tuple[int, int] | None = None,
    workers: int = 1,
) -> TheoremResult:
    """Check, over every host pair and watermark, what extraction yields after the attack.

    Expected: W when the hosts' check bits agree.  When they differ, NOT W
    under the complement rule, and W XOR (block pixel count mod 2) under the
    parity rule.
    """
    _guard(width, height, depth)
    wm_shape = tuple(wm_shape or (height, width))
    probe = PixelImage._trusted(width, height, depth, (0,) * (width * height))
    block_size = make_grid(probe, wm_shape).block_size
    hosts = list(all_images(width, height, depth))
    watermarks = list(all_watermarks(*wm_shape))

    if workers <= 1:
        results = [_theorem_range(hosts, watermarks, rule, wm_shape, block_size)]
    else:
        chunks = _split(len(hosts), workers * 4)
        with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1)) as pool:
            futures = [
                pool.submit(_theorem_range, hosts[lo:hi], watermarks, rule, wm_shape, block_size)
                for lo, hi in chunks
            ]
            results = [f.result() for f in futures]

    checked = sum(n for n, _ in results)
    for _, bad in results:
        if bad is not None:
            return TheoremResult(False, checked, bad)
    return TheoremResult(True, checked)

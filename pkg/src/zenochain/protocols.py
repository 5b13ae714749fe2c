"""Protocol engines and closed-form analytics.

Two protocols are modelled:

* ``improved`` -- M outer cycles whose channel arm runs through an iterative
  chain module (:mod:`zenochain.chain_module`).
* ``slaz`` -- the nested-cycle baseline: every outer cycle contains N inner
  cycles, each with its own trip through the channel.

Detector labels follow the improved protocol's convention: when Bob passes
the photon interference sends it to D2; when he blocks, the Zeno effect keeps
it in Alice's arm and D1 clicks.  In the nested baseline, D1 is the outer
arm and D2 the inner arm, so a clean pass ends on D1 and a block on D2.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .chain_module import ChainModule, total_transmission
from .quantum_core import (
    DomainError,
    ThreeModeState,
    TwoModeState,
    attenuate_channel,
    beam_splitter_angle,
    detect,
    rotate,
    rotate_pair,
)


class ConfigError(ValueError):
    """Raised when run inputs are inconsistent with each other."""


class BobBit(str, enum.Enum):
    BLOCK = "block"  # logic 1
    PASS = "pass"  # logic 0

    @property
    def logic(self) -> int:
        return 1 if self is BobBit.BLOCK else 0


class Protocol(str, enum.Enum):
    IMPROVED = "improved"
    SLAZ = "slaz"


OUTCOMES = ("D1", "D2", "D3_module", "D4_bob", "noise_absorbed")


@dataclass(frozen=True)
class DetectorDist:
    D1: float = 0.0
    D2: float = 0.0
    D3_module: float = 0.0
    D4_bob: float = 0.0
    noise_absorbed: float = 0.0

    def as_dict(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in OUTCOMES}

    def total(self) -> float:
        return math.fsum(self.as_dict().values())

    def __getitem__(self, key: str) -> float:
        if key not in OUTCOMES:
            raise KeyError(key)
        return getattr(self, key)


@dataclass(frozen=True)
class CounterfactualityVec:
    C0: float
    C1: float

    @property
    def A0(self) -> float:
        return 1.0 - self.C0

    @property
    def A1(self) -> float:
        return 1.0 - self.C1


@dataclass(frozen=True)
class ImprovedParams:
    M: int
    module: ChainModule = field(default_factory=lambda: ChainModule((1.0,)))

    def __post_init__(self) -> None:
        beam_splitter_angle(self.M)

    @property
    def theta(self) -> float:
        return beam_splitter_angle(self.M)

    @property
    def t(self) -> float:
        return total_transmission(self.module)


@dataclass(frozen=True)
class SlazParams:
    M: int
    N: int

    def __post_init__(self) -> None:
        beam_splitter_angle(self.M)
        beam_splitter_angle(self.N)

    @property
    def theta_M(self) -> float:
        return beam_splitter_angle(self.M)

    @property
    def theta_N(self) -> float:
        return beam_splitter_angle(self.N)


NoiseMask = tuple[bool, ...]


def clean_mask(M: int) -> NoiseMask:
    return (False,) * M


def mask_from_cycles(M: int, cycles: Iterable[int]) -> NoiseMask:
    """Mask with the given 1-based cycles blocked."""
    blocked = set(cycles)
    for i in blocked:
        if not 1 <= i <= M:
            raise ConfigError(f"cycle {i} outside 1..{M}")
    return tuple(i in blocked for i in range(1, M + 1))


def _as_mask(mask: Sequence[bool] | None, M: int) -> NoiseMask:
    if mask is None:
        return clean_mask(M)
    out = tuple(bool(b) for b in mask)
    if len(out) != M:
        raise ConfigError(f"noise mask has length {len(out)}, expected M={M}")
    return out


# ---------------------------------------------------------------------------
# analytic forms


def theta_of(M: int) -> float:
    return beam_splitter_angle(M)


def improved_c1(M: int) -> float:
    """Probability that D1 clicks when Bob blocks: cos(pi/2M)**(2M)."""
    return math.cos(theta_of(M)) ** (2 * M)


def improved_c0(M: int, t: float) -> float:
    """Probability that no part of the photon reached Bob in any of the M cycles."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t!r}")
    theta = theta_of(M)
    return math.prod(1.0 - math.sin(m * theta) ** 2 * t for m in range(1, M + 1))


def counterfactuality_improved(params: ImprovedParams) -> CounterfactualityVec:
    return CounterfactualityVec(improved_c0(params.M, params.t), improved_c1(params.M))


def improved_single_block_d2(M: int, i: int, c: float) -> float:
    """D2 mass of a pass run whose channel is cut (return rate ``c``) in cycle ``i`` only.

    Before the cut the channel carries ``sin(i*theta)``; the missing
    ``(1 - c) * sin(i*theta)`` evolves linearly through the remaining
    ``M - i`` splitters and subtracts from the full-transfer amplitude.
    """
    theta = theta_of(M)
    if not 1 <= i <= M:
        raise DomainError(f"cycle index {i} outside 1..{M}")
    if not 0.0 <= c <= 1.0:
        raise DomainError(f"c must lie in [0, 1], got {c!r}")
    return (1.0 - (1.0 - c) * math.sin(i * theta) * math.cos((M - i) * theta)) ** 2


def slaz_p1(M: int) -> float:
    return math.cos(theta_of(M)) ** (2 * M)


def slaz_p2(M: int, N: int) -> float:
    """Inner-arm (D2) mass after M blocked outer cycles of the nested baseline.

    Each blocked outer cycle damps the inner amplitude by ``cos(pi/2N)**N``,
    the survival amplitude of N interrupted inner rotations.
    """
    tm = theta_of(M)
    damp = math.cos(theta_of(N)) ** N
    a, b = 1.0, 0.0
    for _ in range(M):
        a, b = rotate_pair(a, b, tm)
        b *= damp
    return b * b


def counterfactuality_slaz(params: SlazParams) -> CounterfactualityVec:
    return CounterfactualityVec(slaz_p2(params.M, params.N), slaz_p1(params.M))


def equivalent_distance(protocol: Protocol | str, M: int, N: int | None, L: float) -> float:
    """Total optical path per transmitted bit: M*L for improved, M*N*L for slaz."""
    protocol = Protocol(protocol)
    if not L > 0:
        raise DomainError(f"distance must be positive, got {L!r}")
    theta_of(M)
    if protocol is Protocol.IMPROVED:
        return M * L
    if N is None:
        raise ConfigError("slaz needs the inner-cycle count N")
    theta_of(N)
    return M * N * L


# ---------------------------------------------------------------------------
# state-vector engines


def improved_run(
    params: ImprovedParams,
    bob: BobBit | str,
    mask: Sequence[bool] | None = None,
    c: float = 0.0,
) -> DetectorDist:
    """Step one photon through the M outer cycles of the improved protocol.

    Each cycle is a beam splitter followed by a channel segment.  A segment
    obstructed by Bob or by noise scales the channel amplitude by ``c``.  The
    lost mass of a Bob block is split between Bob's detector (the fraction
    that crosses the whole module) and the module detectors; mass lost to a
    noise obstruction is booked as ``noise_absorbed``.
    """
    bob = BobBit(bob)
    M = params.M
    blocked = _as_mask(mask, M)
    theta = params.theta
    t = params.t

    state = TwoModeState()
    d3 = d4 = noise = 0.0
    for noisy in blocked:
        state = rotate(state, theta)
        if noisy:
            state, lost = attenuate_channel(state, c)
            noise += lost
        elif bob is BobBit.BLOCK:
            state, lost = attenuate_channel(state, c)
            d4 += t * lost
            d3 += (1.0 - t) * lost
    out = detect(state)
    return DetectorDist(out["D1"], out["D2"], d3, d4, noise)


def _slaz_inner_explicit(
    inner: float, theta_n: float, N: int, cut: Sequence[bool], bob_blocks: bool
) -> tuple[float, float, float, float]:
    """Explicit N-step inner loop; returns (inner, d3, d4, noise)."""
    ch = 0.0
    d4 = noise = 0.0
    for k in range(N):
        inner, ch = rotate_pair(inner, ch, theta_n)
        if cut[k]:
            noise += ch * ch
            ch = 0.0
        elif bob_blocks:
            d4 += ch * ch
            ch = 0.0
    return inner, ch * ch, d4, noise


def slaz_run(
    params: SlazParams,
    bob: BobBit | str,
    mask: Sequence[bool] | None = None,
    *,
    segment_mask: Sequence[Sequence[bool]] | None = None,
    explicit: bool = False,
) -> DetectorDist:
    """Step one photon through the nested-cycle baseline.

    ``mask`` blocks whole outer cycles (all N inner channel trips).  A
    ``segment_mask`` of shape (M, N) blocks individual inner trips instead
    and always uses the explicit inner loop.  With ``explicit=False`` the
    clean inner loop is collapsed into its closed form, which is
    algebraically identical and O(1) per outer cycle.
    """
    bob = BobBit(bob)
    M, N = params.M, params.N
    blocked = _as_mask(mask, M)
    if segment_mask is not None:
        if len(segment_mask) != M:
            raise ConfigError(f"segment mask has {len(segment_mask)} rows, expected M={M}")
        rows = [tuple(bool(b) for b in row) for row in segment_mask]
        for row in rows:
            if len(row) != N:
                raise ConfigError(f"segment mask row has length {len(row)}, expected N={N}")
        explicit = True
    else:
        rows = [(b,) * N for b in blocked]

    tm, tn = params.theta_M, params.theta_N
    block_damp = math.cos(tn) ** N
    pass_keep = math.cos(N * tn)
    pass_leak = math.sin(N * tn) ** 2
    bob_blocks = bob is BobBit.BLOCK

    state = ThreeModeState()
    d3 = d4 = noise = 0.0
    for m in range(M):
        a, b = rotate_pair(state.outer_amp, state.inner_amp, tm)
        if explicit:
            b, leak, lost_bob, lost_noise = _slaz_inner_explicit(b, tn, N, rows[m], bob_blocks)
            d3 += leak
            d4 += lost_bob
            noise += lost_noise
        elif blocked[m] or bob_blocks:
            lost = b * b * (1.0 - block_damp**2)
            if blocked[m]:
                noise += lost
            else:
                d4 += lost
            b *= block_damp
        else:
            d3 += b * b * pass_leak
            b *= pass_keep
        state = ThreeModeState(a, b, 0.0)
    return DetectorDist(state.outer_amp**2, state.inner_amp**2, d3, d4, noise)


def run(
    protocol: Protocol | str,
    params: ImprovedParams | SlazParams,
    bob: BobBit | str,
    mask: Sequence[bool] | None = None,
    c: float = 0.0,
) -> DetectorDist:
    if Protocol(protocol) is Protocol.IMPROVED:
        return improved_run(params, bob, mask, c)  # type: ignore[arg-type]
    return slaz_run(params, bob, mask)  # type: ignore[arg-type]


def success_detector(protocol: Protocol | str) -> str:
    """Detector that should click when Bob passes the photon."""
    return "D2" if Protocol(protocol) is Protocol.IMPROVED else "D1"

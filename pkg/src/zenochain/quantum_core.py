"""Real-amplitude state algebra for single-photon interferometer chains.

Every transformation used by the two protocol engines is either a real
rotation (a beam splitter) or a real scaling of one arm (an obstructed
channel segment), so amplitudes are plain floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

NORM_TOL = 1e-12


class InvalidStateError(ValueError):
    """Raised when a state carries non-finite or over-normalised amplitudes."""


class DomainError(ValueError):
    """Raised when a parameter lies outside its admissible range."""


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidStateError(f"non-finite amplitude {v!r}")


@dataclass(frozen=True)
class TwoModeState:
    """Photon amplitude in Alice's arm (|10>) and the channel arm (|01>)."""

    alice_amp: float = 1.0
    channel_amp: float = 0.0

    def __post_init__(self) -> None:
        _check_finite(self.alice_amp, self.channel_amp)
        if self.norm_sq() > 1.0 + NORM_TOL:
            raise InvalidStateError(f"norm^2 {self.norm_sq()!r} exceeds 1")

    def norm_sq(self) -> float:
        return self.alice_amp**2 + self.channel_amp**2


@dataclass(frozen=True)
class ThreeModeState:
    """Outer-arm, inner-arm and channel amplitudes of the nested baseline."""

    outer_amp: float = 1.0
    inner_amp: float = 0.0
    channel_amp: float = 0.0

    def __post_init__(self) -> None:
        _check_finite(self.outer_amp, self.inner_amp, self.channel_amp)
        if self.norm_sq() > 1.0 + NORM_TOL:
            raise InvalidStateError(f"norm^2 {self.norm_sq()!r} exceeds 1")

    def norm_sq(self) -> float:
        return self.outer_amp**2 + self.inner_amp**2 + self.channel_amp**2


def beam_splitter_angle(M: int) -> float:
    """Splitter angle pi/(2M) that transfers the photon fully after M passes."""
    if isinstance(M, bool) or int(M) != M or M < 1:
        raise DomainError(f"cycle count must be a positive integer, got {M!r}")
    return math.pi / (2 * int(M))


def rotate_pair(x: float, y: float, theta: float) -> tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    return x * c - y * s, x * s + y * c


def rotate(state: TwoModeState, theta: float) -> TwoModeState:
    if not math.isfinite(theta):
        raise DomainError(f"angle must be finite, got {theta!r}")
    x, y = rotate_pair(state.alice_amp, state.channel_amp, theta)
    return TwoModeState(x, y)


def attenuate_channel(state: TwoModeState, c: float) -> tuple[TwoModeState, float]:
    """Scale the channel amplitude by ``c``; return the new state and the lost mass.

    ``c`` is an amplitude factor: a pulse that is fully absorbed has ``c = 0``,
    an unobstructed one ``c = 1``.
    """
    if not 0.0 <= c <= 1.0:
        raise DomainError(f"return rate c must lie in [0, 1], got {c!r}")
    y = state.channel_amp
    absorbed = (1.0 - c * c) * y * y
    return TwoModeState(state.alice_amp, c * y), absorbed


def detect(state: TwoModeState) -> dict[str, float]:
    return {"D1": state.alice_amp**2, "D2": state.channel_amp**2}

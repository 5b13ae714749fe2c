"""The iterative module: a chain of N beam splitters ending in mirrors.

A pulse entering the module either passes every splitter and reaches Bob
(probability ``t = prod(t_j)``), is reflected back towards the outer
interferometer, or is absorbed in one of the module detectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .quantum_core import DomainError


@dataclass(frozen=True)
class ChainModule:
    transmissivities: tuple[float, ...]

    def __post_init__(self) -> None:
        ts = tuple(float(t) for t in self.transmissivities)
        if not ts:
            raise DomainError("a chain module needs at least one beam splitter")
        for t in ts:
            if not 0.0 <= t <= 1.0:
                raise DomainError(f"transmissivity {t!r} outside [0, 1]")
        object.__setattr__(self, "transmissivities", ts)

    @property
    def N(self) -> int:
        return len(self.transmissivities)

    @property
    def t(self) -> float:
        return total_transmission(self)

    @property
    def p_ref(self) -> float:
        return reflect_back_prob(self)

    @property
    def p_abs(self) -> float:
        return absorb_prob(self)


@dataclass(frozen=True)
class DelayGeometry:
    N: int
    L0: float
    L1: float

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N!r}")
        if not (self.L0 > 0 and self.L1 > 0):
            raise DomainError("delay lengths must be strictly positive")


def total_transmission(module: ChainModule) -> float:
    return math.prod(module.transmissivities)


def reflect_back_prob(module: ChainModule) -> float:
    """Probability that the pulse comes back out of the module entrance.

    Sum over the splitter ``i`` at which the pulse turns round: it crosses
    the earlier splitters twice (``t_j**2``) and is reflected at ``i`` on
    the way in and again on the way out (``(1 - t_i)**2``).
    """
    total = 0.0
    passed = 1.0
    for t in module.transmissivities:
        total += passed * (1.0 - t) ** 2
        passed *= t * t
    return total


def absorb_prob(module: ChainModule) -> float:
    p = 1.0 - reflect_back_prob(module) - total_transmission(module)
    # round-off can push an exact zero slightly negative
    return min(max(p, 0.0), 1.0)


def effective_return_rate(module: ChainModule) -> float:
    """Return rate ``c`` seen by the outer interferometer when the channel is cut."""
    return reflect_back_prob(module)


def uniform_for_target(N: int, t_target: float) -> ChainModule:
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    if not 0.0 < t_target <= 1.0:
        raise DomainError(
            f"t_target must lie in (0, 1], got {t_target!r}; build a blocked module explicitly"
        )
    tau = t_target ** (1.0 / N)
    return ChainModule((tau,) * int(N))


def od_lengths(geometry: DelayGeometry) -> list[float]:
    """Optical-delay lengths with a constant step ``L0``, the first matched to the channel."""
    return [geometry.L1 + i * geometry.L0 for i in range(int(geometry.N))]

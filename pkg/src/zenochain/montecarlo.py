"""Seeded Monte Carlo over random channel obstructions, plus an exact oracle.

Every trial draws a fresh noise mask from its own random stream, keyed by
``(master_seed, trial_index)``, runs the photon with Bob passing, and records
the probability mass that lands on the correct detector.  Because each trial
is reproducible on its own, results do not depend on how trials are split
across workers.

The exact oracle propagates the second moment ``S = E[v v^T]`` of the
amplitude vector.  Each channel segment is an independent Bernoulli choice
between two linear maps, so ``S`` obeys a deterministic linear recursion and
the expected success is one of its diagonal entries.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from contextlib import contextmanager
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .protocols import ImprovedParams, Protocol, SlazParams
from .quantum_core import DomainError

GRANULARITIES = ("cycle", "segment")


@dataclass(frozen=True)
class NoiseSpec:
    """Obstruction probability ``B`` and return rate ``c``.

    ``granularity`` only matters for the nested baseline: ``"segment"``
    obstructs each of the N inner channel trips independently, ``"cycle"``
    obstructs all N trips of an outer cycle at once.
    """

    B: float
    c: float = 0.0
    granularity: str = "segment"

    def __post_init__(self) -> None:
        if not 0.0 <= self.B <= 1.0:
            raise DomainError(f"B must lie in [0, 1], got {self.B!r}")
        if not 0.0 <= self.c <= 1.0:
            raise DomainError(f"c must lie in [0, 1], got {self.c!r}")
        if self.granularity not in GRANULARITIES:
            raise DomainError(f"granularity must be one of {GRANULARITIES}")


@dataclass(frozen=True)
class McConfig:
    protocol: Protocol
    params: ImprovedParams | SlazParams

    def __post_init__(self) -> None:
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        want = ImprovedParams if self.protocol is Protocol.IMPROVED else SlazParams
        if not isinstance(self.params, want):
            raise DomainError(f"{self.protocol.value} needs {want.__name__}")

    @classmethod
    def improved(cls, M: int) -> McConfig:
        return cls(Protocol.IMPROVED, ImprovedParams(M))

    @classmethod
    def slaz(cls, M: int, N: int) -> McConfig:
        return cls(Protocol.SLAZ, SlazParams(M, N))

    @property
    def M(self) -> int:
        return self.params.M

    @property
    def N(self) -> int | None:
        return getattr(self.params, "N", None)

    @property
    def label(self) -> str:
        if self.protocol is Protocol.IMPROVED:
            return f"improved(M={self.M})"
        return f"slaz(M={self.M},N={self.N})"


@dataclass(frozen=True)
class TrialStats:
    n: int
    mean: float
    variance: float
    stderr: float
    ci95_half_width: float

    @classmethod
    def from_values(cls, values: np.ndarray) -> TrialStats:
        n = len(values)
        if n == 0:
            raise ValueError("no trials")
        # fsum is exactly rounded, hence independent of summation order
        mean = math.fsum(values) / n
        var = math.fsum((values - mean) ** 2) / (n - 1) if n > 1 else 0.0
        stderr = math.sqrt(var / n)
        return cls(n, min(max(mean, 0.0), 1.0), var, stderr, 1.96 * stderr)


def trial_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one trial of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def sample_mask(M: int, B: float, stream: np.random.Generator) -> np.ndarray:
    """Boolean mask of M cycles, each obstructed independently with probability B."""
    return stream.random(M) < B


# ---------------------------------------------------------------------------
# per-trial success


def _improved_success(masks: np.ndarray, params: ImprovedParams, c: float) -> np.ndarray:
    # vectorised over trials; same arithmetic as protocols.improved_run
    n = masks.shape[0]
    cs, sn = math.cos(params.theta), math.sin(params.theta)
    a = np.ones(n)
    b = np.zeros(n)
    for m in range(params.M):
        a, b = a * cs - b * sn, a * sn + b * cs
        b = np.where(masks[:, m], c * b, b)
    return b * b


def _slaz_cycle_success(masks: np.ndarray, params: SlazParams) -> np.ndarray:
    n = masks.shape[0]
    cs, sn = math.cos(params.theta_M), math.sin(params.theta_M)
    block_damp = math.cos(params.theta_N) ** params.N
    pass_keep = math.cos(params.N * params.theta_N)
    a = np.ones(n)
    b = np.zeros(n)
    for m in range(params.M):
        a, b = a * cs - b * sn, a * sn + b * cs
        b = np.where(masks[:, m], b * block_damp, b * pass_keep)
    return a * a


@numba.njit(cache=True)
def _slaz_segment_success(rng, M, N, B, cos_n, cos_m, sin_m):  # pragma: no cover - jitted
    # Within one outer cycle the inner arm starts at (b, 0) and rotates freely
    # between obstructions; an obstruction after a free run of k steps zeroes
    # the channel and leaves b*cos(k*theta_N) in the inner arm.  So only the
    # gaps between obstructed steps matter, and they are geometric(B).
    # Gaps are drawn by inverse CDF; for B > 1/2 runs of unit gaps are drawn
    # in one go, keeping the cost per cycle O(N*min(B, B*(1-B))).
    lq = math.log1p(-B) if B < 1.0 else -1.0
    lp = math.log(B) if B > 0.0 else -1.0
    a = 1.0
    b = 0.0
    for m in range(M):
        a, b = a * cos_m - b * sin_m, a * sin_m + b * cos_m
        prod = 1.0
        last = 0
        if B >= 1.0:
            prod = cos_n[1] ** N
            last = N
        elif B > 0.0:
            if B <= 0.5:
                while True:
                    gap = 1 + int(math.log(1.0 - rng.random()) / lq)
                    if last + gap > N:
                        break
                    last += gap
                    prod *= cos_n[gap]
            else:
                while True:
                    ones = int(math.log(1.0 - rng.random()) / lp)
                    if last + ones >= N:
                        prod *= cos_n[1] ** (N - last)
                        last = N
                        break
                    prod *= cos_n[1] ** ones
                    last += ones
                    gap = 2 + int(math.log(1.0 - rng.random()) / lq)
                    if last + gap > N:
                        break
                    last += gap
                    prod *= cos_n[gap]
        b *= prod * cos_n[N - last]
    return a * a


def inner_survival(blocked_steps: Sequence[int], N: int) -> float:
    """Inner-arm amplitude factor of one outer cycle given its obstructed inner steps (1-based)."""
    theta_n = math.pi / (2 * N)
    prod = 1.0
    last = 0
    for k in sorted(blocked_steps):
        prod *= math.cos((k - last) * theta_n)
        last = k
    return prod * math.cos((N - last) * theta_n)


def trial_successes(config: McConfig, spec: NoiseSpec, seed: int, start: int, stop: int) -> np.ndarray:
    """Success mass for trials ``start .. stop-1``; each depends only on its own index."""
    idx = range(start, stop)
    M = config.M
    if config.protocol is Protocol.IMPROVED:
        masks = np.array([sample_mask(M, spec.B, trial_stream(seed, i)) for i in idx], dtype=bool)
        return _improved_success(masks.reshape(len(idx), M), config.params, spec.c)
    params: SlazParams = config.params  # type: ignore[assignment]
    if spec.granularity == "cycle":
        masks = np.array([sample_mask(M, spec.B, trial_stream(seed, i)) for i in idx], dtype=bool)
        return _slaz_cycle_success(masks.reshape(len(idx), M), params)
    N = params.N
    cos_n = np.cos(np.arange(N + 2) * params.theta_N)
    cm, sm = math.cos(params.theta_M), math.sin(params.theta_M)
    B = float(spec.B)
    return np.array(
        [_slaz_segment_success(trial_stream(seed, i), M, N, B, cos_n, cm, sm) for i in idx]
    )


def _chunk_job(job: tuple) -> np.ndarray:
    return trial_successes(*job)


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    size = -(-trials // workers)
    return [(s, min(s + size, trials)) for s in range(0, trials, size)]


def run_mc(
    config: McConfig,
    spec: NoiseSpec,
    trials: int,
    seed: int,
    workers: int = 1,
    executor: Executor | None = None,
) -> TrialStats:
    """Aggregate ``trials`` independent trials with Bob passing.

    With ``workers > 1`` the trials are split into contiguous chunks and run
    on ``executor`` (a process pool is created if none is given).  Per-trial
    values are reassembled in index order before aggregation.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials!r}")
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers!r}")
    if workers == 1:
        values = trial_successes(config, spec, seed, 0, trials)
    else:
        jobs = [(config, spec, seed, s, e) for s, e in _chunks(trials, workers)]
        if executor is None:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                values = np.concatenate(list(pool.map(_chunk_job, jobs)))
        else:
            values = np.concatenate(list(executor.map(_chunk_job, jobs)))
    return TrialStats.from_values(values)


# ---------------------------------------------------------------------------
# exact oracle


def _rot(n: int, i: int, j: int, theta: float) -> np.ndarray:
    R = np.eye(n)
    c, s = math.cos(theta), math.sin(theta)
    R[i, i], R[i, j], R[j, i], R[j, j] = c, -s, s, c
    return R


def _mix(S: np.ndarray, B: float, A_pass: np.ndarray, A_block: np.ndarray) -> np.ndarray:
    return (1.0 - B) * (A_pass @ S @ A_pass.T) + B * (A_block @ S @ A_block.T)


def _slaz_segment_superop(params: SlazParams, B: float) -> np.ndarray:
    """Second-moment map of one outer cycle's N inner steps, acting on vec(S)."""
    Q = _rot(3, 1, 2, params.theta_N)
    P = np.diag([1.0, 1.0, 0.0])
    PQ = P @ Q
    step = (1.0 - B) * np.kron(Q, Q) + B * np.kron(PQ, PQ)
    inner = np.linalg.matrix_power(step, params.N)
    # the channel arm is emptied into D3 once the inner loop ends
    return np.kron(P, P) @ inner


def exact_expected_success(config: McConfig, spec: NoiseSpec) -> float:
    """Expected success mass over Bernoulli(B) obstructions, exactly, in O(M)."""
    B = spec.B
    if config.protocol is Protocol.IMPROVED:
        params: ImprovedParams = config.params  # type: ignore[assignment]
        R = _rot(2, 0, 1, params.theta)
        A_block = np.diag([1.0, spec.c]) @ R
        S = np.diag([1.0, 0.0])
        for _ in range(params.M):
            S = _mix(S, B, R, A_block)
        return float(S[1, 1])

    params: SlazParams = config.params  # type: ignore[no-redef]
    R = _rot(3, 0, 1, params.theta_M)
    S = np.diag([1.0, 0.0, 0.0])
    if spec.granularity == "cycle":
        A_pass = np.diag([1.0, math.cos(params.N * params.theta_N), 0.0]) @ R
        A_block = np.diag([1.0, math.cos(params.theta_N) ** params.N, 0.0]) @ R
        for _ in range(params.M):
            S = _mix(S, B, A_pass, A_block)
        return float(S[0, 0])
    T = _slaz_segment_superop(params, B)
    for _ in range(params.M):
        S = (T @ (R @ S @ R.T).reshape(-1)).reshape(3, 3)
    return float(S[0, 0])


def compare_protocols(
    B_grid: Sequence[float],
    configs: Sequence[McConfig],
    trials: int,
    seed: int,
    c: float = 0.0,
    granularity: str = "segment",
    workers: int = 1,
) -> dict[str, list[TrialStats]]:
    """Monte Carlo statistics for every config at every obstruction rate."""
    if not B_grid:
        raise DomainError("empty B grid")
    with pool_for(workers) as pool:
        return {
            cfg.label: [
                run_mc(cfg, NoiseSpec(B, c, granularity), trials, seed, workers, pool) for B in B_grid
            ]
            for cfg in configs
        }


@contextmanager
def pool_for(workers: int):
    """A process pool for ``workers > 1``, else ``None``."""
    if workers <= 1:
        yield None
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield pool

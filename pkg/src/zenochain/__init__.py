"""Simulation and analytics for chained-Zeno counterfactual communication."""

from .chain_module import (
    ChainModule,
    DelayGeometry,
    absorb_prob,
    effective_return_rate,
    od_lengths,
    reflect_back_prob,
    total_transmission,
    uniform_for_target,
)
from .montecarlo import (
    McConfig,
    NoiseSpec,
    TrialStats,
    compare_protocols,
    exact_expected_success,
    run_mc,
    sample_mask,
)
from .protocols import (
    BobBit,
    ConfigError,
    CounterfactualityVec,
    DetectorDist,
    ImprovedParams,
    Protocol,
    SlazParams,
    counterfactuality_improved,
    counterfactuality_slaz,
    equivalent_distance,
    improved_c0,
    improved_c1,
    improved_run,
    improved_single_block_d2,
    mask_from_cycles,
    slaz_p1,
    slaz_p2,
    slaz_run,
    theta_of,
)
from .quantum_core import (
    DomainError,
    InvalidStateError,
    ThreeModeState,
    TwoModeState,
    attenuate_channel,
    detect,
    rotate,
)

__version__ = "0.1.0"

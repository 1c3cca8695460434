"""Entanglement distribution rate models for adjacent quantum repeater nodes.

Closed-form rates, a reproducible Monte Carlo simulator and a swapping
degradation model for five arrangements: MM, SR, MS, AFC-MM and AFC-MS.
"""

from .analytic import (
    AnalyticRates,
    FeasibilityReport,
    NotApplicableError,
    SchemeConfig,
    SchemeKind,
    analytic_rate,
    capacity,
    closed_form_ratio,
    exact_rate,
    feasibility_check,
    is_rephasing_capped,
    latch_probability,
    rate_ratio,
    rephasing_cap_trials,
    round_time,
    scheme_summary,
    single_trial_success,
    trials_per_round,
)
from .harness import (
    ConfigError,
    ResultRow,
    Scenario,
    build_scenario,
    emit,
    preset_names,
    run_scenario,
    rows_to_csv,
    rows_to_json,
)
from .montecarlo import (
    FeasibilityError,
    LatchCounts,
    McControls,
    RateEstimate,
    SweepRow,
    estimate_rate,
    rng_for_seed,
    simulate_latches,
    simulate_round,
    simulate_rounds,
    subseed,
    sweep,
)
from .params import (
    AFC_OPTIMISTIC,
    AFC_PRESETS,
    AFC_REALISTIC,
    AfcSpec,
    DIAMOND_NV,
    DerivedProbs,
    LinkParams,
    MEMORY_PRESETS,
    MemorySpec,
    ParameterError,
    QUANTUM_DOT,
    TRAPPED_ION,
    default_link,
    derive_probs,
    fiber_transmission,
    t_link,
)
from .swapping import SwapBudget, SwapParams, ceil_trials, chain_factor, swap_budget

__version__ = "0.1.0"

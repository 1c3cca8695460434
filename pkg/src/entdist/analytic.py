"""Closed-form single-trial probabilities, round times, trial budgets and rates.

Five arrangements are covered:

* MM: Bell-state analyzer at the fiber midpoint, both nodes emit
  memory-entangled photons toward it.
* SR: Bell-state analyzer inside the receiving node.
* MS: entangled-photon source at the midpoint, a Bell-state analyzer inside
  each node.
* AFC-MM / AFC-MS: the same two midpoint layouts with absorptive multimode
  memories; AFC-MS heralds arrivals with a non-destructive photon detector
  instead of a Bell-state analyzer.

All functions are pure over immutable configs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .params import (
    AfcSpec,
    DerivedProbs,
    LinkParams,
    MemorySpec,
    ParameterError,
    derive_probs,
    fiber_transmission,
    t_link,
)

__all__ = [
    "SchemeKind",
    "SchemeConfig",
    "AnalyticRates",
    "FeasibilityReport",
    "NotApplicableError",
    "single_trial_success",
    "latch_probability",
    "trials_per_round",
    "rephasing_cap_trials",
    "is_rephasing_capped",
    "capacity",
    "round_time",
    "analytic_rate",
    "exact_rate",
    "scheme_summary",
    "rate_ratio",
    "closed_form_ratio",
    "feasibility_check",
]


class NotApplicableError(ValueError):
    """An operation was asked of a scheme it is not defined for."""


class SchemeKind(str, Enum):
    MM = "mm"
    SR = "sr"
    MS = "ms"
    AFC_MM = "afc-mm"
    AFC_MS = "afc-ms"

    @property
    def is_afc(self) -> bool:
        return self in (SchemeKind.AFC_MM, SchemeKind.AFC_MS)

    @property
    def is_midpoint_source(self) -> bool:
        return self in (SchemeKind.MS, SchemeKind.AFC_MS)

    @property
    def display(self) -> str:
        return self.value.upper()


@dataclass(frozen=True, slots=True)
class SchemeConfig:
    """One fully specified arrangement: scheme, link, memory and source.

    N_A / N_B split the 2N memories between sender and receiver and are only
    meaningful (and required) for SR.

    ms_sync_factor selects the classical-synchronization convention for the
    midpoint-source rate denominators: 2 reproduces the published closed
    forms, 1 the naive trials-times-probability-per-round derivation. The two
    differ by exactly that factor; see analytic_rate.
    """

    kind: SchemeKind
    link: LinkParams
    memory: MemorySpec | AfcSpec
    p_m: float = 1.0
    N_A: int | None = None
    N_B: int | None = None
    ms_sync_factor: int = 2

    def __post_init__(self) -> None:
        if self.kind.is_afc:
            if not isinstance(self.memory, AfcSpec):
                raise ParameterError(f"memory must be an AfcSpec for {self.kind.display}")
        else:
            if not isinstance(self.memory, MemorySpec):
                raise ParameterError(f"memory must be a MemorySpec for {self.kind.display}")
        if not 0.0 <= self.p_m <= 1.0:
            raise ParameterError(f"p_m must be in [0, 1], got {self.p_m!r}")
        if self.ms_sync_factor not in (1, 2):
            raise ParameterError(f"ms_sync_factor must be 1 or 2, got {self.ms_sync_factor!r}")
        if self.kind is SchemeKind.SR:
            if self.N_A is None or self.N_B is None:
                raise ParameterError("N_A and N_B are required for SR")
            if self.N_A < 1 or self.N_B < 1:
                raise ParameterError(f"N_A and N_B must be >= 1, got {self.N_A!r}, {self.N_B!r}")
            if self.N_A + self.N_B != 2 * self.memory.N:
                raise ParameterError(
                    f"N_A + N_B must equal 2N = {2 * self.memory.N}, "
                    f"got {self.N_A + self.N_B}"
                )
        elif self.N_A is not None or self.N_B is not None:
            raise ParameterError("N_A / N_B are only meaningful for SR")

    def derived(self) -> DerivedProbs:
        return derive_probs(self.link, self.memory, self.p_m)


@dataclass(frozen=True, slots=True)
class AnalyticRates:
    """Bundle of the per-scheme analytic quantities for one config."""

    p_single: float   # success probability of one trial
    t_round: float    # full synchronization window, s
    K: int            # trials per round
    rate: float       # closed-form distribution rate, 1/s


@dataclass(frozen=True, slots=True)
class FeasibilityReport:
    """Round-time budget of an AFC config against its spin coherence time."""

    ok: bool
    used_s: float    # t_rephase + t_link
    limit_s: float   # t_spin_coherence


def capacity(cfg: SchemeConfig) -> int:
    """Entangled pairs one round can latch at most (memory or mode count)."""
    if cfg.kind.is_afc:
        return cfg.memory.N_AFC
    if cfg.kind is SchemeKind.SR:
        return cfg.N_A
    return cfg.memory.N


def single_trial_success(cfg: SchemeConfig) -> float:
    """Probability that a single trial shares one entangled pair."""
    d = cfg.derived()
    if cfg.kind in (SchemeKind.MM, SchemeKind.SR):
        return d.p_BSA * d.p_optical**2
    if cfg.kind is SchemeKind.MS:
        return cfg.p_m * (d.p_BSA * d.p_optical) ** 2
    if cfg.kind is SchemeKind.AFC_MM:
        return d.p_BSA * (cfg.p_m * d.p_optical_prime) ** 2
    # AFC-MS: both halves must pass the non-destructive detectors and latch.
    return cfg.p_m * (cfg.memory.p_pass * d.p_optical_prime) ** 2


def latch_probability(cfg: SchemeConfig) -> float:
    """Per-trial probability that one side latches a qubit.

    Defined for the waiting schemes (MS, AFC-MM, AFC-MS) whose trial budgets
    are sized from it; MM and SR fire each memory exactly once per round.
    """
    d = cfg.derived()
    if cfg.kind is SchemeKind.MS:
        return cfg.p_m * d.p_BSA * d.p_optical
    if cfg.kind is SchemeKind.AFC_MM:
        # Source sits next to the memory, so only emission and absorption count.
        return cfg.p_m * cfg.memory.p_AFC
    if cfg.kind is SchemeKind.AFC_MS:
        return cfg.p_m * cfg.memory.p_pass * d.p_optical_prime
    raise NotApplicableError(f"{cfg.kind.display} has no per-trial latch probability")


def rephasing_cap_trials(mem: AfcSpec) -> int:
    """Largest trial budget before the first stored photon rephases out."""
    return math.ceil(mem.t_rephase / mem.t_clock_prime)


def _uncapped_afc_trials(cfg: SchemeConfig) -> int | None:
    """ceil(N_AFC / latch probability), or None when the latch never fires."""
    p_latch = latch_probability(cfg)
    if p_latch == 0.0:
        return None
    return math.ceil(cfg.memory.N_AFC / p_latch)


def is_rephasing_capped(cfg: SchemeConfig) -> bool:
    """True when the AFC trial budget is limited by the rephasing period."""
    if not cfg.kind.is_afc:
        return False
    k = _uncapped_afc_trials(cfg)
    if k is None:
        return True
    return k * cfg.memory.t_clock_prime > cfg.memory.t_rephase


def trials_per_round(cfg: SchemeConfig) -> int:
    """Number of trials performed during one synchronization round.

    MM and SR fire each available memory once. MS sizes the budget so the
    expected latch count fills the memories. AFC budgets fill the temporal
    modes but are capped once the budget would outlast the rephasing period.

    Raises ParameterError for an MS config whose latch probability is zero
    (the budget would be unbounded; no rephasing cap exists there).
    """
    if cfg.kind is SchemeKind.MM:
        return cfg.memory.N
    if cfg.kind is SchemeKind.SR:
        return cfg.N_A
    if cfg.kind is SchemeKind.MS:
        p_latch = latch_probability(cfg)
        if p_latch == 0.0:
            raise ParameterError("unbounded trial budget: MS latch probability is zero")
        return math.ceil(cfg.memory.N / p_latch)
    cap = rephasing_cap_trials(cfg.memory)
    k = _uncapped_afc_trials(cfg)
    if k is None or k * cfg.memory.t_clock_prime > cfg.memory.t_rephase:
        return cap
    return k


def round_time(cfg: SchemeConfig) -> float:
    """Total synchronization time of one round in seconds."""
    tl = t_link(cfg.link)
    if cfg.kind is SchemeKind.MM:
        return tl + cfg.memory.N * cfg.memory.t_clock
    if cfg.kind is SchemeKind.SR:
        # Photons cross the whole link and the reply returns the same way.
        return 2.0 * tl + cfg.N_A * cfg.memory.t_clock
    k = trials_per_round(cfg)
    clock = cfg.memory.t_clock_prime if cfg.kind.is_afc else cfg.memory.t_clock
    return tl + k * clock


def analytic_rate(cfg: SchemeConfig) -> float:
    """Closed-form entanglement distribution rate in pairs per second.

    The closed forms assume the trial window is short against the photon
    flight time (K t_clock << t_link). For SR the value is the standard upper
    bound used as the scheme's rate. When the rephasing cap limits an AFC
    budget the closed form no longer applies and the exact
    K * p_single / t_round is returned instead.
    """
    d = cfg.derived()
    tl = t_link(cfg.link)
    if cfg.kind is SchemeKind.MM:
        return cfg.memory.N * d.p_BSA * d.p_optical**2 / tl
    if cfg.kind is SchemeKind.SR:
        return cfg.N_A * d.p_BSA * d.p_optical**2 / (2.0 * tl)
    if cfg.kind is SchemeKind.MS:
        return cfg.memory.N * d.p_BSA * d.p_optical / (cfg.ms_sync_factor * tl)
    if is_rephasing_capped(cfg):
        return exact_rate(cfg)
    mem = cfg.memory
    if cfg.kind is SchemeKind.AFC_MM:
        return (mem.N_AFC * d.p_BSA * cfg.p_m * mem.p_AFC
                * math.exp(-cfg.link.L / cfg.link.L_att) / tl)
    return (mem.N_AFC * mem.p_pass * mem.p_AFC
            * fiber_transmission(cfg.link.L, cfg.link.L_att)
            / (cfg.ms_sync_factor * tl))


def exact_rate(cfg: SchemeConfig) -> float:
    """Expected successes per round over the round time, with no approximation.

    K * p_single / t_round is what a per-round tally converges to (before the
    capacity cap, which is negligible whenever K * p_single is well below the
    memory count). Useful to quantify the closed forms' K t_clock << t_link
    approximation point by point.
    """
    return trials_per_round(cfg) * single_trial_success(cfg) / round_time(cfg)


def scheme_summary(cfg: SchemeConfig) -> AnalyticRates:
    return AnalyticRates(
        p_single=single_trial_success(cfg),
        t_round=round_time(cfg),
        K=trials_per_round(cfg),
        rate=analytic_rate(cfg),
    )


def rate_ratio(a: SchemeConfig, b: SchemeConfig) -> float:
    """analytic_rate(a) / analytic_rate(b) for two configs on the same link."""
    if a.link != b.link:
        raise ParameterError("rate_ratio requires both configs to share the same link")
    denominator = analytic_rate(b)
    if denominator == 0.0:
        raise ZeroDivisionError("rate_ratio: denominator scheme has zero rate")
    return analytic_rate(a) / denominator


def closed_form_ratio(a: SchemeConfig, b: SchemeConfig) -> float:
    """Specialized closed-form rate ratio for the documented scheme pairs.

    Supported (numerator, denominator) pairs: (MS, MM), (AFC-MS, AFC-MM),
    (AFC-MM, MS), (AFC-MS, MS). In the uncapped regime each expression equals
    rate_ratio of the same configs to floating-point accuracy, provided the
    shared quantities (link, and memory or p_m where they cancel) match.
    """
    if a.link != b.link:
        raise ParameterError("closed_form_ratio requires both configs to share the same link")
    trans = fiber_transmission(a.link.L, a.link.L_att)
    pair = (a.kind, b.kind)
    if pair == (SchemeKind.MS, SchemeKind.MM):
        if a.memory != b.memory:
            raise ParameterError("MS/MM ratio assumes both schemes use the same memory")
        p_memory = a.derived().p_memory
        return 1.0 / (2.0 * p_memory * trans)
    if pair == (SchemeKind.AFC_MS, SchemeKind.AFC_MM):
        if a.memory != b.memory:
            raise ParameterError("AFC-MS/AFC-MM ratio assumes both schemes use the same memory")
        p_bsa = a.derived().p_BSA
        return a.memory.p_pass / (2.0 * p_bsa * b.p_m * trans)
    if pair == (SchemeKind.AFC_MM, SchemeKind.MS):
        afc, spin = a.memory, b.memory
        p_memory = b.derived().p_memory
        return (2.0 * afc.N_AFC * a.p_m * afc.p_AFC * trans) / (spin.N * p_memory)
    if pair == (SchemeKind.AFC_MS, SchemeKind.MS):
        afc, spin = a.memory, b.memory
        db = b.derived()
        return (afc.N_AFC * afc.p_AFC * afc.p_pass) / (spin.N * db.p_BSA * db.p_memory)
    raise NotApplicableError(
        f"no specialized ratio for ({a.kind.display}, {b.kind.display})"
    )


def feasibility_check(cfg: SchemeConfig) -> FeasibilityReport:
    """Check that one AFC round fits inside the spin coherence time.

    The budget is t_rephase + t_link (storage until the classical confirmation
    arrives) against t_spin_coherence. Raises NotApplicableError for non-AFC
    configs.
    """
    if not cfg.kind.is_afc:
        raise NotApplicableError(f"feasibility_check does not apply to {cfg.kind.display}")
    used = cfg.memory.t_rephase + t_link(cfg.link)
    limit = cfg.memory.t_spin_coherence
    return FeasibilityReport(ok=used <= limit, used_s=used, limit_s=limit)

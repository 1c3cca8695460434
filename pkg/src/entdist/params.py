"""Physical parameters and the derived probability chain shared by all schemes.

Canonical units: kilometres for distances, seconds for times, probabilities
as plain floats in [0, 1]. No other units appear at API boundaries.

All types are frozen dataclasses and all operations are pure functions, so
everything here is safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ParameterError",
    "LinkParams",
    "MemorySpec",
    "AfcSpec",
    "DerivedProbs",
    "derive_probs",
    "t_link",
    "fiber_transmission",
    "default_link",
    "TRAPPED_ION",
    "DIAMOND_NV",
    "QUANTUM_DOT",
    "AFC_REALISTIC",
    "AFC_OPTIMISTIC",
    "MEMORY_PRESETS",
    "AFC_PRESETS",
    "DEFAULT_L_ATT_KM",
    "DEFAULT_C_KM_PER_S",
    "DEFAULT_FIBER_INDEX",
    "DEFAULT_DETECTOR_EFFICIENCY",
]

# Fiber and detector defaults shared by every preset.
DEFAULT_L_ATT_KM = 22.0        # standard fiber attenuation length, km
DEFAULT_C_KM_PER_S = 2.998e5   # vacuum light speed, km/s
DEFAULT_FIBER_INDEX = 1.5      # refractive index of the fiber core
DEFAULT_DETECTOR_EFFICIENCY = 0.8


class ParameterError(ValueError):
    """A physical parameter violated its invariant; the message names the field."""


def _require(condition: bool, field: str, message: str) -> None:
    if not condition:
        raise ParameterError(f"{field} {message}")


def _require_probability(field: str, value: float) -> None:
    _require(0.0 <= value <= 1.0, field, f"must be in [0, 1], got {value!r}")


def _require_positive(field: str, value: float) -> None:
    _require(value > 0.0, field, f"must be > 0, got {value!r}")


@dataclass(frozen=True, slots=True)
class LinkParams:
    """Fiber link between two adjacent repeater nodes.

    L may be zero (co-located nodes) for degenerate boundary cases; all other
    parameters must be strictly physical.
    """

    L: float                                    # node separation, km
    L_att: float = DEFAULT_L_ATT_KM             # attenuation length, km
    n: float = DEFAULT_FIBER_INDEX              # refractive index
    c: float = DEFAULT_C_KM_PER_S               # vacuum light speed, km/s
    p_d: float = DEFAULT_DETECTOR_EFFICIENCY    # single-photon detector efficiency

    def __post_init__(self) -> None:
        _require(self.L >= 0.0, "L", f"must be >= 0 km, got {self.L!r}")
        _require_positive("L_att", self.L_att)
        _require(self.n >= 1.0, "n", f"must be >= 1, got {self.n!r}")
        _require_positive("c", self.c)
        _require_probability("p_d", self.p_d)


@dataclass(frozen=True, slots=True)
class MemorySpec:
    """Spin-photon entanglement type quantum memory (one node holds N of them)."""

    label: str                   # memory kind, e.g. "trapped-ion" | "nv" | "quantum-dot"
    t_clock: float               # cycle time of one emission trial, s
    emission_fraction: float     # probability a cycle emits the photon
    collection_efficiency: float  # probability the photon couples into the fiber
    N: int = 1                   # memories per node

    def __post_init__(self) -> None:
        _require(bool(self.label), "label", "must be a non-empty string")
        _require_positive("t_clock", self.t_clock)
        _require_probability("emission_fraction", self.emission_fraction)
        _require_probability("collection_efficiency", self.collection_efficiency)
        _require(self.N >= 1, "N", f"must be >= 1, got {self.N!r}")


@dataclass(frozen=True, slots=True)
class AfcSpec:
    """Atomic-frequency-comb memory: one crystal, N_AFC temporal modes.

    A stored photon is re-emitted after t_rephase unless transferred to the
    spin level, where it survives up to t_spin_coherence.
    """

    N_AFC: int                   # temporal mode count
    t_rephase: float             # rephasing period, s
    t_spin_coherence: float      # coherence time at the spin level, s
    p_AFC: float                 # absorption efficiency
    p_pass: float                # non-destructive detector transmission
    t_clock_prime: float         # time used for one trial, s

    def __post_init__(self) -> None:
        _require(self.N_AFC >= 1, "N_AFC", f"must be >= 1, got {self.N_AFC!r}")
        _require_positive("t_rephase", self.t_rephase)
        _require(
            self.t_spin_coherence >= self.t_rephase,
            "t_spin_coherence",
            f"must be >= t_rephase ({self.t_rephase!r}), got {self.t_spin_coherence!r}",
        )
        _require_probability("p_AFC", self.p_AFC)
        _require_probability("p_pass", self.p_pass)
        _require_positive("t_clock_prime", self.t_clock_prime)


@dataclass(frozen=True, slots=True)
class DerivedProbs:
    """Probability chain derived from a link plus a memory description.

    p_optical and p_optical_prime carry the same value (base probability times
    fiber transmission over half the link); the two names exist so call sites
    can state which memory family convention they mean. For spin-photon
    memories the base is p_memory = emission_fraction * collection_efficiency,
    for AFC memories it is the absorption efficiency p_AFC.
    """

    p_BSA: float             # linear-optics Bell measurement success, p_d^2 / 2
    p_memory: float          # photon emitted (or absorbed) and coupled
    p_optical: float         # end-to-end photon success, spin-photon convention
    p_optical_prime: float   # end-to-end photon success, AFC convention
    p_m: float               # entangled-pair generation probability per clock


def fiber_transmission(L: float, L_att: float) -> float:
    """Survival probability of a photon crossing half the link: exp(-L / 2 L_att)."""
    return math.exp(-L / (2.0 * L_att))


def t_link(link: LinkParams) -> float:
    """One-way fiber traversal time n L / c in seconds."""
    return link.n * link.L / link.c


def derive_probs(link: LinkParams, mem: MemorySpec | AfcSpec, p_m: float = 1.0) -> DerivedProbs:
    """Derive the full probability chain for one link/memory combination.

    Pure and deterministic. Raises ParameterError naming the offending field
    when any input violates its invariant.
    """
    _require_probability("p_m", p_m)
    trans = fiber_transmission(link.L, link.L_att)
    p_bsa = link.p_d**2 / 2.0
    if isinstance(mem, AfcSpec):
        base = mem.p_AFC
    else:
        base = mem.emission_fraction * mem.collection_efficiency
    end_to_end = base * trans
    return DerivedProbs(
        p_BSA=p_bsa,
        p_memory=base,
        p_optical=end_to_end,
        p_optical_prime=end_to_end,
        p_m=p_m,
    )


def default_link(L_km: float) -> LinkParams:
    """Link at distance L_km with the standard fiber and detector constants."""
    return LinkParams(L=L_km)


# Memory performance presets (cycle time, emission fraction, collection
# efficiency). N defaults to 3 memories per node for all three kinds.
TRAPPED_ION = MemorySpec("trapped-ion", t_clock=1e-6, emission_fraction=1.00,
                         collection_efficiency=0.05, N=3)
DIAMOND_NV = MemorySpec("nv", t_clock=100e-9, emission_fraction=0.50,
                        collection_efficiency=0.50, N=3)
QUANTUM_DOT = MemorySpec("quantum-dot", t_clock=10e-9, emission_fraction=0.90,
                         collection_efficiency=0.50, N=3)

MEMORY_PRESETS: dict[str, MemorySpec] = {
    "trapped-ion": TRAPPED_ION,
    "nv": DIAMOND_NV,
    "quantum-dot": QUANTUM_DOT,
}

# AFC presets: "realistic" uses demonstrated Eu:YSO-class numbers, "optimistic"
# a high-mode-count crystal with unit absorption. Both share the 51 us
# rephasing period, 1 ms spin coherence and a 10 ns trial clock.
AFC_REALISTIC = AfcSpec(N_AFC=100, t_rephase=51e-6, t_spin_coherence=1e-3,
                        p_AFC=0.53, p_pass=0.9, t_clock_prime=10e-9)
AFC_OPTIMISTIC = AfcSpec(N_AFC=1060, t_rephase=51e-6, t_spin_coherence=1e-3,
                         p_AFC=1.0, p_pass=0.9, t_clock_prime=10e-9)

AFC_PRESETS: dict[str, AfcSpec] = {
    "realistic": AFC_REALISTIC,
    "optimistic": AFC_OPTIMISTIC,
}

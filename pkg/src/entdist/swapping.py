"""Entanglement-swapping throughput under perfect or imperfect heralding.

With weak heralding an announced pair may in fact be missing (the photon was
detected in flight but never absorbed), so a fraction of swap trials burn a
Bell measurement on nothing. The module gives the trial budget, per-trial
success probability and expected success count for both regimes, plus the
multiplicative rate penalty over a chain of elementary links.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .params import ParameterError

__all__ = [
    "SwapParams",
    "SwapBudget",
    "swap_budget",
    "chain_factor",
    "ceil_trials",
]

Heralding = Literal["perfect", "imperfect"]


def _check_probability(field: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{field} must be in [0, 1], got {value!r}")


@dataclass(frozen=True, slots=True)
class SwapParams:
    """Inputs of the swapping analysis.

    p_emit defaults to p_AFC when omitted: absorb-then-reemit efficiency is
    pessimistically folded into the absorption figure.
    """

    J: int                      # entangled pairs shared per elementary link
    p_emit: float | None = None  # re-emission probability from the memory
    p_BSA: float = 0.32         # Bell measurement success probability
    p_pass: float = 0.9         # non-destructive detector transmission
    p_AFC: float = 0.53         # memory absorption efficiency
    i: int = 1                  # number of elementary links in the chain

    def __post_init__(self) -> None:
        if self.J < 1:
            raise ParameterError(f"J must be >= 1, got {self.J!r}")
        if self.i < 1:
            raise ParameterError(f"i must be >= 1, got {self.i!r}")
        for field in ("p_BSA", "p_pass", "p_AFC"):
            _check_probability(field, getattr(self, field))
        if self.p_emit is not None:
            _check_probability("p_emit", self.p_emit)

    @property
    def emit(self) -> float:
        return self.p_AFC if self.p_emit is None else self.p_emit


@dataclass(frozen=True, slots=True)
class SwapBudget:
    K_swap: float               # trial count, real-valued by convention
    p_swap: float               # success probability of one swap trial
    expected_successes: float   # J-pair expectation after K_swap trials


def swap_budget(p: SwapParams, heralding: Heralding = "perfect") -> SwapBudget:
    """Swap trial budget and expectations for one pair of adjacent links.

    Perfect heralding consumes exactly one announced pair per trial; imperfect
    heralding inflates the trial count by 1 / (p_pass * p_AFC) and squares the
    same factor into the per-trial success. K_swap stays real-valued; use
    ceil_trials when an integer schedule is needed.
    """
    base = p.emit**2 * p.p_BSA
    if heralding == "perfect":
        return SwapBudget(K_swap=float(p.J), p_swap=base,
                          expected_successes=p.J * base)
    if heralding != "imperfect":
        raise ParameterError(f"heralding must be 'perfect' or 'imperfect', got {heralding!r}")
    confirm = p.p_pass * p.p_AFC
    if confirm == 0.0:
        raise ParameterError("imperfect heralding requires p_pass * p_AFC > 0")
    return SwapBudget(
        K_swap=p.J / confirm,
        p_swap=confirm**2 * base,
        expected_successes=p.J * confirm * base,
    )


def chain_factor(p: SwapParams) -> float:
    """Rate penalty of imperfect heralding after swapping over i links."""
    return (p.p_pass * p.p_AFC) ** (p.i - 1)


def ceil_trials(budget: SwapBudget) -> int:
    """Integer trial count for a real-valued budget."""
    return math.ceil(budget.K_swap)

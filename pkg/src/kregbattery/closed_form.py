"""Analytic reference results for local batteries under K-regular chargers.

These formulas are the independent side of the simulation checks: none of
them touches a state vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import FormulaNotApplicable, ValidationError
from .models import AXES, k_max, validate_nk

PERIOD = {"X": math.pi / 2, "Y": math.pi, "Z": math.pi}
MAX_WORK_PER_SITE = {"X": 1.0, "Y": 2.0, "Z": 2.0}


@dataclass(frozen=True)
class ClosedFormSpec:
    axis: str
    n: int
    k: int

    @property
    def r_offset(self) -> int:
        return r_offset(self.axis, self.k)

    @property
    def exponent(self) -> int:
        return self.k + self.r_offset


def r_offset(axis: str, k: int) -> int:
    """Offset in the cosine power: 0 for X, 1 for Y, 1 - K for Z."""
    return {"X": 0, "Y": 1, "Z": 1 - k}[_axis(axis)]


def _axis(axis: str) -> str:
    a = str(axis).upper()
    if a not in AXES:
        raise ValidationError(f"axis must be one of X, Y, Z; got {axis!r}")
    return a


def work_law(axis: str, k: int, t):
    """Per-site stored work ``1 - cos(2t)**(K + r)``, with no (N, K) range check."""
    n = k + r_offset(axis, k)
    return 1.0 - np.cos(2 * np.asarray(t, dtype=float)) ** n


def closed_form_work(axis: str, n: int, k: int, t):
    """``N (1 - cos(2t)**(K + r))`` where the law holds.

    X and Y need ``2 <= K < K_max``; at ``K = K_max`` the boundary terms survive
    in the ground-state expectation and the law breaks down.
    """
    axis = _axis(axis)
    validate_nk(n, k)
    if axis in ("X", "Y") and not 2 <= k < k_max(n):
        raise FormulaNotApplicable(f"no closed form for axis {axis} with K={k}, N={n}")
    return n * work_law(axis, k, t)


def closed_form_average_work(axis: str, k: int) -> float:
    """Per-site period-averaged work, Gamma-function expression as published.

    For X this evaluates ``1 - Gamma(K + 1/2) / (sqrt(pi) Gamma(K + 1))``,
    computed in log space so large K stays finite.  Note that it is the
    average of ``1 - cos(2t)**(2K)``, not of the X work law; see
    :func:`integrated_average_work` for the latter.
    """
    axis = _axis(axis)
    if axis != "X":
        return 1.0
    if k < 2 or k % 2:
        raise ValidationError("K must be an even integer >= 2")
    return 1.0 - math.exp(gammaln(k + 0.5) - gammaln(k + 1.0)) / math.sqrt(math.pi)


def integrated_average_work(axis: str, k: int) -> float:
    """Exact per-site period average of :func:`work_law`.

    The mean of ``cos(x)**p`` over a full period is
    ``Gamma((p+1)/2) / (sqrt(pi) Gamma(p/2 + 1))`` for even ``p`` and 0 for odd ``p``.
    """
    p = k + r_offset(axis, k)
    if p % 2:
        return 1.0
    return 1.0 - math.exp(gammaln((p + 1) / 2) - gammaln(p / 2 + 1)) / math.sqrt(math.pi)


@dataclass(frozen=True)
class SpecialCase:
    formula: Callable
    trusted: bool
    note: str


SPECIAL_CASES = {
    "Y_N3_K2": SpecialCase(lambda t: 6 * np.sin(3 * t) ** 2, True,
                           "W^Y for N=3, K=2; agrees with exact simulation"),
    "X_N4_K2": SpecialCase(lambda t: 4 * (1 + np.cos(2 * t) ** 2), False,
                           "published W^X for N=4, K=2; nonzero at t=0, simulation gives 8 sin^2(2t)"),
}


def special_case_work(case_id: str, t):
    """Evaluate a published small-N formula verbatim (check ``SPECIAL_CASES[id].trusted``)."""
    try:
        case = SPECIAL_CASES[case_id]
    except KeyError:
        raise ValidationError(f"unknown special case {case_id!r}") from None
    return case.formula(np.asarray(t, dtype=float))


def closed_form_power(axis: str, n: int, k: int, t_max: float = math.pi) -> float:
    """Maximum average power ``max_t W(t)/t`` of the closed-form work."""
    from .metrics import max_average_power

    closed_form_work(axis, n, k, 0.0)
    p, _ = max_average_power(lambda t: n * work_law(axis, k, t), t_max)
    return p


def closed_form_power_per_site(axis: str, k: int, t_max: float = math.pi) -> tuple[float, float]:
    """``(P/N, t*)`` from the per-site law; usable for K far beyond any simulable N."""
    from .metrics import max_average_power

    return max_average_power(lambda t: work_law(axis, k, t), t_max)

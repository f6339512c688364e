"""Eigenvalues of the weighted Neumann problem ``L u = lam * weight * u``.

Each eigenvalue is located by shooting ``v(t1) = 1, v'(t1) = 0`` and reading
``v'(t2)``.  Brackets come from an oscillation index

    index(a) = 2 * (interior zeros of v) + (0 if v(t2) v'(t2) > 0 else 1),

which counts half-turns of the Prufer angle at ``t2``.  It is nondecreasing in
``|a|`` along each branch, and the k-th eigenvalue of the branch is where it
first reaches ``2k - 1``.  Using the index instead of raw sign changes of the
miss function keeps brackets correct when one scan step covers several
eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .sl_core import (DEFAULT_TOL, FucikError, SLProblem, Tolerances, WeightSel, _scaled,
                      shoot_v)
from .zerofn import sign_profile

Branch = Literal["positive", "negative"]

SCAN_START = 1e-3
SCAN_RATIO = 1.25
SCAN_LIMIT = 1e7
EIG_REL = 1e-10
INTEGRAL_TOL = 1e-12


class BranchEmpty(FucikError, ValueError):
    pass


class ScanExhausted(FucikError, RuntimeError):
    pass


@dataclass(frozen=True)
class Eigenvalue:
    index: int
    value: float
    interior_zeros: int
    miss_residual: float
    double: bool = False


def _miss_state(prob, weight_sel, a, tol):
    _, res = shoot_v(prob, weight_sel, a, "t1", tol, record=False)
    return res


def neumann_miss(prob: SLProblem, weight_sel: WeightSel, a: float,
                 tol: Tolerances = DEFAULT_TOL) -> tuple[float, int]:
    """``(v'(t2), number of zeros of v in (t1, t2))`` for the shot from ``t1``."""
    res = _miss_state(prob, weight_sel, a, tol)
    return _scaled(res.end_state[1], res.log_scale), res.interior_zero_count_to_end


def oscillation_index(prob: SLProblem, weight_sel: WeightSel, a: float,
                      tol: Tolerances = DEFAULT_TOL) -> int:
    res = _miss_state(prob, weight_sel, a, tol)
    v, dv = res.end_state
    return 2 * res.interior_zero_count_to_end + (0 if v * dv > 0.0 else 1)


def zero_is_principal(prob: SLProblem, weight_sel: WeightSel, branch: Branch) -> bool:
    """Whether 0 is the principal eigenvalue of the branch (needs ``q = 0``).

    With ``q = 0`` the constant solves the problem at ``lam = 0``; the sign of
    the weight's integral decides which branch owns it (both when it is 0).
    """
    if not prob.q.is_zero():
        return False
    total = prob.weight(weight_sel).integral(prob.t1, prob.t2)
    if branch == "positive":
        return total >= -INTEGRAL_TOL
    return total <= INTEGRAL_TOL


def eigenvalues(prob: SLProblem, weight_sel: WeightSel, branch: Branch, count: int,
                tol: Tolerances = DEFAULT_TOL, rel: float = EIG_REL) -> list[Eigenvalue]:
    """The first ``count`` eigenvalues of a branch, ordered by ``|value|``."""
    profile = sign_profile(prob, weight_sel)
    sgn = 1.0 if branch == "positive" else -1.0
    if (branch == "positive" and not profile.has_positive) or (
            branch == "negative" and not profile.has_negative):
        raise BranchEmpty(f"weight {weight_sel!r} has no {branch} part")
    out: list[Eigenvalue] = []
    if zero_is_principal(prob, weight_sel, branch):
        out.append(Eigenvalue(int(sgn), 0.0, 0, 0.0))
    if len(out) >= count:
        return out[:count]

    def index(x):
        return oscillation_index(prob, weight_sel, sgn * x, tol)

    # scan state: last point known below the target, next scan point
    lo = 0.0
    x = SCAN_START
    ix = index(x)
    for k in range(len(out) + 1, count + 1):
        target = 2 * k - 1
        while ix < target:
            lo = x
            x *= SCAN_RATIO
            if x > SCAN_LIMIT:
                raise ScanExhausted(f"only {len(out)} eigenvalues below |a| = {SCAN_LIMIT:g}")
            ix = index(x)
        a_lo = lo
        a_hi = x
        while a_hi - a_lo > rel * (1.0 + a_hi):
            mid = 0.5 * (a_lo + a_hi)
            if index(mid) >= target:
                a_hi = mid
            else:
                a_lo = mid
        value = sgn * 0.5 * (a_lo + a_hi)
        res = _miss_state(prob, weight_sel, value, tol)
        miss = abs(res.end_state[1]) / max(res.u_max, 1e-300)
        out.append(Eigenvalue(int(sgn) * k, value, res.interior_zero_count_to_end, miss))
        # the next eigenvalue lies above this one; restart the bracket here
        lo = a_lo
    for i in range(len(out) - 1):
        if abs(out[i + 1].value - out[i].value) <= rel * (1.0 + abs(out[i].value)):
            out[i] = Eigenvalue(out[i].index, out[i].value, out[i].interior_zeros,
                                out[i].miss_residual, True)
            out[i + 1] = Eigenvalue(out[i + 1].index, out[i + 1].value,
                                    out[i + 1].interior_zeros, out[i + 1].miss_residual, True)
    return out


def principal(prob: SLProblem, weight_sel: WeightSel, branch: Branch,
              tol: Tolerances = DEFAULT_TOL) -> float | None:
    """``lam_1`` (positive branch) or ``lam_-1`` (negative), ``None`` when empty."""
    try:
        return eigenvalues(prob, weight_sel, branch, 1, tol)[0].value
    except BranchEmpty:
        return None

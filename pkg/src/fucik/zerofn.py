"""Zero-functions of the linear equation ``L u = a * weight * u``.

``phi(a, s)`` is the first zero after ``s`` of the solution vanishing at ``s``;
``psi1(a)`` the first zero after ``t1`` of the solution with ``v'(t1) = 0``;
``psi2(a)`` the last zero before ``t2`` of the solution with ``v'(t2) = 0``.
Zeros outside ``[t1, t2]`` are reported as ``+inf`` (``phi``, ``psi1``) or
``-inf`` (``psi2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .sl_core import (DEFAULT_TOL, FucikError, SLProblem, Tolerances, WeightSel,
                      first_zero)

Sign = Literal[">", "<"]

_ZERO_Y = 1e-14


class DegenerateWeight(FucikError, ValueError):
    pass


class HypothesisViolated(FucikError, ValueError):
    pass


def phi(prob: SLProblem, weight_sel: WeightSel, a: float, s: float,
        tol: Tolerances = DEFAULT_TOL) -> float:
    return first_zero(prob, weight_sel, a, s, "u", "forward", tol)


def psi1(prob: SLProblem, weight_sel: WeightSel, a: float,
         tol: Tolerances = DEFAULT_TOL) -> float:
    return first_zero(prob, weight_sel, a, prob.t1, "v", "forward", tol)


def psi2(prob: SLProblem, weight_sel: WeightSel, a: float,
         tol: Tolerances = DEFAULT_TOL) -> float:
    # backward shot == forward shot of the problem reflected by t -> -t
    return first_zero(prob, weight_sel, a, prob.t2, "v", "backward", tol)


@dataclass(frozen=True)
class SignProfile:
    """Sign structure of a weight on ``[t1, t2]``.

    Intervals are maximal, sorted and trimmed so that their ends are limits of
    points where the weight has the stated strict sign.  ``N`` is the number of
    changes of sign (``math.inf`` when a multiple point exists).
    """

    weight_sel: str
    positive_intervals: list[tuple[float, float]]
    negative_intervals: list[tuple[float, float]]
    change_points: list[tuple[float, str]] = field(default_factory=list)
    N: float = 0

    @property
    def has_positive(self) -> bool:
        return bool(self.positive_intervals)

    @property
    def has_negative(self) -> bool:
        return bool(self.negative_intervals)

    def intervals(self, sign: Sign) -> list[tuple[float, float]]:
        return self.positive_intervals if sign == ">" else self.negative_intervals

    def first(self, sign: Sign) -> float | None:
        """``inf {t : weight has the sign}``, i.e. T1^> or T1^<."""
        iv = self.intervals(sign)
        return iv[0][0] if iv else None

    def last(self, sign: Sign) -> float | None:
        """``sup {t : weight has the sign}``, i.e. T2^> or T2^<."""
        iv = self.intervals(sign)
        return iv[-1][1] if iv else None

    @property
    def changes_sign(self) -> bool:
        return self.has_positive and self.has_negative


def _candidate_points(f, t1: float, t2: float) -> list[float]:
    pts = {t1, t2}
    if f.kind == "pwlinear":
        xs, ys = f.xy
        for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:]):
            if t1 < x0 < t2:
                pts.add(float(x0))
            if y0 * y1 < 0.0:
                r = x0 - y0 * (x1 - x0) / (y1 - y0)
                if t1 < r < t2:
                    pts.add(float(r))
    elif f.kind == "sine" and f.amplitude != 0.0 and f.omega != 0.0:
        ratio = -f.offset / f.amplitude
        if abs(ratio) <= 1.0:
            base = math.asin(ratio)
            w, ph = f.omega, f.phase
            lo = min(w * t1, w * t2) + ph
            hi = max(w * t1, w * t2) + ph
            for x0 in (base, math.pi - base):
                j0 = math.floor((lo - x0) / (2 * math.pi)) - 1
                j1 = math.ceil((hi - x0) / (2 * math.pi)) + 1
                for j in range(j0, j1 + 1):
                    t = (x0 + 2 * math.pi * j - ph) / w
                    if t1 < t < t2:
                        pts.add(t)
    return sorted(pts)


def _runs(subs, want: int) -> list[tuple[float, float]]:
    """Maximal runs free of the opposite sign, trimmed to the wanted sign."""
    out = []
    cur = None
    for lo, hi, sg in subs:
        if sg == -want:
            if cur is not None:
                out.append(cur)
                cur = None
        elif sg == want:
            cur = (lo, hi) if cur is None else (cur[0], hi)
    if cur is not None:
        out.append(cur)
    return out


def sign_profile(prob: SLProblem, weight_sel: WeightSel) -> SignProfile:
    f = prob.weight(weight_sel)
    t1, t2 = prob.t1, prob.t2
    pts = _candidate_points(f, t1, t2)
    subs = []
    for lo, hi in zip(pts, pts[1:]):
        if hi <= lo:
            continue
        y = float(f(0.5 * (lo + hi)))
        sg = 0 if abs(y) <= _ZERO_Y else (1 if y > 0 else -1)
        # a plateau at the breakpoints of a pwlinear piece is an exact zero
        if f.kind == "pwlinear" and abs(float(f(lo))) <= _ZERO_Y and abs(float(f(hi))) <= _ZERO_Y:
            sg = 0
        subs.append((lo, hi, sg))
    pos = _runs(subs, 1)
    neg = _runs(subs, -1)
    if not pos and not neg:
        raise DegenerateWeight(f"weight {weight_sel!r} vanishes identically")
    tagged = sorted([(lo, hi, 1) for lo, hi in pos] + [(lo, hi, -1) for lo, hi in neg])
    changes = []
    for (_, _, s0), (lo1, _, s1) in zip(tagged, tagged[1:]):
        if s0 != s1:
            changes.append((lo1, "simple"))
    multiple = any(kind == "multiple" for _, kind in changes)
    return SignProfile(weight_sel, pos, neg, changes, math.inf if multiple else len(changes))


def alpha_right(profile: SignProfile, s: float, sign: Sign) -> float:
    """``inf {t > s : weight has the sign}``, ``+inf`` when empty."""
    for lo, hi in profile.intervals(sign):
        if hi > s:
            return max(lo, s)
    return math.inf


@dataclass(frozen=True)
class ComparisonWitness:
    z1: float
    z2: float
    strict_hypothesis: bool

    @property
    def ordered(self) -> bool:
        return self.z2 <= self.z1

    @property
    def strictly_ordered(self) -> bool:
        return self.z2 < self.z1


def _grid(p1: SLProblem, p2: SLProblem) -> np.ndarray:
    t1, t2 = p1.t1, p1.t2
    bps = set()
    for prob in (p1, p2):
        for f in (prob.p, prob.q, prob.m):
            bps.update(t for t in f.breakpoints() if t1 <= t <= t2)
    return np.union1d(np.linspace(t1, t2, 4097), np.array(sorted(bps), dtype=float))


def compare_first_zeros(prob1: SLProblem, prob2: SLProblem,
                        tol: Tolerances = DEFAULT_TOL, eps: float = 1e-12) -> ComparisonWitness:
    """Neumann first zeros of ``-(p_i v')' + q_i v = m_i v``, ``i = 1, 2``.

    Requires ``p1 >= p2``, ``q1 >= q2`` and ``m1 <= m2`` pointwise and a finite
    first zero for problem 1; then the zero of problem 2 cannot come later.
    """
    if (prob1.t1, prob1.t2) != (prob2.t1, prob2.t2):
        raise HypothesisViolated("problems live on different intervals")
    g = _grid(prob1, prob2)
    dp = prob1.p(g) - prob2.p(g)
    dq = prob1.q(g) - prob2.q(g)
    dm = prob2.m(g) - prob1.m(g)
    for name, d in (("p1 >= p2", dp), ("q1 >= q2", dq), ("m1 <= m2", dm)):
        if np.min(d) < -eps:
            raise HypothesisViolated(f"{name} fails (worst {np.min(d):.3g})")
    strict = bool(max(np.max(dp), np.max(dq), np.max(dm)) > eps)
    z1 = psi1(prob1, "m", 1.0, tol)
    if not math.isfinite(z1):
        raise HypothesisViolated("v1 has no zero in the interval")
    z2 = psi1(prob2, "m", 1.0, tol)
    return ComparisonWitness(z1, z2, strict)

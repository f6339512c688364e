"""Curves of the Fucik spectrum.

A point ``(a, b)`` lies on ``C_k^>`` (``C_k^<``) when a nontrivial solution of
``L u = a m u+ - b n u-`` with Neumann ends has exactly ``k`` zeros inside
``(t1, t2)`` and ends positive (negative).  Between zeros the solution solves a
linear equation: positive humps use ``(a, m)``, negative humps ``(b, n)``.
Walking the humps from ``t1`` gives the k-th zero, which must coincide with the
last zero of the Neumann solution shot back from ``t2``.

Quadrants are written ``"++"``, ``"+-"``, ``"-+"``, ``"--"`` (sign of ``a``
first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from .eigen import principal
from .sl_core import (DEFAULT_TOL, FucikError, SLProblem, Tolerances, first_zero, _shot)
from .zerofn import alpha_right, psi1, psi2, phi, sign_profile

Sign = Literal[">", "<"]
QUADRANTS = ("++", "+-", "-+", "--")

B_MIN = 1e-3
B_MAX = 1e7
CURVE_REL = 1e-9
PARAM_REL = 1e-10
DOUBLE_REL = 1e-7
PROBE_COUNT = 16
PROBE_TOP = 1e4


class InvalidK(FucikError, ValueError):
    pass


class NoInformation(FucikError, ArithmeticError):
    """Both sides of a curve equation are infinite in a way that gives no sign."""


class BracketFailure(FucikError, RuntimeError):
    pass


class UndefinedAsymptote(FucikError, ValueError):
    pass


@dataclass(frozen=True, order=True)
class CurveId:
    k: int
    end_sign: str

    def __post_init__(self):
        if self.k < 1:
            raise InvalidK(f"k must be >= 1, got {self.k}")
        if self.end_sign not in (">", "<"):
            raise ValueError(f"end_sign must be '>' or '<', got {self.end_sign!r}")

    def hump_signs(self) -> list[int]:
        """Signs of the ``k + 1`` humps from ``t1`` to ``t2``."""
        last = 1 if self.end_sign == ">" else -1
        first = last if self.k % 2 == 0 else -last
        return [first * (-1) ** i for i in range(self.k + 1)]


def _signs(quadrant: str) -> tuple[int, int]:
    if quadrant not in QUADRANTS:
        raise ValueError(f"quadrant must be one of {QUADRANTS}, got {quadrant!r}")
    return (1 if quadrant[0] == "+" else -1), (1 if quadrant[1] == "+" else -1)


def _sign_char(s: int) -> Sign:
    return ">" if s > 0 else "<"


@dataclass(frozen=True)
class CurveSample:
    a: float
    b: float
    quadrant: str
    residual: float
    chain_zeros: tuple[float, ...]


@dataclass(frozen=True)
class Curve:
    cid: CurveId
    quadrant: str
    samples: list[CurveSample] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        """b strictly decreasing in a on ``++``/``--``, strictly increasing otherwise."""
        if len(self.samples) < 2:
            return True
        b = np.array([s.b for s in self.samples])
        d = np.diff(b)
        return bool(np.all(d < 0)) if self.quadrant in ("++", "--") else bool(np.all(d > 0))


def chain_left(prob: SLProblem, a: float, b: float, cid: CurveId,
               tol: Tolerances = DEFAULT_TOL) -> tuple[float, list[float]]:
    """The k-th zero of the solution started with ``u'(t1) = 0``, and all k zeros."""
    signs = cid.hump_signs()
    zeros: list[float] = []
    for i in range(cid.k):
        sel, c = ("m", a) if signs[i] > 0 else ("n", b)
        z = psi1(prob, sel, c, tol) if i == 0 else phi(prob, sel, c, zeros[-1], tol)
        if not math.isfinite(z):
            return math.inf, zeros
        zeros.append(z)
    return zeros[-1], zeros


def _end_target(prob, a, b, cid, tol):
    return psi2(prob, "m", a, tol) if cid.end_sign == ">" else psi2(prob, "n", b, tol)


def _combine(left: float, target: float) -> float:
    if math.isfinite(left) and math.isfinite(target):
        return left - target
    if left == math.inf or target == -math.inf:
        if left == -math.inf or target == math.inf:
            raise NoInformation(f"chain {left} against target {target}")
        return math.inf
    raise NoInformation(f"chain {left} against target {target}")


def residual(prob: SLProblem, a: float, b: float, cid: CurveId,
             tol: Tolerances = DEFAULT_TOL) -> float:
    """``Psi_k(a, b)`` minus the end target; zero exactly on ``C_k``."""
    left, _ = chain_left(prob, a, b, cid, tol)
    return _combine(left, _end_target(prob, a, b, cid, tol))


class _Equation:
    """Curve equation at fixed ``a`` as a function of ``|b|``.

    Along each quadrant the chain is nonincreasing in ``|b|`` and the end target
    nondecreasing, so the residual decreases from ``+inf`` as ``|b|`` grows.
    """

    def __init__(self, prob, a, cid, sb, tol):
        self.prob, self.a, self.cid, self.sb, self.tol = prob, a, cid, sb, tol
        self.fixed_target = psi2(prob, "m", a, tol) if cid.end_sign == ">" else None

    def chain(self, beta):
        return chain_left(self.prob, self.a, self.sb * beta, self.cid, self.tol)

    def __call__(self, beta):
        left, _ = self.chain(beta)
        if self.fixed_target is None:
            target = psi2(self.prob, "n", self.sb * beta, self.tol)
        else:
            target = self.fixed_target
        return _combine(left, target)

    def limit(self) -> float:
        """Residual as ``|b| -> inf``: negative humps shrink onto the sign set of ``n``."""
        prof = sign_profile(self.prob, "n")
        want = _sign_char(self.sb)
        signs = self.cid.hump_signs()
        z = self.prob.t1
        for i in range(self.cid.k):
            if signs[i] > 0:
                if i == 0:
                    z = psi1(self.prob, "m", self.a, self.tol)
                else:
                    z = phi(self.prob, "m", self.a, z, self.tol)
            else:
                z = alpha_right(prof, z, want)
                if i > 0 and z == self.prob.t2:
                    z = math.inf
            if not math.isfinite(z) or z > self.prob.t2:
                return math.inf
        if self.fixed_target is not None:
            target = self.fixed_target
        else:
            last = prof.last(want)
            target = last if last is not None else -math.inf
        return _combine(z, target)


def _polish(eq, beta):
    """Bisect down to adjacent doubles around a root found by Brent.

    Humps crossing long stretches where the equation is exponential make the
    residual move by far more than its tolerance per ulp of ``b``; the sign
    change between neighbouring doubles is then the sharpest answer there is.
    """
    h = 4 * np.spacing(beta)
    lo, hi = beta - h, beta + h
    while not eq(lo) > 0.0:
        lo = beta - h
        h *= 2.0
    h = 4 * np.spacing(beta)
    while not eq(hi) <= 0.0:
        hi = beta + h
        h *= 2.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if eq(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    r_lo, r_hi = eq(lo), eq(hi)
    return (lo, r_lo) if abs(r_lo) < abs(r_hi) else (hi, r_hi)


def _bisect_sign(eq, lo, hi):
    """Bisect ``eq > 0`` down to adjacent doubles and return the upper end."""
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return hi
        if eq(mid) > 0.0:
            lo = mid
        else:
            hi = mid


def solve_b(prob: SLProblem, a: float, cid: CurveId, quadrant: str,
            tol: Tolerances = DEFAULT_TOL, b_max: float = B_MAX) -> float:
    """The ``b`` of the quadrant with ``(a, b)`` on the curve.

    Returns ``+inf`` (``-inf`` for a negative-``b`` quadrant) when the curve has
    no point over this ``a`` with ``|b| <= b_max``.
    """
    sa, sb = _signs(quadrant)
    if a == 0.0 or (a > 0) != (sa > 0):
        raise ValueError(f"a = {a!r} does not lie in quadrant {quadrant}")
    miss = sb * math.inf
    eq = _Equation(prob, a, cid, sb, tol)
    if eq.fixed_target == -math.inf:
        return miss
    lim = eq.limit()
    if lim >= CURVE_REL * prob.length:
        return miss
    tau = CURVE_REL * prob.length
    lo = B_MIN
    r_lo = eq(lo)
    while r_lo <= 0.0:
        lo /= 2.0
        if lo < 1e-12:
            raise BracketFailure(f"residual negative for |b| down to {lo:g} at a = {a!r}")
        r_lo = eq(lo)
    hi = lo
    r_hi = r_lo
    while r_hi > 0.0:
        lo, r_lo = hi, r_hi
        hi *= 2.0
        if hi > b_max:
            return miss
        r_hi = eq(hi)
    # shrink until both ends are finite, then hand over to Brent
    while not (math.isfinite(r_lo) and math.isfinite(r_hi)):
        mid = math.sqrt(lo * hi) if hi / lo > 1.5 else 0.5 * (lo + hi)
        r_mid = eq(mid)
        if r_mid > 0.0:
            lo, r_lo = mid, r_mid
        else:
            hi, r_hi = mid, r_mid
        if 0.5 * (lo + hi) in (lo, hi):
            # the crossing is sharper than one ulp of b
            return sb * (hi if math.isfinite(r_hi) else lo)
    if r_hi == 0.0:
        return sb * hi

    def f(beta):
        r = eq(beta)
        if not math.isfinite(r):
            raise BracketFailure(f"residual left the finite range inside the bracket at a = {a!r}")
        return r

    try:
        beta = brentq(f, lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=200)
    except BracketFailure:
        # rounding noise broke monotonicity; the sign alone still brackets
        return sb * _bisect_sign(eq, lo, hi)
    if abs(eq(beta)) > tau:
        beta, _ = _polish(eq, beta)
    return sb * beta


def sample(prob: SLProblem, a: float, b: float, cid: CurveId, quadrant: str,
           tol: Tolerances = DEFAULT_TOL) -> CurveSample:
    left, zeros = chain_left(prob, a, b, cid, tol)
    res = _combine(left, _end_target(prob, a, b, cid, tol))
    return CurveSample(a, b, quadrant, res, tuple(zeros))


def trace_curve(prob: SLProblem, cid: CurveId, quadrant: str, a_grid,
                tol: Tolerances = DEFAULT_TOL, b_max: float = B_MAX) -> Curve:
    samples = []
    for a in sorted(float(x) for x in a_grid):
        b = solve_b(prob, a, cid, quadrant, tol, b_max)
        if math.isfinite(b):
            samples.append(sample(prob, a, b, cid, quadrant, tol))
    return Curve(cid, quadrant, samples)


@dataclass(frozen=True)
class Certificate:
    """Piecewise re-shoot of a curve point.

    ``end_slope`` is ``|u'(t2)|`` over ``max |u|`` on the last hump times its
    frequency scale.  When that hump runs through a region where the equation
    is exponential, forward errors grow too fast for ``end_slope`` to be small;
    ``end_bracketed`` then says that starting the last hump a curve tolerance
    before or after the reported zero gives one shot that turns away from zero
    at ``t2`` and one that turns back, so a genuine Neumann end lies in between.
    """

    zeros: list[float]
    end_slope: float
    end_bracketed: bool

    def accepted(self, slope_tol: float = 1e-7) -> bool:
        return self.end_slope <= slope_tol or self.end_bracketed


def _end_derivative(prob, sel, c, start, tol):
    _, res = _shot(prob, sel, c, start, "u", "forward", tol, False, False)
    return res


def certify(prob: SLProblem, a: float, b: float, cid: CurveId,
            tol: Tolerances = DEFAULT_TOL) -> Certificate:
    """Re-shoot the nonlinear solution hump by hump from ``t1`` to ``t2``."""
    signs = cid.hump_signs()
    zeros: list[float] = []
    for i in range(cid.k):
        sel, c = ("m", a) if signs[i] > 0 else ("n", b)
        if i == 0:
            z = first_zero(prob, sel, c, prob.t1, "v", "forward", tol)
        else:
            z = first_zero(prob, sel, c, zeros[-1], "u", "forward", tol)
        zeros.append(z)
        if not math.isfinite(z):
            return Certificate(zeros, math.inf, False)
    sel, c = ("m", a) if signs[-1] > 0 else ("n", b)
    res = _end_derivative(prob, sel, c, zeros[-1], tol)
    lo, hi = prob.weight(sel).sample_extrema(prob.t1, prob.t2)
    freq = math.sqrt(abs(c) * max(abs(lo), abs(hi)) / prob.p_min) + 1.0
    slope = abs(res.end_state[1]) / (res.u_max * freq)
    if res.interior_zero_count_to_end:
        slope = math.inf
    window = CURVE_REL * prob.length
    turns = []
    for z in (zeros[-1] - window, zeros[-1] + window):
        if not prob.t1 <= z <= prob.t2 or (len(zeros) > 1 and z <= zeros[-2]):
            break
        r = _end_derivative(prob, sel, c, z, tol)
        u, du = r.end_state
        # turning away from zero at t2 versus heading back into (or past) it
        turns.append(r.interior_zero_count_to_end == 0 and u * du > 0.0)
    bracketed = len(turns) == 2 and turns[0] != turns[1]
    return Certificate(zeros, slope, bracketed)


def _param_for_zero(fn, sign: int, target: float, want_above: bool, rel=PARAM_REL):
    """``x > 0`` where ``fn(sign * x)`` crosses ``target``.

    ``want_above`` says the predicate ``fn > target`` holds for large ``x``
    (``psi2``); otherwise ``fn < target`` does (``psi1``).
    """
    def pred(x):
        val = fn(sign * x)
        return val > target if want_above else val < target

    x = B_MIN
    if pred(x):
        lo = x
        while pred(lo):
            lo /= 2.0
            if lo < 1e-14:
                raise UndefinedAsymptote("crossing lies below the search range")
        hi = 2.0 * lo
    else:
        lo = x
        hi = x * 2.0
        while not pred(hi):
            lo = hi
            hi *= 2.0
            if hi > B_MAX:
                raise UndefinedAsymptote(f"target {target:g} is never reached")
    while hi - lo > rel * (1.0 + hi):
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return sign * 0.5 * (lo + hi)


def psi2_crossing(prob, weight_sel, sign: int, target: float, tol=DEFAULT_TOL) -> float:
    """Parameter of the given sign with ``psi2 = target``."""
    return _param_for_zero(lambda c: psi2(prob, weight_sel, c, tol), sign, target, True)


def psi1_crossing(prob, weight_sel, sign: int, target: float, tol=DEFAULT_TOL) -> float:
    """Parameter of the given sign with ``psi1 = target``."""
    return _param_for_zero(lambda c: psi1(prob, weight_sel, c, tol), sign, target, False)


def asymptotes(prob: SLProblem, quadrant: str, end_sign: Sign,
               tol: Tolerances = DEFAULT_TOL) -> tuple[float, float]:
    """Vertical and horizontal asymptotes of the first curve ``C_1`` in a quadrant.

    ``C_1^>`` is ``psi1^n(b) = psi2^m(a)`` and ``C_1^<`` is
    ``psi1^m(a) = psi2^n(b)``; sending one parameter to infinity drives the
    zero-function it feeds to the first/last point of the matching sign set.
    """
    sa, sb = _signs(quadrant)
    pm, pn = sign_profile(prob, "m"), sign_profile(prob, "n")
    ca, cb = _sign_char(sa), _sign_char(sb)
    if not pm.intervals(ca) or not pn.intervals(cb):
        raise UndefinedAsymptote(f"weights lack the sign pattern of quadrant {quadrant}")
    if end_sign == ">":
        vertical = psi2_crossing(prob, "m", sa, pn.first(cb), tol)
        horizontal = psi1_crossing(prob, "n", sb, pm.last(ca), tol)
    else:
        vertical = psi1_crossing(prob, "m", sa, pn.last(cb), tol)
        horizontal = psi2_crossing(prob, "n", sb, pm.first(ca), tol)
    return vertical, horizontal


@dataclass(frozen=True)
class GapConstants:
    alpha_pos: float | None
    alpha_neg: float | None
    beta_pos: float | None
    beta_neg: float | None
    lambda_pos: float | None
    lambda_neg: float | None
    epsilon: float


def gap_constants(prob: SLProblem, tol: Tolerances = DEFAULT_TOL) -> GapConstants:
    if not prob.single_weight:
        raise ValueError("the gap is defined for single-weight problems (m = n)")
    prof = sign_profile(prob, "m")
    vals = dict(alpha_pos=None, alpha_neg=None, beta_pos=None, beta_neg=None,
                lambda_pos=None, lambda_neg=None)
    cands = []
    if prof.has_positive:
        lam = principal(prob, "m", "positive", tol)
        ap = psi2_crossing(prob, "m", 1, prob.t1, tol)
        bp = psi1_crossing(prob, "m", 1, prob.t2, tol)
        vals.update(alpha_pos=ap, beta_pos=bp, lambda_pos=lam)
        cands += [ap - lam, bp - lam]
    if prof.has_negative:
        lam = principal(prob, "m", "negative", tol)
        an = psi2_crossing(prob, "m", -1, prob.t1, tol)
        bn = psi1_crossing(prob, "m", -1, prob.t2, tol)
        vals.update(alpha_neg=an, beta_neg=bn, lambda_neg=lam)
        cands += [lam - an, lam - bn]
    eps = min(cands)
    if not eps > 0.0:
        raise BracketFailure(f"gap epsilon came out nonpositive ({eps:g})")
    return GapConstants(epsilon=eps, **vals)


def gap_epsilon(prob: SLProblem, tol: Tolerances = DEFAULT_TOL) -> float:
    return gap_constants(prob, tol).epsilon


@dataclass(frozen=True)
class QuadrantReport:
    quadrant: str
    nonempty_curves: list[tuple[CurveId, bool]]
    count: int
    saturated: bool
    probes: dict = field(default_factory=dict, repr=False)
    asymptotes: dict = field(default_factory=dict)


def probe_grid(prob: SLProblem, quadrant: str, tol: Tolerances = DEFAULT_TOL,
               count: int = PROBE_COUNT, top: float = PROBE_TOP) -> np.ndarray:
    """Log-spaced ``|a|`` values from just past the first hump threshold up to ``top``."""
    sa, _ = _signs(quadrant)
    lows = []
    for fn in (psi2_crossing, psi1_crossing):
        target = prob.t1 if fn is psi2_crossing else prob.t2
        try:
            lows.append(abs(fn(prob, "m", sa, target, tol)))
        except UndefinedAsymptote:
            pass
    lo = min(lows) * 1.01 if lows else 1e-2
    lo = min(max(lo, 1e-3), top / 10)
    return sa * np.geomspace(lo, top, count)


def _probe(prob, cid, quadrant, grid, tol):
    _, sb = _signs(quadrant)
    for a in grid:
        eq = _Equation(prob, float(a), cid, sb, tol)
        if eq.fixed_target == -math.inf or eq.limit() >= CURVE_REL * prob.length:
            continue
        b = solve_b(prob, float(a), cid, quadrant, tol)
        if math.isfinite(b):
            return float(a), b
    return None


def _reaches_infinity(prob, a, cid, sb, tol) -> bool:
    """Whether the curve has a point at this ``a`` (sign of the ``|b| -> inf`` residual)."""
    eq = _Equation(prob, a, cid, sb, tol)
    return eq.fixed_target != -math.inf and eq.limit() < CURVE_REL * prob.length


def domain_estimate(prob: SLProblem, cid: CurveId, quadrant: str, a_inside: float,
                    tol: Tolerances = DEFAULT_TOL, top: float = PROBE_TOP) -> tuple[float, float]:
    """Empirical ends of a curve: ``(a where it starts, b at |a| = top)``.

    ``a_inside`` must carry a point of the curve.  The start is bisected on the
    existence test to ``PARAM_REL``; below ``B_MIN`` the bound itself is returned.
    For ``k = 1`` the two numbers approach the asymptote constants.
    """
    sa, sb = _signs(quadrant)
    hi = abs(a_inside)
    if not _reaches_infinity(prob, sa * hi, cid, sb, tol):
        raise NoInformation(f"{cid} has no point at a = {a_inside:g}")
    lo = hi
    while True:
        lo *= 0.5
        if lo < B_MIN:
            start = B_MIN
            break
        if not _reaches_infinity(prob, sa * lo, cid, sb, tol):
            while hi - lo > PARAM_REL * hi:
                mid = 0.5 * (lo + hi)
                if _reaches_infinity(prob, sa * mid, cid, sb, tol):
                    hi = mid
                else:
                    lo = mid
            start = hi
            break
    return sa * start, solve_b(prob, sa * top, cid, quadrant, tol)


def count_curves(prob: SLProblem, quadrant: str, k_max: int = 8,
                 tol: Tolerances = DEFAULT_TOL, grid=None) -> QuadrantReport:
    """Inventory of the curves ``C_k`` met in a quadrant, scanning ``k = 1, 2, ...``.

    Scanning stops at the first ``k`` where at most one of the pair is found,
    after checking ``k + 1`` is empty; double curves count twice.
    """
    if k_max < 1:
        raise InvalidK("k_max must be >= 1")
    sa, sb = _signs(quadrant)
    if not (sign_profile(prob, "m").intervals(_sign_char(sa))
            and sign_profile(prob, "n").intervals(_sign_char(sb))):
        # a hump needs its coefficient to oscillate somewhere
        return QuadrantReport(quadrant, [], 0, False, {})
    grid = probe_grid(prob, quadrant, tol) if grid is None else np.asarray(grid, dtype=float)
    curves: list[tuple[CurveId, bool]] = []
    probes: dict = {}
    saturated = False
    k = 1
    while k <= k_max:
        found = {}
        for es in (">", "<"):
            cid = CurveId(k, es)
            hit = _probe(prob, cid, quadrant, grid, tol)
            if hit is not None:
                found[es] = hit
                probes[cid] = hit
        if len(found) == 2:
            a = found[">"][0]
            b_other = solve_b(prob, a, CurveId(k, "<"), quadrant, tol)
            b_gt = found[">"][1]
            double = bool(math.isfinite(b_other)) and bool(abs(b_other - b_gt) <= DOUBLE_REL * (1 + abs(b_gt)))
            curves += [(CurveId(k, ">"), double), (CurveId(k, "<"), double)]
            if k == k_max:
                saturated = True
            k += 1
            continue
        for es, _hit in found.items():
            curves.append((CurveId(k, es), False))
        if len(found) == 1 and k < k_max:
            # the pair at k + 1 must be empty; record anything found regardless
            for es in (">", "<"):
                cid = CurveId(k + 1, es)
                hit = _probe(prob, cid, quadrant, grid, tol)
                if hit is not None:
                    probes[cid] = hit
                    curves.append((cid, False))
        break
    return QuadrantReport(quadrant, curves, len(curves), saturated, probes)

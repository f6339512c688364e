"""Problem representation and the shooting integrator.

A problem is ``-(p u')' + q u = c * weight(t) * u`` on ``[t1, t2]``, where the
weight is one of the two weights ``m`` or ``n`` and ``c`` is the spectral
parameter.  Shots start from a Dirichlet-type state ``u(s) = 0, u'(s) = 1`` or
from a Neumann-type state ``v = 1, v' = 0`` at an endpoint, and report the
first zero met in the direction of integration.

Zero positions are plain floats; ``math.inf`` / ``-math.inf`` mean that the
solution has no zero inside the interval in the searched direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Sequence

import numpy as np

from . import _dopri

WeightSel = Literal["m", "n"]
Direction = Literal["forward", "backward"]

_ZERO_Y = 1e-14


class FucikError(Exception):
    """Base class for errors raised by this package."""


class ProblemError(FucikError, ValueError):
    """A problem instance violates its invariants; ``field`` names the culprit."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class InvalidStart(FucikError, ValueError):
    pass


class NonFiniteState(FucikError, ArithmeticError):
    """The integrated state stopped being finite (step-size failure)."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances of the shooting layer.

    ``zero_rel`` scales with the interval length to give the zero-location
    tolerance; ``residual_rel`` bounds ``|u|`` at an accepted zero relative to
    the largest ``|u|`` met on the trajectory.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    zero_rel: float = 1e-11
    residual_rel: float = 1e-9
    max_steps: int = 20_000_000

    def halved(self) -> "Tolerances":
        return Tolerances(self.rtol / 2, self.atol / 2, self.zero_rel / 2,
                          self.residual_rel, self.max_steps)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class PiecewiseFn:
    """A continuous scalar function of ``t``.

    Build with :meth:`constant`, :meth:`pwlinear` or :meth:`sine`.
    """

    kind: Literal["constant", "pwlinear", "sine"]
    value: float = 0.0
    points: tuple[tuple[float, float], ...] = ()
    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    offset: float = 0.0

    @classmethod
    def constant(cls, value: float) -> "PiecewiseFn":
        return cls("constant", value=float(value))

    @classmethod
    def pwlinear(cls, points: Sequence[Sequence[float]]) -> "PiecewiseFn":
        pts = tuple((float(t), float(y)) for t, y in points)
        if len(pts) < 2:
            raise ValueError("pwlinear needs at least two points")
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise ValueError("pwlinear abscissae must be strictly increasing")
        return cls("pwlinear", points=pts)

    @classmethod
    def sine(cls, amplitude: float, omega: float, phase: float = 0.0,
             offset: float = 0.0) -> "PiecewiseFn":
        return cls("sine", amplitude=float(amplitude), omega=float(omega),
                   phase=float(phase), offset=float(offset))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full_like(t, self.value)[()]
        if self.kind == "sine":
            return (self.amplitude * np.sin(self.omega * t + self.phase) + self.offset)[()]
        xs, ys = self.xy
        # extrapolate linearly like the kernel does
        i = np.clip(np.searchsorted(xs, t) - 1, 0, len(xs) - 2)
        return (ys[i] + (ys[i + 1] - ys[i]) * (t - xs[i]) / (xs[i + 1] - xs[i]))[()]

    @cached_property
    def xy(self) -> tuple[np.ndarray, np.ndarray]:
        arr = np.array(self.points, dtype=float).reshape(-1, 2)
        return arr[:, 0].copy(), arr[:, 1].copy()

    @cached_property
    def encoded(self):
        """``(kind, par, xs, ys)`` as consumed by the jitted kernel."""
        if self.kind == "constant":
            par = np.array([self.value, 0.0, 0.0, 0.0])
            return 0, par, np.zeros(2), np.zeros(2)
        if self.kind == "sine":
            par = np.array([self.amplitude, self.omega, self.phase, self.offset])
            return 2, par, np.zeros(2), np.zeros(2)
        xs, ys = self.xy
        return 1, np.zeros(4), xs, ys

    def breakpoints(self) -> list[float]:
        return [t for t, _ in self.points] if self.kind == "pwlinear" else []

    def reflected(self) -> "PiecewiseFn":
        """The function ``t -> f(-t)``."""
        if self.kind == "constant":
            return self
        if self.kind == "sine":
            return PiecewiseFn.sine(self.amplitude, -self.omega, self.phase, self.offset)
        return PiecewiseFn.pwlinear([(-t, y) for t, y in reversed(self.points)])

    def is_zero(self) -> bool:
        if self.kind == "constant":
            return abs(self.value) <= _ZERO_Y
        if self.kind == "sine":
            return abs(self.amplitude) <= _ZERO_Y and abs(self.offset) <= _ZERO_Y
        return all(abs(y) <= _ZERO_Y for _, y in self.points)

    def integral(self, t1: float, t2: float) -> float:
        """Exact integral over ``[t1, t2]``."""
        if self.kind == "constant":
            return self.value * (t2 - t1)
        if self.kind == "sine":
            if self.omega == 0.0:
                return (self.amplitude * math.sin(self.phase) + self.offset) * (t2 - t1)
            prim = lambda t: (-self.amplitude / self.omega * math.cos(self.omega * t + self.phase)
                              + self.offset * t)
            return prim(t2) - prim(t1)
        knots = [t1] + [t for t in self.breakpoints() if t1 < t < t2] + [t2]
        ys = [float(self(t)) for t in knots]
        return sum(0.5 * (y0 + y1) * (x1 - x0)
                   for x0, x1, y0, y1 in zip(knots, knots[1:], ys, ys[1:]))

    def sample_extrema(self, t1: float, t2: float, n: int = 4096) -> tuple[float, float]:
        """Min and max over ``[t1, t2]`` from a grid plus all breakpoints."""
        grid = np.linspace(t1, t2, n + 1)
        extra = [t for t in self.breakpoints() if t1 < t < t2]
        if self.kind == "sine" and self.omega != 0.0:
            # critical points of the sine are where the extrema sit
            w, ph = self.omega, self.phase
            j0 = math.floor((min(w * t1, w * t2) + ph - math.pi / 2) / math.pi) - 1
            j1 = math.ceil((max(w * t1, w * t2) + ph - math.pi / 2) / math.pi) + 1
            for j in range(j0, j1 + 1):
                t = (math.pi / 2 + j * math.pi - ph) / w
                if t1 < t < t2:
                    extra.append(t)
        vals = np.asarray(self(np.concatenate([grid, np.array(extra, dtype=float)])))
        return float(vals.min()), float(vals.max())


@dataclass(frozen=True)
class SLProblem:
    """``-(p u')' + q u = a m(t) u+ - b n(t) u-`` on ``[t1, t2]`` with Neumann ends."""

    t1: float
    t2: float
    p: PiecewiseFn
    q: PiecewiseFn
    m: PiecewiseFn
    n: PiecewiseFn

    def __post_init__(self):
        if not (math.isfinite(self.t1) and math.isfinite(self.t2) and self.t1 < self.t2):
            raise ProblemError("interval", f"need finite t1 < t2, got [{self.t1}, {self.t2}]")
        for name in ("p", "q", "m", "n"):
            f = getattr(self, name)
            if f.kind == "pwlinear":
                xs = f.xy[0]
                if xs[0] > self.t1 or xs[-1] < self.t2:
                    raise ProblemError(name, "pwlinear points do not cover the interval")
        pmin, _ = self.p.sample_extrema(self.t1, self.t2)
        if not pmin > 0.0:
            raise ProblemError("p", f"p must stay positive on the interval (min {pmin:g})")
        qmin, _ = self.q.sample_extrema(self.t1, self.t2)
        if qmin < -_ZERO_Y:
            raise ProblemError("q", f"q must be nonnegative on the interval (min {qmin:g})")
        for name in ("m", "n"):
            lo, hi = getattr(self, name).sample_extrema(self.t1, self.t2)
            if max(abs(lo), abs(hi)) <= 1e-12:
                raise ProblemError(name, "weight vanishes identically")

    @classmethod
    def single(cls, t1, t2, m, p=None, q=None) -> "SLProblem":
        """Problem with ``n = m`` and defaults ``p = 1``, ``q = 0``."""
        p = p if p is not None else PiecewiseFn.constant(1.0)
        q = q if q is not None else PiecewiseFn.constant(0.0)
        return cls(t1, t2, p, q, m, m)

    @property
    def length(self) -> float:
        return self.t2 - self.t1

    @property
    def single_weight(self) -> bool:
        return self.m == self.n

    @cached_property
    def p_min(self) -> float:
        return self.p.sample_extrema(self.t1, self.t2)[0]

    def weight(self, sel: WeightSel) -> PiecewiseFn:
        if sel == "m":
            return self.m
        if sel == "n":
            return self.n
        raise ValueError(f"weight selector must be 'm' or 'n', got {sel!r}")

    def reflected(self) -> "SLProblem":
        """The mirrored problem under ``t -> -t``."""
        return SLProblem(-self.t2, -self.t1, self.p.reflected(), self.q.reflected(),
                         self.m.reflected(), self.n.reflected())

    @cached_property
    def _cuts(self) -> dict:
        out = {}
        for sel in ("m", "n"):
            bps = set(self.p.breakpoints()) | set(self.q.breakpoints())
            bps |= set(self.weight(sel).breakpoints())
            out[sel] = np.array(sorted(t for t in bps if self.t1 < t < self.t2), dtype=float)
        return out

    def cuts(self, sel: WeightSel) -> np.ndarray:
        return self._cuts[sel]


@dataclass(frozen=True)
class ShotResult:
    """Outcome of a shot.

    ``end_state`` holds ``(u, u')`` at the far endpoint divided by
    ``exp(log_scale)``; the kernel rescales the state to keep it finite.
    ``derivative_at_zero`` is ``u'`` at the zero in the same units as the
    initial data.
    """

    zero: float
    derivative_at_zero: float
    interior_zero_count_to_end: int
    end_state: tuple[float, float]
    log_scale: float = 0.0
    u_max: float = 1.0


@dataclass(frozen=True)
class Trajectory:
    """Accepted steps of a shot with Dormand-Prince dense output."""

    direction: Direction
    t: np.ndarray
    u: np.ndarray
    w: np.ndarray
    log_scale: np.ndarray
    coeffs: np.ndarray = field(repr=False)

    def __call__(self, t: float) -> tuple[float, float]:
        """``(u, w)`` at ``t`` in the units of the enclosing step's start node."""
        sgn = 1.0 if self.direction == "forward" else -1.0
        tau = sgn * np.asarray(self.t)
        x = sgn * t
        if not tau[0] <= x <= tau[-1]:
            raise ValueError("t outside the trajectory")
        i = int(min(max(np.searchsorted(tau, x) - 1, 0), len(tau) - 2))
        th = (x - tau[i]) / (tau[i + 1] - tau[i])
        r = self.coeffs[i]
        val = r[0] + th * (r[1] + (1 - th) * (r[2] + th * (r[3] + (1 - th) * r[4])))
        return float(val[0]), float(sgn * val[1])


def _scaled(x: float, log_scale: float) -> float:
    if x == 0.0 or log_scale == 0.0:
        return x
    lg = math.log(abs(x)) + log_scale
    if lg > 709.0:
        return math.copysign(math.inf, x)
    return math.copysign(math.exp(lg), x)


def _run(prob: SLProblem, sel: WeightSel, c: float, start: float, init: str,
         direction: Direction, tol: Tolerances, stop_first: bool, record: bool):
    sgn = 1.0 if direction == "forward" else -1.0
    end = prob.t2 if sgn > 0 else prob.t1
    tau0, tau_end = sgn * start, sgn * end
    cuts = prob.cuts(sel)
    cuts = cuts[(cuts > min(start, end)) & (cuts < max(start, end))]
    cuts = np.sort(sgn * cuts)
    p0 = float(prob.p(start))
    if init == "u":
        u0, w0 = 0.0, p0  # u' = 1 in physical time, tau-derivative = sgn
        w0 *= sgn
    else:
        u0, w0 = 1.0, 0.0
    pk, pp, px, py = prob.p.encoded
    qk, qp, qx, qy = prob.q.encoded
    mk, mp, mx, my = prob.weight(sel).encoded
    ttol = tol.zero_rel * prob.length
    capacity = 4096
    while True:
        out = _dopri.integrate(tau0, tau_end, cuts, u0, w0, sgn, float(c),
                               pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my,
                               tol.rtol, tol.atol, ttol, stop_first, record,
                               capacity, tol.max_steps)
        if out[0] != _dopri.STATUS_CAPACITY:
            break
        capacity *= 4
    status = out[0]
    if status == _dopri.STATUS_NONFINITE:
        raise NonFiniteState(f"state became non-finite (c={c!r}, start={start!r})")
    if status == _dopri.STATUS_MAXSTEPS:
        raise NonFiniteState(f"step budget exhausted (c={c!r}, start={start!r})")
    return sgn, end, out


def _shot(prob: SLProblem, sel: WeightSel, c: float, start: float, init: str,
          direction: Direction, tol: Tolerances, stop_first: bool, record: bool):
    if not prob.t1 <= start <= prob.t2:
        raise InvalidStart(f"start {start!r} outside [{prob.t1}, {prob.t2}]")
    sgn, end, out = _run(prob, sel, c, start, init, direction, tol, stop_first, record)
    (_, ztau, wz, lsz, count, u_end, w_end, ls, umax, n_nodes, nodes, rcont) = out
    p_end = float(prob.p(end))
    if math.isnan(ztau):
        zero = sgn * math.inf
        dz = math.nan
        # a zero sitting on the endpoint itself: tiny residual, heading down
        if (count == 0 and start != end and abs(u_end) <= tol.residual_rel * umax
                and u_end * w_end <= 0.0):
            zero = end
            dz = _scaled(sgn * w_end / p_end, ls)
    else:
        zero = sgn * ztau
        dz = _scaled(sgn * wz / float(prob.p(zero)), lsz)
    result = ShotResult(zero=zero, derivative_at_zero=dz, interior_zero_count_to_end=int(count),
                        end_state=(u_end, sgn * w_end / p_end), log_scale=ls, u_max=umax)
    traj = None
    if record:
        nd = nodes[:n_nodes]
        traj = Trajectory(direction=direction, t=sgn * nd[:, 0], u=nd[:, 1].copy(),
                          w=sgn * nd[:, 2], log_scale=nd[:, 3].copy(),
                          coeffs=rcont[:max(n_nodes - 1, 0)].copy())
    return traj, result


def shoot_u(prob: SLProblem, weight_sel: WeightSel, a: float, s: float,
            direction: Direction = "forward", tol: Tolerances = DEFAULT_TOL,
            record: bool = True) -> tuple[Trajectory | None, ShotResult]:
    """Shoot ``u(s) = 0, u'(s) = 1`` for ``L u = a * weight * u`` to the interval end."""
    return _shot(prob, weight_sel, a, s, "u", direction, tol, False, record)


def shoot_v(prob: SLProblem, weight_sel: WeightSel, a: float,
            anchor: Literal["t1", "t2"] = "t1", tol: Tolerances = DEFAULT_TOL,
            record: bool = True) -> tuple[Trajectory | None, ShotResult]:
    """Shoot ``v = 1, v' = 0`` from an endpoint across the whole interval.

    From ``t1`` the shot runs forward; from ``t2`` it runs backward (the
    reflected problem ``t -> -t`` integrated forward).
    """
    if anchor == "t1":
        return _shot(prob, weight_sel, a, prob.t1, "v", "forward", tol, False, record)
    if anchor == "t2":
        return _shot(prob, weight_sel, a, prob.t2, "v", "backward", tol, False, record)
    raise ValueError(f"anchor must be 't1' or 't2', got {anchor!r}")


def first_zero(prob: SLProblem, weight_sel: WeightSel, c: float, start: float,
               init: str, direction: Direction, tol: Tolerances = DEFAULT_TOL) -> float:
    """First zero only; stops integrating as soon as it is found."""
    _, res = _shot(prob, weight_sel, c, start, init, direction, tol, True, False)
    return res.zero

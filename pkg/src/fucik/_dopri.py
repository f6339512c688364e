"""Jitted Dormand-Prince 5(4) stepper for the momentum-form system.

The state is ``(u, w)`` with ``w = p(t) u'``; the system reads

    u' = w / p(t),     w' = (q(t) - c * weight(t)) * u.

Integration always runs forward in the internal variable ``tau``; the physical
time is ``t = sgn * tau`` so that a backward shot is the forward shot of the
reflected problem ``t -> -t``.

Coefficient functions are encoded as ``(kind, par, xs, ys)``:
kind 0 constant ``par[0]``; kind 1 piecewise-linear through ``(xs, ys)``;
kind 2 ``par[0] * sin(par[1] * t + par[2]) + par[3]``.
"""

import math

import numpy as np
from numba import njit

C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
A71, A73, A74, A75, A76 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
D1, D3, D4, D5, D6, D7 = (-12715105075.0 / 11282082432.0, 87487479700.0 / 32700410799.0,
                          -10690763975.0 / 1880347072.0, 701980252875.0 / 199316789632.0,
                          -1453857185.0 / 822651844.0, 69997945.0 / 29380423.0)

RESCALE_HI = 1e50
RESCALE_LO = 1e-50
LOG_RESCALE = math.log(1e50)

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_MAXSTEPS = 2
STATUS_CAPACITY = 3


@njit(cache=True)
def evalfn(kind, par, xs, ys, t):
    if kind == 0:
        return par[0]
    if kind == 2:
        return par[0] * math.sin(par[1] * t + par[2]) + par[3]
    n = xs.shape[0]
    if t <= xs[0]:
        i = 0
    elif t >= xs[n - 1]:
        i = n - 2
    else:
        i = np.searchsorted(xs, t) - 1
        if i < 0:
            i = 0
        if i > n - 2:
            i = n - 2
    x0 = xs[i]
    x1 = xs[i + 1]
    return ys[i] + (ys[i + 1] - ys[i]) * (t - x0) / (x1 - x0)


@njit(cache=True)
def _rhs(tau, u, w, sgn, c, pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my):
    t = sgn * tau
    p = evalfn(pk, pp, px, py, t)
    q = evalfn(qk, qp, qx, qy, t)
    m = evalfn(mk, mp, mx, my, t)
    return w / p, (q - c * m) * u


@njit(cache=True)
def _dense(r, th):
    th1 = 1.0 - th
    return r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])))


@njit(cache=True)
def integrate(tau0, tau_end, cuts, u0, w0, sgn, c,
              pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my,
              rtol, atol, ttol, stop_first, record, capacity, max_steps):
    """Integrate from ``tau0`` to ``tau_end`` (> tau0), restarting at ``cuts``.

    Returns a tuple
    ``(status, zero_tau, w_at_zero, logscale_at_zero, count, u_end, w_end,
    logscale, umax, n_nodes, nodes, rcont)``.
    ``zero_tau`` is NaN when no sign change of ``u`` was found.  ``umax`` is the
    running max of ``|u|`` in the same (rescaled) units as ``u_end``, measured
    relative to ``logscale``.
    """
    nodes = np.empty((capacity if record else 1, 4))
    rcont = np.empty((capacity if record else 1, 5, 2))
    u = u0
    w = w0
    logscale = 0.0
    umax = abs(u)
    count = 0
    zero_tau = np.nan
    w_zero = np.nan
    ls_zero = 0.0
    n_nodes = 0
    if record:
        nodes[0, 0] = tau0
        nodes[0, 1] = u
        nodes[0, 2] = w
        nodes[0, 3] = logscale
        n_nodes = 1
    # sign of u just after the start: a zero start takes the sign of u'
    if u != 0.0:
        prev_sign = 1.0 if u > 0.0 else -1.0
    else:
        prev_sign = 1.0 if w > 0.0 else -1.0
    steps = 0
    r = np.empty((5, 2))
    nseg = cuts.shape[0] + 1
    h = 0.0
    for seg in range(nseg):
        a_seg = tau0 if seg == 0 else cuts[seg - 1]
        b_seg = tau_end if seg == nseg - 1 else cuts[seg]
        if b_seg <= a_seg:
            continue
        tau = a_seg
        k1u, k1w = _rhs(tau, u, w, sgn, c, pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my)
        # initial step guess (Hairer-Wanner)
        sku = atol + rtol * abs(u)
        skw = atol + rtol * abs(w)
        d0 = math.sqrt(0.5 * ((u / sku) ** 2 + (w / skw) ** 2))
        d1 = math.sqrt(0.5 * ((k1u / sku) ** 2 + (k1w / skw) ** 2))
        if d0 < 1e-5 or d1 < 1e-5:
            h0 = 1e-6
        else:
            h0 = 0.01 * d0 / d1
        h0 = min(h0, b_seg - a_seg)
        eu = u + h0 * k1u
        ew = w + h0 * k1w
        f2u, f2w = _rhs(tau + h0, eu, ew, sgn, c, pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my)
        d2 = math.sqrt(0.5 * (((f2u - k1u) / sku) ** 2 + ((f2w - k1w) / skw) ** 2)) / h0
        dm = max(d1, d2)
        if dm <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / dm) ** 0.2
        h = min(100.0 * h0, h1, b_seg - a_seg)
        last = False
        while True:
            if steps >= max_steps:
                return (STATUS_MAXSTEPS, zero_tau, w_zero, ls_zero, count, u, w,
                        logscale, umax, n_nodes, nodes, rcont)
            if tau + h >= b_seg or (b_seg - (tau + h)) < 1e-14 * (abs(b_seg) + 1.0):
                h = b_seg - tau
                last = True
            else:
                last = False
            k2u, k2w = _rhs(tau + C2 * h, u + h * A21 * k1u, w + h * A21 * k1w,
                            sgn, c, pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my)
            k3u, k3w = _rhs(tau + C3 * h, u + h * (A31 * k1u + A32 * k2u),
                            w + h * (A31 * k1w + A32 * k2w),
                            sgn, c, pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my)
            k4u, k4w = _rhs(tau + C4 * h, u + h * (A41 * k1u + A42 * k2u + A43 * k3u),
                            w + h * (A41 * k1w + A42 * k2w + A43 * k3w),
                            sgn, c, pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my)
            k5u, k5w = _rhs(tau + C5 * h,
                            u + h * (A51 * k1u + A52 * k2u + A53 * k3u + A54 * k4u),
                            w + h * (A51 * k1w + A52 * k2w + A53 * k3w + A54 * k4w),
                            sgn, c, pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my)
            k6u, k6w = _rhs(tau + h,
                            u + h * (A61 * k1u + A62 * k2u + A63 * k3u + A64 * k4u + A65 * k5u),
                            w + h * (A61 * k1w + A62 * k2w + A63 * k3w + A64 * k4w + A65 * k5w),
                            sgn, c, pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my)
            un = u + h * (A71 * k1u + A73 * k3u + A74 * k4u + A75 * k5u + A76 * k6u)
            wn = w + h * (A71 * k1w + A73 * k3w + A74 * k4w + A75 * k5w + A76 * k6w)
            k7u, k7w = _rhs(tau + h, un, wn, sgn, c, pk, pp, px, py, qk, qp, qx, qy, mk, mp, mx, my)
            steps += 1
            if not (math.isfinite(un) and math.isfinite(wn)):
                return (STATUS_NONFINITE, zero_tau, w_zero, ls_zero, count, u, w,
                        logscale, umax, n_nodes, nodes, rcont)
            erru = h * (E1 * k1u + E3 * k3u + E4 * k4u + E5 * k5u + E6 * k6u + E7 * k7u)
            errw = h * (E1 * k1w + E3 * k3w + E4 * k4w + E5 * k5w + E6 * k6w + E7 * k7w)
            sku = atol + rtol * max(abs(u), abs(un))
            skw = atol + rtol * max(abs(w), abs(wn))
            err = math.sqrt(0.5 * ((erru / sku) ** 2 + (errw / skw) ** 2))
            if err > 1.0:
                h = h * max(0.2, 0.9 * err ** -0.2)
                continue
            # accepted step: build dense output
            r[0, 0] = u
            r[0, 1] = w
            r[1, 0] = un - u
            r[1, 1] = wn - w
            r[2, 0] = h * k1u - r[1, 0]
            r[2, 1] = h * k1w - r[1, 1]
            r[3, 0] = r[1, 0] - h * k7u - r[2, 0]
            r[3, 1] = r[1, 1] - h * k7w - r[2, 1]
            r[4, 0] = h * (D1 * k1u + D3 * k3u + D4 * k4u + D5 * k5u + D6 * k6u + D7 * k7u)
            r[4, 1] = h * (D1 * k1w + D3 * k3w + D4 * k4w + D5 * k5w + D6 * k6w + D7 * k7w)
            tau_new = b_seg if last else tau + h
            # zero detection on u
            if un == 0.0 or (un > 0.0) != (prev_sign > 0.0):
                if un == 0.0:
                    tz = tau_new
                else:
                    lo = 0.0
                    hi = 1.0
                    while (hi - lo) * h > ttol:
                        mid = 0.5 * (lo + hi)
                        um = _dense(r[:, 0], mid)
                        if (um > 0.0) == (prev_sign > 0.0) and um != 0.0:
                            lo = mid
                        else:
                            hi = mid
                    tz = tau + 0.5 * (lo + hi) * h
                count += 1
                if count == 1:
                    zero_tau = tz
                    th = (tz - tau) / h
                    w_zero = _dense(r[:, 1], th)
                    ls_zero = logscale
                prev_sign = -prev_sign
                if un == 0.0:
                    # continue with the sign u' points to
                    prev_sign = 1.0 if wn > 0.0 else -1.0
            if record:
                if n_nodes >= capacity:
                    return (STATUS_CAPACITY, zero_tau, w_zero, ls_zero, count, un, wn,
                            logscale, umax, n_nodes, nodes, rcont)
                for i in range(5):
                    rcont[n_nodes - 1, i, 0] = r[i, 0]
                    rcont[n_nodes - 1, i, 1] = r[i, 1]
                nodes[n_nodes, 0] = tau_new
                nodes[n_nodes, 1] = un
                nodes[n_nodes, 2] = wn
                nodes[n_nodes, 3] = logscale
                n_nodes += 1
            au = abs(un)
            if au > umax:
                umax = au
            tau = tau_new
            u = un
            w = wn
            k1u = k7u
            k1w = k7w
            if stop_first and count >= 1:
                return (STATUS_OK, zero_tau, w_zero, ls_zero, count, u, w,
                        logscale, umax, n_nodes, nodes, rcont)
            big = max(abs(u), abs(w))
            if big > RESCALE_HI:
                u /= RESCALE_HI
                w /= RESCALE_HI
                k1u /= RESCALE_HI
                k1w /= RESCALE_HI
                umax /= RESCALE_HI
                logscale += LOG_RESCALE
            elif big < RESCALE_LO:
                u *= RESCALE_HI
                w *= RESCALE_HI
                k1u *= RESCALE_HI
                k1w *= RESCALE_HI
                umax = min(umax * RESCALE_HI, 1e300)
                logscale -= LOG_RESCALE
            if last:
                break
            fac = 0.9 * err ** -0.2 if err > 0.0 else 10.0
            fac = min(10.0, max(0.2, fac))
            h = h * fac
    return (STATUS_OK, zero_tau, w_zero, ls_zero, count, u, w,
            logscale, umax, n_nodes, nodes, rcont)

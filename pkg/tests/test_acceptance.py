"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed
and repeated in the terminal summary."""
import json
import math

import numpy as np

from conftest import ACCEPTANCE
from test_zerofn import RNG_SEED, _random_pair, _sign_changing
from fucik.cli import PRESETS, cmd_report, load_config
from fucik.eigen import eigenvalues
from fucik.sl_core import PiecewiseFn, SLProblem
from fucik.spectrum import (QUADRANTS, CurveId, asymptotes, gap_constants, residual, solve_b,
                            trace_curve)
from fucik.zerofn import alpha_right, compare_first_zeros, phi, psi1, psi2, sign_profile


def record(num, ok, detail):
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE[num] = line
    print(line)
    assert ok, line


def test_criterion_01_closed_form_eigenvalues(const):
    evs = eigenvalues(const, "m", "positive", 5)
    err = max(abs(ev.value - (k - 1) ** 2) for k, ev in enumerate(evs, start=1))
    record(1, err <= 1e-8, f"lambda_k = (k-1)^2, k=1..5, max error {err:.2e} (tol 1e-8)")


def test_criterion_02_closed_form_zero_functions(const):
    err = 0.0
    for a in (0.25, 1.0, 4.0, 100.0):
        r = math.pi / (2 * math.sqrt(a))
        err = max(err, abs(psi1(const, "m", a) - r), abs(psi2(const, "m", a) - (math.pi - r)))
        for s in (0.0, 0.3, 1.0):
            want = s + 2 * r
            got = phi(const, "m", a, s)
            if want <= math.pi:
                err = max(err, abs(got - want))
            elif got != math.inf:
                err = math.inf
    record(2, err <= 1e-9, f"psi1, psi2, phi at a in {{0.25, 1, 4, 100}}, max error {err:.2e} (tol 1e-9)")


def test_criterion_03_first_curve(const):
    err = 0.0
    for a in (0.5, 1.0, 2.0, 4.0, 25.0):
        b = solve_b(const, a, CurveId(1, "<"), "++")
        err = max(err, abs(b - 1 / (4 * (1 - 1 / (2 * math.sqrt(a))) ** 2)))
    diag = max(abs(residual(const, 1.0, 1.0, CurveId(1, es))) for es in "><")
    record(3, err <= 1e-7 and diag <= 1e-9,
           f"C1< closed form max error {err:.2e} (tol 1e-7); |residual(1,1)| {diag:.2e} (tol 1e-9)")


def test_criterion_04_count_law(report_text):
    want = {"sine_balanced": 1, "zigzag_N2": 3, "zigzag_N3": 5}
    got = {}
    for name in want:
        doc = json.loads(report_text(name))
        assert doc["config"]["k_max"] == 8
        got[name] = (doc["quadrants"]["+-"]["count"], doc["quadrants"]["-+"]["count"])
    ok = all(got[n] == (c, c) for n, c in want.items())
    detail = ", ".join(f"{n} (+-, -+) = {got[n]} want {want[n]}" for n in want)
    record(4, ok, detail)


def test_criterion_05_asymptotes(const, presets):
    v, h = asymptotes(const, "++", ">")
    const_err = max(abs(v - 0.25), abs(h - 0.25))
    ok = const_err <= 1e-8
    parts = [f"alpha1 = beta1 = 1/4 error {const_err:.2e} (tol 1e-8)"]
    for name in PRESETS:
        prob = presets[name]
        _, beta = asymptotes(prob, "++", ">")
        bs = [solve_b(prob, a, CurveId(1, ">"), "++") for a in (1e2, 1e3, 1e4)]
        d = [b - beta for b in bs]
        good = bs[0] > bs[1] > bs[2] and all(x > 0 for x in d) and d[2] < d[0] / 10
        ok = ok and good
        parts.append(f"{name} ratio {d[0] / d[2]:.2f} {'ok' if good else 'BELOW 10'}")
    record(5, ok, "; ".join(parts))


def _strip_ok(s, lam_pos, lam_neg, eps):
    for x in (s.a, s.b):
        if x > 0 and not x > lam_pos + eps:
            return False
        if x < 0 and not x < lam_neg - eps:
            return False
    return True


def test_criterion_06_gap(presets):
    ok, parts, violations, n_samples = True, [], 0, 0
    for name in PRESETS:
        prob = presets[name]
        g = gap_constants(prob)
        ok = ok and g.epsilon > 0
        parts.append(f"{name} eps {g.epsilon:.4g}")
        lam_pos = g.lambda_pos if g.lambda_pos is not None else math.inf
        lam_neg = g.lambda_neg if g.lambda_neg is not None else -math.inf
        for quad in QUADRANTS:
            sa = 1 if quad[0] == "+" else -1
            for k in (1, 2):
                for es in "><":
                    curve = trace_curve(prob, CurveId(k, es), quad, sa * np.geomspace(0.05, 500, 8))
                    for s in curve.samples:
                        n_samples += 1
                        violations += not _strip_ok(s, lam_pos, lam_neg, g.epsilon)
    eps_c = gap_constants(presets["neumann_constant"]).epsilon
    ok = ok and violations == 0 and abs(eps_c - 0.25) <= 1e-8
    record(6, ok, f"{'; '.join(parts)}; {violations} strip violations in {n_samples} samples; "
                  f"constant eps error {abs(eps_c - 0.25):.2e} (tol 1e-8)")


def test_criterion_07_comparison_suite():
    rng = np.random.default_rng(RNG_SEED)
    done = strict = bad = bad_strict = 0
    while done < 200:
        p1, p2 = _random_pair(rng)
        if not math.isfinite(psi1(p1, "m", 1.0)):
            continue
        w = compare_first_zeros(p1, p2)
        done += 1
        bad += not w.ordered
        if w.strict_hypothesis:
            strict += 1
            bad_strict += not w.strictly_ordered
    record(7, bad == 0 and bad_strict == 0,
           f"{done} pairs, z2 > z1 in {bad}; {strict} strict pairs, z2 >= z1 in {bad_strict}")


def test_criterion_08_monotonicity_and_limits():
    fails = []
    grid = np.geomspace(1e-2, 1e3, 60)
    for i, prob in enumerate(_sign_changing()):
        z = np.array([psi1(prob, "m", a) for a in grid])
        fin = np.isfinite(z)
        if not (np.all(np.diff(fin.astype(int)) >= 0) and np.all(np.diff(z[fin]) < 0)):
            fails.append(f"monotone[{i}]")
        alpha = alpha_right(sign_profile(prob, "m"), prob.t1, ">")
        for a in np.geomspace(0.05, 300, 25):
            zz = psi1(prob, "m", a)
            if math.isfinite(zz):
                if not zz > alpha:
                    fails.append(f"above-alpha[{i}]")
                f = phi(prob, "m", a, prob.t1)
                if math.isfinite(f) and not zz < f:
                    fails.append(f"below-phi[{i}]")
    rng = np.random.default_rng(RNG_SEED + 1)
    checked = 0
    while checked < 50:
        length = rng.uniform(1.0, 4.0)
        xs = np.linspace(0, length, 4)
        p = PiecewiseFn.pwlinear(list(zip(xs, rng.uniform(0.4, 2.0, 4))))
        q = PiecewiseFn.pwlinear(list(zip(xs, rng.uniform(0.0, 0.5, 4))))
        m = PiecewiseFn.pwlinear(list(zip(xs, rng.uniform(-1.0, 3.0, 4))))
        try:
            prob = SLProblem(0.0, length, p, q, m, m)
        except ValueError:
            continue
        mmax = m.sample_extrema(0.0, length)[1]
        if mmax <= 0:
            continue
        a = float(rng.uniform(0.05, 60.0))
        big_r = math.pi * math.sqrt(prob.p_min / (a * mmax))
        zz = psi1(prob, "m", a)
        if math.isfinite(zz) and zz < prob.t1 + big_r / 2 - 1e-10 * length:
            fails.append("half-period-bound")
        checked += 1
    record(8, not fails, f"psi1 monotone, psi1 > alpha and psi1 < phi(t1), half-period bound on {checked} (a, R) "
                         f"pairs; failures: {fails or 'none'}")


def test_criterion_09_curve_ordering(presets):
    prob = presets["sine_balanced"]
    grid = np.geomspace(10, 1000, 8)
    wrong = total = 0
    for es in "><":
        for a in grid:
            bs = [solve_b(prob, a, CurveId(k, es), "++") for k in (1, 2, 3, 4)]
            for k in range(3):
                total += 1
                wrong += not bs[k] > bs[k + 1]
    record(9, wrong == 0, f"b(C_k) > b(C_k+1) at 8 shared a, k=1..3: violated in {wrong}/{total}")


def test_criterion_10_determinism():
    cfg = load_config("sine_balanced")
    first, second = cmd_report(cfg), cmd_report(cfg)
    record(10, first == second, f"two report runs byte-identical ({len(first)} bytes)")

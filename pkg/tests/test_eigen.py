import math

import pytest

from fucik.eigen import (BranchEmpty, eigenvalues, neumann_miss, oscillation_index, principal,
                         zero_is_principal)
from fucik.sl_core import PiecewiseFn, SLProblem, Tolerances

# scipy DOP853 + brentq on v'(2 pi), see the ledger for the script
SINE_EIG = (2.9645163779305124, 9.267105143997979)


def test_constant_eigenvalues(const):
    evs = eigenvalues(const, "m", "positive", 5)
    for k, ev in enumerate(evs, start=1):
        assert ev.index == k
        assert ev.value == pytest.approx((k - 1) ** 2, abs=1e-8)
        assert ev.interior_zeros == k - 1
        assert ev.miss_residual <= 1e-6
        assert not ev.double
    assert all(x.value < y.value for x, y in zip(evs, evs[1:]))


def test_negative_branch_empty(const):
    with pytest.raises(BranchEmpty):
        eigenvalues(const, "m", "negative", 1)
    assert principal(const, "m", "negative") is None


def test_neumann_miss_examples(const, presets):
    miss, zeros = neumann_miss(const, "m", 1.0)
    assert abs(miss) < 1e-9 and zeros == 1
    for prob in presets.values():
        miss, zeros = neumann_miss(prob, "m", 0.0)
        assert miss == 0.0 and zeros == 0
    miss, _ = neumann_miss(const, "m", 2.0)
    # v = cos(sqrt2 t): v'(pi) = -sqrt2 sin(sqrt2 pi)
    assert miss == pytest.approx(-math.sqrt(2) * math.sin(math.sqrt(2) * math.pi), abs=1e-9)
    assert miss != 0.0


def test_oscillation_index_counts_half_turns(const):
    assert oscillation_index(const, "m", 0.01) == 1
    assert oscillation_index(const, "m", 0.5) == 2
    assert oscillation_index(const, "m", 2.0) == 3
    assert oscillation_index(const, "m", 5.0) == 5


def test_sine_principal_trichotomy(presets):
    bal = presets["sine_balanced"]
    assert zero_is_principal(bal, "m", "positive") and zero_is_principal(bal, "m", "negative")
    assert principal(bal, "m", "positive") == 0.0
    assert principal(bal, "m", "negative") == 0.0
    off = presets["sine_offset"]
    assert principal(off, "m", "positive") == 0.0
    assert principal(off, "m", "negative") < 0.0


def test_sine_eigenvalues_against_oracle(presets):
    prob = presets["sine_balanced"]
    evs = eigenvalues(prob, "m", "positive", 3)
    assert [e.value for e in evs[1:]] == pytest.approx(SINE_EIG, abs=1e-8)
    neg = eigenvalues(prob, "m", "negative", 3)
    # t -> 2 pi - t maps sin to -sin, so the branches mirror each other
    assert [e.value for e in neg] == pytest.approx([-e.value for e in evs], abs=1e-8)
    assert [e.index for e in neg] == [-1, -2, -3]


def test_damped_sign_changing_has_no_zero_eigenvalue():
    prob = SLProblem.single(0, 2 * math.pi, PiecewiseFn.sine(1.0, 1.0), q=PiecewiseFn.constant(0.5))
    assert not zero_is_principal(prob, "m", "positive")
    lam_pos = principal(prob, "m", "positive")
    lam_neg = principal(prob, "m", "negative")
    assert lam_neg < -1e-9 and lam_pos > 1e-9


def test_halved_tolerance_invariance(presets):
    for name in ("sine_offset", "zigzag_N3"):
        prob = presets[name]
        a = eigenvalues(prob, "m", "positive", 3)
        b = eigenvalues(prob, "m", "positive", 3, Tolerances().halved())
        for x, y in zip(a, b):
            assert abs(x.value - y.value) <= 10 * 1e-10 * (1 + abs(x.value))


def test_interior_zeros_match_index(presets):
    for prob in presets.values():
        for br in ("positive", "negative"):
            if principal(prob, "m", br) is None:
                continue
            for ev in eigenvalues(prob, "m", br, 4):
                assert ev.interior_zeros == abs(ev.index) - 1

import math

import numpy as np
import pytest

from lyapspec.app.characteristic import (
    g_bar,
    g_char,
    g_sign,
    h_direct,
    h_expsum,
    q_coeff,
    sample_characteristic,
    second_deriv_l,
)
from lyapspec.app.expsum import evaluate, isolate_roots, log_term_scale
from lyapspec.app.plmap import new_map
from lyapspec.app.spectrum import alpha, l_param, t_of_alpha
from lyapspec.core.errors import DegenerateSpectrum, SingleBranch


def expanded_q(a, b, c):
    return (2 * (a ** 3 + b ** 3 + c ** 3) + 12 * a * b * c
            - 3 * (a * b ** 2 + a ** 2 * b + a ** 2 * c + a * c ** 2 + b * c ** 2 + b ** 2 * c))


def test_q_coeff_special_values():
    assert q_coeff(1.5, 1.5, 1.5) == 0.0
    assert q_coeff(1.0, 1.0, 2.0) == pytest.approx(2.0)
    assert q_coeff(1.0, 2.0, 2.0) == pytest.approx(-2.0)


@pytest.mark.parametrize("lams", [(0.3, 1.1, 4.0), (1.0, 11.0, 121.0), (2.0, 2.5, 2.6)])
def test_q_coeff_matches_expanded_cubic(lams):
    assert q_coeff(*lams) == pytest.approx(expanded_q(*lams), rel=1e-12)


def test_g_zeros_for_t_minus(t_minus):
    for t in (-0.3378, -0.1706):
        assert g_char(t_minus, t - 1e-3) * g_char(t_minus, t + 1e-3) < 0


def test_g_terminal_concavity(t_minus, t_plus):
    for pl_map in (t_minus, t_plus):
        assert g_char(pl_map, -60.0) < -10
        assert g_char(pl_map, 60.0) < -10


def test_g_asymptotic_limit():
    pl_map = new_map(log_slopes=[math.log(1.2), math.log(19), math.log(20), 1e4])
    assert g_char(pl_map, 0.0) == pytest.approx(2 * math.log(4) - 1 / 3, abs=1e-2)


def test_degenerate_map_has_no_characteristic():
    pl_map = new_map(slopes=[3, 3, 3])
    with pytest.raises(DegenerateSpectrum):
        g_char(pl_map, 0.0)
    with pytest.raises(DegenerateSpectrum):
        second_deriv_l(pl_map, 0.0)
    # F''F - F'^2 = 0 leaves -F'^2
    q_val = g_bar(pl_map, 0.5)
    f_prime = 3 * math.log(3) * math.exp(math.log(3) * 0.5)
    assert q_val == pytest.approx(-f_prime ** 2)
    assert h_direct(pl_map, 0.2)[0] == 0


def test_h_expsum_two_branches():
    pl_map = new_map(slopes=[2, 8])
    h = h_expsum(pl_map)
    l1, l2 = pl_map.log_slopes
    assert h.bases == pytest.approx((2 * l1 + l2, l1 + 2 * l2))
    assert h.coeffs == pytest.approx(((l2 - l1) ** 3, -(l2 - l1) ** 3))
    roots = isolate_roots(h)
    assert len(roots) == 1
    assert roots[0].refined_root == pytest.approx(0.0, abs=1e-12)


def test_h_expsum_two_slopes_with_multiplicities():
    pl_map = new_map(slopes=[2, 2, 8, 8, 8])
    h = h_expsum(pl_map)
    l1, l2 = pl_map.log_slopes[0], pl_map.log_slopes[-1]
    n1, n2 = 2, 3
    scale = n1 * n2 * (l2 - l1) ** 3
    assert h.num_terms == 2
    assert h.coeffs == pytest.approx((scale * n1, -scale * n2))


def test_h_expsum_term_count_bound():
    pl_map = new_map(log_slopes=[0.3, 0.9, 1.7, 2.2, 4.1])
    n = pl_map.branch_count
    assert h_expsum(pl_map).num_terms <= 2 * math.comb(n, 2) + math.comb(n, 3)
    with pytest.raises(SingleBranch):
        h_expsum(new_map(slopes=[4.0]))


def test_h_direct_matches_expsum(t_minus_star):
    h = h_expsum(t_minus_star)
    for t in np.linspace(-3, 1, 41):
        sign, log_mag = h_direct(t_minus_star, t)
        from_sum = evaluate(h, t)
        direct_value = sign * math.exp(log_mag - log_term_scale(h, t))
        sum_value = from_sum.sign * math.exp(from_sum.log_magnitude - log_term_scale(h, t))
        assert direct_value == pytest.approx(sum_value, abs=1e-10)


def test_h_vanishes_at_zero_for_equal_two_branch():
    assert h_direct(new_map(slopes=[3, 5]), 0.0)[1] < -30


def test_g_bar_shares_sign_and_zeros(t_plus):
    for t in np.linspace(-2, 2, 81):
        assert math.copysign(1, g_bar(t_plus, t)) == math.copysign(1, g_char(t_plus, t))
    for t in (0.0881, 0.3289):
        assert g_bar(t_plus, t - 1e-3) * g_bar(t_plus, t + 1e-3) < 0


def test_sign_of_g_prime_is_sign_of_h(t_plus):
    step = 1e-5
    for t in np.linspace(-2, 2, 41):
        dg = g_char(t_plus, t + step) - g_char(t_plus, t - step)
        sign, log_mag = h_direct(t_plus, t)
        if abs(dg) > 1e-9:
            assert math.copysign(1, dg) == sign


def test_second_derivative_of_l(t_minus):
    for t in (-40.0, 40.0):
        assert second_deriv_l(t_minus, t) < 0
    assert second_deriv_l(t_minus, -0.34) * second_deriv_l(t_minus, -0.335) < 0


def test_second_derivative_sign_matches_finite_difference(t_plus):
    h = 1e-4
    for t in np.linspace(-1.5, 1.5, 31):
        if abs(g_char(t_plus, t)) <= 1e-6:
            continue
        a = alpha(t_plus, t)
        values = [l_param(t_plus, t_of_alpha(t_plus, a + k * h)) for k in (-1, 0, 1)]
        fd = values[0] - 2 * values[1] + values[2]
        if abs(fd) > 1e-10:
            assert math.copysign(1, fd) == math.copysign(1, second_deriv_l(t_plus, t))


def test_zero_band(t_minus):
    assert g_sign(t_minus, -60.0) == -1
    assert g_sign(t_minus, -0.25) == 1
    assert g_sign(t_minus, -0.25, zero_band=1e6) == 0


def test_sample_characteristic(t_plus):
    samples = sample_characteristic(t_plus, [-1.0, 0.2, 1.0])
    for s in samples:
        assert s.G == pytest.approx(g_char(t_plus, s.t))
        assert s.H_sign == h_direct(t_plus, s.t)[0]
        assert math.copysign(1, s.d2L_dalpha2) == math.copysign(1, s.G)

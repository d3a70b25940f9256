import math

import numpy as np
import pytest

from lyapspec.app.plmap import new_map
from lyapspec.app.spectrum import (
    alpha,
    alpha_prime,
    bowen_dimension,
    degenerate_spectrum,
    dl_dalpha,
    f_derivs,
    l_legendre,
    l_param,
    log_f,
    sample_spectrum,
    t_of_alpha,
    terminal_values,
)
from lyapspec.core.errors import AlphaOutOfDomain, DegenerateSpectrum


def test_scaled_quad_reconstructs_f(t_minus):
    for t in (-2.0, 0.0, 1.5):
        q = f_derivs(t_minus, t)
        direct = [math.fsum(lam ** k * math.exp(lam * t) for lam in t_minus.log_slopes) for k in range(4)]
        scale = math.exp(q.shift)
        assert [q.f0 * scale, q.f1 * scale, q.f2 * scale, q.f3 * scale] == pytest.approx(direct, rel=1e-12)
        assert q.spread == pytest.approx(q.f2 * q.f0 - q.f1 ** 2, rel=1e-9)
        assert q.skew == pytest.approx(q.f0 ** 2 * q.f3 + 2 * q.f1 ** 3 - 3 * q.f0 * q.f1 * q.f2, rel=1e-6, abs=1e-9)


def test_spread_matches_pairwise_identity(t_plus):
    lam = t_plus.log_slopes
    for t in (-1.0, 0.2, 3.0):
        q = f_derivs(t_plus, t)
        pairwise = math.fsum(
            math.exp((lam[i] + lam[j]) * t - 2 * q.shift) * (lam[i] - lam[j]) ** 2
            for i in range(len(lam)) for j in range(i + 1, len(lam))
        )
        assert q.spread == pytest.approx(pairwise, rel=1e-10)
        assert q.spread > 0


def test_alpha_is_increasing_inside_domain(t_minus):
    lo, hi = t_minus.spectrum_domain()
    values = [alpha(t_minus, t) for t in np.linspace(-5, 20, 251)]
    assert all(lo < a < hi for a in values[1:-1])
    assert all(b > a for a, b in zip(values, values[1:]))
    assert alpha(t_minus, 0.0) == pytest.approx(sum(t_minus.log_slopes) / 3)


def test_alpha_prime_matches_finite_difference(t_plus):
    h = 1e-6
    for t in (-1.0, 0.1, 0.9):
        fd = (alpha(t_plus, t + h) - alpha(t_plus, t - h)) / (2 * h)
        assert alpha_prime(t_plus, t) == pytest.approx(fd, rel=1e-6)


def test_large_log_slope_does_not_overflow(t_minus_star):
    for t in (-50.0, 10.0, 60.0):
        assert math.isfinite(alpha(t_minus_star, t))
        assert math.isfinite(l_param(t_minus_star, t))
    assert alpha(t_minus_star, 10.0) == pytest.approx(100.0)


def test_parametric_and_legendre_agree(t_minus):
    for t in (-2.0, -0.5, 0.0, 0.4, 1.5):
        a = alpha(t_minus, t)
        assert l_param(t_minus, t) == pytest.approx(l_legendre(t_minus, a), abs=1e-9)


@pytest.mark.parametrize("log_slopes", [[0.39576, 3.42799], [1.0, 2.0], [0.5, 0.5, 4.0, 4.0]])
def test_legendre_at_alpha_of_zero(log_slopes):
    # the objective is symmetric about u = 0 for equal multiplicities at the two ends
    pl_map = new_map(log_slopes=log_slopes)
    n = pl_map.branch_count
    expected = n * math.log(n) / math.fsum(log_slopes)
    assert l_legendre(pl_map, alpha(pl_map, 0.0)) == pytest.approx(expected, abs=1e-9)


def test_t_of_alpha_inverts_alpha(t_plus):
    lo, hi = t_plus.spectrum_domain()
    for a in np.linspace(lo, hi, 12)[1:-1]:
        t = t_of_alpha(t_plus, a)
        assert alpha(t_plus, t) == pytest.approx(a, abs=1e-12)


@pytest.mark.parametrize("which", [0, -1])
def test_t_of_alpha_rejects_domain_ends(t_plus, which):
    with pytest.raises(AlphaOutOfDomain):
        t_of_alpha(t_plus, t_plus.log_slopes[which])


def test_bowen_root_is_spectrum_maximum(t_minus):
    s, a_max = bowen_dimension(t_minus)
    assert math.fsum(x ** -s for x in t_minus.slopes()) == pytest.approx(1.0, abs=1e-12)
    assert log_f(t_minus, -s) == pytest.approx(0.0, abs=1e-12)
    assert l_param(t_minus, -s) == pytest.approx(s, abs=1e-12)
    assert dl_dalpha(t_minus, -s) == pytest.approx(0.0, abs=1e-10)
    assert a_max == pytest.approx(alpha(t_minus, -s))
    for t in (-s - 0.5, -s + 0.5):
        assert l_param(t_minus, t) < s


def test_bowen_single_branch():
    assert bowen_dimension(new_map(slopes=[5.0])) == (0.0, math.log(5.0))


def test_terminal_values(t_minus):
    left, right = terminal_values(t_minus)
    assert (left, right) == (0.0, 0.0)
    assert l_param(t_minus, -40.0) == pytest.approx(left, abs=1e-5)
    assert l_param(t_minus, 400.0) == pytest.approx(right, abs=1e-5)


def test_degenerate_map_gives_single_point():
    pl_map = new_map(slopes=[3.0, 3.0])
    assert alpha(pl_map, 1.7) == pytest.approx(math.log(3.0))
    assert l_param(pl_map, -0.4) == pytest.approx(math.log(2.0) / math.log(3.0))
    point = degenerate_spectrum(pl_map)
    assert (point.alpha, point.L) == pytest.approx((math.log(3.0), math.log(2.0) / math.log(3.0)))
    with pytest.raises(DegenerateSpectrum):
        sample_spectrum(pl_map, [0.0])
    with pytest.raises(DegenerateSpectrum):
        t_of_alpha(pl_map, math.log(3.0))


def test_sample_spectrum_rows(t_plus):
    samples = sample_spectrum(t_plus, [-1.0, 0.0, 1.0])
    assert [s.t for s in samples] == [-1.0, 0.0, 1.0]
    for s in samples:
        assert s.alpha == pytest.approx(alpha(t_plus, s.t))
        assert s.L == pytest.approx(l_param(t_plus, s.t))
        assert s.dL_dalpha == pytest.approx(dl_dalpha(t_plus, s.t))
        assert len(s.to_row()) == 4


def test_dl_dalpha_matches_finite_difference(t_plus):
    for t in (-0.8, 0.3):
        h = 1e-6
        dl = l_param(t_plus, t + h) - l_param(t_plus, t - h)
        da = alpha(t_plus, t + h) - alpha(t_plus, t - h)
        assert dl_dalpha(t_plus, t) == pytest.approx(dl / da, rel=1e-5)

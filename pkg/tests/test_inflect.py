import math

import numpy as np
import pytest
from scipy.optimize import brentq

from lyapspec.app.characteristic import g_char
from lyapspec.app.expsum import RootKind
from lyapspec.app.inflect import (
    QSign,
    check_bounds,
    classify_milestones,
    convexity_profile,
    extremal_count_bounds,
    find_inflections,
    milestone_concavity,
    negative_param_pattern,
    q_sign_class,
    q_sign_consistency,
    separation_condition,
    two_slope_tstar,
)
from lyapspec.app.plmap import new_map
from lyapspec.app.spectrum import alpha
from lyapspec.core.errors import DegenerateSpectrum, NotApplicable


def bounds_by_name(report):
    return {b.name: b for b in report.bounds}


def test_t_minus(t_minus):
    report = find_inflections(t_minus)
    assert report.transversal_count == 2
    assert report.tangential_count == 0
    assert report.t_values == pytest.approx([-0.3378, -0.1706], abs=5e-4)
    assert report.alpha_values == pytest.approx([1.4038, 1.7272], abs=5e-4)
    assert all(t < 0 for t in report.t_values)


def test_t_plus(t_plus):
    report = find_inflections(t_plus)
    assert report.transversal_count == 2
    assert report.t_values == pytest.approx([0.0881, 0.3289], abs=5e-4)
    assert report.alpha_values == pytest.approx([2.4910, 3.0781], abs=5e-4)
    assert not negative_param_pattern(report)


def test_t_minus_star(t_minus_star):
    report = find_inflections(t_minus_star)
    assert report.transversal_count == 4
    assert report.t_values == pytest.approx([-0.3378, -0.1703, -0.1147, 0.0293], abs=5e-4)
    assert report.alpha_values == pytest.approx([1.4038, 1.7278, 1.8338, 85.7605], rel=1e-3)
    assert negative_param_pattern(report)
    assert report.predicates["negative_param_pattern"] is True


def test_points_are_certified(t_minus_star):
    report = find_inflections(t_minus_star)
    lo_dom, hi_dom = t_minus_star.spectrum_domain()
    for point in report.inflections:
        lo, hi = point.bracket
        assert point.kind is RootKind.TRANSVERSAL
        assert hi - lo <= 1e-12
        assert g_char(t_minus_star, lo) * g_char(t_minus_star, hi) <= 0
        assert lo_dom < point.alpha < hi_dom
        assert point.alpha == pytest.approx(alpha(t_minus_star, point.t))


@pytest.mark.parametrize("slopes", [[2, 4], [1.2, 30]])
def test_matches_dense_scan(slopes):
    pl_map = new_map(slopes=slopes)
    report = find_inflections(pl_map)
    ts = np.linspace(-50, 50, 100001)
    values = np.array([g_char(pl_map, t) for t in ts])
    cells = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
    roots = [brentq(lambda t: g_char(pl_map, t), ts[k], ts[k + 1], xtol=1e-13) for k in cells]
    assert report.transversal_count == len(roots)
    assert report.t_values == pytest.approx(roots, abs=1e-9)


def test_two_slope_tstar_between_inflections():
    pl_map = new_map(slopes=[1.2, 30])
    report = find_inflections(pl_map)
    assert two_slope_tstar(pl_map, report) == 0.0
    t1, t2 = report.t_values
    assert t1 < 0 < t2
    a1, a2 = report.alpha_values
    assert a1 < sum(pl_map.log_slopes) / 2 < a2


def test_two_equal_slopes_close_together_have_no_inflections():
    report = find_inflections(new_map(slopes=[2, 4]))
    assert report.transversal_count == 0
    assert [p.sign for p in report.convexity_profile] == [-1]


def test_two_slope_tstar_formula():
    pl_map = new_map(slopes=[2, 8, 8])
    assert two_slope_tstar(pl_map) == pytest.approx(-0.5)
    with pytest.raises(NotApplicable):
        two_slope_tstar(new_map(slopes=[2, 3, 5]))


def test_degenerate_map_is_rejected():
    with pytest.raises(DegenerateSpectrum):
        find_inflections(new_map(slopes=[5, 5]))


def test_bounds_for_three_branches(t_minus):
    report = find_inflections(t_minus)
    bounds = bounds_by_name(report)
    assert bounds["general"].bound == 7
    assert bounds["three_branch"].bound == 2 and bounds["three_branch"].applies
    assert bounds["essential_general"].bound == 7
    assert not bounds["essential_two"].applies
    assert all(b.satisfied for b in report.bounds)
    assert check_bounds(report) == list(report.bounds)


def test_bounds_for_four_branches(t_minus_star):
    bounds = bounds_by_name(find_inflections(t_minus_star))
    assert bounds["general"].bound == 16
    assert bounds["general"].satisfied
    assert not bounds["three_branch"].applies


def test_bound_for_two_essential_slopes():
    report = find_inflections(new_map(slopes=[3, 3, 7, 7, 7]))
    bounds = bounds_by_name(report)
    assert bounds["essential_two"].applies and bounds["essential_two"].bound == 2
    assert report.transversal_count <= 2
    assert report.predicates["t_star"] == pytest.approx(math.log(3 / 2) / (math.log(3) - math.log(7)))


def test_balanced_three_slope_bound():
    report = find_inflections(new_map(slopes=[2, 2, 5, 9, 9]))
    balanced = bounds_by_name(report)["essential_three_balanced"]
    assert balanced.applies and balanced.satisfied


def test_classify_milestones_t_minus(t_minus):
    report = classify_milestones(find_inflections(t_minus))
    assert [p.milestone_interval for p in report.inflections] == [(0, 1), (0, 1)]
    assert all(p.coincides_with is None for p in report.inflections)


def test_classify_milestones_coincidence():
    pl_map = new_map(slopes=[1.2, 29.54276, 200])
    report = classify_milestones(find_inflections(pl_map), coincide_tol=1e-3)
    second = report.inflections[1]
    assert second.alpha == pytest.approx(math.log(29.54276), abs=1e-3)
    assert second.coincides_with == 1
    assert report.inflections[0].coincides_with is None


def test_q_sign_class():
    assert q_sign_class(new_map(log_slopes=[1, 11, 121])) is QSign.ALL_POSITIVE
    assert q_sign_class(new_map(log_slopes=[1, 1, 2])) is QSign.ALL_POSITIVE
    assert q_sign_class(new_map(log_slopes=[1, 2, 2])) is QSign.ALL_NEGATIVE
    assert q_sign_class(new_map(log_slopes=[1, 1, 2, 2])) is QSign.MIXED
    with pytest.raises(NotApplicable):
        q_sign_class(new_map(slopes=[2, 3]))


def test_q_sign_consistency_on_close_slopes():
    report = find_inflections(new_map(log_slopes=[1.0, 1.1, 1.3]))
    record = q_sign_consistency(report)
    assert record["consistent"]
    assert q_sign_consistency(find_inflections(new_map(slopes=[2, 3]))) is None


def test_separation_condition():
    pl_map = new_map(log_slopes=[0.1, 1.5, 20.0])
    assert separation_condition(pl_map)
    assert q_sign_class(pl_map) is QSign.ALL_POSITIVE
    report = find_inflections(pl_map)
    assert sum(1 for t in report.t_values if t <= 0) <= 1
    assert not separation_condition(new_map(log_slopes=[1.0, 5.0, 100.0]))


def test_convexity_profile(t_minus, t_minus_star):
    profile = convexity_profile(find_inflections(t_minus))
    assert [p.sign for p in profile] == [-1, 1, -1]
    assert profile[0].lo == -math.inf and profile[-1].hi == math.inf
    star = find_inflections(t_minus_star).convexity_profile
    assert [p.sign for p in star] == [-1, 1, -1, 1, -1]


def test_negative_param_pattern_needs_inflections(t_minus):
    report = find_inflections(t_minus)
    empty = type(report)(map=t_minus, inflections=())
    assert not negative_param_pattern(empty)
    assert not negative_param_pattern(report)


def test_milestone_concavity_terminals_are_concave(t_minus):
    rows = milestone_concavity(t_minus)
    assert rows[0]["concavity"] == "concave"
    assert rows[-1]["concavity"] == "concave"
    assert rows[1]["t"] is not None


def test_extremal_count_bounds():
    four = extremal_count_bounds(4)
    assert four["p_lower"] == 4 and four["p_upper"] == 16 and four["q_known"] == 4
    assert four["q_lower"] == pytest.approx(2.7, abs=0.3)
    n_star = four["q_lower"]
    assert n_star * (n_star - 1) * (n_star + 4) / 6 == pytest.approx(4)
    three = extremal_count_bounds(3)
    assert three["p_known"] == 2 and "q_lower" not in three


def test_report_serialises(t_minus):
    data = find_inflections(t_minus).to_dict()
    assert data["schema_version"] == 1
    assert data["transversal_count"] == 2
    assert data["convexity_profile"][0]["lo"] is None
    assert [b["name"] for b in data["bounds"]][0] == "general"

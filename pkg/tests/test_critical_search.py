import pytest

from concavity_bounds.core.bounds import CHAIN_TOLERANCE, pinsker_lower, renyi_lower_mixture, sandwiched_upper_mixture, audenaert_upper
from concavity_bounds.core.critical_search import (FOUND, HOLDS_FOR_ALL, LEFT_ENDPOINT, NONE, NONE_IN_RANGE,
                                                   CriticalParameterSearch, SearchSettings, bisect_monotone,
                                                   find_critical_params)
from concavity_bounds.core.errors import ConvergenceError, DegenerateProblem, DomainError
from concavity_bounds.core.states import MixtureProblem, from_bloch


def test_bisect_monotone_brackets_switch():
    bracket = bisect_monotone(lambda t: t >= 0.3, 0.0, 1.0, 1e-6)
    assert bracket.width <= 1e-6
    assert bracket.lower < 0.3 <= bracket.upper

    bracket = bisect_monotone(lambda t: t <= 0.7, 0.0, 1.0, 1e-6)
    assert bracket.lower <= 0.7 < bracket.upper


def test_bisect_monotone_errors():
    with pytest.raises(DomainError):
        bisect_monotone(lambda t: True, 0.0, 1.0, 1e-6)
    with pytest.raises(ConvergenceError):
        bisect_monotone(lambda t: t >= 0.3, 0.0, 1.0, 1e-6, max_iterations=3)


def test_orthogonal_states_hold_at_left_endpoint(orthogonal_problem):
    params = find_critical_params(orthogonal_problem)
    assert params.b_c == 0.5
    assert params.b_c_status == LEFT_ENDPOINT
    assert params.b_c_bracket is None
    # every sandwiched mixture equals log 2, which is the Audenaert bound here
    assert params.a_star_status == HOLDS_FOR_ALL


def test_appendix_a_brackets(appendix_a):
    params = find_critical_params(appendix_a, tolerance=1e-6)

    assert params.b_c_status == FOUND
    assert params.b_c_bracket.width <= 1e-6
    assert 0.85 < params.b_c < 0.9
    pinsker = pinsker_lower(appendix_a)
    assert renyi_lower_mixture(params.b_c_bracket.lower, appendix_a) < pinsker - CHAIN_TOLERANCE
    assert renyi_lower_mixture(params.b_c_bracket.upper, appendix_a) >= pinsker - CHAIN_TOLERANCE

    assert params.b_grid_monotone
    assert params.a_grid_monotone
    if params.a_star_status == FOUND:
        audenaert = audenaert_upper(appendix_a)
        assert params.a_star_bracket.width <= 1e-6
        assert sandwiched_upper_mixture(params.a_star_bracket.lower, appendix_a) <= audenaert + CHAIN_TOLERANCE
        assert sandwiched_upper_mixture(params.a_star_bracket.upper, appendix_a) > audenaert + CHAIN_TOLERANCE


def test_search_is_stable(appendix_a):
    first = find_critical_params(appendix_a).to_dict()
    second = find_critical_params(appendix_a).to_dict()
    assert first == second


def test_close_states_have_b_c():
    problem = MixtureProblem(0.4, from_bloch((0.0, 0.0, 0.5)), from_bloch((0.0, 0.0, 0.501)))
    params = find_critical_params(problem)
    assert params.b_c_status in (FOUND, LEFT_ENDPOINT)
    assert 0.5 <= params.b_c < 1.0


def test_degenerate_problem():
    rho = from_bloch((0.1, 0.2, 0.3))
    search = CriticalParameterSearch(MixtureProblem(0.3, rho, rho))
    is_valid, issues = search.validate_setup()
    assert not is_valid
    assert issues
    with pytest.raises(DegenerateProblem):
        search.search()


def test_progress_callback(appendix_a):
    calls = []
    search = CriticalParameterSearch(appendix_a, SearchSettings(grid_points=3))
    search.set_progress_callback(lambda name, step, width: calls.append((name, step, width)))
    params = search.search()

    assert len(params.b_grid) == 3
    assert any(name == "b" for name, _, _ in calls)
    widths = [w for name, _, w in calls if name == "b"]
    assert widths == sorted(widths, reverse=True)
    assert search.evaluation_count > 0


def test_to_dict_markers(orthogonal_problem):
    payload = find_critical_params(orthogonal_problem).to_dict()
    assert payload["b_c"] == 0.5
    assert payload["a_star"] == HOLDS_FOR_ALL
    assert payload["a_validity_interval"] == [1.0 + 1e-4, 64.0]
    assert payload["a_max"] == 64.0


@pytest.mark.parametrize("kwargs", [
    {"bracket_width": 0.0},
    {"b_upper": 1.0},
    {"a_lower": 1.0},
    {"a_lower": 80.0},
    {"grid_points": 1},
    {"max_iterations": 0},
])
def test_search_settings_validation(kwargs):
    with pytest.raises(DomainError):
        SearchSettings(**kwargs)


def test_markers_are_distinct():
    assert len({FOUND, HOLDS_FOR_ALL, LEFT_ENDPOINT, NONE, NONE_IN_RANGE}) == 5

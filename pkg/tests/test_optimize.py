import math

import numpy as np
import pytest

from qaoa_locality.errors import InputError, ResourceError
from qaoa_locality.optimize import (
    DEFAULT_BUDGET,
    SearchDomain,
    _TreeObjective,
    grid_search,
    optimize,
    refine,
)
from qaoa_locality.qaoa import CostModel, QaoaParams
from qaoa_locality.trees import tree_expectation

MC = CostModel.maxcut()
MIS3 = CostModel.mis(3)

D3_P1_OPT = 0.5 + 1.0 / (3.0 * math.sqrt(3.0))  # triangle-free closed form


def test_search_domain_periods():
    dom = SearchDomain.for_model(MC, 2)
    assert dom.gamma_period == 2 * math.pi and dom.beta_period == math.pi
    assert SearchDomain.for_model(MIS3, 1).gamma_period == 12 * math.pi
    with pytest.raises(InputError):
        SearchDomain.for_model(MC, -1)


def test_grid_fast_path_matches_direct_evaluation():
    """The last layer of the grid scan closes with reduced 4x4 algebra;
    every trace value must equal the plain simulation path."""
    for model, p, res in ((MC, 1, 6), (MIS3, 1, 6), (MC, 2, 3)):
        obj = _TreeObjective(3, p, model)
        result = grid_search(3, p, model, resolution=res, _objective=obj)
        assert len(result.trace) == res ** (2 * p)
        for gammas, betas, value in result.trace:
            assert abs(value - obj.value(gammas, betas)) < 1e-12


def test_grid_flat_landscape_breaks_ties_lexicographically():
    result = grid_search(2, 1, MC, resolution=2)
    values = [rec[2] for rec in result.trace]
    assert all(abs(v - 0.5) < 1e-12 for v in values)
    assert result.best_params == QaoaParams((0.0,), (0.0,))


def test_grid_contains_zero_angles():
    result = grid_search(3, 1, MC, resolution=2)
    assert result.best_value >= 0.5 - 1e-12


def test_grid_resolution_64_reaches_good_value():
    result = grid_search(3, 1, MC, resolution=64)
    assert result.best_value >= 0.69


def test_grid_budget_guardrail():
    with pytest.raises(ResourceError):
        grid_search(3, 2, MC, resolution=64, budget=DEFAULT_BUDGET)
    with pytest.raises(ResourceError):
        grid_search(3, 1, MC, resolution=64, budget=1000)
    with pytest.raises(InputError):
        grid_search(3, 1, MC, resolution=1)


def test_grid_p0_single_evaluation():
    result = grid_search(3, 0, MC, resolution=64)
    assert result.best_params.p == 0
    assert abs(result.best_value - 0.5) < 1e-12
    assert len(result.trace) == 1


def test_refine_tolerance_one_returns_start():
    start = QaoaParams((0.3,), (0.2,))
    result = refine(start, 3, 1, MC, tolerance=1.0)
    assert result.best_params == start
    assert result.refinement_iterations == 0
    assert result.converged


def test_refine_never_decreases():
    start = QaoaParams((3.7,), (2.7,))  # near the depth-1 optimum
    base = tree_expectation(3, 1, MC, start).value
    result = refine(start, 3, 1, MC, tolerance=1e-6)
    assert result.best_value >= base - 1e-15
    assert abs(result.best_value - D3_P1_OPT) < 1e-3


def test_refine_iteration_cap_flags_non_convergence():
    start = QaoaParams((0.3,), (0.2,))
    result = refine(start, 3, 1, MC, tolerance=1e-9, max_passes=2)
    assert not result.converged
    assert result.refinement_iterations == 2


def test_refine_validates_inputs():
    with pytest.raises(InputError):
        refine(QaoaParams((0.1,), (0.1,)), 3, 1, MC, tolerance=0.0)
    with pytest.raises(InputError):
        refine(QaoaParams((0.1,), (0.1,)), 3, 2, MC)


def test_optimize_depth1_known_values():
    result = optimize(3, 1, MC)
    assert abs(result.best_value - D3_P1_OPT) < 1e-9
    assert abs(optimize(2, 1, MC).best_value - 0.75) < 1e-9


def test_optimize_depth2_degree2_hits_five_sixths():
    # the degree-2 tree is a path, whose depth-p optimum follows the
    # ring progression (2p+1)/(2p+2): 3/4 at depth 1, 5/6 at depth 2
    result = optimize(2, 2, MC)
    assert abs(result.best_value - 5.0 / 6.0) < 1e-6


def test_optimize_monotone_in_depth():
    v0 = optimize(2, 0, MC).best_value
    v1 = optimize(2, 1, MC).best_value
    v2 = optimize(2, 2, MC).best_value
    assert v1 >= v0 - 1e-9
    assert v2 >= v1 - 1e-9


def test_optimize_zero_state_beats_zero_angles():
    for initial in ("plus", "zero"):
        base = tree_expectation(3, 1, MIS3, QaoaParams.zeros(1), initial).value
        result = optimize(3, 1, MIS3, initial)
        assert result.best_value >= base - 1e-12


def test_optimize_reported_value_reproducible():
    result = optimize(3, 1, MIS3)
    fresh = tree_expectation(3, 1, MIS3, result.best_params).value
    assert abs(result.best_value - fresh) < 1e-12


def test_optimize_periodicity_of_best_params():
    result = optimize(3, 1, MC)
    g0 = result.best_params.gammas[0]
    b0 = result.best_params.betas[0]
    shifted = tree_expectation(
        3, 1, MC, QaoaParams((g0 + MC.gamma_period,), (b0 + math.pi,))
    ).value
    assert abs(shifted - result.best_value) < 1e-10


def test_optimize_value_bounds():
    assert optimize(3, 1, MC).best_value <= 1.0 + 1e-12
    # per-edge independent-set cost is at most 1/(2d)
    assert optimize(3, 1, MIS3).best_value <= 1.0 / 6.0 + 1e-12


def test_optimize_deterministic():
    a = optimize(3, 1, MC)
    b = optimize(3, 1, MC)
    assert a.best_params == b.best_params
    assert a.best_value == b.best_value

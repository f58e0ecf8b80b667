'''
    ITERACOES_MARKOV

    ||> Objetivo: testes do operador de Markov da cadeia Z_n e do solver de ponto fixo.
'''

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from script.circle_dynamics import MapFamily, hyperbolic_projective
from script.correspondence import xi
from script.errors import NoConvergence, ShapeMismatch
from script.grid_measures import GridMeasure, tv_distance
from script.markov_kernels import boundedness_constant, dual_kernel, random_positive_kernel, stationary_distribution
from script.measure_engine import (
    ProductMeasure, SkewMeasure, fixed_point_stationary, markov_operator_direct, markov_operator_dual,
    max_state_tv, measure_distance, point_mass_product, sandwich_check, second_marginal,
    skew_invariance_residual, stationarity_residual, stationary_from_seeds, uniform_product)
from script.trajectory import trial_rng

GRID = 64


def _random_instance(seed, k, N):
    rng = trial_rng(seed, 0)
    P = random_positive_kernel(k, rng)
    m = stationary_distribution(P)
    pair = boundedness_constant(P, m)
    F = MapFamily(tuple(hyperbolic_projective(1.0 + 2.0 * rng.random(), rng.random()) for _ in range(k)))
    nu = ProductMeasure.from_array(m, rng.dirichlet(np.ones(N), size=k))
    return pair, dual_kernel(P, m), F, nu


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2 ** 32 - 1), k=st.integers(min_value=2, max_value=4))
def test_operador_nas_duas_formas(seed, k):
    pair, Q, F, nu = _random_instance(seed, k, 32)
    direct = markov_operator_direct(pair, F, nu)
    dual = markov_operator_dual(pair, Q, F, nu)
    assert max_state_tv(direct.stack(), dual.stack()) <= 1e-12
    assert_allclose(direct.marginal.weights, pair.stationary.weights)


def test_operador_com_formas_incompativeis(pair, dual, family):
    nu = uniform_product(stationary_distribution(random_positive_kernel(3, trial_rng(0, 0))), 16)
    with pytest.raises(ShapeMismatch):
        markov_operator_direct(pair, family, nu)
    with pytest.raises(ShapeMismatch):
        ProductMeasure(pair.stationary, (GridMeasure.uniform(8), GridMeasure.uniform(16)))


def test_ponto_fixo_e_estacionario(pair, dual, family):
    nu = fixed_point_stationary(pair, family, uniform_product(pair.stationary, GRID), tol=1e-10)
    assert nu.residual < 1e-10
    assert nu.iterations >= 1
    assert stationarity_residual(pair, dual, family, nu) < 1e-9
    assert nu.cesaro is not None
    image = markov_operator_direct(pair, family, nu)
    assert max_state_tv(image.stack(), nu.stack()) < 1e-9


def test_ponto_fixo_para_rotacoes_e_a_uniforme(pair, rotations):
    nu = fixed_point_stationary(pair, rotations, N=GRID)
    assert nu.iterations == 1
    assert_allclose(nu.stack(), np.full((2, GRID), 1.0 / GRID), atol=1e-14)


def test_ponto_fixo_sem_convergencia(pair, family):
    init = point_mass_product(pair.stationary, GRID, 0.6)
    with pytest.raises(NoConvergence) as info:
        fixed_point_stationary(pair, family, init, tol=1e-10, max_iter=2)
    error = info.value
    assert error.max_iter == 2
    assert error.residual > 1e-10
    assert isinstance(error.last, ProductMeasure)
    assert error.cesaro.stack().shape == (2, GRID)


def test_tolerancia_invalida(pair, family):
    with pytest.raises(ValueError):
        fixed_point_stationary(pair, family, tol=0.0)


def test_familia_redutivel_tem_dois_pontos_fixos(pair, reducible):
    inits = [point_mass_product(pair.stationary, GRID, x) for x in (0.1, 0.6)]
    distinct = stationary_from_seeds(pair, reducible, inits, tol=1e-10, max_iter=20_000)
    assert len(distinct) == 2
    assert max_state_tv(distinct[0].stack(), distinct[1].stack()) > 0.9


def test_invariancia_de_xi(pair, dual, family):
    nu = fixed_point_stationary(pair, family, N=GRID)
    assert skew_invariance_residual(pair, dual, family, xi(nu, dual)) < 1e-9


def test_sanduiche_no_par_limitado(pair, dual, family):
    nu = fixed_point_stationary(pair, family, N=GRID)
    result = sandwich_check(nu, xi(nu, dual), pair.constant_C)
    assert result.holds
    assert result.worst_slack >= -1e-12


def test_sanduiche_iid_vira_igualdade(iid_pair, family):
    Q = dual_kernel(iid_pair.kernel, iid_pair.stationary)
    nu = fixed_point_stationary(iid_pair, family, N=GRID)
    mu_hat = xi(nu, Q)
    projected = second_marginal(nu).bins
    for measure in mu_hat.family:
        assert_allclose(measure.bins, projected, atol=1e-12)
    assert sandwich_check(nu, mu_hat, 1.0).holds


def test_sanduiche_violado_com_constante_errada(pair, dual, family):
    nu = fixed_point_stationary(pair, family, N=GRID)
    result = sandwich_check(nu, xi(nu, dual), 1.0)
    assert not result.holds
    assert result.worst_slack < 0


def test_segunda_marginal_e_distancia(pair):
    nu = point_mass_product(pair.stationary, 16, 0.3)
    assert_allclose(second_marginal(nu).bins, GridMeasure.point_mass(16, 0.3).bins)
    other = SkewMeasure(pair.stationary, (GridMeasure.uniform(16), GridMeasure.point_mass(16, 0.3)))
    assert measure_distance(nu, other) == pytest.approx(15 / 16)
    assert measure_distance(nu, nu) == 0.0


def test_segunda_marginal_contra_monte_carlo(pair, family):
    nu = fixed_point_stationary(pair, family, N=GRID)
    rng = trial_rng(44, 0)
    samples = 1_000_000
    counts = rng.multinomial(samples, pair.stationary.weights)
    cells = np.concatenate([rng.choice(GRID, size=count, p=nu.stack()[state]) for state, count in enumerate(counts)])
    empirical = np.bincount(cells, minlength=GRID) / samples
    assert tv_distance(second_marginal(nu), empirical) <= 0.05

'''
    ITERACOES_MARKOV

    ||> Objetivo: testes da amostragem de órbitas, das médias de Birkhoff e dos lemas
        verificados por enumeração exata.
'''

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from script.circle_dynamics import apply
from script.errors import HypothesisFailed, ShapeMismatch, TooLarge
from script.markov_kernels import FiniteKernel, dual_kernel, random_positive_kernel, stationary_distribution
from script.measure_engine import fixed_point_stationary, max_state_tv
from script.trajectory import (
    birkhoff_average, chain_frequencies, check_conditional_bound, check_shift_duality,
    empirical_product_measure, ergodicity_diagnostic, iterate, sample_chain, sample_chains, trial_rng)

N = 16


def test_fluxos_independentes_e_reprodutiveis():
    first = trial_rng(42, 0).random(5)
    assert_array_equal(first, trial_rng(42, 0).random(5))
    assert not np.allclose(first, trial_rng(42, 1).random(5))


def test_cadeia_vetorizada_coincide_com_a_escalar(kernel, pair):
    states, x_start = sample_chains(kernel, pair.stationary, 200, 9, [0, 3, 7])
    for row, trial in zip(states, [0, 3, 7]):
        assert_array_equal(row, sample_chain(kernel, pair.stationary, 200, 9, trial))
    assert x_start.shape == (3,)
    assert np.all((x_start >= 0) & (x_start < 1))


def test_frequencias_da_cadeia(kernel, pair):
    states = sample_chain(kernel, pair.stationary, 20_000, 1)
    assert_allclose(chain_frequencies(states, 2), [2 / 3, 1 / 3], atol=0.03)


def test_estado_inicial_fixo_e_invalido(kernel):
    assert sample_chain(kernel, 1, 10, 0)[0] == 1
    with pytest.raises(ShapeMismatch):
        sample_chain(kernel, 2, 10, 0)
    with pytest.raises(ValueError):
        sample_chain(kernel, 0, 0, 0)


def test_orbita_de_rotacoes(kernel, rotations):
    states = sample_chain(kernel, 0, 50, 3)
    orbit = iterate(rotations, states, 0.2, seed=3)
    assert orbit.length == 50
    assert orbit.points.size == 51
    for i in range(50):
        assert orbit.points[i + 1] == pytest.approx(apply(rotations[states[i]], orbit.points[i]))
    state, point = orbit.pair(1)
    assert state == states[0] and point == orbit.points[1]


def test_media_de_birkhoff_com_funcao_e_tabela(kernel, rotations):
    orbit = iterate(rotations, sample_chain(kernel, 0, 1_000, 5), 0.0)
    assert birkhoff_average(orbit, lambda s, x: np.ones_like(x)) == 1.0
    table = np.zeros((2, N))
    table[0, :] = 1.0
    assert birkhoff_average(orbit, table) == pytest.approx(np.mean(orbit.states == 0))


def test_medida_empirica_das_rotacoes_e_uniforme(kernel, pair, rotations):
    empirical = empirical_product_measure(kernel, rotations, 10, 20_000, 1_000, N, 11, m=pair.stationary, jobs=2)
    assert max_state_tv(empirical.stack(), np.full((2, N), 1.0 / N)) < 0.05
    assert_allclose(empirical.marginal.weights, [2 / 3, 1 / 3], atol=0.05)


def test_medida_empirica_reprodutivel_com_jobs(kernel, pair, family):
    serial = empirical_product_measure(kernel, family, 4, 2_000, 100, N, 5, m=pair.stationary, jobs=1)
    parallel = empirical_product_measure(kernel, family, 4, 2_000, 100, N, 5, m=pair.stationary, jobs=2)
    assert_array_equal(serial.stack(), parallel.stack())


def test_medida_empirica_argumentos_invalidos(kernel, family, pair):
    with pytest.raises(ValueError):
        empirical_product_measure(kernel, family, 2, 100, 100, N, 0, m=pair.stationary)
    with pytest.raises(ValueError):
        empirical_product_measure(kernel, family, 2, 100, 10, N, 0)


def test_ergodicidade_e_familia_redutivel(kernel, reducible):
    left = np.zeros((2, N))
    left[:, :N // 2] = 1.0
    table, spread = ergodicity_diagnostic(kernel, reducible, [left], [(0, 0.1), (0, 0.6)], 5_000, 2)
    assert table.iloc[0, 0] == 1.0
    assert table.iloc[1, 0] == 0.0
    assert spread.iloc[0] > 0.1


def test_ergodicidade_familia_contrativa(kernel, family):
    rng = trial_rng(8, 0)
    phis = [rng.random((2, N)) for _ in range(3)]
    starts = [(0, 0.1), (1, 0.6), (0, 0.9)]
    table, spread = ergodicity_diagnostic(kernel, family, phis, starts, 50_000, 4)
    assert table.shape == (3, 3)
    assert spread.max() < 0.05


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2 ** 32 - 1),
       k=st.integers(min_value=2, max_value=3), L=st.integers(min_value=0, max_value=3))
def test_dualidade_com_o_shift(seed, k, L):
    rng = trial_rng(seed, 0)
    P = random_positive_kernel(k, rng)
    m = stationary_distribution(P)
    Q = dual_kernel(P, m)
    for _ in range(3):
        assert check_shift_duality(P, Q, m, rng.random(k), rng.random((k,) * (L + 1)), L) <= 1e-12


def test_dualidade_com_o_shift_falha_sem_o_dual():
    P = FiniteKernel(np.array([[0.1, 0.8, 0.1], [0.1, 0.1, 0.8], [0.8, 0.1, 0.1]]))
    m = stationary_distribution(P)
    assert check_shift_duality(P, P, m, np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), 0) > 0.2


def test_dualidade_com_o_shift_grande_demais(kernel, dual, pair):
    with pytest.raises(TooLarge):
        check_shift_duality(kernel, dual, pair.stationary, np.ones(2), np.ones((2,) * 20), 19)
    with pytest.raises(ShapeMismatch):
        check_shift_duality(kernel, dual, pair.stationary, np.ones(2), np.ones((2, 2)), 0)


def _outside_quarter():
    h = np.ones(N)
    h[:N // 4] = 0.0
    return h


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cota_condicional(pair, family, n):
    constant = check_conditional_bound(pair, family, np.ones(N), 0.6, n)
    assert constant.holds
    assert constant.margin == pytest.approx(1.0 - pair.constant_C)
    indicator = check_conditional_bound(pair, family, _outside_quarter(), 0.6, n)
    assert indicator.holds
    assert indicator.margin >= 0.0


def test_cota_condicional_com_cilindro(pair, family):
    h = np.broadcast_to(_outside_quarter(), (2, 2, N)).copy()
    result = check_conditional_bound(pair, family, h, 0.6, 2)
    assert result.holds
    assert result.margin == pytest.approx(check_conditional_bound(pair, family, _outside_quarter(), 0.6, 2).margin)


def test_cota_condicional_hipotese_violada(pair, family):
    inside = 1.0 - _outside_quarter()
    with pytest.raises(HypothesisFailed) as info:
        check_conditional_bound(pair, family, inside, 0.6, 1)
    assert info.value.violations


def test_cota_condicional_argumentos(pair, family):
    with pytest.raises(TooLarge):
        check_conditional_bound(pair, family, np.ones(N), 0.6, 20)
    with pytest.raises(ValueError):
        check_conditional_bound(pair, family, -np.ones(N), 0.6, 1)
    with pytest.raises(ShapeMismatch):
        check_conditional_bound(pair, family, np.ones((3, N)), 0.6, 1)


@pytest.mark.parametrize("k", [2, 3])
def test_condutor_estacionario_por_enumeracao(k):
    P = random_positive_kernel(k, trial_rng(31, k))
    m = stationary_distribution(P).weights
    n = 6
    marginals = np.zeros((n, k))
    for word in itertools.product(range(k), repeat=n):
        weight = m[word[0]] * np.prod([P.rows[a, b] for a, b in zip(word, word[1:])])
        marginals[np.arange(n), word] += weight
    assert_allclose(marginals, np.tile(m, (n, 1)), atol=1e-10)


def test_medida_empirica_concorda_com_o_ponto_fixo(kernel, pair, family):
    grid = 64
    nu = fixed_point_stationary(pair, family, N=grid)
    empirical = empirical_product_measure(kernel, family, 10, 20_000, 1_000, grid, 17, m=pair.stationary, jobs=2)
    assert max_state_tv(empirical.stack(), nu.stack()) <= 0.05


def test_medias_de_birkhoff_convergem_para_a_integral(kernel, pair, family):
    grid = 64
    nu = fixed_point_stationary(pair, family, N=grid)
    rng = trial_rng(23, 0)
    phis = [rng.random((2, grid)) for _ in range(3)]
    table, _ = ergodicity_diagnostic(kernel, family, phis, [(0, 0.4), (1, 0.85)], 200_000, 6, jobs=2)
    targets = np.array([float(np.sum(pair.stationary.weights[:, None] * phi * nu.stack())) for phi in phis])
    assert np.abs(table.to_numpy() - targets[None, :]).max() <= 0.02

'''
    ITERACOES_MARKOV

    ||> Objetivo: testes do expoente de contração e da sincronização local (escala reduzida).
'''

import numpy as np
import pytest
from numpy.testing import assert_allclose

from script.circle_dynamics import MapFamily, hyperbolic_projective
from script.correspondence import xi
from script.errors import AllLaddersBlewUp
from script.measure_engine import fixed_point_stationary
from script.sync_lab import (
    estimate_exponent, exponent_of_invariant_measure, exponent_samples_of_invariant_measure,
    local_sync_experiment, standard_error, uniform_bound_scan, uniform_family_measure)

GRID = 64


def test_expoente_negativo_para_familia_contrativa(kernel, pair, family):
    slope = estimate_exponent(family, kernel, pair.stationary, 0.1, 0.25, 2_000, 3)
    assert slope < -0.01


def test_expoente_nulo_para_rotacoes(kernel, pair, rotations):
    assert estimate_exponent(rotations, kernel, pair.stationary, 0.3, 0.25, 500, 3) == 0.0


def test_expoente_argumentos_invalidos(kernel, pair, family):
    with pytest.raises(ValueError):
        estimate_exponent(family, kernel, pair.stationary, 0.1, 0.5, 500, 0)
    with pytest.raises(ValueError):
        estimate_exponent(family, kernel, pair.stationary, 0.1, 0.25, 50, 0)


def test_escada_inteira_explode_no_repulsor(kernel, pair):
    repelling = MapFamily((hyperbolic_projective(2.0, 0.5), hyperbolic_projective(2.0, 0.5)))
    with pytest.raises(AllLaddersBlewUp) as info:
        estimate_exponent(repelling, kernel, pair.stationary, 0.0, 0.25, 200, 1)
    assert all(step > 0 for step in info.value.escape_times)


def test_sincronizacao_local(kernel, pair, family):
    report = local_sync_experiment(family, kernel, pair.stationary, 0.1, 30, 2_000, 5, grid=GRID)
    assert report.lambda_hat < -0.01
    assert report.rho_hat == pytest.approx(np.exp(report.lambda_hat))
    assert report.sync_fraction >= 0.9
    assert not report.hypothesis_violated
    assert not report.surrogate
    assert report.lambda_hat <= report.lambda0_hat
    assert len(report.per_trial_slopes) + report.blown_trials == 30
    assert report.to_dict()["seed"] == 5


def test_rotacoes_violam_a_hipotese(kernel, pair, rotations):
    report = local_sync_experiment(rotations, kernel, pair.stationary, 0.1, 10, 500, 5, grid=GRID)
    assert report.hypothesis_violated
    assert report.per_trial_slopes == [0.0] * 10
    assert report.lambda_hat == 0.0
    assert report.sync_fraction == 0.0


def test_sincronizacao_reprodutivel_com_jobs(kernel, pair, family):
    serial = local_sync_experiment(family, kernel, pair.stationary, 0.1, 8, 500, 7, grid=GRID, jobs=1)
    parallel = local_sync_experiment(family, kernel, pair.stationary, 0.1, 8, 500, 7, grid=GRID, jobs=2)
    assert_allclose(serial.per_trial_slopes, parallel.per_trial_slopes, rtol=1e-12)
    assert serial.sync_fraction == parallel.sync_fraction


def test_varredura_uniforme(kernel, pair, family):
    bound = uniform_bound_scan(family, kernel, pair.stationary, 4, 5, 1_000, 9, grid=GRID)
    assert len(bound.x_grid) == 4
    assert len(bound.quantiles) == 4
    assert bound.lambda0_hat < -0.005
    assert not bound.hypothesis_violated
    assert "slopes" not in bound.to_dict()


def test_varredura_com_lista_de_pontos(kernel, pair, rotations):
    bound = uniform_bound_scan(rotations, kernel, pair.stationary, [0.2, 0.7], 3, 200, 9, grid=GRID)
    assert bound.x_grid == [0.2, 0.7]
    assert bound.lambda0_hat == 0.0
    assert bound.hypothesis_violated


def test_expoente_da_medida_invariante(kernel, pair, dual, family):
    nu = fixed_point_stationary(pair, family, N=GRID)
    mu_hat = xi(nu, dual)
    samples = exponent_samples_of_invariant_measure(mu_hat, family, kernel, pair.stationary, 10, 1_000, 2)
    assert samples.size == 10
    assert np.all(samples < 0)
    assert standard_error(samples) >= 0
    assert exponent_of_invariant_measure(mu_hat, family, kernel, pair.stationary, 10, 1_000, 2) == pytest.approx(
        float(samples.mean()))


def test_expoente_de_rotacoes_com_familia_uniforme(kernel, pair, rotations):
    mu_hat = uniform_family_measure(pair.stationary, GRID)
    samples = exponent_samples_of_invariant_measure(mu_hat, rotations, kernel, pair.stationary, 5, 200, 4)
    assert_allclose(samples, np.zeros(5))
    assert np.isnan(standard_error(samples[:1]))


def test_expoente_no_atrator_comum_e_log_da_derivada(kernel, pair):
    F = MapFamily((hyperbolic_projective(2.0, 0.3), hyperbolic_projective(2.0, 0.3)))
    slope = estimate_exponent(F, kernel, pair.stationary, 0.3, 0.25, 500, 1)
    assert slope == pytest.approx(np.log(0.25), abs=0.05)


def test_inclinacao_estavel_ao_reduzir_delta0(kernel, pair, family):
    slopes = [estimate_exponent(family, kernel, pair.stationary, 0.1, delta0, 2_000, 6)
              for delta0 in (0.25, 0.125, 0.0625)]
    assert max(slopes) - min(slopes) <= 0.05


def test_expoente_da_medida_invariante_nao_positivo(kernel, pair, dual, family, rotations):
    nu = fixed_point_stationary(pair, family, N=GRID)
    samples = exponent_samples_of_invariant_measure(xi(nu, dual), family, kernel, pair.stationary, 12, 1_000, 8)
    assert samples.mean() <= 3 * standard_error(samples)
    flat = exponent_samples_of_invariant_measure(
        uniform_family_measure(pair.stationary, GRID), rotations, kernel, pair.stationary, 6, 200, 8)
    assert flat.mean() <= 3 * standard_error(flat)


def test_varredura_em_uma_passada_preserva_as_tentativas(kernel, pair, family):
    serial = uniform_bound_scan(family, kernel, pair.stationary, 3, 4, 500, 11, grid=GRID, jobs=1)
    parallel = uniform_bound_scan(family, kernel, pair.stationary, 3, 4, 500, 11, grid=GRID, jobs=2, progress=True)
    assert_allclose(serial.quantiles, parallel.quantiles, rtol=1e-12)
    for x in serial.x_grid:
        assert_allclose(serial.slopes[x], parallel.slopes[x], rtol=1e-12)
    # a tentativa g·trials + t pertence ao ponto g
    for g, x in enumerate(serial.x_grid):
        for t in range(4):
            expected = estimate_exponent(family, kernel, pair.stationary, x, 0.25, 500, 11, trial=g * 4 + t)
            assert serial.slopes[x][t] == pytest.approx(expected, abs=1e-12)


def test_familia_redutivel_viola_a_hipotese(kernel, pair, reducible):
    report = local_sync_experiment(reducible, kernel, pair.stationary, 0.25, 5, 200, 3, grid=GRID)
    assert report.hypothesis_violated
    assert report.invariant_label == "certificado"
    assert report.surrogate
    bound = uniform_bound_scan(reducible, kernel, pair.stationary, [0.25, 0.75], 2, 200, 3, grid=GRID)
    assert bound.hypothesis_violated
    assert bound.to_dict()["invariant_label"] == "certificado"

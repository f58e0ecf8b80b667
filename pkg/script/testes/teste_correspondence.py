'''
    ITERACOES_MARKOV

    ||> Objetivo: testes da correspondência Θ/Ξ entre medidas estacionárias e invariantes.
'''

import numpy as np
import pytest
from numpy.testing import assert_allclose

from script.correspondence import classical_limit_residual, roundtrip_residuals, theta, xi
from script.errors import ShapeMismatch
from script.markov_kernels import FiniteKernel, bounded_pair, dual_kernel
from script.measure_engine import fixed_point_stationary, skew_invariance_residual, uniform_product
from script.sync_lab import uniform_family_measure

GRID = 64


@pytest.mark.parametrize("rows", [
    [[0.9, 0.1], [0.2, 0.8]],
    [[0.5, 0.5], [0.5, 0.5]],
    [[0.3, 0.7], [0.6, 0.4]],
])
def test_idas_e_voltas(rows, family):
    pair = bounded_pair(FiniteKernel(np.array(rows)))
    Q = dual_kernel(pair.kernel, pair.stationary)
    nu = fixed_point_stationary(pair, family, N=GRID, tol=1e-10)
    mu_hat = xi(nu, Q)
    r1, r2 = roundtrip_residuals(nu, mu_hat, family, Q)
    assert r1 <= 1e-8
    assert r2 <= 1e-8
    assert skew_invariance_residual(pair, Q, family, mu_hat) <= 1e-8


def test_theta_de_xi_reproduz_nu(pair, dual, family):
    nu = fixed_point_stationary(pair, family, N=GRID)
    back = theta(xi(nu, dual), family)
    assert_allclose(back.stack(), nu.stack(), atol=1e-9)
    assert_allclose(back.marginal.weights, pair.stationary.weights)


def test_rotacoes_com_familia_uniforme(pair, dual, rotations):
    mu_hat = uniform_family_measure(pair.stationary, GRID)
    nu = theta(mu_hat, rotations)
    assert_allclose(nu.stack(), np.full((2, GRID), 1.0 / GRID), atol=1e-14)
    assert roundtrip_residuals(nu, mu_hat, rotations, dual).r2 < 1e-14


def test_limite_classico(iid_pair, pair, dual, family):
    iid_dual = dual_kernel(iid_pair.kernel, iid_pair.stationary)
    nu_iid = fixed_point_stationary(iid_pair, family, N=GRID)
    assert classical_limit_residual(nu_iid, iid_dual) <= 1e-12
    nu = fixed_point_stationary(pair, family, N=GRID)
    assert classical_limit_residual(nu, dual) > 1e-3


def test_medida_arbitraria_nao_fecha_a_volta(pair, dual, family):
    nu = uniform_product(pair.stationary, GRID)
    r1, _ = roundtrip_residuals(nu, xi(nu, dual), family, dual)
    assert r1 > 0.1


def test_xi_com_dual_de_outro_tamanho(pair):
    nu = uniform_product(pair.stationary, 8)
    with pytest.raises(ShapeMismatch):
        xi(nu, FiniteKernel(np.full((3, 3), 1 / 3)))

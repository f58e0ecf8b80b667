'''
    ITERACOES_MARKOV

    ||> Objetivo: objetos comuns aos testes.
        |> Par limitado p = [[0.9, 0.1], [0.2, 0.8]], m = (2/3, 1/3), C = 0.3.
        |> Família contrativa sem medida invariante comum: diag(2, 1/2) e o hiperbólico com atrator 1/4.
        |> Controle com rotações e família redutível (arcos [0, 1/2) e [1/2, 1) invariantes).
'''

import numpy as np
import pytest

from script.circle_dynamics import MapFamily, Projective, Rotation, hyperbolic_projective
from script.markov_kernels import FiniteKernel, bounded_pair, dual_kernel, iid_kernel
from script.trajectory import reducible_family


@pytest.fixture
def kernel():
    return FiniteKernel(np.array([[0.9, 0.1], [0.2, 0.8]]))


@pytest.fixture
def pair(kernel):
    return bounded_pair(kernel)


@pytest.fixture
def dual(pair):
    return dual_kernel(pair.kernel, pair.stationary)


@pytest.fixture
def iid_pair():
    return bounded_pair(iid_kernel([0.5, 0.5]))


@pytest.fixture
def family():
    return MapFamily((Projective(np.diag([2.0, 0.5])), hyperbolic_projective(2.0, 0.25)))


@pytest.fixture
def rotations():
    return MapFamily((Rotation(0.1), Rotation(np.sqrt(2.0) - 1.0)))


@pytest.fixture
def reducible():
    return reducible_family()

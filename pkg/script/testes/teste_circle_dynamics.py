'''
    ITERACOES_MARKOV

    ||> Objetivo: testes dos homeomorfismos do círculo e do push-forward na grade.
'''

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from script.circle_dynamics import (
    Arc, CirclePoint, MapFamily, PiecewiseLinear, Projective, Rotation, apply, apply_arc, closed_classes,
    common_fixed_points, common_invariant_residual, derivative, detect_common_invariant, hyperbolic_projective,
    identity_map, is_monotone_lift, pushforward, reduce_mod1, transfer_matrix)
from script.errors import MapInvalid, ShapeMismatch
from script.grid_measures import GridMeasure, bin_index, circle_wasserstein, tv_distance
from script.trajectory import trial_rng

entries = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def test_reducao_mod1_nunca_devolve_um():
    assert reduce_mod1(-1e-20) == 0.0
    assert reduce_mod1(1.25) == pytest.approx(0.25)
    reduced = reduce_mod1(np.array([-1e-20, 2.5, -0.25]))
    assert_allclose(reduced, [0.0, 0.5, 0.75])
    assert np.all(reduced < 1.0)


def test_arco_diametro_e_fim():
    arc = Arc(0.9, 0.8)
    assert arc.diameter == pytest.approx(0.2)
    assert arc.end.position == pytest.approx(0.7)
    with pytest.raises(ValueError):
        Arc(0.1, 1.5)


def test_rotacao():
    f = Rotation(0.25)
    assert apply(f, 0.9) == pytest.approx(0.15)
    assert apply(f, CirclePoint(0.5)) == CirclePoint(0.75)
    image = apply_arc(f, Arc(0.9, 0.2))
    assert image.start.position == pytest.approx(0.15)
    assert image.length == 0.2
    assert derivative(f, 0.3) == 1.0


def test_projetivo_hiperbolico_fixa_atrator_e_repulsor():
    f = hyperbolic_projective(2.0, 0.0)
    assert apply(f, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert apply(f, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert derivative(f, 0.0) == pytest.approx(0.25)
    assert derivative(f, 0.5) == pytest.approx(4.0)
    shifted = hyperbolic_projective(2.0, 0.25)
    assert apply(shifted, 0.25) == pytest.approx(0.25, abs=1e-14)
    assert derivative(shifted, 0.25) == pytest.approx(0.25)


def test_projetivo_contrai_para_o_atrator():
    f = hyperbolic_projective(2.0, 0.0)
    x = 0.3
    for _ in range(60):
        x = apply(f, x)
    assert min(x, 1.0 - x) < 1e-12


def test_projetivo_invalido_e_traco_negativo():
    with pytest.raises(MapInvalid):
        Projective(np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(MapInvalid):
        Projective(np.ones((3, 3)))
    flipped = Projective(-2.0 * np.eye(2))
    assert_allclose(flipped.matrix, np.eye(2))
    assert apply(flipped, 0.37) == pytest.approx(0.37)


@settings(max_examples=60, deadline=None)
@given(a=entries, b=entries, c=entries, d=entries)
def test_levantamento_projetivo_monotono_e_periodico(a, b, c, d):
    assume(a * d - b * c > 0.1)
    f = Projective(np.array([[a, b], [c, d]]))
    assert is_monotone_lift(f, trial_rng(0, 0), pairs=200)
    assert f.lift_scalar(0.3) == pytest.approx(float(f.lift(0.3)), abs=1e-12)


def test_linear_por_partes():
    f = PiecewiseLinear(np.array([0.0, 0.5]), np.array([0.0, 0.25]))
    assert apply(f, 0.5) == pytest.approx(0.25)
    assert apply(f, 0.75) == pytest.approx(0.625)
    assert derivative(f, 0.25) == pytest.approx(0.5)
    assert derivative(f, 0.5) == pytest.approx(1.5)
    assert f.lift_scalar(1.75) == pytest.approx(1.625)
    assert is_monotone_lift(f, trial_rng(1, 0))
    assert not f.smooth


def test_linear_por_partes_invalido():
    with pytest.raises(MapInvalid):
        PiecewiseLinear(np.array([0.0, 0.5]), np.array([0.3, 0.2]))
    with pytest.raises(MapInvalid):
        PiecewiseLinear(np.array([0.5, 0.2]), np.array([0.0, 0.1]))


def test_familia():
    F = MapFamily((Rotation(0.1), PiecewiseLinear(np.array([0.0, 0.5]), np.array([0.0, 0.25]))))
    assert len(F) == 2 and F.size == 2
    assert F.surrogate
    assert not MapFamily((identity_map(),)).surrogate
    with pytest.raises(ShapeMismatch):
        F.require_size(3)
    with pytest.raises(MapInvalid):
        MapFamily(())


def test_matriz_de_transferencia():
    N = 32
    T = transfer_matrix(hyperbolic_projective(2.0, 0.1), N)
    assert T.shape == (N, N)
    assert_allclose(np.asarray(T.sum(axis=1)).ravel(), np.ones(N), atol=1e-14)
    assert_allclose(transfer_matrix(identity_map(), N).toarray(), np.eye(N), atol=1e-12)
    shift = transfer_matrix(Rotation(1.0 / N), N).toarray()
    assert_allclose(shift, np.roll(np.eye(N), 1, axis=1), atol=1e-12)


def test_push_forward_de_massa_pontual():
    N = 64
    mu = GridMeasure.point_mass(N, 0.2)
    image = pushforward(Rotation(0.5), mu)
    assert image.bins.sum() == pytest.approx(1.0)
    assert int(np.argmax(image.bins)) == bin_index(0.7, N)
    assert tv_distance(pushforward(identity_map(), mu), mu) < 1e-12


def test_rotacoes_preservam_a_uniforme():
    F = MapFamily((Rotation(0.1), Rotation(np.sqrt(2.0) - 1.0)))
    search = detect_common_invariant(F, np.array([0.5, 0.5]), 64)
    assert search.found
    assert search.label == "certificado"
    assert common_invariant_residual(F, [0.5, 0.5], GridMeasure.uniform(64)) < 1e-12


def test_atrator_comum_e_medida_invariante():
    F = MapFamily((hyperbolic_projective(2.0, 0.0), hyperbolic_projective(3.0, 0.0)))
    search = detect_common_invariant(F, np.array([0.5, 0.5]), 64)
    assert search.found
    # o atrator 0 é borda de célula: a massa fica nas células 0 e N − 1
    assert search.witness.bins[0] + search.witness.bins[-1] > 0.99


def test_sem_medida_invariante_comum():
    F = MapFamily((Projective(np.diag([2.0, 0.5])), hyperbolic_projective(2.0, 0.25)))
    search = detect_common_invariant(F, np.array([2 / 3, 1 / 3]), 64)
    assert not search.found
    assert search.residual > 0.05
    assert search.label == "evidencia"


def test_estado_sem_peso_e_ignorado_na_busca():
    F = MapFamily((Rotation(0.1), hyperbolic_projective(2.0, 0.0)))
    assert detect_common_invariant(F, np.array([1.0, 0.0]), 32).found


def _circular_gap(a, b):
    return abs((a - b + 0.5) % 1.0 - 0.5)


@pytest.mark.parametrize("f", [
    hyperbolic_projective(3.0, 0.1),
    Projective(np.array([[1.0, 0.7], [-0.4, 1.3]])),
    PiecewiseLinear(np.array([0.0, 0.3, 0.6]), np.array([0.1, 0.2, 0.8])),
    Rotation(0.37),
])
def test_extremos_da_imagem_do_arco(f):
    rng = trial_rng(12, 0)
    for start, length in zip(rng.random(200), rng.random(200)):
        arc = Arc(start, length)
        image = apply_arc(f, arc)
        assert _circular_gap(image.start.position, apply(f, arc.start.position)) < 1e-12
        assert _circular_gap(image.end.position, apply(f, arc.end.position)) < 1e-12
        assert 0.0 <= image.diameter <= 1.0
        if isinstance(f, Rotation):
            assert image.diameter == arc.diameter


def test_push_forward_contra_monte_carlo():
    N, samples = 128, 4_000_000
    f = hyperbolic_projective(1.5, 0.3)
    image = pushforward(f, GridMeasure.uniform(N))
    points = apply(f, trial_rng(21, 0).random(samples))
    empirical = np.bincount(bin_index(points, N), minlength=N) / samples
    assert tv_distance(image, empirical) <= 0.01
    assert int(np.argmax(image.bins)) == bin_index(0.3, N)


def _lipschitz(f):
    return float(np.max(derivative(f, np.arange(4096) / 4096)))


def _von_mises(N, center, kappa):
    centers = (np.arange(N) + 0.5) / N
    return GridMeasure.from_weights(np.exp(kappa * np.cos(2 * np.pi * (centers - center))))


@pytest.mark.parametrize("N", [32, 64, 256])
@pytest.mark.parametrize("stretches", [(3.0, 2.0), (1.2, 1.1)])
def test_push_forward_comuta_com_composicao_em_wasserstein(N, stretches):
    f, g = hyperbolic_projective(stretches[0], 0.1), hyperbolic_projective(stretches[1], 0.6)
    composed = Projective(g.matrix @ f.matrix)
    assert apply(composed, 0.37) == pytest.approx(apply(g, apply(f, 0.37)), abs=1e-12)
    bound = (_lipschitz(f) * _lipschitz(g) + 2 * _lipschitz(g) + 2) / N
    rng = trial_rng(13, N)
    measures = [GridMeasure.from_weights(rng.dirichlet(np.ones(N))) for _ in range(5)]
    measures += [_von_mises(N, 0.4, 5.0), GridMeasure.point_mass(N, 0.73), GridMeasure.uniform(N)]
    for mu in measures:
        direct = pushforward(composed, mu)
        stepwise = pushforward(g, pushforward(f, mu))
        assert circle_wasserstein(direct, stepwise) <= bound


def test_wasserstein_no_circulo():
    N = 10
    assert circle_wasserstein(GridMeasure.point_mass(N, 0.15), GridMeasure.point_mass(N, 0.95)) == pytest.approx(0.2)
    assert circle_wasserstein(GridMeasure.point_mass(N, 0.15), GridMeasure.point_mass(N, 0.55)) == pytest.approx(0.4)
    uniform = GridMeasure.uniform(N)
    assert circle_wasserstein(uniform, uniform) == 0.0
    with pytest.raises(ShapeMismatch):
        circle_wasserstein(uniform, GridMeasure.uniform(N + 1))


def test_classes_fechadas(family, rotations, reducible):
    classes = closed_classes(reducible, [2 / 3, 1 / 3], 32)
    assert len(classes) == 2
    assert np.all(classes[0] < 16) and np.all(classes[1] >= 16)
    assert bin_index(0.25, 32) in classes[0] and bin_index(0.75, 32) in classes[1]
    assert len(closed_classes(family, [2 / 3, 1 / 3], 32)) == 1
    (whole,) = closed_classes(rotations, [0.5, 0.5], 32)
    assert whole.size == 32


def test_pontos_fixos_comuns(family, reducible):
    assert_allclose(common_fixed_points(reducible, [2 / 3, 1 / 3]), [0.0, 0.5], atol=1e-12)
    assert common_fixed_points(family, [2 / 3, 1 / 3]) == []
    assert common_fixed_points(MapFamily((Rotation(0.1), Rotation(0.2))), [0.5, 0.5]) == []


def test_familia_redutivel_tem_medida_invariante_comum(reducible):
    search = detect_common_invariant(reducible, np.array([2 / 3, 1 / 3]), 64)
    assert search.found
    assert search.label == "certificado"
    assert search.fixed_point == 0.0
    assert search.witness.bins[0] == 1.0
    assert search.residual <= 1e-12

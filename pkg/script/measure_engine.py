'''
    ITERACOES_MARKOV

    ||> Objetivo: medidas em E×M com desintegração explícita e o operador de Markov da cadeia Z_n.

        |> ProductMeasure: marginal m mais {ν_α}, candidatas a medida estacionária ν.
        |> SkewMeasure: família {μ_α} sobre a base m, representando μ̂ ∈ I₀(φ).
        |> Duas formas do operador (via p e via o dual q), que devem coincidir.
        |> Solução por ponto fixo, com média de Cesàro dos iterados.
        |> Resíduos de estacionariedade, de invariância e o sanduíche C·μ_α ≤ Π₂*ν ≤ C⁻¹·μ_α.
'''

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from script.circle_dynamics import transfer_matrix
from script.errors import NoConvergence, ShapeMismatch
from script.grid_measures import GridMeasure, tv_distance
from script.logs import get_logger
from script.markov_kernels import StationaryVector

logger = get_logger(__name__)

DEFAULT_GRID = 256
SANDWICH_TOL = 1e-12


def _family_stack(measures):
    measures = tuple(m if isinstance(m, GridMeasure) else GridMeasure(m) for m in measures)
    sizes = {m.N for m in measures}
    if len(sizes) != 1:
        raise ShapeMismatch(f"desintegração com grades de tamanhos diferentes: {sorted(sizes)}")
    return measures


@dataclass(frozen=True, eq=False)
class ProductMeasure:
    """
    Medida em E×M: ν(A×B) = Σ_{α∈A} m_α ν_α(B).

    Os campos `residual`, `iterations` e `cesaro` só são preenchidos pelo solver de ponto fixo.
    """

    marginal: StationaryVector
    disintegration: tuple
    residual: float = float("nan")
    iterations: int | None = None
    cesaro: "ProductMeasure | None" = field(default=None, repr=False)

    def __post_init__(self):
        family = _family_stack(self.disintegration)
        if len(family) != self.marginal.size:
            raise ShapeMismatch(f"{len(family)} medidas para marginal com {self.marginal.size} estados")
        object.__setattr__(self, "disintegration", family)

    @classmethod
    def from_array(cls, marginal, array, **extra):
        return cls(marginal, tuple(GridMeasure.from_weights(row) for row in np.asarray(array)), **extra)

    @property
    def size(self):
        return len(self.disintegration)

    @property
    def N(self):
        return self.disintegration[0].N

    def stack(self):
        return np.vstack([measure.bins for measure in self.disintegration])


@dataclass(frozen=True, eq=False)
class SkewMeasure:
    """Família {μ_α} sobre a base m: a desintegração de μ̂ depende só de ω₀."""

    base: StationaryVector
    family: tuple

    def __post_init__(self):
        family = _family_stack(self.family)
        if len(family) != self.base.size:
            raise ShapeMismatch(f"{len(family)} medidas para base com {self.base.size} estados")
        object.__setattr__(self, "family", family)

    @classmethod
    def from_array(cls, base, array):
        return cls(base, tuple(GridMeasure.from_weights(row) for row in np.asarray(array)))

    @property
    def size(self):
        return len(self.family)

    @property
    def N(self):
        return self.family[0].N

    def stack(self):
        return np.vstack([measure.bins for measure in self.family])


def uniform_product(m, N=DEFAULT_GRID):
    return ProductMeasure(m, tuple(GridMeasure.uniform(N) for _ in range(m.size)))


def point_mass_product(m, N, x):
    """m ⊗ δ na célula de x, para todos os estados."""
    return ProductMeasure(m, tuple(GridMeasure.point_mass(N, x) for _ in range(m.size)))


def _check_shapes(pair, F, measure, Q=None):
    k = pair.size
    F.require_size(k)
    if measure.size != k:
        raise ShapeMismatch(f"medida com {measure.size} estados para núcleo com {k}")
    if Q is not None and Q.size != k:
        raise ShapeMismatch(f"núcleo dual com {Q.size} estados para núcleo com {k}")


def push_rows(F, array):
    N = array.shape[1]
    return np.vstack([transfer_matrix(f, N).T @ row for f, row in zip(F, array)])


def _direct_mixing(pair):
    m = pair.stationary.weights
    # linha β: pesos m_α p_αβ / m_β sobre α
    return (m[:, None] * pair.kernel.rows).T / m[:, None]


def markov_operator_direct(pair, F, nu):
    """
    Operador da cadeia Z_n pela fórmula direta com p̂.

    Args:
        pair (DrivingPair): Núcleo p e medida estacionária m.
        F (MapFamily): Família {f_α}.
        nu (ProductMeasure): Medida de entrada.

    Returns:
        ProductMeasure: (Pν)_β = f_β* (Σ_α m_α p_αβ ν_α) / m_β, marginal m.
    """
    _check_shapes(pair, F, nu)
    mixed = _direct_mixing(pair) @ nu.stack()
    return ProductMeasure.from_array(pair.stationary, push_rows(F, mixed))


def markov_operator_dual(pair, Q, F, nu):
    """
    Operador da cadeia Z_n pela forma dual: (Pν)_α = Σ_β q_αβ f_α* ν_β.
    """
    _check_shapes(pair, F, nu, Q)
    mixed = Q.rows @ nu.stack()
    return ProductMeasure.from_array(pair.stationary, push_rows(F, mixed))


def max_state_tv(first, second):
    return float(0.5 * np.abs(first - second).sum(axis=1).max())


def fixed_point_stationary(pair, F, init=None, tol=1e-10, max_iter=10_000, N=DEFAULT_GRID):
    """
    Itera o operador direto até max_α TV((Pν)_α, ν_α) < tol.

    Args:
        pair (DrivingPair): Núcleo condutor e medida estacionária.
        F (MapFamily): Família de mapas.
        init (ProductMeasure | None): Medida inicial; uniforme se None.
        tol (float): Tolerância do resíduo.
        max_iter (int): Limite de iterações.
        N (int): Grade usada quando init é None.

    Returns:
        ProductMeasure: Último iterado com `residual`, `iterations` e `cesaro` preenchidos.

    Raises:
        NoConvergence: Com o último iterado e a média de Cesàro anexados.
    """
    if tol <= 0:
        raise ValueError(f"Tolerância precisa ser positiva: {tol}")
    init = init if init is not None else uniform_product(pair.stationary, N)
    _check_shapes(pair, F, init)

    mixing = _direct_mixing(pair)
    transposed = [transfer_matrix(f, init.N).T.tocsr() for f in F]
    current = init.stack()
    running = np.zeros_like(current)
    residual = float("inf")

    for iteration in range(1, max_iter + 1):
        mixed = mixing @ current
        updated = np.vstack([T @ row for T, row in zip(transposed, mixed)])
        updated /= updated.sum(axis=1, keepdims=True)
        residual = max_state_tv(updated, current)
        running += updated
        current = updated
        if residual < tol:
            break
    else:
        cesaro = ProductMeasure.from_array(pair.stationary, running / max_iter)
        last = ProductMeasure.from_array(pair.stationary, current, residual=residual, iterations=max_iter)
        logger.warning("Ponto fixo não atingido em %d iterações (resíduo %.3e, N=%d)", max_iter, residual, init.N)
        raise NoConvergence(max_iter, residual, last=last, cesaro=cesaro)

    cesaro = ProductMeasure.from_array(pair.stationary, running / iteration)
    logger.debug("Ponto fixo em %d iterações (resíduo %.3e, N=%d)", iteration, residual, init.N)
    return ProductMeasure.from_array(
        pair.stationary, current, residual=residual, iterations=iteration, cesaro=cesaro)


def stationary_from_seeds(pair, F, inits, tol=1e-10, max_iter=10_000):
    """
    Roda o solver a partir de várias medidas iniciais e devolve todos os pontos fixos distintos
    (TV > 10·tol entre eles). Nenhum é escolhido como "o" estacionário.
    """
    distinct = []
    for index, init in enumerate(inits):
        try:
            candidate = fixed_point_stationary(pair, F, init, tol, max_iter)
        except NoConvergence as error:
            logger.warning("Semente %d sem convergência (resíduo %.3e)", index, error.residual)
            continue
        if all(max_state_tv(candidate.stack(), known.stack()) > 10 * tol for known in distinct):
            distinct.append(candidate)
    if len(distinct) > 1:
        logger.warning("%d medidas estacionárias distintas encontradas", len(distinct))
    return distinct


def stationarity_residual(pair, Q, F, nu):
    """max_α TV(ν_α, Σ_β q_αβ f_α* ν_β)."""
    image = markov_operator_dual(pair, Q, F, nu)
    return max_state_tv(nu.stack(), image.stack())


def skew_invariance_residual(pair, Q, F, mu_hat):
    """
    max_α TV(μ_α, Σ_β q_αβ f_β* μ_β). O push-forward usa o índice β, ao contrário de
    stationarity_residual.
    """
    _check_shapes(pair, F, mu_hat, Q)
    image = Q.rows @ push_rows(F, mu_hat.stack())
    return max_state_tv(mu_hat.stack(), image)


def second_marginal(nu):
    """Π₂*ν = Σ_α m_α ν_α."""
    return GridMeasure.from_weights(nu.marginal.weights @ nu.stack())


class SandwichResult(NamedTuple):
    holds: bool
    worst_slack: float


def sandwich_check(nu, mu_hat, C):
    """
    Confere C·μ_α(b) ≤ (Π₂*ν)(b) ≤ C⁻¹·μ_α(b) para todo estado α e célula b.

    Args:
        nu (ProductMeasure): Medida estacionária.
        mu_hat (SkewMeasure): Ξ(ν).
        C (float): Constante do par limitado.

    Returns:
        SandwichResult: holds e a menor folga (negativa quando violada).
    """
    if nu.N != mu_hat.N or nu.size != mu_hat.size:
        raise ShapeMismatch(f"ν ({nu.size}×{nu.N}) e μ̂ ({mu_hat.size}×{mu_hat.N})")
    projected = second_marginal(nu).bins[None, :]
    family = mu_hat.stack()
    lower = projected - C * family
    upper = family / C - projected
    worst = float(min(lower.min(), upper.min()))
    return SandwichResult(worst >= -SANDWICH_TOL, worst)


def measure_distance(first, second):
    """Maior TV por estado entre duas famílias de mesma forma."""
    if first.size != second.size:
        raise ShapeMismatch(f"{first.size} e {second.size} estados")
    return max(tv_distance(a, b) for a, b in zip(_members(first), _members(second)))


def _members(measure):
    return measure.disintegration if isinstance(measure, ProductMeasure) else measure.family

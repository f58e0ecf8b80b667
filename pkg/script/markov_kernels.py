'''
    ITERACOES_MARKOV

    ||> Objetivo: núcleos de transição em espaço de estados finito.

        |> Medida estacionária m (resolução direta de (Pᵀ − I)m = 0 com normalização,
           conferida por iteração de potências).
        |> Núcleo dual q_ij = (m_j / m_i) p_ji (reversão temporal relativa a m).
        |> Constante C do par limitado: C ≤ p_αβ / m_β ≤ C⁻¹.
        |> Resíduos de dualidade exatos em conjuntos unitários e na identidade integral.
        |> Discretização do passeio aleatório no grupo do círculo.
'''

import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import linalg

from script.errors import KernelInvalid, NonUniqueStationary, NotBounded, ZeroMassState
from script.logs import get_logger

logger = get_logger(__name__)

ROW_TOL = 1e-12
STATIONARY_RESIDUAL_TOL = 1e-10
UNIQUENESS_TOL = 1e-9
POWER_TOL = 1e-13
POWER_MAX_ITER = 1_000_000


def _frozen(array):
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FiniteKernel:
    """
    Matriz estocástica por linhas: linha α é a medida p(α, ·).

    Args:
        rows (np.ndarray): Matriz k×k com entradas ≥ 0 e linhas somando 1 (tolerância 1e-12).
    """

    rows: np.ndarray

    def __post_init__(self):
        rows = _frozen(self.rows)
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1] or rows.shape[0] == 0:
            raise KernelInvalid(f"Núcleo precisa ser matriz quadrada, recebido shape {rows.shape}")
        if not np.all(np.isfinite(rows)) or rows.min() < 0:
            raise KernelInvalid("Núcleo com entradas negativas ou não finitas")
        drift = np.abs(rows.sum(axis=1) - 1.0).max()
        if drift > ROW_TOL:
            raise KernelInvalid(f"Linhas do núcleo não somam 1 (desvio {drift:.2e})")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_weights(cls, weights):
        """Normaliza as linhas de uma matriz não negativa e constrói o núcleo."""
        weights = np.asarray(weights, dtype=np.float64)
        totals = weights.sum(axis=1, keepdims=True)
        if np.any(totals <= 0):
            raise KernelInvalid("Linha sem massa positiva não pode ser normalizada")
        return cls(weights / totals)

    @property
    def size(self):
        return self.rows.shape[0]


@dataclass(frozen=True, eq=False)
class StationaryVector:
    """
    Vetor de probabilidade m sobre E. O resíduo contra o núcleo fica registrado em `residual`.
    """

    weights: np.ndarray
    residual: float = float("nan")

    def __post_init__(self):
        weights = _frozen(self.weights)
        if weights.ndim != 1 or weights.min() < 0 or abs(weights.sum() - 1.0) > ROW_TOL:
            raise KernelInvalid("Vetor estacionário precisa ser vetor de probabilidade")
        object.__setattr__(self, "weights", weights)

    @property
    def size(self):
        return self.weights.shape[0]


@dataclass(frozen=True, eq=False)
class DrivingPair:
    """Núcleo condutor p junto com sua medida estacionária m."""

    kernel: FiniteKernel
    stationary: StationaryVector

    def __post_init__(self):
        if self.kernel.size != self.stationary.size:
            raise KernelInvalid(
                f"Núcleo com {self.kernel.size} estados e medida com {self.stationary.size} pesos")

    @property
    def size(self):
        return self.kernel.size


@dataclass(frozen=True, eq=False)
class BoundedPair(DrivingPair):
    """
    Par (p, m) limitado: C ≤ k(α, β) ≤ C⁻¹, com k(α, β) = p_αβ / m_β = dp_α/dm (β).
    """

    constant_C: float = 1.0
    density: np.ndarray = field(default=None, repr=False)


def _as_rows(P):
    return P.rows if isinstance(P, FiniteKernel) else np.asarray(P, dtype=np.float64)


def _as_weights(m):
    return m.weights if isinstance(m, StationaryVector) else np.asarray(m, dtype=np.float64)


def _power_iteration(rows, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    # Cadeia preguiçosa (P + I)/2: mesma medida estacionária, sem periodicidade
    lazy = 0.5 * (rows + np.eye(rows.shape[0]))
    vector = np.full(rows.shape[0], 1.0 / rows.shape[0])
    for iteration in range(1, max_iter + 1):
        updated = vector @ lazy
        if np.abs(updated - vector).max() < tol:
            return updated / updated.sum(), iteration
        vector = updated
    return vector / vector.sum(), None


def stationary_distribution(P):
    """
    Resolve mP = m para um núcleo com medida estacionária única.

    Args:
        P (FiniteKernel): Núcleo de transição.

    Returns:
        StationaryVector: Medida estacionária com o resíduo max_j |(mP)_j − m_j|.

    Raises:
        NonUniqueStationary: Se o segundo menor valor singular de (Pᵀ − I) for menor que 1e-9.
    """
    rows = _as_rows(P)
    k = rows.shape[0]
    if k == 1:
        return StationaryVector(np.ones(1), residual=0.0)

    system = rows.T - np.eye(k)
    singular_values = np.sort(linalg.svdvals(system))
    if singular_values[1] < UNIQUENESS_TOL:
        raise NonUniqueStationary(singular_values)

    # Uma equação é redundante (as colunas de P somam 1); troca a última pela normalização
    system[-1, :] = 1.0
    rhs = np.zeros(k)
    rhs[-1] = 1.0
    weights = linalg.solve(system, rhs)
    weights = np.clip(weights, 0.0, None)
    weights = weights / weights.sum()

    residual = float(np.abs(weights @ rows - weights).max())
    if residual > STATIONARY_RESIDUAL_TOL:
        raise KernelInvalid(f"Resíduo estacionário {residual:.2e} acima de {STATIONARY_RESIDUAL_TOL}")

    check, iterations = _power_iteration(rows)
    gap = float(np.abs(check - weights).max())
    if iterations is None:
        logger.warning("Iteração de potências não convergiu; conferência ignorada (diferença %.2e)", gap)
    elif gap > 1e-8:
        logger.warning("Resolução direta e iteração de potências divergem em %.2e", gap)
    else:
        logger.debug("Iteração de potências confere em %d passos (diferença %.2e)", iterations, gap)

    return StationaryVector(weights, residual=residual)


def dual_kernel(P, m):
    """
    Núcleo em dualidade com P relativo a m: q_ij = (m_j / m_i) p_ji.

    Args:
        P (FiniteKernel): Núcleo de transição.
        m (StationaryVector): Medida estacionária de P.

    Returns:
        FiniteKernel: Núcleo dual Q.
    """
    rows = _as_rows(P)
    weights = _as_weights(m)
    empty = np.flatnonzero(weights <= 0)
    if empty.size:
        raise ZeroMassState(empty.tolist())
    dual = (weights[None, :] * rows.T) / weights[:, None]
    # m estacionária => linhas somam 1 até arredondamento
    return FiniteKernel(dual / dual.sum(axis=1, keepdims=True))


def boundedness_constant(P, m):
    """
    Calcula a densidade k(α, β) = p_αβ / m_β e a constante C do par limitado.

    Args:
        P (FiniteKernel): Núcleo de transição com entradas positivas.
        m (StationaryVector): Medida estacionária de P.

    Returns:
        BoundedPair: Núcleo, medida, C e densidade.
    """
    rows = _as_rows(P)
    weights = _as_weights(m)
    zeros = np.argwhere(rows <= 0)
    if zeros.size:
        raise NotBounded([tuple(int(i) for i in entry) for entry in zeros])
    density = rows / weights[None, :]
    constant = min(float(density.min()), 1.0 / float(density.max()), 1.0)
    kernel = P if isinstance(P, FiniteKernel) else FiniteKernel(rows)
    stationary = m if isinstance(m, StationaryVector) else StationaryVector(weights)
    return BoundedPair(kernel, stationary, constant, _frozen(density))


def bounded_pair(P):
    """Atalho: medida estacionária seguida da constante de limitação."""
    return boundedness_constant(P, stationary_distribution(P))


def driving_pair(P):
    """
    Par (p, m) para os operadores: limitado quando todas as entradas de P são positivas,
    simples caso contrário (núcleos com zeros, cadeias redutíveis por blocos de mapas).
    """
    stationary = stationary_distribution(P)
    if np.all(_as_rows(P) > 0):
        return boundedness_constant(P, stationary)
    return DrivingPair(P, stationary)


def duality_residual(P, Q, m):
    """
    max_{i,j} |m_i p_ij − m_j q_ji|, forma finita de ∫_B p(α, A) dm = ∫_A q(β, B) dm.
    """
    rows, dual, weights = _as_rows(P), _as_rows(Q), _as_weights(m)
    if rows.shape != dual.shape or rows.shape[0] != weights.shape[0]:
        return float("inf")
    forward = weights[:, None] * rows
    backward = (weights[:, None] * dual).T
    return float(np.abs(forward - backward).max())


def duality_identity_residual(P, Q, m, kappa):
    """
    |Σ κ(α,β) p_αβ m_α − Σ κ(β,α) q_αβ m_α| para κ ≥ 0.

    Args:
        P (FiniteKernel): Núcleo direto.
        Q (FiniteKernel): Núcleo candidato a dual.
        m (StationaryVector): Medida estacionária.
        kappa (np.ndarray): Matriz k×k não negativa.

    Returns:
        float: Diferença absoluta entre as duas somas duplas.
    """
    rows, dual, weights = _as_rows(P), _as_rows(Q), _as_weights(m)
    kappa = np.asarray(kappa, dtype=np.float64)
    left = np.sum(kappa * rows * weights[:, None])
    right = np.sum(kappa.T * dual * weights[:, None])
    return float(abs(left - right))


def is_reversible(P, m, tol=1e-12):
    return duality_residual(P, P, m) <= tol


def iid_kernel(weights):
    """Núcleo com todas as linhas iguais a `weights` (sorteio i.i.d.)."""
    weights = np.asarray(weights, dtype=np.float64)
    return FiniteKernel.from_weights(np.tile(weights, (weights.size, 1)))


def random_positive_kernel(k, rng, floor=0.05):
    """
    Núcleo aleatório com todas as entradas positivas (linhas de Dirichlet misturadas ao uniforme).

    Args:
        k (int): Número de estados.
        rng (np.random.Generator): Gerador de números aleatórios.
        floor (float): Peso da mistura com a linha uniforme, em (0, 1].

    Returns:
        FiniteKernel: Núcleo positivo.
    """
    rows = rng.dirichlet(np.ones(k), size=k)
    return FiniteKernel.from_weights((1.0 - floor) * rows + floor / k)


def _vonmises_density(concentration):
    def density(offset):
        return np.exp(concentration * np.cos(2.0 * np.pi * offset))
    return density


def group_walk_kernel(cells, density="uniform", concentration=1.0):
    """
    Discretiza o passeio aleatório à esquerda no círculo: p(c_i, célula j) ∝ f(c_j − c_i).

    A medida de Haar (uniforme) é estacionária para qualquer densidade f, pois o núcleo
    resultante é duplamente estocástico.

    Args:
        cells (int): Número de células da discretização.
        density (str | callable): "uniform", "vonmises" ou função periódica de período 1.
        concentration (float): Concentração da densidade de von Mises.

    Returns:
        FiniteKernel: Núcleo k×k avaliado nos centros das células.
    """
    centers = (np.arange(cells) + 0.5) / cells
    offsets = np.mod(centers[None, :] - centers[:, None], 1.0)
    if density == "uniform":
        weights = np.ones((cells, cells))
    elif density == "vonmises":
        weights = _vonmises_density(concentration)(offsets)
    elif callable(density):
        weights = np.asarray(density(offsets), dtype=np.float64)
    else:
        raise KernelInvalid(f"Densidade desconhecida: {density}")
    return FiniteKernel.from_weights(weights)


def read_kernel_file(file_path):
    """
    Lê um núcleo de um arquivo texto com linhas separadas por espaços.

    Args:
        file_path (str): Caminho do arquivo.

    Returns:
        FiniteKernel: Núcleo lido (linhas renormalizadas).
    """
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Arquivo não encontrado: {file_path}")
    table = pd.read_csv(file_path, sep=r"\s+", header=None, comment="#")
    return FiniteKernel.from_weights(table.to_numpy(dtype=np.float64))

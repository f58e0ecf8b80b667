'''
    ITERACOES_MARKOV

    ||> Objetivo: medidas de probabilidade sobre a grade de N células do círculo.
        |> A célula b cobre [b/N, (b+1)/N).
        |> Distância de variação total TV = ½ Σ |diferença| e Wasserstein-1 circular.
'''

from dataclasses import dataclass

import numpy as np

from script.errors import ShapeMismatch

MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GridMeasure:
    """
    Pesos não negativos sobre N células do círculo, somando 1.

    Args:
        bins (np.ndarray): Vetor de pesos de comprimento N.
    """

    bins: np.ndarray

    def __post_init__(self):
        bins = np.array(self.bins, dtype=np.float64)
        if bins.ndim != 1 or bins.size == 0:
            raise ValueError(f"GridMeasure precisa de vetor 1-D não vazio, recebido shape {bins.shape}")
        if bins.min() < 0 or abs(bins.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"Pesos inválidos (mínimo {bins.min():.2e}, soma {bins.sum():.15f})")
        bins.setflags(write=False)
        object.__setattr__(self, "bins", bins)

    @classmethod
    def from_weights(cls, weights):
        """Recorta valores negativos de arredondamento e renormaliza."""
        weights = np.clip(np.asarray(weights, dtype=np.float64), 0.0, None)
        return cls(weights / weights.sum())

    @classmethod
    def uniform(cls, N):
        return cls(np.full(N, 1.0 / N))

    @classmethod
    def point_mass(cls, N, x):
        bins = np.zeros(N)
        bins[bin_index(x, N)] = 1.0
        return cls(bins)

    @property
    def N(self):
        return self.bins.shape[0]


def bin_index(x, N):
    """Índice da célula que contém o ponto x (reduzido mod 1)."""
    index = np.floor(np.mod(x, 1.0) * N).astype(np.int64)
    return np.minimum(index, N - 1)


def tv_distance(first, second):
    a = first.bins if isinstance(first, GridMeasure) else np.asarray(first)
    b = second.bins if isinstance(second, GridMeasure) else np.asarray(second)
    if a.shape != b.shape:
        raise ShapeMismatch(f"grades de tamanhos {a.shape} e {b.shape}")
    return 0.5 * float(np.abs(a - b).sum())


def circle_wasserstein(first, second):
    """
    Distância de Wasserstein-1 no círculo entre duas medidas da grade (massa nos centros das células).

    Com D a soma acumulada de (a − b), W1 = (1/N)·Σ |D − mediana(D)|.
    """
    a = first.bins if isinstance(first, GridMeasure) else np.asarray(first)
    b = second.bins if isinstance(second, GridMeasure) else np.asarray(second)
    if a.shape != b.shape:
        raise ShapeMismatch(f"grades de tamanhos {a.shape} e {b.shape}")
    cumulative = np.cumsum(a - b)
    return float(np.abs(cumulative - np.median(cumulative)).mean())

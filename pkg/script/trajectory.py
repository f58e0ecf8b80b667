'''
    ITERACOES_MARKOV

    ||> Objetivo: amostrar a cadeia condutora e a cadeia Z_n = (ω_{n−1}, f_ω^n(x₀)).

        |> Geradores por tentativa: Philox semeado por SeedSequence([semente, tentativa]).
        |> Médias de Birkhoff e medida produto empírica (histograma de Z_i por estado).
        |> Diagnóstico de ergodicidade: médias a partir de vários inícios.
        |> Verificação exata, por enumeração de palavras, da dualidade com o shift e da
           cota condicional E(h∘F^n | 𝓕_{n−1}) ≥ C·h̄(f_ω^n(x₀)).
'''

import bisect
import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from script.circle_dynamics import MapFamily, PiecewiseLinear, reduce_mod1, transfer_matrix
from script.errors import HypothesisFailed, ShapeMismatch, TooLarge
from script.grid_measures import bin_index
from script.logs import get_logger
from script.markov_kernels import StationaryVector
from script.measure_engine import ProductMeasure

logger = get_logger(__name__)

ENUMERATION_LIMIT = 1_000_000
SUPPORT_TOL = 1e-9

# nós e imagens dos dois mapas da família redutível
REDUCIBLE_NODES = (
    ([0.0, 0.1, 0.2, 0.35, 0.5, 0.6, 0.7, 0.85], [0.0, 0.15, 0.2, 0.25, 0.5, 0.65, 0.7, 0.75]),
    ([0.0, 0.15, 0.3, 0.4, 0.5, 0.65, 0.8, 0.9], [0.0, 0.25, 0.3, 0.35, 0.5, 0.75, 0.8, 0.85]),
)


def trial_rng(master_seed, trial_index):
    """Gerador contador (Philox) independente para cada tentativa."""
    sequence = np.random.SeedSequence([int(master_seed), int(trial_index)])
    return np.random.Generator(np.random.Philox(sequence))


@dataclass(frozen=True, eq=False)
class OrbitSample:
    """
    Órbita de uma tentativa: estados ω₀..ω_{n−1} e pontos x₀..x_n, com
    points[i + 1] = f_{states[i]}(points[i]). O par Z_i = (states[i − 1], points[i]).
    """

    seed: int
    states: np.ndarray
    points: np.ndarray
    trial: int = 0

    @property
    def length(self):
        return self.states.shape[0]

    def pair(self, i):
        return int(self.states[i - 1]), float(self.points[i])


def _cdf_rows(P):
    cdf = np.cumsum(P.rows, axis=1)
    cdf[:, -1] = 1.0
    return cdf


def _initial_cdf(start, k):
    if isinstance(start, StationaryVector):
        cdf = np.cumsum(start.weights)
        cdf[-1] = 1.0
        return cdf
    # estado fixo, comum ou um por tentativa
    states = np.asarray(start)
    if states.min() < 0 or states.max() >= k:
        raise ShapeMismatch(f"estado inicial fora de 0..{k - 1}: {start}")
    return None


def _draws(seed, trial, n):
    rng = trial_rng(seed, trial)
    return rng.random(n), rng.random()


def sample_chain(P, start, n, seed, trial=0):
    """
    Amostra ω₀..ω_{n−1} com ω₀ ~ start e ω_{i+1} ~ p(ω_i, ·).

    Args:
        P (FiniteKernel): Núcleo condutor.
        start (StationaryVector | int): Lei inicial ou estado fixo.
        n (int): Número de estados.
        seed (int): Semente mestra.
        trial (int): Índice da tentativa (define o fluxo do gerador).

    Returns:
        np.ndarray: Sequência de estados (int64).
    """
    if n < 1:
        raise ValueError(f"n precisa ser ≥ 1: {n}")
    cdf = [row.tolist() for row in _cdf_rows(P)]
    initial = _initial_cdf(start, P.size)
    uniforms, _ = _draws(seed, trial, n)
    draws = uniforms.tolist()

    state = bisect.bisect_right(initial.tolist(), draws[0]) if initial is not None else int(start)
    states = [state]
    for u in draws[1:]:
        state = bisect.bisect_right(cdf[state], u)
        states.append(state)
    return np.asarray(states, dtype=np.int64)


def sample_chains(P, start, n, seed, trials):
    """
    Versão vetorizada de sample_chain para várias tentativas; a linha t coincide com
    sample_chain(P, start, n, seed, trials[t]). `start` também aceita um estado inicial por
    tentativa.

    Returns:
        tuple: (estados t×n, pontos iniciais sorteados por tentativa)
    """
    cdf = _cdf_rows(P)
    initial = _initial_cdf(start, P.size)
    draws = [_draws(seed, trial, n) for trial in trials]
    uniforms = np.vstack([u for u, _ in draws])
    x_start = np.array([x for _, x in draws])

    states = np.empty(uniforms.shape, dtype=np.int64)
    if initial is not None:
        states[:, 0] = (initial[None, :] <= uniforms[:, :1]).sum(axis=1)
    else:
        states[:, 0] = start
    for i in range(1, n):
        states[:, i] = (cdf[states[:, i - 1]] <= uniforms[:, i:i + 1]).sum(axis=1)
    return states, x_start


def iterate(F, states, x0, seed=0, trial=0):
    """
    Percorre a órbita x_{i+1} = f_{ω_i}(x_i) com aritmética escalar.

    Returns:
        OrbitSample: Estados e pontos da órbita.
    """
    lifts = [f.lift_scalar for f in F]
    point = reduce_mod1(float(x0))
    points = [point]
    for state in np.asarray(states).tolist():
        point = reduce_mod1(lifts[state](point))
        points.append(point)
    return OrbitSample(int(seed), np.asarray(states, dtype=np.int64), np.asarray(points), int(trial))


def iterate_many(F, states, x_start):
    """Órbitas de várias tentativas em paralelo vetorial (t×(n+1) pontos)."""
    points = np.empty((states.shape[0], states.shape[1] + 1))
    points[:, 0] = reduce_mod1(np.asarray(x_start, dtype=np.float64))
    for i in range(states.shape[1]):
        current = points[:, i].copy()
        column = states[:, i]
        for state, f in enumerate(F):
            mask = column == state
            if mask.any():
                current[mask] = reduce_mod1(f.lift(current[mask]))
        points[:, i + 1] = current
    return points


def birkhoff_average(orbit, phi, N=None):
    """
    (1/n) Σ_{i=1..n} φ(Z_i), com Z_i = (ω_{i−1}, x_i).

    Args:
        orbit (OrbitSample): Órbita amostrada.
        phi (np.ndarray | callable): Tabela k×N sobre (estado, célula) ou função
            vetorizada φ(estados, pontos).
        N (int | None): Grade; por padrão a largura da tabela.

    Returns:
        float: Média temporal.
    """
    if orbit.length < 1:
        raise ValueError("Órbita vazia")
    states, points = orbit.states, orbit.points[1:]
    if callable(phi):
        return float(np.mean(phi(states, points)))
    table = np.asarray(phi, dtype=np.float64)
    cells = bin_index(points, N or table.shape[1])
    return float(table[states, cells].mean())


def _histogram_block(P, F, start, n, burn_in, N, seed, trials, x0):
    states, x_start = sample_chains(P, start, n, seed, trials)
    if x0 is not None:
        x_start = np.full(len(trials), float(x0))
    points = iterate_many(F, states, x_start)
    kept_states = states[:, burn_in:].ravel()
    kept_cells = bin_index(points[:, burn_in + 1:].ravel(), N)
    counts = np.zeros((P.size, N))
    np.add.at(counts, (kept_states, kept_cells), 1.0)
    return counts


def _blocks(trials, jobs):
    indices = list(range(trials))
    size = max(1, -(-trials // max(1, jobs)))
    return [indices[i:i + size] for i in range(0, trials, size)]


def empirical_product_measure(P, F, trials, n, burn_in, N, seed, start=None, m=None, x0=None, jobs=1):
    """
    Histograma de Z_i, i ∈ [burn_in, n), normalizado por estado e ponderado pela frequência
    dos estados.

    Args:
        P (FiniteKernel): Núcleo condutor.
        F (MapFamily): Família de mapas.
        trials (int): Número de órbitas independentes.
        n (int): Passos por órbita.
        burn_in (int): Passos descartados no início de cada órbita.
        N (int): Grade do histograma.
        seed (int): Semente mestra.
        start (StationaryVector | int | None): Lei inicial (padrão m).
        m (StationaryVector | None): Medida estacionária, usada quando start é None.
        x0 (float | None): Ponto inicial comum; sorteado uniformemente por tentativa se None.
        jobs (int): Processos do joblib.

    Returns:
        ProductMeasure: Medida empírica (marginal = frequências observadas).
    """
    if not 0 <= burn_in < n:
        raise ValueError(f"burn_in precisa estar em [0, n): {burn_in}, n = {n}")
    F.require_size(P.size)
    start = start if start is not None else m
    if start is None:
        raise ValueError("Informe a lei inicial (start) ou a medida estacionária (m)")
    blocks = _blocks(trials, jobs)
    partial = Parallel(n_jobs=jobs)(
        delayed(_histogram_block)(P, F, start, n, burn_in, N, seed, block, x0) for block in blocks)
    counts = np.sum(partial, axis=0)

    frequencies = counts.sum(axis=1)
    marginal = StationaryVector(frequencies / frequencies.sum())
    rows = np.where(frequencies[:, None] > 0, counts, 1.0)
    logger.info("Medida empírica: %d amostras em %d tentativas (N=%d)", int(frequencies.sum()), trials, N)
    return ProductMeasure.from_array(marginal, rows)


def _start_orbit(P, F, state, x0, n, seed, trial):
    states = sample_chain(P, state, n, seed, trial)
    return iterate(F, states, x0, seed, trial)


def ergodicity_diagnostic(P, F, phis, starts, n, seed, jobs=1):
    """
    Médias de Birkhoff de cada função teste a partir de cada início (estado, x₀).

    Args:
        P (FiniteKernel): Núcleo condutor.
        F (MapFamily): Família de mapas.
        phis (list): Tabelas k×N das funções teste.
        starts (list): Pares (estado inicial, x₀).
        n (int): Passos por órbita.
        seed (int): Semente mestra; o início t usa a tentativa t.
        jobs (int): Processos do joblib.

    Returns:
        tuple: (DataFrame início × função, Series com a amplitude max − min por função)
    """
    orbits = Parallel(n_jobs=jobs)(
        delayed(_start_orbit)(P, F, state, x0, n, seed, trial) for trial, (state, x0) in enumerate(starts))
    table = pd.DataFrame(
        [[birkhoff_average(orbit, phi) for phi in phis] for orbit in orbits],
        index=[f"inicio_{t}" for t in range(len(starts))],
        columns=[f"phi_{j}" for j in range(len(phis))])
    spread = table.max(axis=0) - table.min(axis=0)
    return table, spread


def reducible_family():
    """
    Dois homeomorfismos lineares por partes que fixam 0 e 1/2: os arcos [0, 1/2) e [1/2, 1)
    são invariantes por ambos, então órbitas iniciadas em metades diferentes nunca se misturam.

    As extremidades são repulsoras e os atratores (0.2 e 0.3, 0.7 e 0.8) ficam no interior
    dos arcos; órbitas não se acumulam em 0 ≡ 1, onde o arredondamento trocaria de arco.
    """
    return MapFamily(tuple(PiecewiseLinear(np.array(knots), np.array(images)) for knots, images in REDUCIBLE_NODES))


def _word_weights(P, m, length):
    """Tensor de pesos de Markov m_{w₀} Π p_{w_i w_{i+1}} sobre palavras de `length` letras."""
    weights = np.asarray(m, dtype=np.float64)
    for _ in range(length - 1):
        weights = weights[..., :, None] * P.rows
    return weights


def check_shift_duality(P, Q, m, g, u, L):
    """
    |E[u(σω) g(ω₀)] − E[u(ω) Σ_β g(β) q(ω₀, β)]| por enumeração exata.

    Args:
        P (FiniteKernel): Núcleo condutor.
        Q (FiniteKernel): Núcleo dual.
        m (StationaryVector): Medida estacionária.
        g (np.ndarray): Vetor sobre E.
        u (np.ndarray): Tensor k^(L+1) sobre as primeiras L + 1 coordenadas.
        L (int): Profundidade do cilindro de u.

    Returns:
        float: Diferença absoluta entre os dois lados.
    """
    k = P.size
    if k ** (L + 2) > ENUMERATION_LIMIT:
        raise TooLarge(k ** (L + 2), ENUMERATION_LIMIT)
    g = np.asarray(g, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (k,) * (L + 1):
        raise ShapeMismatch(f"u com shape {u.shape}, esperado {(k,) * (L + 1)}")
    weights = m.weights if isinstance(m, StationaryVector) else np.asarray(m)

    long_words = _word_weights(P, weights, L + 2)
    shifted = np.sum(long_words * g.reshape((k,) + (1,) * (L + 1)) * u[None, ...])
    short_words = _word_weights(P, weights, L + 1)
    conditioned = (Q.rows @ g).reshape((k,) + (1,) * L)
    direct = np.sum(short_words * u * conditioned)
    return float(abs(shifted - direct))


class BoundCheck(NamedTuple):
    holds: bool
    margin: float


def _check_monotone(F, H, N, L):
    """h ≥ h∘F na grade: H[ω₀..ω_{L−1}, b] ≥ H[ω₁..ω_L, c] sempre que f_{ω₀} leva b em c."""
    k = len(F)
    violations = []
    for alpha, f in enumerate(F):
        support = transfer_matrix(f, N).tocoo()
        reach = support.data > SUPPORT_TOL
        rows, cols = support.row[reach], support.col[reach]
        for tail in itertools.product(range(k), repeat=L):
            before = H[(alpha,) + tail[:-1]] if L else H
            after = H[tail]
            gap = after[cols] - before[rows]
            bad = np.flatnonzero(gap > 1e-12)
            violations.extend((alpha,) + tail + (int(rows[i]), int(cols[i])) for i in bad[:5])
    if violations:
        raise HypothesisFailed(violations)


def check_conditional_bound(pair, F, h, x0, n, L=None):
    """
    Verifica E(h(F^n(·, x₀)) | 𝓕_{n−1}) ≥ C·h̄(f_ω^n(x₀)) em todos os átomos de 𝓕_{n−1}.

    h(ω, x) depende das L primeiras coordenadas de ω e da célula de x: tabela de shape
    (k,)*L + (N,). h̄(x) = Σ_v ℙ(v) h(v, x).

    Args:
        pair (BoundedPair): Par limitado (p, m, C).
        F (MapFamily): Família de mapas.
        h (np.ndarray): Tabela não negativa de h.
        x0 (float): Ponto inicial.
        n (int): Passo da cota (n ≥ 1).
        L (int | None): Profundidade do cilindro; deduzida do shape de h se None.

    Returns:
        BoundCheck: holds e a menor folga sobre os átomos de massa positiva.

    Raises:
        TooLarge: Se k^(n+L) > 10⁶.
        HypothesisFailed: Se h ≥ h∘F falhar na grade.
    """
    k = pair.size
    H = np.asarray(h, dtype=np.float64)
    L = H.ndim - 1 if L is None else L
    N = H.shape[-1]
    if H.shape != (k,) * L + (N,):
        raise ShapeMismatch(f"h com shape {H.shape}, esperado {(k,) * L + (N,)}")
    if H.min() < 0:
        raise ValueError("h precisa ser não negativa")
    if k ** (n + L) > ENUMERATION_LIMIT:
        raise TooLarge(k ** (n + L), ENUMERATION_LIMIT)
    F.require_size(k)
    _check_monotone(F, H, N, L)

    P, m, C = pair.kernel, pair.stationary.weights, pair.constant_C
    if L:
        future = _word_weights(P, m, L).reshape(k ** L)
        after_state = [_word_weights(P, P.rows[s], L).reshape(k ** L) for s in range(k)]
    else:
        future, after_state = np.ones(1), [np.ones(1)] * k
    table = H.reshape(k ** L, N)

    lifts = [f.lift_scalar for f in F]
    margin = float("inf")
    for word in itertools.product(range(k), repeat=n):
        mass = m[word[0]] * np.prod([P.rows[a, b] for a, b in zip(word[:-1], word[1:])])
        if mass <= 0:
            continue
        point = reduce_mod1(float(x0))
        for state in word:
            point = reduce_mod1(lifts[state](point))
        cell = int(bin_index(point, N))
        conditional = float(after_state[word[-1]] @ table[:, cell])
        averaged = float(future @ table[:, cell])
        margin = min(margin, conditional - C * averaged)
    return BoundCheck(margin >= -1e-12, margin)


def chain_frequencies(states, k):
    return np.bincount(np.asarray(states).ravel(), minlength=k) / np.asarray(states).size

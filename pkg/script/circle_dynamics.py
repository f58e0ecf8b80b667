'''
    ITERACOES_MARKOV

    ||> Objetivo: homeomorfismos do círculo S¹ = ℝ/ℤ que preservam orientação.

        |> Variantes: rotação, ação projetiva de matriz 2×2 (det > 0) e linear por partes.
        |> Carta projetiva: o ponto x ∈ [0, 1) representa a direção de ângulo πx em ℝP¹.
        |> Imagem exata de arcos pelo levantamento: [f(x), f(x + ℓ)] com comprimento
           lift(x + ℓ) − lift(x).
        |> Push-forward na grade por divisão proporcional à sobreposição
           (cada célula reparte a massa pelas células cobertas pela sua imagem).
        |> Busca de medida invariante comum a toda a família (ponto fixo comum ou iteração).
        |> Classes fechadas da grade, para reconhecer famílias redutíveis.
'''

import bisect
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import optimize, sparse
from scipy.sparse import csgraph

from script.errors import MapInvalid, ShapeMismatch
from script.grid_measures import GridMeasure, tv_distance
from script.logs import get_logger

logger = get_logger(__name__)


def reduce_mod1(x):
    """Reduz para [0, 1); evita que x = −1e−20 vire exatamente 1.0."""
    if isinstance(x, np.ndarray):
        reduced = np.mod(x, 1.0)
        return np.where(reduced >= 1.0, 0.0, reduced)
    reduced = x % 1.0
    return 0.0 if reduced >= 1.0 else reduced


@dataclass(frozen=True)
class CirclePoint:
    position: float

    def __post_init__(self):
        object.__setattr__(self, "position", reduce_mod1(float(self.position)))


@dataclass(frozen=True)
class Arc:
    """
    Arco orientado que parte de `start` e percorre `length` no sentido positivo.
    """

    start: CirclePoint
    length: float

    def __post_init__(self):
        if not isinstance(self.start, CirclePoint):
            object.__setattr__(self, "start", CirclePoint(self.start))
        if not 0.0 <= self.length <= 1.0:
            raise ValueError(f"Comprimento de arco fora de [0, 1]: {self.length}")

    @property
    def end(self):
        return CirclePoint(self.start.position + self.length)

    @property
    def diameter(self):
        return min(self.length, 1.0 - self.length)


@dataclass(frozen=True, eq=False)
class Rotation:
    angle: float

    variant = "rotation"
    smooth = True

    def lift(self, x):
        return np.asarray(x, dtype=np.float64) + self.angle

    def lift_scalar(self, x):
        return x + self.angle

    def derivative(self, x):
        return np.ones_like(np.asarray(x, dtype=np.float64))

    def arc_image(self, start, length):
        return reduce_mod1(np.asarray(start, dtype=np.float64) + self.angle), np.asarray(length, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class Projective:
    """
    Ação de uma matriz 2×2 com determinante positivo em ℝP¹ ≅ S¹.

    A matriz é normalizada para det = 1 e, se o traço for negativo, trocada por −A
    (mesma ação projetiva). Com traço ≥ 0 o ângulo entre v e Av nunca chega a ±π, o que
    torna o levantamento x + ∠(v, Av)/π contínuo.
    """

    matrix: np.ndarray

    variant = "projective"
    smooth = True

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.shape != (2, 2) or not np.all(np.isfinite(matrix)):
            raise MapInvalid(f"Matriz projetiva precisa ser 2×2 finita, recebido {matrix.shape}")
        det = float(np.linalg.det(matrix))
        if det <= 0:
            raise MapInvalid(f"Determinante não positivo ({det:.3e}): a ação inverteria a orientação")
        matrix = matrix / math.sqrt(det)
        if np.trace(matrix) < 0:
            matrix = -matrix
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        a, b, c, d = (float(v) for v in matrix.ravel())
        object.__setattr__(self, "_entries", (a, b, c, d))

    def _image(self, x):
        angle = np.pi * np.asarray(x, dtype=np.float64)
        cos, sin = np.cos(angle), np.sin(angle)
        a, b, c, d = self._entries
        return cos, sin, a * cos + b * sin, c * cos + d * sin

    def lift(self, x):
        cos, sin, u, w = self._image(x)
        turn = np.arctan2(cos * w - sin * u, cos * u + sin * w)
        return np.asarray(x, dtype=np.float64) + turn / np.pi

    def lift_scalar(self, x):
        a, b, c, d = self._entries
        cos, sin = math.cos(math.pi * x), math.sin(math.pi * x)
        u, w = a * cos + b * sin, c * cos + d * sin
        return x + math.atan2(cos * w - sin * u, cos * u + sin * w) / math.pi

    def derivative(self, x):
        _, _, u, w = self._image(x)
        return 1.0 / (u * u + w * w)

    def arc_image(self, start, length):
        start = np.asarray(start, dtype=np.float64)
        head = self.lift(start)
        tail = self.lift(start + length)
        return reduce_mod1(head), np.clip(tail - head, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """
    Homeomorfismo linear por partes dado pelos nós (breakpoints) em [0, 1) e pelos valores
    do levantamento nesses nós (images), estendido periodicamente.
    """

    breakpoints: np.ndarray
    images: np.ndarray

    variant = "piecewise_linear"
    smooth = False

    def __post_init__(self):
        knots = np.array(self.breakpoints, dtype=np.float64)
        values = np.array(self.images, dtype=np.float64)
        if knots.ndim != 1 or knots.shape != values.shape or knots.size == 0:
            raise MapInvalid("Nós e imagens precisam ser vetores 1-D de mesmo tamanho")
        if knots[0] < 0 or knots[-1] >= 1 or np.any(np.diff(knots) <= 0):
            raise MapInvalid("Nós precisam ser estritamente crescentes dentro de [0, 1)")
        if np.any(np.diff(values) <= 0) or values[-1] >= values[0] + 1:
            raise MapInvalid("Levantamento linear por partes não é estritamente crescente")
        xs = np.append(knots, knots[0] + 1.0)
        ys = np.append(values, values[0] + 1.0)
        for name, array in (("breakpoints", knots), ("images", values), ("_xs", xs), ("_ys", ys)):
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        object.__setattr__(self, "_slopes", np.diff(ys) / np.diff(xs))
        object.__setattr__(self, "_xs_list", xs.tolist())
        object.__setattr__(self, "_ys_list", ys.tolist())

    def _fold(self, x):
        x = np.asarray(x, dtype=np.float64)
        turns = np.floor(x - self._xs[0])
        return x - turns, turns

    def lift(self, x):
        folded, turns = self._fold(x)
        return np.interp(folded, self._xs, self._ys) + turns

    def lift_scalar(self, x):
        xs, ys = self._xs_list, self._ys_list
        turns = math.floor(x - xs[0])
        folded = x - turns
        i = min(max(bisect.bisect_right(xs, folded) - 1, 0), len(xs) - 2)
        return ys[i] + (folded - xs[i]) * (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) + turns

    def derivative(self, x):
        folded, _ = self._fold(x)
        # inclinação à direita nos nós
        piece = np.searchsorted(self._xs, folded, side="right") - 1
        return self._slopes[np.clip(piece, 0, self._slopes.size - 1)]

    def arc_image(self, start, length):
        start = np.asarray(start, dtype=np.float64)
        head = self.lift(start)
        tail = self.lift(start + length)
        return reduce_mod1(head), np.clip(tail - head, 0.0, 1.0)


CircleMap = Rotation | Projective | PiecewiseLinear


@dataclass(frozen=True, eq=False)
class MapFamily:
    """Família {f_α} indexada pelos estados do núcleo condutor."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise MapInvalid("Família de mapas vazia")
        object.__setattr__(self, "maps", maps)

    def __len__(self):
        return len(self.maps)

    def __getitem__(self, index):
        return self.maps[index]

    def __iter__(self):
        return iter(self.maps)

    @property
    def size(self):
        return len(self.maps)

    @property
    def surrogate(self):
        """True quando algum mapa não é suave (estimativas de expoente são substitutas)."""
        return any(not f.smooth for f in self.maps)

    def require_size(self, k):
        if len(self.maps) != k:
            raise ShapeMismatch(f"família com {len(self.maps)} mapas para núcleo com {k} estados")


def identity_map():
    return Rotation(0.0)


def rotation_matrix(theta):
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


def hyperbolic_projective(stretch, attractor):
    """
    Mapa projetivo hiperbólico R(θ)·diag(s, 1/s)·R(−θ), θ = π·attractor.

    Args:
        stretch (float): Autovalor s > 1.
        attractor (float): Ponto fixo atrator na carta; o repulsor fica em attractor + 1/2.

    Returns:
        Projective: Mapa com derivada 1/s² no atrator e s² no repulsor.
    """
    if stretch <= 0:
        raise MapInvalid(f"Estiramento precisa ser positivo: {stretch}")
    theta = math.pi * attractor
    matrix = rotation_matrix(theta) @ np.diag([stretch, 1.0 / stretch]) @ rotation_matrix(-theta)
    return Projective(matrix)


def apply(f, x):
    """
    Aplica f ao ponto x e reduz mod 1. Aceita CirclePoint, float ou array.
    """
    if isinstance(x, CirclePoint):
        return CirclePoint(f.lift_scalar(x.position))
    if isinstance(x, np.ndarray):
        return reduce_mod1(f.lift(x))
    return reduce_mod1(f.lift_scalar(float(x)))


def apply_arc(f, arc):
    start, length = f.arc_image(arc.start.position, arc.length)
    return Arc(CirclePoint(float(start)), float(length))


def derivative(f, x):
    position = x.position if isinstance(x, CirclePoint) else x
    value = f.derivative(position)
    return float(value) if np.ndim(value) == 0 else value


def is_monotone_lift(f, rng, pairs=1000):
    """
    Sorteia pares x < y no levantamento e confere lift(x) < lift(y) e lift(x + 1) = lift(x) + 1.
    """
    x = rng.uniform(-1.0, 2.0, size=pairs)
    y = x + rng.uniform(1e-6, 1.0, size=pairs)
    increasing = bool(np.all(f.lift(x) < f.lift(y)))
    periodic = bool(np.allclose(f.lift(x + 1.0) - f.lift(x), 1.0, atol=1e-12))
    return increasing and periodic


@lru_cache(maxsize=256)
def transfer_matrix(f, N):
    """
    Matriz esparsa T (N×N) do push-forward na grade: T[a, c] é a fração da célula a
    que cai na célula c. Uma linha por célula de origem; linhas somam 1.

    Args:
        f: Mapa do círculo.
        N (int): Número de células.

    Returns:
        scipy.sparse.csr_matrix: Matriz de transferência.
    """
    edges = f.lift(np.arange(N + 1) / N)
    edges[N] = edges[0] + 1.0
    low_edge, high_edge = N * edges[:-1], N * edges[1:]
    widths = high_edge - low_edge

    first = np.floor(low_edge).astype(np.int64)
    last = np.maximum(np.ceil(high_edge).astype(np.int64), first + 1)
    counts = last - first
    source = np.repeat(np.arange(N), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    cell = first[source] + offsets

    overlap = np.minimum(high_edge[source], cell + 1) - np.maximum(low_edge[source], cell)
    overlap = np.clip(overlap, 0.0, None)
    degenerate = widths[source] <= 0
    share = np.where(degenerate, (offsets == 0).astype(np.float64), overlap / np.where(degenerate, 1.0, widths[source]))

    matrix = sparse.csr_matrix((share, (source, np.mod(cell, N))), shape=(N, N))
    matrix.eliminate_zeros()
    totals = np.asarray(matrix.sum(axis=1)).ravel()
    return sparse.diags(1.0 / totals) @ matrix


def pushforward(f, mu):
    """
    Push-forward f_*μ na grade do próprio μ (massa total preservada).
    """
    T = transfer_matrix(f, mu.N)
    return GridMeasure.from_weights(T.T @ mu.bins)


def _support(F, support_weights):
    weights = np.asarray(support_weights, dtype=np.float64)
    F.require_size(weights.size)
    return weights


def common_invariant_residual(F, support_weights, mu):
    """
    max_α TV(f_α*μ, μ) sobre os estados de peso positivo.
    """
    weights = _support(F, support_weights)
    return max(tv_distance(pushforward(f, mu), mu) for f, w in zip(F, weights) if w > 0)


def closed_classes(F, support_weights, N, tol=1e-9):
    """
    Classes fechadas da cadeia na grade: componentes fortemente conexas do grafo de
    transições (união dos suportes das matrizes T_α de peso positivo) das quais não sai aresta.

    Mais de uma classe fechada indica família redutível (ν não é única).

    Returns:
        list: Vetores de índices de células, um por classe, ordenados pela primeira célula.
    """
    weights = _support(F, support_weights)
    graph = sum((transfer_matrix(f, N) > tol).astype(np.int8) for f, w in zip(F, weights) if w > 0).tocoo()
    count, labels = csgraph.connected_components(graph, directed=True, connection="strong")
    leaking = set(labels[graph.row[labels[graph.row] != labels[graph.col]]].tolist())
    classes = [np.flatnonzero(labels == c) for c in range(count) if c not in leaking]
    return sorted(classes, key=lambda cells: int(cells[0]))


def _displacement(f, x):
    # lift(x) − x reduzido ao inteiro mais próximo: zero exatamente nos pontos fixos
    shift = f.lift_scalar(x) - x
    return shift - round(shift)


def common_fixed_points(F, support_weights, samples=4096, tol=1e-10):
    """
    Pontos fixados por todos os mapas de peso positivo; a massa pontual em cada um
    é uma medida invariante comum exata.

    Os candidatos são os pontos fixos do primeiro mapa ativo: zeros exatos da amostra
    e trocas de sinal refinadas por brentq.

    Returns:
        list: Pontos em [0, 1), ordenados.
    """
    weights = _support(F, support_weights)
    active = [f for f, w in zip(F, weights) if w > 0]
    xs = np.arange(samples + 1) / samples
    shifts = active[0].lift(xs) - xs
    shifts -= np.round(shifts)
    candidates = set(xs[:-1][shifts[:-1] == 0.0].tolist())
    crossing = (shifts[:-1] * shifts[1:] < 0) & (np.abs(shifts[:-1]) < 0.25) & (np.abs(shifts[1:]) < 0.25)
    for i in np.flatnonzero(crossing):
        low, high = _displacement(active[0], xs[i]), _displacement(active[0], xs[i + 1])
        if low == 0.0 or high == 0.0:
            candidates.add(float(reduce_mod1(xs[i] if low == 0.0 else xs[i + 1])))
        elif low * high < 0:
            root = optimize.brentq(lambda x: _displacement(active[0], x), xs[i], xs[i + 1], xtol=1e-14)
            candidates.add(float(reduce_mod1(root)))
    return sorted(x for x in candidates if all(abs(_displacement(f, x)) <= tol for f in active))


class InvariantSearch(NamedTuple):
    found: bool
    residual: float
    witness: GridMeasure
    fixed_point: float | None = None

    @property
    def label(self):
        # achado positivo certifica (até o erro de grade); negativo é só evidência
        return "certificado" if self.found else "evidencia"


def detect_common_invariant(F, support_weights, N, tol=1e-10, max_iter=20_000):
    """
    Procura uma medida invariante comum: primeiro um ponto fixado por todos os mapas ativos
    (massa pontual exata), depois iterando μ ← Σ_α w_α f_α*μ a partir da uniforme.

    Args:
        F (MapFamily): Família de mapas.
        support_weights (np.ndarray): Pesos dos estados (normalmente m).
        N (int): Tamanho da grade.
        tol (float): Critério de parada na variação total entre iterados.
        max_iter (int): Limite de iterações.

    Returns:
        InvariantSearch: (found, residual, witness, fixed_point); found = residual < 10·tol.
    """
    weights = _support(F, support_weights)
    fixed = common_fixed_points(F, weights)
    if fixed:
        x = fixed[0]
        residual = max(abs(_displacement(f, x)) for f, w in zip(F, weights) if w > 0)
        logger.info("Medida invariante comum: massa pontual em x = %.6f (ponto fixo de todos os mapas)", x)
        return InvariantSearch(True, residual, GridMeasure.point_mass(N, x), x)

    active = [(w, transfer_matrix(f, N)) for f, w in zip(F, weights) if w > 0]
    total = sum(w for w, _ in active)
    operator = sparse.csr_matrix((N, N))
    for w, T in active:
        operator = operator + (w / total) * T.T
    operator = operator.tocsr()

    bins = np.full(N, 1.0 / N)
    for iteration in range(1, max_iter + 1):
        updated = operator @ bins
        updated /= updated.sum()
        change = 0.5 * np.abs(updated - bins).sum()
        bins = updated
        if change < tol:
            break
    else:
        logger.debug("Busca de medida invariante parou no limite de %d iterações", max_iter)

    witness = GridMeasure.from_weights(bins)
    residual = common_invariant_residual(F, weights, witness)
    found = residual < 10 * tol
    logger.info(
        "Medida invariante comum: %s (resíduo %.3e, N=%d, %d iterações)",
        "encontrada" if found else "não encontrada", residual, N, iteration)
    return InvariantSearch(found, residual, witness)

'''
    ITERACOES_MARKOV

    ||> Objetivo: expoente de contração λ(ω, x) e sincronização local.

        |> Escada de arcos I_j = [x, x + δ₀·2^(−j)], j = 0..6, acompanhados pela imagem exata.
        |> Arcos menores que 1e-8 passam a ser acompanhados em log-comprimento pela derivada
           no início do arco (evita underflow em contrações fortes).
        |> Inclinação por mínimos quadrados de log-diâmetro × n no maior j que não explodiu
           (diâmetro < 1/4 em todo o percurso).
        |> λ̂ = mediana das inclinações, ρ̂ = e^λ̂; sincronização testada contra e^(nλ̂/2).
        |> λ₀̂ = maior quantil 95% sobre uma grade de pontos x.
'''

from dataclasses import asdict, dataclass, field

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from script.circle_dynamics import detect_common_invariant, reduce_mod1
from script.errors import AllLaddersBlewUp
from script.grid_measures import GridMeasure
from script.logs import get_logger
from script.measure_engine import SkewMeasure
from script.trajectory import sample_chains, trial_rng

logger = get_logger(__name__)

LADDER = 7
TINY_ARC = 1e-8
BLOW_UP = 0.25
UPPER_QUANTILE = 95.0
SYNC_THRESHOLD = 0.9
# fluxo reservado para sortear (ω₀, x) nas amostras de μ̂
SAMPLING_STREAM = 2 ** 31
# blocos por processo quando a barra de progresso está ligada
PROGRESS_BLOCKS = 4


@dataclass
class ContractionReport:
    per_trial_slopes: list
    lambda_hat: float
    lambda0_hat: float
    rho_hat: float
    sync_fraction: float
    hypothesis_violated: bool
    surrogate: bool
    invariant_residual: float
    blown_trials: int
    trials: int
    n: int
    delta0: float
    ladder: int
    grid: int
    seed: int
    invariant_label: str = "evidencia"

    def to_dict(self):
        return asdict(self)


@dataclass
class UniformBound:
    lambda0_hat: float
    x_grid: list
    quantiles: list
    hypothesis_violated: bool
    surrogate: bool = False
    invariant_label: str = "evidencia"
    slopes: dict = field(default_factory=dict, repr=False)

    def to_dict(self):
        payload = asdict(self)
        payload.pop("slopes")
        return payload


def _ladder_pass(F, states, x, delta0, ladder=LADDER, rate=None):
    """
    Acompanha a escada de arcos ao longo das órbitas (uma linha por tentativa).

    Args:
        F (MapFamily): Família de mapas.
        states (np.ndarray): Estados t×n.
        x (np.ndarray): Ponto base de cada tentativa.
        delta0 (float): Comprimento do maior arco.
        ladder (int): Número de degraus.
        rate (float | None): Se dado, confere log diam_n ≤ n·rate para todo n.

    Returns:
        tuple: (inclinações t×J, explodiu t×J, passo da explosão t×J, sincronizou t×J | None)
    """
    trials, n = states.shape
    lengths = np.tile(delta0 * 2.0 ** -np.arange(ladder), (trials, 1))
    starts = np.tile(reduce_mod1(np.asarray(x, dtype=np.float64))[:, None], (1, ladder))
    logs = np.log(lengths)
    initial = logs.copy()
    tiny = np.log(TINY_ARC)

    sum_d = np.zeros((trials, ladder))
    sum_td = np.zeros((trials, ladder))
    blown = np.zeros((trials, ladder), dtype=bool)
    escape = np.full((trials, ladder), -1, dtype=np.int64)
    synced = np.ones((trials, ladder), dtype=bool) if rate is not None else None

    for step in range(1, n + 1):
        column = states[:, step - 1]
        for state, f in enumerate(F):
            rows = np.flatnonzero(column == state)
            if rows.size == 0:
                continue
            start, length, log_length = starts[rows], lengths[rows], logs[rows]
            small = log_length < tiny

            exact_start, exact_length = f.arc_image(start, length)
            with np.errstate(divide="ignore"):
                exact_log = np.log(exact_length)
            slope_log = log_length + np.log(f.derivative(start))
            use_slope = small | (exact_length <= 0)

            logs[rows] = np.where(use_slope, slope_log, exact_log)
            lengths[rows] = np.where(use_slope, np.exp(slope_log), exact_length)
            starts[rows] = exact_start

        diameter = np.minimum(lengths, 1.0 - lengths)
        newly = ~blown & ((diameter >= BLOW_UP) | (lengths > 1.0 - BLOW_UP))
        escape[newly] = step
        blown |= newly

        drift = logs - initial
        sum_d += drift
        sum_td += step * drift
        if synced is not None:
            log_diameter = np.where(lengths > 0.5, np.log1p(-lengths), logs)
            synced &= log_diameter <= step * rate + 1e-12

    center = n / 2.0
    spread = n * (n + 1) * (n + 2) / 12.0
    slopes = (sum_td - center * sum_d) / spread
    return slopes, blown, escape, synced


def _pick_slopes(slopes, blown):
    """Inclinação do maior j que não explodiu; NaN quando toda a escada explodiu."""
    alive = ~blown
    chosen = np.where(alive.any(axis=1), alive.shape[1] - 1 - np.argmax(alive[:, ::-1], axis=1), -1)
    picked = np.where(chosen >= 0, slopes[np.arange(slopes.shape[0]), np.maximum(chosen, 0)], np.nan)
    return picked, chosen


def _slope_block(F, P, start, x, delta0, n, seed, trials, ladder):
    states, _ = sample_chains(P, start, n, seed, trials)
    slopes, blown, escape, _ = _ladder_pass(F, states, x, delta0, ladder)
    picked, _ = _pick_slopes(slopes, blown)
    return picked, escape


def _sync_block(F, P, start, x, delta0, n, seed, trials, ladder, rate):
    states, _ = sample_chains(P, start, n, seed, trials)
    _, _, _, synced = _ladder_pass(F, states, x, delta0, ladder, rate)
    return synced.any(axis=1)


def _spans(count, jobs):
    size = max(1, -(-count // max(1, jobs)))
    return [(low, min(low + size, count)) for low in range(0, count, size)]


def _dispatch(function, F, P, start, x, trials, jobs, *extra, progress=False):
    """
    Executa `function` em blocos contíguos de tentativas via joblib; os resultados voltam
    na ordem dos blocos. `start` pode ser a lei m ou um estado inicial por tentativa.
    Com `progress` os blocos são menores e a barra do tqdm avança a cada bloco concluído.
    """
    per_trial = np.ndim(start) == 1 and not hasattr(start, "weights")
    trials = list(trials)
    spans = _spans(len(trials), jobs * PROGRESS_BLOCKS if progress else jobs)
    results = Parallel(n_jobs=jobs, return_as="generator")(
        delayed(function)(
            F, P, start[low:high] if per_trial else start, x[low:high], *extra[:3], trials[low:high], *extra[3:])
        for low, high in spans)
    return list(tqdm(results, total=len(spans), desc="Blocos de tentativas", disable=not progress))


def _slopes(F, P, start, x, delta0, n, seed, trials, ladder=LADDER, jobs=1, progress=False):
    pieces = _dispatch(_slope_block, F, P, start, x, trials, jobs, delta0, n, seed, ladder, progress=progress)
    return np.concatenate([p for p, _ in pieces]), np.concatenate([e for _, e in pieces])


def _sync_flags(F, P, start, x, delta0, n, seed, trials, rate, ladder=LADDER, jobs=1):
    pieces = _dispatch(_sync_block, F, P, start, x, trials, jobs, delta0, n, seed, ladder, rate)
    return np.concatenate(pieces)


def estimate_exponent(F, P, m, x, delta0, n, seed, trial=0, ladder=LADDER):
    """
    Estima λ(ω, x) numa única tentativa.

    Args:
        F (MapFamily): Família de mapas.
        P (FiniteKernel): Núcleo condutor.
        m (StationaryVector): Lei inicial do condutor.
        x (float): Ponto base.
        delta0 (float): Maior arco da escada, em (0, 1/4].
        n (int): Passos (n ≥ 100).
        seed (int): Semente mestra.
        trial (int): Índice da tentativa.
        ladder (int): Número de degraus.

    Returns:
        float: Inclinação (≈ 0 para isometrias).

    Raises:
        AllLaddersBlewUp: Se todos os degraus atingirem diâmetro 1/4.
    """
    if not 0 < delta0 <= BLOW_UP:
        raise ValueError(f"δ₀ precisa estar em (0, 1/4]: {delta0}")
    if n < 100:
        raise ValueError(f"n precisa ser ≥ 100: {n}")
    x = x.position if hasattr(x, "position") else x
    states, _ = sample_chains(P, m, n, seed, [trial])
    slopes, blown, escape, _ = _ladder_pass(F, states, np.array([x]), delta0, ladder)
    picked, _ = _pick_slopes(slopes, blown)
    if np.isnan(picked[0]):
        raise AllLaddersBlewUp(escape[0].tolist())
    return float(picked[0])


def _hypothesis(F, m, grid):
    search = detect_common_invariant(F, m.weights, grid)
    if search.found:
        logger.warning(
            "Família com medida invariante comum (resíduo %.2e): hipótese da sincronização violada",
            search.residual)
    return search


def local_sync_experiment(F, P, m, x, trials, n, seed, delta0=0.25, threshold=SYNC_THRESHOLD,
                          grid=256, ladder=LADDER, jobs=1):
    """
    Experimento de sincronização local em `trials` tentativas a partir do ponto x.

    Primeira passada: inclinações e λ̂. Segunda passada (mesmas sementes): uma tentativa
    sincroniza se algum degrau satisfaz diam f_ω^n(I_j) ≤ e^(nλ̂/2) para todo n.

    Returns:
        ContractionReport: Relatório agregado.
    """
    x = x.position if hasattr(x, "position") else x
    search = _hypothesis(F, m, grid)
    indices = list(range(trials))
    bases = np.full(trials, float(x))

    slopes, _ = _slopes(F, P, m, bases, delta0, n, seed, indices, ladder, jobs)
    finite = slopes[np.isfinite(slopes)]
    blown_trials = int(trials - finite.size)
    if finite.size == 0:
        raise AllLaddersBlewUp([])
    lambda_hat = float(np.median(finite))
    lambda0_hat = float(np.percentile(finite, UPPER_QUANTILE))

    if lambda_hat < 0:
        synced = _sync_flags(F, P, m, bases, delta0, n, seed, indices, lambda_hat / 2.0, ladder, jobs)
        synced &= np.isfinite(slopes)
    else:
        # sem contração não há taxa a conferir
        synced = np.zeros(trials, dtype=bool)
    sync_fraction = float(synced.mean())

    report = ContractionReport(
        per_trial_slopes=[float(s) for s in finite],
        lambda_hat=lambda_hat,
        lambda0_hat=lambda0_hat,
        rho_hat=float(np.exp(lambda_hat)),
        sync_fraction=sync_fraction,
        hypothesis_violated=bool(search.found),
        surrogate=F.surrogate,
        invariant_residual=float(search.residual),
        blown_trials=blown_trials,
        trials=trials, n=n, delta0=delta0, ladder=ladder, grid=grid, seed=int(seed),
        invariant_label=search.label)
    logger.info(
        "λ̂ = %.4f, ρ̂ = %.4f, sincronização em %.1f%% das tentativas (limiar %.0f%%)",
        lambda_hat, report.rho_hat, 100 * sync_fraction, 100 * threshold)
    return report


def uniform_bound_scan(F, P, m, x_grid, trials, n, seed, delta0=0.25, grid=256, ladder=LADDER,
                       jobs=1, progress=False):
    """
    λ₀̂ = max sobre x do quantil 95% das inclinações.

    Args:
        x_grid (int | list): Tamanho G de uma grade uniforme ou a lista de pontos.

    Returns:
        UniformBound: λ₀̂, grade, quantis por ponto e o indicador da hipótese.
    """
    points = (np.arange(x_grid) + 0.5) / x_grid if np.ndim(x_grid) == 0 else np.asarray(x_grid, dtype=np.float64)
    search = _hypothesis(F, m, grid)
    # uma única passada vetorizada: a tentativa g·trials + t pertence ao ponto g
    indices = list(range(points.size * trials))
    slopes, _ = _slopes(F, P, m, np.repeat(points, trials), delta0, n, seed, indices, ladder, jobs, progress)
    quantiles, per_point = [], {}
    for x, row in zip(points, slopes.reshape(points.size, trials)):
        finite = row[np.isfinite(row)]
        per_point[float(x)] = finite.tolist()
        quantiles.append(float(np.percentile(finite, UPPER_QUANTILE)) if finite.size else float("nan"))
    lambda0_hat = float(np.nanmax(quantiles))
    logger.info("λ₀̂ = %.4f sobre %d pontos", lambda0_hat, len(points))
    if lambda0_hat >= 0 and not search.found:
        logger.warning("λ₀̂ ≥ 0 sem medida invariante comum detectada")
    return UniformBound(
        lambda0_hat, points.tolist(), quantiles, bool(search.found), F.surrogate, search.label, per_point)


def _sample_invariant_points(mu_hat, samples, seed):
    rng = trial_rng(seed, SAMPLING_STREAM)
    base = mu_hat.base.weights
    first = rng.choice(base.size, size=samples, p=base)
    family = mu_hat.stack()
    cells = np.array([rng.choice(mu_hat.N, p=family[s]) for s in first])
    x = (cells + rng.random(samples)) / mu_hat.N
    return first, x


def exponent_samples_of_invariant_measure(mu_hat, F, P, m, samples, n, seed, delta0=0.25,
                                          ladder=LADDER, jobs=1):
    """
    Inclinações λ(ω, x) com ω₀ ~ m, x ~ μ_{ω₀} e ω seguindo o condutor a partir de ω₀.
    Amostras cuja escada explode inteira são descartadas (e contadas no log).
    """
    first, x = _sample_invariant_points(mu_hat, samples, seed)
    slopes, _ = _slopes(F, P, first, x, delta0, n, seed, list(range(samples)), ladder, jobs)
    finite = slopes[np.isfinite(slopes)]
    if finite.size < samples:
        logger.warning("%d amostras descartadas (escada explodiu)", samples - finite.size)
    return finite


def exponent_of_invariant_measure(mu_hat, F, P, m, samples, n, seed, **options):
    """λ(μ̂) = ∫ λ(ω, x) dμ̂ por média de Monte Carlo."""
    finite = exponent_samples_of_invariant_measure(mu_hat, F, P, m, samples, n, seed, **options)
    return float(finite.mean())


def standard_error(samples):
    samples = np.asarray(samples, dtype=np.float64)
    return float(samples.std(ddof=1) / np.sqrt(samples.size)) if samples.size > 1 else float("nan")


def uniform_family_measure(m, N):
    """μ̂ com todos os μ_α uniformes (invariante para rotações)."""
    return SkewMeasure(m, tuple(GridMeasure.uniform(N) for _ in range(m.size)))

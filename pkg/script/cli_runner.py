'''
    ITERACOES_MARKOV

    ||> Objetivo: orquestrar os experimentos a partir do documento YAML.

        |> Verbos: solve, correspond, verify-lemmas, sync, scan.
        |> Opções: --config, --seed, --out, --jobs, --grid.
        |> Cada execução grava resumo JSON, dados CSV e documentacao_<verbo>.txt em --out,
           sempre com hash da configuração, semente, N e tolerâncias.
        |> Códigos de saída: 0 sucesso, 1 falha numérica, 2 configuração inválida.

    ||> Uso
        python -m script.cli_runner solve --config script/configs/bounded_pair.yaml
        python -m script.cli_runner verify-lemmas --config script/configs/rotations.yaml --jobs 4
'''

import dataclasses
import os
import sys

import click
import numpy as np

from script.circle_dynamics import closed_classes, transfer_matrix
from script.config import build_experiment, load_config
from script.correspondence import classical_limit_residual, roundtrip_residuals, xi
from script.errors import AllLaddersBlewUp, ConfigError, HypothesisFailed, IteracoesError, NoConvergence, TooLarge
from script.logs import configure_logging, get_logger, success
from script.markov_kernels import BoundedPair, duality_identity_residual, duality_residual
from script.measure_engine import (
    ProductMeasure, fixed_point_stationary, markov_operator_direct, markov_operator_dual,
    max_state_tv, point_mass_product, sandwich_check, skew_invariance_residual, stationarity_residual,
    stationary_from_seeds, uniform_product)
from script.outputs import (
    save_json_summary, save_measure_csv, save_orbit_csv, save_slopes_csv, write_run_documentation)
from script.sync_lab import (
    exponent_samples_of_invariant_measure, local_sync_experiment, standard_error, uniform_bound_scan)
from script.trajectory import (
    SUPPORT_TOL, check_conditional_bound, check_shift_duality, empirical_product_measure, ergodicity_diagnostic,
    iterate, sample_chain, trial_rng)

logger = get_logger(__name__)

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2
IID_TOL = 1e-10
NON_ERGODIC_SPREAD = 0.1

# fluxos do gerador usados pela bateria de verificação
STREAM_KAPPA, STREAM_OPERATOR, STREAM_SHIFT, STREAM_BOUND, STREAM_PHI = 1, 2, 3, 4, 5


def _row(statement_id, residual, threshold, passed=None, status=None, **extra):
    if status is None:
        status = "pass" if passed else "fail"
    return {"statement_id": statement_id, "residual": residual, "threshold": threshold,
            "pass": status == "pass", "status": status, **extra}


def _meta(experiment):
    config = experiment.config
    return {
        "config_hash": experiment.config_hash,
        "seed": experiment.seed,
        "grid": experiment.grid,
        "preset": config.preset,
        "tolerances": config.tolerances.model_dump(),
    }


def _csv_meta(experiment):
    tolerances = experiment.config.tolerances.model_dump()
    return {**experiment.metadata, **{f"tol_{name}": value for name, value in tolerances.items()}}


def _initial_measures(experiment):
    solver, m, N = experiment.config.solver, experiment.pair.stationary, experiment.grid
    if solver.init == "point_mass":
        first = solver.init_points[0] if solver.init_points else 0.0
        return point_mass_product(m, N, first), [point_mass_product(m, N, x) for x in solver.init_points[1:]]
    return uniform_product(m, N), [point_mass_product(m, N, x) for x in solver.init_points]


def solve_stationary(experiment):
    """
    Resolve ν e devolve (ν, linhas do resumo). Em caso de NoConvergence a média de Cesàro
    é gravada e o erro propagado.
    """
    config = experiment.config
    init, extra = _initial_measures(experiment)
    logger.info("Resolvendo medida estacionária (N=%d, tol=%.1e)...", experiment.grid, config.tolerances.fixed_point)
    nu = fixed_point_stationary(
        experiment.pair, experiment.family, init, config.tolerances.fixed_point, config.solver.max_iter)
    threshold = config.tolerances.residual_factor * config.tolerances.fixed_point
    residual = stationarity_residual(experiment.pair, experiment.dual, experiment.family, nu)
    rows = [_row("ponto_fixo_estacionario", residual, threshold, residual < threshold, iterations=nu.iterations)]
    if extra:
        distinct = stationary_from_seeds(
            experiment.pair, experiment.family, [init] + extra, config.tolerances.fixed_point, config.solver.max_iter)
        rows.append(_row("pontos_fixos_distintos", float(len(distinct)), 1.0, status="pass", count=len(distinct)))
    return nu, rows


def _kernel_rows(experiment):
    P, m, Q = experiment.kernel, experiment.pair.stationary, experiment.dual
    rows = [
        _row("medida_estacionaria", m.residual, 1e-10, m.residual <= 1e-10),
        _row("dual_linhas_estocasticas", float(np.abs(Q.rows.sum(axis=1) - 1).max()), 1e-12,
             bool(np.abs(Q.rows.sum(axis=1) - 1).max() <= 1e-12)),
    ]
    if isinstance(experiment.pair, BoundedPair):
        rows.append(_row("par_limitado", experiment.pair.constant_C, 0.0, experiment.pair.constant_C > 0,
                         constant_C=experiment.pair.constant_C))
    else:
        rows.append(_row("par_limitado", float("nan"), 0.0, status="skipped"))
    return rows


def _write(experiment, out_dir, verb, payload, steps):
    save_json_summary({"meta": _meta(experiment), **payload}, os.path.join(out_dir, f"resumo_{verb.replace('-', '_')}.json"))
    tolerances = ", ".join(f"{name}={value:g}" for name, value in experiment.config.tolerances.model_dump().items())
    write_run_documentation(out_dir, verb, steps + [
        f"Hash da configuração: {experiment.config_hash}",
        f"Semente: {experiment.seed}; grade N = {experiment.grid}",
        f"Tolerâncias: {tolerances}"])


def run_solve(experiment, out_dir, jobs=1):
    rows = _kernel_rows(experiment)
    try:
        nu, solver_rows = solve_stationary(experiment)
    except NoConvergence as error:
        save_measure_csv(error.cesaro, os.path.join(out_dir, "nu_cesaro.csv"), _csv_meta(experiment))
        rows.append(_row("ponto_fixo_estacionario", error.residual, experiment.config.tolerances.fixed_point,
                         status="fail", iterations=error.max_iter))
        _write(experiment, out_dir, "solve", {"rows": rows}, [
            "Medida estacionária m e núcleo dual calculados.",
            f"Ponto fixo não atingido em {error.max_iter} iterações; média de Cesàro salva em nu_cesaro.csv."])
        raise
    rows += solver_rows
    save_measure_csv(nu, os.path.join(out_dir, "nu.csv"), _csv_meta(experiment))
    save_measure_csv(nu.cesaro, os.path.join(out_dir, "nu_cesaro.csv"), _csv_meta(experiment))
    _write(experiment, out_dir, "solve", {"rows": rows, "stationary": experiment.pair.stationary.weights}, [
        "Medida estacionária m do núcleo condutor resolvida e conferida por iteração de potências.",
        "Núcleo dual q calculado e, se possível, a constante C do par limitado.",
        f"Ponto fixo do operador de Markov em {nu.iterations} iterações; ν salva em nu.csv."])
    return rows


def _correspondence_rows(experiment, nu):
    config = experiment.config
    factor, tol = config.tolerances.residual_factor, config.tolerances.fixed_point
    Q, F = experiment.dual, experiment.family
    mu_hat = xi(nu, Q)
    skew = skew_invariance_residual(experiment.pair, Q, F, mu_hat)
    input_residual = stationarity_residual(experiment.pair, Q, F, nu)
    bound = factor * (input_residual + config.tolerances.grid_error / experiment.grid)
    r1, r2 = roundtrip_residuals(nu, mu_hat, F, Q)
    rows = [
        _row("invariancia_de_xi", skew, factor * tol, skew < factor * tol),
        _row("ida_volta_theta_xi", r1, bound, r1 <= bound),
        _row("ida_volta_xi_theta", r2, bound, r2 <= bound),
    ]
    rows.append(_classical_limit_row(experiment, nu, Q))
    if isinstance(experiment.pair, BoundedPair):
        holds, worst = sandwich_check(nu, mu_hat, experiment.pair.constant_C)
        rows.append(_row("sanduiche", max(0.0, -worst), config.tolerances.sandwich, holds, worst_slack=worst))
    else:
        rows.append(_row("sanduiche", float("nan"), config.tolerances.sandwich, status="skipped"))
    return mu_hat, rows


def _classical_limit_row(experiment, nu, Q):
    """
    Com linhas do núcleo iguais a m, Ξ(ν) não depende do estado; fora desse caso a linha é `skipped`.
    """
    residual = classical_limit_residual(nu, Q)
    tol = experiment.config.tolerances.duality
    P, m = experiment.kernel, experiment.pair.stationary
    if float(np.abs(P.rows - m.weights[None, :]).max()) > IID_TOL:
        return _row("limite_classico", residual, tol, status="skipped")
    return _row("limite_classico", residual, tol, residual <= tol)


def run_correspond(experiment, out_dir, jobs=1):
    nu, rows = solve_stationary(experiment)
    mu_hat, more = _correspondence_rows(experiment, nu)
    rows += more
    save_measure_csv(nu, os.path.join(out_dir, "nu.csv"), _csv_meta(experiment))
    save_measure_csv(mu_hat, os.path.join(out_dir, "mu_hat.csv"), _csv_meta(experiment))
    _write(experiment, out_dir, "correspond", {"rows": rows}, [
        "Medida estacionária ν resolvida por ponto fixo.",
        "μ̂ = Ξ(ν) calculada com o núcleo dual; resíduo de invariância conferido.",
        "Idas e voltas Θ∘Ξ e Ξ∘Θ e o sanduíche C·μ_α ≤ Π₂*ν ≤ C⁻¹·μ_α conferidos."])
    return rows


def _duality_rows(experiment, Q):
    config, P, m = experiment.config, experiment.kernel, experiment.pair.stationary
    tol = config.tolerances.duality
    residual = duality_residual(P, Q, m)
    rng = trial_rng(experiment.seed, STREAM_KAPPA)
    identity = max(duality_identity_residual(P, Q, m, rng.random((P.size, P.size)))
                   for _ in range(config.verify.draws))
    rng = trial_rng(experiment.seed, STREAM_OPERATOR)
    gap = 0.0
    for _ in range(min(config.verify.draws, 50)):
        nu = ProductMeasure.from_array(m, rng.dirichlet(np.ones(experiment.grid), size=P.size))
        direct = markov_operator_direct(experiment.pair, experiment.family, nu)
        dual = markov_operator_dual(experiment.pair, Q, experiment.family, nu)
        gap = max(gap, max_state_tv(direct.stack(), dual.stack()))
    return [
        _row("dualidade_unitaria", residual, tol, residual <= tol),
        _row("identidade_dualidade", identity, tol, identity <= tol),
        _row("operador_duas_formas", gap, tol, gap <= tol),
    ]


def _shift_row(experiment, Q):
    config, P, m = experiment.config, experiment.kernel, experiment.pair.stationary
    L, k = config.verify.shift_depth, P.size
    rng = trial_rng(experiment.seed, STREAM_SHIFT)
    try:
        worst = max(check_shift_duality(P, Q, m, rng.random(k), rng.random((k,) * (L + 1)), L)
                    for _ in range(config.verify.draws))
    except TooLarge as error:
        logger.warning("Dualidade com o shift ignorada: %s", error)
        return _row("dualidade_shift", float("nan"), config.tolerances.duality, status="skipped")
    return _row("dualidade_shift", worst, config.tolerances.duality, worst <= config.tolerances.duality)


def forward_closed_complement(F, N, seeds):
    """
    Indicadora do complemento do fecho para frente de `seeds` pelas transições da grade:
    satisfaz h ≥ h∘F por construção.
    """
    reach = [(transfer_matrix(f, N) > SUPPORT_TOL).astype(np.int64) for f in F]
    closed = np.zeros(N, dtype=bool)
    closed[np.asarray(seeds, dtype=np.int64)] = True
    while True:
        grown = closed.copy()
        for support in reach:
            grown |= np.asarray(support.T @ closed.astype(np.int64)).ravel() > 0
        if np.array_equal(grown, closed):
            return (~closed).astype(np.float64)
        closed = grown


def _bound_row(experiment):
    config = experiment.config
    if not isinstance(experiment.pair, BoundedPair):
        return _row("cota_condicional", float("nan"), 0.0, status="skipped")
    N, L, k = config.verify.bound_grid, config.verify.bound_depth, experiment.pair.size
    rng = trial_rng(experiment.seed, STREAM_BOUND)
    x0 = config.trajectory.x0 if config.trajectory.x0 is not None else 0.1
    indicator = forward_closed_complement(experiment.family, N, rng.choice(N, size=2, replace=False))
    tables = [np.ones((k,) * L + (N,)), np.broadcast_to(indicator, (k,) * L + (N,)).copy()]
    try:
        margins = [check_conditional_bound(experiment.pair, experiment.family, h, x0, config.verify.bound_steps, L)
                   for h in tables]
    except TooLarge as error:
        logger.warning("Cota condicional ignorada: %s", error)
        return _row("cota_condicional", float("nan"), 0.0, status="skipped")
    except HypothesisFailed as error:
        logger.error("h ≥ h∘F falhou em %d transições", len(error.violations))
        return _row("cota_condicional", float("nan"), 0.0, status="fail", violations=len(error.violations))
    worst = min(result.margin for result in margins)
    return _row("cota_condicional", worst, 0.0, all(result.holds for result in margins))


def _simulation_rows(experiment, nu, out_dir, jobs):
    config = experiment.config
    spec, P, F, m = config.trajectory, experiment.kernel, experiment.family, experiment.pair.stationary
    empirical = empirical_product_measure(
        P, F, spec.trials, spec.n, spec.burn_in, experiment.grid, experiment.seed, m=m, x0=spec.x0, jobs=jobs)
    gap = max_state_tv(empirical.stack(), nu.stack())

    rng = trial_rng(experiment.seed, STREAM_PHI)
    phis = [rng.random((P.size, experiment.grid)) for _ in range(spec.test_functions)]
    starts = [(int(rng.integers(P.size)), float(rng.random())) for _ in range(spec.starts)]
    table, spread = ergodicity_diagnostic(P, F, phis, starts, spec.birkhoff_n, experiment.seed, jobs)
    targets = np.array([float(np.sum(m.weights[:, None] * phi * nu.stack())) for phi in phis])
    deviation = float(np.abs(table.to_numpy() - targets[None, :]).max())

    if config.output.orbit_dump:
        orbit = iterate(F, sample_chain(P, m, spec.n, experiment.seed), spec.x0 or 0.0, experiment.seed)
        save_orbit_csv(orbit, os.path.join(out_dir or config.output.directory, "orbita.csv"), _csv_meta(experiment))

    classes = closed_classes(F, m.weights, experiment.grid)
    if len(classes) > 1:
        logger.warning("%d classes fechadas na grade: família redutível, médias de Birkhoff dependem do início",
                       len(classes))
        return [
            _row("medida_empirica", gap, 0.05, status="skipped"),
            _row("ergodicidade", deviation, 0.02, status="skipped", spread=float(spread.max())),
            _non_ergodicity_row(experiment, classes, jobs),
        ]
    return [
        _row("medida_empirica", gap, 0.05, gap <= 0.05),
        _row("ergodicidade", deviation, 0.02, deviation <= 0.02, spread=float(spread.max())),
        _row("nao_ergodicidade", float("nan"), NON_ERGODIC_SPREAD, status="skipped", classes=1),
    ]


def _non_ergodicity_row(experiment, classes, jobs):
    """
    Uma função indicadora e um início por classe fechada: as médias de Birkhoff precisam
    diferir por mais de NON_ERGODIC_SPREAD entre inícios em classes diferentes.
    """
    spec, P, N = experiment.config.trajectory, experiment.kernel, experiment.grid
    phis, starts = [], []
    for cells in classes:
        indicator = np.zeros(N)
        indicator[cells] = 1.0
        phis.append(np.tile(indicator, (P.size, 1)))
        starts.append((0, (float(cells[cells.size // 2]) + 0.5) / N))
    _, spread = ergodicity_diagnostic(P, experiment.family, phis, starts, spec.birkhoff_n, experiment.seed, jobs)
    widest = float(spread.max())
    return _row("nao_ergodicidade", widest, NON_ERGODIC_SPREAD, widest > NON_ERGODIC_SPREAD, classes=len(classes))


def _sync_rows(experiment, jobs):
    config, spec = experiment.config, experiment.config.sync
    report = local_sync_experiment(
        experiment.family, experiment.kernel, experiment.pair.stationary, spec.x, spec.trials, spec.n,
        experiment.seed, spec.delta0, spec.threshold, experiment.grid, spec.ladder, jobs)
    if report.hypothesis_violated:
        status = "hypothesis-violated"
    else:
        status = "pass" if report.lambda_hat < -0.01 and report.sync_fraction >= spec.threshold else "fail"
    return report, [_row("sincronizacao_local", report.lambda_hat, -0.01, status=status,
                         sync_fraction=report.sync_fraction, surrogate=report.surrogate,
                         invariant=report.invariant_label)]


def verify_all(experiment, jobs=1, out_dir=None):
    """
    Bateria completa: dualidade, operador nas duas formas, ponto fixo, correspondência,
    sanduíche, dualidade com o shift, cota condicional, simulação e sincronização.

    Com verify.corrupt_dual o próprio P substitui o dual (controle negativo).

    Returns:
        list: Linhas {statement_id, residual, threshold, pass, status}.
    """
    Q = experiment.kernel if experiment.config.verify.corrupt_dual else experiment.dual
    if experiment.config.verify.corrupt_dual:
        logger.warning("Controle negativo: núcleo dual substituído por P")
    rows = _kernel_rows(experiment) + _duality_rows(experiment, Q)
    try:
        nu, solver_rows = solve_stationary(experiment)
    except NoConvergence as error:
        logger.warning("Bateria segue com a média de Cesàro")
        nu = error.cesaro
        solver_rows = [_row("ponto_fixo_estacionario", error.residual, experiment.config.tolerances.fixed_point,
                            status="fail", iterations=error.max_iter)]
    rows += solver_rows
    rows += _correspondence_rows(dataclasses.replace(experiment, dual=Q), nu)[1]
    rows.append(_shift_row(experiment, Q))
    rows.append(_bound_row(experiment))
    rows += _simulation_rows(experiment, nu, out_dir, jobs)
    try:
        rows += _sync_rows(experiment, jobs)[1]
    except AllLaddersBlewUp:
        logger.error("Todas as escadas explodiram a partir de x = %s", experiment.config.sync.x)
        rows.append(_row("sincronizacao_local", float("nan"), -0.01, status="fail"))
    failed = [row["statement_id"] for row in rows if row["status"] == "fail"]
    if failed:
        logger.warning("Linhas com falha: %s", ", ".join(failed))
    else:
        success(logger, "Bateria concluída sem falhas (%d linhas)", len(rows))
    return rows


def run_verify(experiment, out_dir, jobs=1):
    rows = verify_all(experiment, jobs, out_dir)
    _write(experiment, out_dir, "verify-lemmas", {"rows": rows}, [
        "Dualidade entre p e q conferida em conjuntos unitários e na identidade integral.",
        "Operador de Markov comparado nas formas direta e dual.",
        "Ponto fixo, correspondência Θ/Ξ e sanduíche conferidos.",
        "Dualidade com o shift e cota condicional verificadas por enumeração exata.",
        "Medida empírica, médias de Birkhoff e sincronização local simuladas."])
    return rows


def run_sync(experiment, out_dir, jobs=1):
    config, spec = experiment.config, experiment.config.sync
    report, rows = _sync_rows(experiment, jobs)
    payload = {"rows": rows, "report": report.to_dict()}
    try:
        nu, _ = solve_stationary(experiment)
    except NoConvergence as error:
        nu = error.cesaro
        logger.warning("Expoente de μ̂ calculado com a média de Cesàro")
    mu_hat = xi(nu, experiment.dual)
    samples = exponent_samples_of_invariant_measure(
        mu_hat, experiment.family, experiment.kernel, experiment.pair.stationary, spec.samples, spec.n,
        experiment.seed, spec.delta0, spec.ladder, jobs)
    payload["invariant_exponent"] = {
        "mean": float(samples.mean()) if samples.size else float("nan"),
        "standard_error": standard_error(samples),
        "samples": int(samples.size),
    }
    save_slopes_csv(report.per_trial_slopes, os.path.join(out_dir, "inclinacoes.csv"), _csv_meta(experiment))
    _write(experiment, out_dir, "sync", payload, [
        "Busca de medida invariante comum para conferir a hipótese da sincronização.",
        f"{spec.trials} tentativas de escada de arcos a partir de x = {spec.x}; inclinações em inclinacoes.csv.",
        "Expoente da medida invariante Ξ(ν) estimado por Monte Carlo."])
    return rows


def run_scan(experiment, out_dir, jobs=1):
    spec = experiment.config.sync
    bound = uniform_bound_scan(
        experiment.family, experiment.kernel, experiment.pair.stationary, spec.x_grid, spec.scan_trials,
        spec.n, experiment.seed, spec.delta0, experiment.grid, spec.ladder, jobs, progress=True)
    if bound.hypothesis_violated:
        status = "hypothesis-violated"
    else:
        status = "pass" if bound.lambda0_hat < -0.005 else "fail"
    rows = [_row("cota_uniforme", bound.lambda0_hat, -0.005, status=status, invariant=bound.invariant_label)]
    _write(experiment, out_dir, "scan", {"rows": rows, "bound": bound.to_dict()}, [
        f"Varredura de {len(bound.x_grid)} pontos x com {spec.scan_trials} tentativas cada.",
        "λ₀̂ = maior quantil 95% das inclinações."])
    return rows


PIPELINES = {
    "solve": run_solve,
    "correspond": run_correspond,
    "verify-lemmas": run_verify,
    "sync": run_sync,
    "scan": run_scan,
}


def run(config, verb, seed=None, out_dir=None, jobs=1, grid=None, base_dir="."):
    """
    Executa o pipeline `verb` e devolve o código de saída.

    Args:
        config (ExperimentConfig): Configuração validada.
        verb (str): solve | correspond | verify-lemmas | sync | scan.
        seed (int | None): Semente da linha de comando.
        out_dir (str | None): Diretório de saída (padrão output.directory).
        jobs (int): Processos do joblib.
        grid (int | None): N da linha de comando.

    Returns:
        int: 0 sucesso, 1 falha numérica ou linha reprovada, 2 configuração inválida.
    """
    try:
        experiment = build_experiment(config, seed, grid, base_dir)
        out_dir = out_dir or config.output.directory
        logger.info("Executando %s (hash %s, semente %d, N=%d)", verb, experiment.config_hash[:12],
                    experiment.seed, experiment.grid)
        rows = PIPELINES[verb](experiment, out_dir, jobs)
    except ConfigError as error:
        for message in error.messages:
            logger.error(message)
        return EXIT_CONFIG
    except IteracoesError as error:
        logger.error(str(error))
        return EXIT_NUMERIC
    if any(row["status"] == "fail" for row in rows):
        return EXIT_NUMERIC
    success(logger, "Execução %s concluída", verb)
    return EXIT_OK


def _common_options(function):
    options = [
        click.option("--config", "config_path", required=True, type=click.Path(), help="Documento YAML do experimento."),
        click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=None, help="Semente mestra (U64)."),
        click.option("--out", "out_dir", type=click.Path(), default=None, help="Diretório de saída."),
        click.option("--jobs", type=click.IntRange(1), default=1, show_default=True, help="Processos paralelos."),
        click.option("--grid", type=click.IntRange(4), default=None, help="Tamanho N da grade do círculo."),
        click.option("--verbose", is_flag=True, help="Mostra mensagens de depuração."),
        click.option("--log-file", type=click.Path(), default=None, help="Grava também o log neste arquivo."),
    ]
    for option in reversed(options):
        function = option(function)
    return function


def _invoke(verb, config_path, seed, out_dir, jobs, grid, verbose, log_file):
    configure_logging(verbose, log_file)
    try:
        config = load_config(config_path)
    except (ConfigError, FileNotFoundError) as error:
        for message in getattr(error, "messages", [str(error)]):
            logger.error(message)
        sys.exit(EXIT_CONFIG)
    sys.exit(run(config, verb, seed, out_dir, jobs, grid, os.path.dirname(os.path.abspath(config_path))))


@click.group()
def cli():
    """Iterações aleatórias markovianas de homeomorfismos do círculo."""


@cli.command()
@_common_options
def solve(**options):
    """Medida estacionária m, dual q, constante C e ν por ponto fixo."""
    _invoke("solve", **options)


@cli.command()
@_common_options
def correspond(**options):
    """Correspondência Θ/Ξ entre ν e μ̂, idas e voltas e sanduíche."""
    _invoke("correspond", **options)


@cli.command("verify-lemmas")
@_common_options
def verify_lemmas(**options):
    """Bateria completa de verificações (tabela pass/fail)."""
    _invoke("verify-lemmas", **options)


@cli.command()
@_common_options
def sync(**options):
    """Expoente de contração e sincronização local."""
    _invoke("sync", **options)


@cli.command()
@_common_options
def scan(**options):
    """Varredura em x da cota uniforme λ₀."""
    _invoke("scan", **options)


def main():
    cli()


if __name__ == "__main__":
    main()

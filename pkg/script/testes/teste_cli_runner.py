'''
    ITERACOES_MARKOV

    ||> Objetivo: testes de ponta a ponta dos verbos da linha de comando e da bateria de verificações.
'''

import json
import textwrap

import pytest
from click.testing import CliRunner

from script.cli_runner import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, cli, run, verify_all
from script.config import SEED_ENV, build_experiment, preset_config

SMALL = {
    "grid": 32,
    "trajectory": {"trials": 2, "n": 2_000, "burn_in": 100, "test_functions": 2, "starts": 2, "birkhoff_n": 2_000},
    "sync": {"trials": 10, "n": 200, "x_grid": 2, "scan_trials": 3, "samples": 4},
    "verify": {"draws": 5, "shift_depth": 1, "bound_steps": 2, "bound_depth": 1, "bound_grid": 8},
}


@pytest.fixture(autouse=True)
def sem_semente_no_ambiente(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


def _write_config(tmp_path, body):
    path = tmp_path / "exp.yaml"
    path.write_text(textwrap.dedent(body).lstrip(), encoding="utf-8")
    return str(path)


def _small_document(preset, seed=1):
    return f"""
        preset: {preset}
        seed: {seed}
        grid: 32
        trajectory: {{trials: 2, n: 2000, burn_in: 100, test_functions: 2, starts: 2, birkhoff_n: 2000}}
        sync: {{trials: 10, n: 200, x_grid: 2, scan_trials: 3, samples: 4}}
        verify: {{draws: 5, shift_depth: 1, bound_steps: 2, bound_depth: 1, bound_grid: 8}}
    """


def _rows(rows):
    return {row["statement_id"]: row for row in rows}


def test_solve_grava_resumo_e_medidas(tmp_path):
    out = tmp_path / "saida"
    result = CliRunner().invoke(cli, ["solve", "--config", _write_config(tmp_path, _small_document("bounded-pair")),
                                      "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    summary = json.loads((out / "resumo_solve.json").read_text(encoding="utf-8"))
    assert summary["meta"]["seed"] == 1
    assert summary["meta"]["grid"] == 32
    assert set(summary["meta"]["tolerances"]) >= {"fixed_point", "duality"}
    rows = _rows(summary["rows"])
    assert rows["ponto_fixo_estacionario"]["pass"]
    assert rows["par_limitado"]["constant_C"] == pytest.approx(0.3)
    assert (out / "nu.csv").exists()
    assert (out / "documentacao_solve.txt").read_text(encoding="utf-8").startswith("Processo executado: solve")
    header = (out / "nu.csv").read_text(encoding="utf-8").splitlines()[0]
    assert "config_hash" in header and "seed" in header and "grid" in header


def test_reexecucao_identica_byte_a_byte(tmp_path):
    config = _write_config(tmp_path, _small_document("bounded-pair"))
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert CliRunner().invoke(cli, ["correspond", "--config", config, "--out", str(out)]).exit_code == EXIT_OK
        outputs.append([(out / f).read_bytes() for f in ("resumo_correspond.json", "nu.csv", "mu_hat.csv")])
    assert outputs[0] == outputs[1]


def test_semente_e_grade_da_linha_de_comando(tmp_path):
    out = tmp_path / "saida"
    config = _write_config(tmp_path, _small_document("iid-uniform"))
    result = CliRunner().invoke(cli, ["solve", "--config", config, "--out", str(out), "--seed", "77", "--grid", "16"])
    assert result.exit_code == EXIT_OK
    meta = json.loads((out / "resumo_solve.json").read_text(encoding="utf-8"))["meta"]
    assert meta["seed"] == 77
    assert meta["grid"] == 16


def test_configuracao_invalida_sai_com_2(tmp_path):
    config = _write_config(tmp_path, "preset: bounded-pair\nseed: 1\ngrid: 2\n")
    result = CliRunner().invoke(cli, ["solve", "--config", config, "--out", str(tmp_path)])
    assert result.exit_code == EXIT_CONFIG
    missing = CliRunner().invoke(cli, ["solve", "--config", str(tmp_path / "nada.yaml")])
    assert missing.exit_code == EXIT_CONFIG


def test_semente_ausente_sai_com_2(tmp_path):
    config = _write_config(tmp_path, "preset: bounded-pair\n")
    assert run(preset_config("bounded-pair"), "solve", out_dir=str(tmp_path)) == EXIT_CONFIG
    assert CliRunner().invoke(cli, ["solve", "--config", config, "--out", str(tmp_path)]).exit_code == EXIT_CONFIG


def test_sem_convergencia_sai_com_1_e_grava_cesaro(tmp_path):
    config = preset_config("bounded-pair", seed=1, grid=32, solver={"max_iter": 1, "init": "point_mass", "init_points": [0.6]})
    assert run(config, "solve", out_dir=str(tmp_path)) == EXIT_NUMERIC
    assert (tmp_path / "nu_cesaro.csv").exists()
    summary = json.loads((tmp_path / "resumo_solve.json").read_text(encoding="utf-8"))
    assert _rows(summary["rows"])["ponto_fixo_estacionario"]["status"] == "fail"


def test_bateria_no_par_limitado(tmp_path):
    experiment = build_experiment(preset_config("bounded-pair", seed=1, **SMALL))
    rows = _rows(verify_all(experiment, out_dir=str(tmp_path)))
    for statement in ("dualidade_unitaria", "identidade_dualidade", "operador_duas_formas", "ponto_fixo_estacionario",
                      "invariancia_de_xi", "ida_volta_theta_xi", "ida_volta_xi_theta", "sanduiche",
                      "dualidade_shift", "cota_condicional"):
        assert rows[statement]["status"] == "pass", statement
    assert rows["sincronizacao_local"]["status"] in {"pass", "fail"}
    assert set(rows["medida_empirica"]) >= {"statement_id", "residual", "threshold", "pass", "status"}
    # núcleo não i.i.d.: o limite clássico não se aplica
    assert rows["limite_classico"]["status"] == "skipped"
    assert rows["nao_ergodicidade"]["status"] == "skipped"
    assert rows["sincronizacao_local"]["invariant"] == "evidencia"


def test_bateria_sem_convergencia_vira_linha():
    experiment = build_experiment(preset_config("bounded-pair", seed=1, solver={"max_iter": 1}, **SMALL))
    rows = _rows(verify_all(experiment))
    assert rows["ponto_fixo_estacionario"]["status"] == "fail"
    assert rows["dualidade_unitaria"]["status"] == "pass"


def test_bateria_com_dual_corrompido():
    experiment = build_experiment(preset_config("finite-positive", seed=1, **{**SMALL, "verify": {
        **SMALL["verify"], "corrupt_dual": True}}))
    rows = _rows(verify_all(experiment))
    assert rows["dualidade_unitaria"]["status"] == "fail"
    assert rows["identidade_dualidade"]["status"] == "fail"
    assert rows["operador_duas_formas"]["status"] == "fail"
    assert rows["dualidade_shift"]["status"] == "fail"


def test_bateria_com_rotacoes():
    experiment = build_experiment(preset_config("rotations", seed=1, **SMALL))
    rows = _rows(verify_all(experiment))
    assert rows["sincronizacao_local"]["status"] == "hypothesis-violated"
    assert rows["dualidade_unitaria"]["status"] == "pass"


def test_verbos_sync_e_scan(tmp_path):
    config = _write_config(tmp_path, _small_document("bounded-pair"))
    for verb, summary in (("sync", "resumo_sync.json"), ("scan", "resumo_scan.json")):
        out = tmp_path / verb
        result = CliRunner().invoke(cli, [verb, "--config", config, "--out", str(out), "--jobs", "2"])
        assert result.exit_code in {EXIT_OK, EXIT_NUMERIC}
        payload = json.loads((out / summary).read_text(encoding="utf-8"))
        assert payload["meta"]["config_hash"]
    assert (tmp_path / "sync" / "inclinacoes.csv").exists()


def test_verify_lemmas_grava_tabela(tmp_path):
    out = tmp_path / "saida"
    config = _write_config(tmp_path, _small_document("rotations"))
    result = CliRunner().invoke(cli, ["verify-lemmas", "--config", config, "--out", str(out),
                                      "--log-file", str(tmp_path / "exec.log")])
    assert result.exit_code in {EXIT_OK, EXIT_NUMERIC}
    rows = _rows(json.loads((out / "resumo_verify_lemmas.json").read_text(encoding="utf-8"))["rows"])
    assert rows["sincronizacao_local"]["status"] == "hypothesis-violated"
    assert (out / "documentacao_verify_lemmas.txt").exists()
    assert (tmp_path / "exec.log").exists()


def test_bateria_na_familia_redutivel():
    experiment = build_experiment(preset_config("reducible", seed=19, **SMALL))
    rows = _rows(verify_all(experiment))
    assert rows["nao_ergodicidade"]["status"] == "pass"
    assert rows["nao_ergodicidade"]["residual"] > 0.1
    assert rows["nao_ergodicidade"]["classes"] == 2
    assert rows["ergodicidade"]["status"] == "skipped"
    assert rows["medida_empirica"]["status"] == "skipped"
    assert rows["sincronizacao_local"]["status"] == "hypothesis-violated"
    assert rows["sincronizacao_local"]["invariant"] == "certificado"


def test_limite_classico_no_condutor_iid(tmp_path):
    out = tmp_path / "saida"
    config = _write_config(tmp_path, _small_document("iid-uniform"))
    result = CliRunner().invoke(cli, ["correspond", "--config", config, "--out", str(out)])
    assert result.exit_code in {EXIT_OK, EXIT_NUMERIC}
    rows = _rows(json.loads((out / "resumo_correspond.json").read_text(encoding="utf-8"))["rows"])
    assert rows["limite_classico"]["status"] == "pass"
    assert rows["limite_classico"]["residual"] <= 1e-12


def test_metadados_em_todos_os_arquivos(tmp_path):
    out = tmp_path / "saida"
    config = preset_config("bounded-pair", seed=3, output={"directory": str(out), "orbit_dump": True}, **SMALL)
    run(config, "verify-lemmas", out_dir=str(out))
    expected = {"config_hash", "seed", "grid", "tol_fixed_point", "tol_duality", "tol_residual_factor",
                "tol_grid_error", "tol_sandwich"}
    orbit_header = set((out / "orbita.csv").read_text(encoding="utf-8").splitlines()[0].split(","))
    assert orbit_header >= {"passo", "estado", "ponto"} | expected
    lines = (out / "documentacao_verify_lemmas.txt").read_text(encoding="utf-8").splitlines()
    assert lines[-2].endswith("Semente: 3; grade N = 32")
    assert "Tolerâncias: fixed_point=1e-10" in lines[-1]
    assert "sandwich=1e-12" in lines[-1]

    solved = tmp_path / "solve"
    run(preset_config("bounded-pair", seed=3, **SMALL), "solve", out_dir=str(solved))
    measure_header = set((solved / "nu.csv").read_text(encoding="utf-8").splitlines()[0].split(","))
    assert measure_header >= expected

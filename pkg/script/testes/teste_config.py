'''
    ITERACOES_MARKOV

    ||> Objetivo: testes da leitura e validação do documento de experimento.
'''

import textwrap

import numpy as np
import pytest
from numpy.testing import assert_allclose

from script.config import (
    PRESETS, SEED_ENV, build_experiment, config_hash, load_config, parse_config, preset_config, resolve_seed)
from script.errors import ConfigError
from script.markov_kernels import BoundedPair, DrivingPair


@pytest.fixture(autouse=True)
def sem_semente_no_ambiente(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


def _doc(text):
    return textwrap.dedent(text).lstrip()


def test_documento_explicito():
    config = parse_config(_doc("""
        schema_version: 1
        seed: 5
        grid: 32
        kernel:
          source: matrix
          rows: [[0.9, 0.1], [0.2, 0.8]]
        family:
          - variant: rotation
            angle: 0.1
          - variant: projective
            stretch: 2.0
            attractor: 0.25
        tolerances:
          fixed_point: 1.0e-9
    """))
    assert config.grid == 32
    assert config.tolerances.fixed_point == 1e-9
    assert config.tolerances.duality == 1e-12
    assert config.sync.trials == 200


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_todos_os_presets_constroem(name):
    experiment = build_experiment(preset_config(name), cli_seed=1, cli_grid=16)
    assert experiment.family.size == experiment.kernel.size
    assert experiment.grid == 16


def test_preset_par_limitado():
    experiment = build_experiment(preset_config("bounded-pair", seed=3))
    assert isinstance(experiment.pair, BoundedPair)
    assert experiment.pair.constant_C == pytest.approx(0.3)
    assert_allclose(experiment.pair.stationary.weights, [2 / 3, 1 / 3])
    assert experiment.seed == 3
    assert experiment.metadata == {"config_hash": experiment.config_hash, "seed": 3, "grid": 256}


def test_preset_iid_e_passeio_no_grupo():
    iid = build_experiment(preset_config("iid-uniform", seed=1))
    assert iid.pair.constant_C == 1.0
    walk = build_experiment(preset_config("random-walk-drive", seed=1))
    assert walk.pair.constant_C == pytest.approx(1.0)
    assert walk.kernel.size == 4


def test_secao_explicita_substitui_o_preset():
    config = parse_config(_doc("""
        preset: bounded-pair
        seed: 2
        kernel:
          source: iid
          weights: [0.25, 0.75]
    """))
    assert config.kernel.source == "iid"
    assert len(config.family) == 2


def test_preset_desconhecido():
    with pytest.raises(ConfigError) as info:
        parse_config("preset: inexistente\nseed: 1\n")
    assert "preset desconhecido" in info.value.messages[0]


def test_erro_aponta_a_linha():
    with pytest.raises(ConfigError) as info:
        parse_config(_doc("""
            preset: bounded-pair
            grdi: 3
            seed: 1
        """))
    assert info.value.messages[0].startswith("linha 2: grdi:")


def test_campo_obrigatorio_da_fonte():
    with pytest.raises(ConfigError) as info:
        parse_config(_doc("""
            seed: 1
            kernel:
              source: matrix
            family:
              - variant: rotation
                angle: 0.1
        """))
    assert any("rows" in message and message.startswith("linha 3") for message in info.value.messages)


def test_yaml_invalido():
    with pytest.raises(ConfigError) as info:
        parse_config("seed: [1, 2\ngrid: 3\n")
    assert info.value.messages[0].startswith("linha")


def test_documento_que_nao_e_mapeamento():
    with pytest.raises(ConfigError):
        parse_config("- 1\n- 2\n")


def test_prioridade_da_semente(monkeypatch, caplog):
    config = preset_config("bounded-pair", seed=10)
    assert resolve_seed(config, 20) == 20
    monkeypatch.setenv(SEED_ENV, "30")
    assert resolve_seed(config, None) == 30
    assert any(SEED_ENV in record.getMessage() for record in caplog.records)
    assert resolve_seed(config, 20) == 20


def test_semente_ausente_e_invalida(monkeypatch):
    with pytest.raises(ConfigError):
        resolve_seed(preset_config("bounded-pair"), None)
    monkeypatch.setenv(SEED_ENV, "abc")
    with pytest.raises(ConfigError):
        resolve_seed(preset_config("bounded-pair"), None)


def test_hash_estavel_e_sensivel():
    first = preset_config("bounded-pair", seed=1)
    assert config_hash(first) == config_hash(preset_config("bounded-pair", seed=1))
    assert config_hash(first) != config_hash(preset_config("bounded-pair", seed=2))
    grid_override = build_experiment(first, cli_grid=32)
    assert grid_override.config_hash != config_hash(first)


def test_dimensoes_inconsistentes():
    config = preset_config("bounded-pair", seed=1, family=[{"variant": "rotation", "angle": 0.1}])
    with pytest.raises(ConfigError) as info:
        build_experiment(config)
    assert "family" in info.value.messages[0]


def test_mapa_invalido_vira_erro_de_configuracao():
    config = preset_config("bounded-pair", seed=1, family=[
        {"variant": "projective", "matrix": [[0.0, 1.0], [1.0, 0.0]]},
        {"variant": "rotation", "angle": 0.1},
    ])
    with pytest.raises(ConfigError):
        build_experiment(config)


def test_nucleo_com_zero_nao_e_limitado():
    config = preset_config("bounded-pair", seed=1, kernel={"source": "matrix", "rows": [[0.0, 1.0], [0.5, 0.5]]})
    experiment = build_experiment(config)
    assert isinstance(experiment.pair, DrivingPair)
    assert not isinstance(experiment.pair, BoundedPair)


def test_nucleo_em_arquivo_relativo_ao_documento(tmp_path):
    (tmp_path / "p.txt").write_text("0.9 0.1\n0.2 0.8\n", encoding="utf-8")
    path = tmp_path / "exp.yaml"
    path.write_text(_doc("""
        preset: bounded-pair
        seed: 4
        kernel:
          source: file
          path: p.txt
    """), encoding="utf-8")
    experiment = build_experiment(load_config(str(path)), base_dir=str(tmp_path))
    assert_allclose(experiment.kernel.rows, np.array([[0.9, 0.1], [0.2, 0.8]]))
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "ausente.yaml"))

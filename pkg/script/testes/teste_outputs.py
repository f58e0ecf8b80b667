'''
    ITERACOES_MARKOV

    ||> Objetivo: testes da gravação de artefatos e das mensagens de execução.
'''

import json
import logging

import numpy as np
import pandas as pd

from script.logs import SUCESSO
from script.measure_engine import uniform_product
from script.outputs import (
    save_json_summary, save_measure_csv, save_orbit_csv, save_slopes_csv, write_run_documentation)
from script.trajectory import iterate, sample_chain


def test_resumo_json_ordenado_e_sem_nan(tmp_path):
    path = tmp_path / "sub" / "resumo.json"
    save_json_summary({"b": np.float64(float("nan")), "a": [np.int64(3), np.bool_(True)], "c": np.array([0.5])}, str(path))
    text = path.read_text(encoding="utf-8")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [3, True], "b": "nan", "c": [0.5]}


def test_medida_em_csv_com_metadados(tmp_path, pair):
    path = tmp_path / "nu.csv"
    save_measure_csv(uniform_product(pair.stationary, 4), str(path), {"seed": 3, "config_hash": "abc"})
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["estado", "celula", "peso", "config_hash", "seed"]
    assert len(frame) == 8
    assert np.allclose(frame["peso"], 0.25)


def test_inclinacoes_e_orbita(tmp_path, kernel, rotations):
    save_slopes_csv([0.0, -0.1], str(tmp_path / "s.csv"))
    assert list(pd.read_csv(tmp_path / "s.csv")["inclinacao"]) == [0.0, -0.1]
    orbit = iterate(rotations, sample_chain(kernel, 0, 10, 1), 0.3)
    save_orbit_csv(orbit, str(tmp_path / "o.csv"))
    frame = pd.read_csv(tmp_path / "o.csv")
    assert len(frame) == 11
    assert frame["estado"].iloc[-1] == -1
    save_orbit_csv(orbit, str(tmp_path / "o_meta.csv"), {"seed": 4, "grid": 16, "tol_duality": 1e-12})
    stamped = pd.read_csv(tmp_path / "o_meta.csv")
    assert list(stamped.columns) == ["passo", "estado", "ponto", "grid", "seed", "tol_duality"]
    assert (stamped["tol_duality"] == 1e-12).all()


def test_documentacao_e_nivel_sucesso(tmp_path, caplog):
    with caplog.at_level(logging.INFO, logger="script"):
        path = write_run_documentation(str(tmp_path), "verify-lemmas", ["primeiro", "segundo"])
        save_slopes_csv([0.0], str(tmp_path / "s.csv"))
    assert path.endswith("documentacao_verify_lemmas.txt")
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0] == "Processo executado: verify-lemmas"
    assert lines[2:] == ["1. primeiro", "2. segundo"]
    assert any(record.levelno == SUCESSO for record in caplog.records)
    assert logging.getLevelName(logging.WARNING) == "AVISO"

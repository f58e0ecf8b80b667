'''
    ITERACOES_MARKOV

    ||> Objetivo: gravar os artefatos das execuções em script/DADOS.
        |> Medidas em CSV (estado, célula, peso), inclinações e órbitas em CSV.
        |> Resumo JSON com chaves ordenadas e floats em formato fixo: reexecuções com a mesma
           configuração geram arquivos idênticos byte a byte.
        |> Documentação em texto (documentacao_<verbo>.txt) descrevendo os passos executados.
'''

import json
import math
import os

import numpy as np
import pandas as pd

from script.logs import get_logger, success

logger = get_logger(__name__)

FLOAT_FORMAT = "%.17g"


def ensure_directory_exists(directory):
    """
    Verifica se o diretório existe e o cria se necessário.

    Args:
        directory (str): Caminho do diretório.
    """
    if not os.path.exists(directory):
        os.makedirs(directory)


def measure_frame(measure):
    """
    Tabela longa (estado, célula, peso) de uma ProductMeasure ou SkewMeasure.
    """
    stack = measure.stack()
    k, N = stack.shape
    return pd.DataFrame({
        "estado": np.repeat(np.arange(k), N),
        "celula": np.tile(np.arange(N), k),
        "peso": stack.ravel(),
    })


def _stamp(frame, metadata):
    for key in sorted(metadata):
        frame[key] = metadata[key]
    return frame


def save_measure_csv(measure, output_path, metadata=None):
    """
    Salva uma medida em CSV com as colunas estado, célula e peso.

    Args:
        measure: ProductMeasure ou SkewMeasure.
        output_path (str): Caminho do arquivo.
        metadata (dict | None): Colunas constantes (hash da configuração, semente, N).
    """
    ensure_directory_exists(os.path.dirname(output_path) or ".")
    frame = _stamp(measure_frame(measure), metadata or {})
    frame.to_csv(output_path, index=False, float_format=FLOAT_FORMAT)
    success(logger, "Medida salva em: %s", output_path)


def save_slopes_csv(slopes, output_path, metadata=None):
    ensure_directory_exists(os.path.dirname(output_path) or ".")
    frame = pd.DataFrame({"tentativa": np.arange(len(slopes)), "inclinacao": np.asarray(slopes, dtype=np.float64)})
    _stamp(frame, metadata or {}).to_csv(output_path, index=False, float_format=FLOAT_FORMAT)
    success(logger, "Inclinações salvas em: %s", output_path)


def save_orbit_csv(orbit, output_path, metadata=None):
    """Despejo da órbita (passo, estado, ponto); grande, só gravado sob demanda."""
    ensure_directory_exists(os.path.dirname(output_path) or ".")
    states = np.append(orbit.states, -1)
    frame = pd.DataFrame({"passo": np.arange(orbit.points.size), "estado": states, "ponto": orbit.points})
    _stamp(frame, metadata or {}).to_csv(output_path, index=False, float_format=FLOAT_FORMAT)
    success(logger, "Órbita salva em: %s", output_path)


def _plain(value):
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def save_json_summary(payload, output_path):
    """
    Grava o resumo JSON com chaves ordenadas (sem carimbo de hora).
    """
    ensure_directory_exists(os.path.dirname(output_path) or ".")
    with open(output_path, "w", encoding="utf-8") as handle:
        json.dump(_plain(payload), handle, indent=2, sort_keys=True, ensure_ascii=False)
        handle.write("\n")
    success(logger, "Resumo salvo em: %s", output_path)


def write_run_documentation(directory, verb, lines):
    """
    Registra em texto o que a execução fez, no formato documentacao_<verbo>.txt.

    Args:
        directory (str): Diretório de saída.
        verb (str): Verbo executado (solve, correspond, ...).
        lines (list): Linhas descritivas.

    Returns:
        str: Caminho do arquivo gravado.
    """
    ensure_directory_exists(directory)
    documentation_path = os.path.join(directory, f"documentacao_{verb.replace('-', '_')}.txt")
    content = f"Processo executado: {verb}\n\n" + "\n".join(
        f"{index}. {line}" for index, line in enumerate(lines, start=1)) + "\n"
    with open(documentation_path, "w", encoding="utf-8") as doc_file:
        doc_file.write(content)
    logger.info("Documentação do processo salva em: %s", documentation_path)
    return documentation_path

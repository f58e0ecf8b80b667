'''
    ITERACOES_MARKOV

    ||> Objetivo: padronizar as mensagens de execução.
        |> Mantém o formato "[INFO] ...", "[AVISO] ...", "[SUCESSO] ..." usado nos scripts do projeto.
        |> Saída no console e, opcionalmente, em arquivo de log.
'''

import logging
import os

SUCESSO = 25
logging.addLevelName(SUCESSO, "SUCESSO")
logging.addLevelName(logging.WARNING, "AVISO")
logging.addLevelName(logging.ERROR, "ERRO")

_FORMAT = "[%(levelname)s] %(message)s"
_ROOT = "script"


def get_logger(name):
    """
    Retorna um logger filho do logger do projeto.

    Args:
        name (str): Nome do módulo (normalmente __name__).

    Returns:
        logging.Logger: Logger configurado.
    """
    root = logging.getLogger(_ROOT)
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT))
        root.addHandler(handler)
        root.setLevel(logging.INFO)
    return logging.getLogger(name if name.startswith(_ROOT) else f"{_ROOT}.{name}")


def success(logger, message, *args):
    logger.log(SUCESSO, message, *args)


def configure_logging(verbose=False, log_file=None):
    """
    Ajusta o nível do logger do projeto e adiciona um arquivo de log se pedido.

    Args:
        verbose (bool): Se True, mostra mensagens de DEBUG.
        log_file (str | None): Caminho do arquivo de log.
    """
    root = logging.getLogger(_ROOT)
    get_logger(_ROOT)
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    if log_file:
        directory = os.path.dirname(log_file)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)
        handler = logging.FileHandler(log_file)
        handler.setFormatter(logging.Formatter("%(asctime)s " + _FORMAT))
        root.addHandler(handler)

'''
    ITERACOES_MARKOV
    Objetivo: este script simples tem por objetivo apenas testar e validar se o ambiente virtual está
    configurado adequadamente para o projeto (bibliotecas e um ponto fixo pequeno de ponta a ponta).
'''

import click
import hypothesis
import joblib
import numpy as np
import pandas as pd
import pydantic
import scipy
import tqdm
import yaml

from script.config import build_experiment, preset_config
from script.cli_runner import solve_stationary

print("Versões encontradas:")
for name, module in [("numpy", np), ("scipy", scipy), ("pandas", pd), ("pydantic", pydantic), ("PyYAML", yaml),
                     ("click", click), ("joblib", joblib), ("tqdm", tqdm), ("hypothesis", hypothesis)]:
    print(f"  {name}: {module.__version__}")

print("Resolvendo o par limitado numa grade pequena...")
experiment = build_experiment(preset_config("bounded-pair", seed=1, grid=32))
nu, rows = solve_stationary(experiment)
print(f"  ponto fixo em {nu.iterations} iterações, resíduo {rows[0]['residual']:.2e}")

print("Ambiente configurado corretamente!")

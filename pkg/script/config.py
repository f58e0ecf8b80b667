'''
    ITERACOES_MARKOV

    ||> Objetivo: ler e validar o documento de experimento (YAML).

        |> Modelos pydantic por seção: kernel, family, tolerances, solver, trajectory, sync,
           verify, output.
        |> Presets preenchem todas as seções; chaves explícitas substituem a seção do preset.
        |> Erros de validação apontam a linha do YAML ("linha <n>: <campo>: <mensagem>").
        |> Hash da configuração (sha256 do JSON canônico) ecoado em todos os arquivos de saída.
        |> Semente obrigatória: --seed, variável ITERACOES_SEED ou o próprio documento.
'''

import copy
import hashlib
import json
import math
import os
from dataclasses import dataclass
from typing import Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from script.circle_dynamics import (
    MapFamily, PiecewiseLinear, Projective, Rotation, hyperbolic_projective, identity_map)
from script.errors import ConfigError, IteracoesError
from script.logs import get_logger
from script.markov_kernels import (
    FiniteKernel, dual_kernel, driving_pair, group_walk_kernel, iid_kernel, random_positive_kernel,
    read_kernel_file)
from script.trajectory import REDUCIBLE_NODES, trial_rng

logger = get_logger(__name__)

SCHEMA_VERSION = 1
SEED_ENV = "ITERACOES_SEED"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class KernelSpec(_Section):
    source: Literal["matrix", "file", "random", "group_walk", "iid"]
    rows: list[list[float]] | None = None
    path: str | None = None
    weights: list[float] | None = None
    size: int | None = Field(default=None, ge=1)
    floor: float = Field(default=0.05, gt=0, le=1)
    seed: int | None = Field(default=None, ge=0)
    cells: int | None = Field(default=None, ge=1)
    density: Literal["uniform", "vonmises"] = "uniform"
    concentration: float = 1.0

    @model_validator(mode="after")
    def _required_fields(self):
        needed = {"matrix": "rows", "file": "path", "random": "size", "group_walk": "cells", "iid": "weights"}
        name = needed[self.source]
        if getattr(self, name) is None:
            raise ValueError(f"fonte '{self.source}' exige o campo '{name}'")
        return self


class MapSpec(_Section):
    variant: Literal["rotation", "projective", "piecewise_linear", "identity"]
    angle: float | None = None
    matrix: list[list[float]] | None = None
    stretch: float | None = Field(default=None, gt=0)
    attractor: float | None = None
    breakpoints: list[float] | None = None
    images: list[float] | None = None

    @model_validator(mode="after")
    def _variant_fields(self):
        if self.variant == "rotation" and self.angle is None:
            raise ValueError("rotação exige 'angle'")
        if self.variant == "projective" and self.matrix is None and (self.stretch is None or self.attractor is None):
            raise ValueError("projetivo exige 'matrix' ou o par 'stretch'/'attractor'")
        if self.variant == "piecewise_linear" and (self.breakpoints is None or self.images is None):
            raise ValueError("linear por partes exige 'breakpoints' e 'images'")
        return self


class CellFamilySpec(_Section):
    """Um mapa por estado, com ponto especial no centro da célula do estado: (α + 1/2)/k."""

    pattern: Literal["hyperbolic_cells", "rotation_cells"]
    stretch: float = Field(default=2.0, gt=1)


class ToleranceSpec(_Section):
    fixed_point: float = Field(default=1e-10, gt=0)
    duality: float = Field(default=1e-12, gt=0)
    residual_factor: float = Field(default=10.0, gt=0)
    grid_error: float = Field(default=4.0, ge=0)
    sandwich: float = Field(default=1e-12, ge=0)


class SolverSpec(_Section):
    max_iter: int = Field(default=10_000, ge=1)
    init: Literal["uniform", "point_mass"] = "uniform"
    init_points: list[float] = Field(default_factory=list)


class TrajectorySpec(_Section):
    trials: int = Field(default=20, ge=1)
    n: int = Field(default=50_000, ge=2)
    burn_in: int = Field(default=1_000, ge=0)
    x0: float | None = None
    test_functions: int = Field(default=10, ge=1)
    starts: int = Field(default=10, ge=1)
    birkhoff_n: int = Field(default=1_000_000, ge=1)

    @model_validator(mode="after")
    def _burn_in_below_n(self):
        if self.burn_in >= self.n:
            raise ValueError("burn_in precisa ser menor que n")
        return self


class SyncSpec(_Section):
    x: float = 0.1
    trials: int = Field(default=200, ge=1)
    n: int = Field(default=10_000, ge=100)
    delta0: float = Field(default=0.25, gt=0, le=0.25)
    threshold: float = Field(default=0.9, ge=0, le=1)
    x_grid: int = Field(default=32, ge=1)
    scan_trials: int = Field(default=20, ge=1)
    ladder: int = Field(default=7, ge=1)
    samples: int = Field(default=50, ge=1)


class VerifySpec(_Section):
    corrupt_dual: bool = False
    draws: int = Field(default=100, ge=1)
    shift_depth: int = Field(default=2, ge=0)
    bound_steps: int = Field(default=2, ge=1)
    bound_depth: int = Field(default=1, ge=0)
    bound_grid: int = Field(default=16, ge=4)


class OutputSpec(_Section):
    directory: str = os.path.join("script", "DADOS")
    orbit_dump: bool = False


class ExperimentConfig(_Section):
    schema_version: Literal[1] = SCHEMA_VERSION
    preset: str | None = None
    seed: int | None = Field(default=None, ge=0, lt=2 ** 64)
    grid: int = Field(default=256, ge=4)
    kernel: KernelSpec
    family: list[MapSpec] | CellFamilySpec
    tolerances: ToleranceSpec = Field(default_factory=ToleranceSpec)
    solver: SolverSpec = Field(default_factory=SolverSpec)
    trajectory: TrajectorySpec = Field(default_factory=TrajectorySpec)
    sync: SyncSpec = Field(default_factory=SyncSpec)
    verify: VerifySpec = Field(default_factory=VerifySpec)
    output: OutputSpec = Field(default_factory=OutputSpec)


_BOUNDED_ROWS = [[0.9, 0.1], [0.2, 0.8]]
_HYPERBOLIC_PAIR = [
    {"variant": "projective", "stretch": 2.0, "attractor": 0.0},
    {"variant": "projective", "stretch": 2.0, "attractor": 0.25},
]

PRESETS = {
    "iid-uniform": {
        "kernel": {"source": "iid", "weights": [0.5, 0.5]},
        "family": _HYPERBOLIC_PAIR,
    },
    "finite-positive": {
        "kernel": {"source": "random", "size": 3, "seed": 7, "floor": 0.1},
        "family": [
            {"variant": "projective", "stretch": 2.0, "attractor": 0.0},
            {"variant": "projective", "stretch": 1.5, "attractor": 0.2},
            {"variant": "projective", "stretch": 2.5, "attractor": 0.6},
        ],
    },
    "random-walk-drive": {
        "kernel": {"source": "group_walk", "cells": 4, "density": "uniform"},
        "family": {"pattern": "hyperbolic_cells", "stretch": 2.0},
    },
    "bounded-pair": {
        "kernel": {"source": "matrix", "rows": _BOUNDED_ROWS},
        "family": _HYPERBOLIC_PAIR,
    },
    "rotations": {
        "kernel": {"source": "matrix", "rows": _BOUNDED_ROWS},
        "family": [
            {"variant": "rotation", "angle": 0.1},
            {"variant": "rotation", "angle": math.sqrt(2.0) - 1.0},
        ],
    },
    "reducible": {
        "kernel": {"source": "matrix", "rows": _BOUNDED_ROWS},
        "family": [
            {"variant": "piecewise_linear", "breakpoints": knots, "images": images}
            for knots, images in REDUCIBLE_NODES
        ],
    },
}


def _node_line(root, loc):
    """Linha (1-based) do nó YAML mais profundo alcançado pelo caminho `loc`."""
    node, line = root, (root.start_mark.line + 1 if root is not None else None)
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            match = next((value for name, value in node.value if name.value == str(key)), None)
            if match is None:
                continue
            node = match
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int):
            if key >= len(node.value):
                break
            node = node.value[key]
        else:
            continue
        line = node.start_mark.line + 1
    return line


def _format_errors(error, root):
    messages = []
    for item in error.errors():
        loc = item["loc"]
        field = ".".join(str(part) for part in loc) or "<raiz>"
        line = _node_line(root, loc)
        prefix = f"linha {line}: " if line is not None else ""
        messages.append(f"{prefix}{field}: {item['msg']}")
    return messages


def merge_preset(document):
    """
    Aplica o preset: cada seção explícita do documento substitui a seção do preset.
    """
    name = document.get("preset")
    if name is None:
        return dict(document)
    if name not in PRESETS:
        raise ConfigError([f"preset: preset desconhecido '{name}' (opções: {', '.join(sorted(PRESETS))})"])
    merged = copy.deepcopy(PRESETS[name])
    merged.update(document)
    return merged


def parse_config(text, source="<texto>"):
    """
    Valida o texto YAML de um experimento.

    Args:
        text (str): Conteúdo do documento.
        source (str): Nome usado nas mensagens.

    Returns:
        ExperimentConfig: Configuração validada.

    Raises:
        ConfigError: Com uma mensagem por problema, indicando a linha.
    """
    try:
        root = yaml.compose(text)
        document = yaml.safe_load(text) or {}
    except yaml.YAMLError as error:
        mark = getattr(error, "problem_mark", None)
        where = f"linha {mark.line + 1}: " if mark is not None else ""
        raise ConfigError([f"{where}YAML inválido em {source}: {getattr(error, 'problem', error)}"]) from error
    if not isinstance(document, dict):
        raise ConfigError([f"linha 1: o documento {source} precisa ser um mapeamento"])
    try:
        return ExperimentConfig.model_validate(merge_preset(document))
    except ValidationError as error:
        raise ConfigError(_format_errors(error, root)) from error


def load_config(file_path):
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Arquivo não encontrado: {file_path}")
    with open(file_path, encoding="utf-8") as handle:
        return parse_config(handle.read(), file_path)


def preset_config(name, **sections):
    """Configuração de um preset, com seções substituídas por dicionários."""
    document = {"preset": name, **sections}
    return ExperimentConfig.model_validate(merge_preset(document))


def config_hash(config):
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def resolve_seed(config, cli_seed=None):
    """
    Semente efetiva: --seed, depois ITERACOES_SEED, depois o documento. Sem semente é erro.
    """
    if cli_seed is not None:
        return int(cli_seed)
    env_value = os.environ.get(SEED_ENV)
    if env_value is not None:
        try:
            seed = int(env_value)
        except ValueError as error:
            raise ConfigError([f"{SEED_ENV}: valor não inteiro '{env_value}'"]) from error
        logger.warning("Semente sobrescrita pela variável %s = %d", SEED_ENV, seed)
        return seed
    if config.seed is None:
        raise ConfigError(["seed: semente ausente (use --seed, ITERACOES_SEED ou 'seed' no documento)"])
    return int(config.seed)


def build_kernel(spec, base_dir="."):
    if spec.source == "matrix":
        return FiniteKernel.from_weights(np.asarray(spec.rows, dtype=np.float64))
    if spec.source == "file":
        path = spec.path if os.path.isabs(spec.path) else os.path.join(base_dir, spec.path)
        return read_kernel_file(path)
    if spec.source == "random":
        return random_positive_kernel(spec.size, trial_rng(spec.seed or 0, 0), spec.floor)
    if spec.source == "group_walk":
        return group_walk_kernel(spec.cells, spec.density, spec.concentration)
    return iid_kernel(spec.weights)


def build_map(spec):
    if spec.variant == "identity":
        return identity_map()
    if spec.variant == "rotation":
        return Rotation(spec.angle)
    if spec.variant == "projective":
        if spec.matrix is not None:
            return Projective(np.asarray(spec.matrix, dtype=np.float64))
        return hyperbolic_projective(spec.stretch, spec.attractor)
    return PiecewiseLinear(np.asarray(spec.breakpoints), np.asarray(spec.images))


def build_family(spec, k):
    if isinstance(spec, CellFamilySpec):
        centers = (np.arange(k) + 0.5) / k
        if spec.pattern == "hyperbolic_cells":
            return MapFamily(tuple(hyperbolic_projective(spec.stretch, c) for c in centers))
        return MapFamily(tuple(Rotation(float(c)) for c in centers))
    return MapFamily(tuple(build_map(item) for item in spec))


@dataclass(frozen=True, eq=False)
class Experiment:
    """Objetos prontos para os pipelines, derivados de uma configuração validada."""

    config: ExperimentConfig
    seed: int
    grid: int
    kernel: FiniteKernel
    family: MapFamily
    pair: object
    dual: FiniteKernel
    config_hash: str

    @property
    def metadata(self):
        return {"config_hash": self.config_hash, "seed": self.seed, "grid": self.grid}


def build_experiment(config, cli_seed=None, cli_grid=None, base_dir="."):
    """
    Constrói núcleo, família, par (p, m) e dual a partir da configuração.

    Raises:
        ConfigError: Dimensões inconsistentes ou objetos inválidos.
    """
    if cli_grid is not None:
        config = config.model_copy(update={"grid": int(cli_grid)})
    seed = resolve_seed(config, cli_seed)
    try:
        kernel = build_kernel(config.kernel, base_dir)
        family = build_family(config.family, kernel.size)
    except (IteracoesError, FileNotFoundError, ValueError) as error:
        raise ConfigError([f"kernel/family: {error}"]) from error
    if family.size != kernel.size:
        raise ConfigError([f"family: {family.size} mapas para núcleo com {kernel.size} estados"])
    pair = driving_pair(kernel)
    dual = dual_kernel(kernel, pair.stationary)
    return Experiment(config, seed, config.grid, kernel, family, pair, dual, config_hash(config))

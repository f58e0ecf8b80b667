'''
    ITERACOES_MARKOV

    ||> Objetivo: concentrar os erros do projeto.
        |> Cada erro carrega os dados do diagnóstico (valores singulares, resíduos, tempos de escape).
        |> Erros de entrada também são ValueError; falhas numéricas também são RuntimeError.
'''


class IteracoesError(Exception):
    """Erro base de todas as rotinas do projeto."""


class KernelInvalid(IteracoesError, ValueError):
    """Matriz de transição com entradas negativas ou linhas que não somam 1."""


class MapInvalid(IteracoesError, ValueError):
    """Homeomorfismo mal definido (determinante não positivo, levantamento não monótono)."""


class ShapeMismatch(IteracoesError, ValueError):
    def __init__(self, detail):
        self.detail = detail
        super().__init__(f"Dimensões incompatíveis: {detail}")


class NonUniqueStationary(IteracoesError, ValueError):
    """
    O núcleo possui mais de uma medida estacionária.

    Args:
        singular_values (np.ndarray): Valores singulares de (Pᵀ − I), em ordem crescente.
    """

    def __init__(self, singular_values):
        self.singular_values = singular_values
        super().__init__(
            "Medida estacionária não é única: segundo menor valor singular de (Pᵀ − I) = "
            f"{singular_values[1]:.3e}")


class ZeroMassState(IteracoesError, ValueError):
    def __init__(self, states):
        self.states = list(states)
        super().__init__(f"Estados com massa estacionária nula: {self.states}")


class NotBounded(IteracoesError, ValueError):
    def __init__(self, zero_entries):
        self.zero_entries = list(zero_entries)
        super().__init__(
            f"O par (p, m) não é limitado: entradas nulas em {self.zero_entries[:10]}")


class NoConvergence(IteracoesError, RuntimeError):
    """
    O ponto fixo não foi atingido dentro do limite de iterações.

    Args:
        max_iter (int): Limite de iterações usado.
        residual (float): Último resíduo (TV máxima por estado).
        last: Último iterado (ProductMeasure).
        cesaro: Média de Cesàro dos iterados (ProductMeasure).
    """

    def __init__(self, max_iter, residual, last=None, cesaro=None):
        self.max_iter = max_iter
        self.residual = residual
        self.last = last
        self.cesaro = cesaro
        super().__init__(
            f"Sem convergência após {max_iter} iterações (resíduo final {residual:.3e})")


class TooLarge(IteracoesError, ValueError):
    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"Enumeração grande demais: {size} palavras (limite {limit})")


class HypothesisFailed(IteracoesError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            f"Hipótese h ≥ h∘F violada em {len(self.violations)} casos, p.ex. {self.violations[:3]}")


class AllLaddersBlewUp(IteracoesError, RuntimeError):
    def __init__(self, escape_times):
        self.escape_times = list(escape_times)
        super().__init__(
            f"Todos os arcos da escada ultrapassaram diâmetro 1/4; tempos de escape: {self.escape_times}")


class ConfigError(IteracoesError, ValueError):
    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("Configuração inválida:\n" + "\n".join(self.messages))

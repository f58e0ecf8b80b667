'''
    ITERACOES_MARKOV

    ||> Objetivo: iterações aleatórias markovianas de homeomorfismos do círculo.
        |> markov_kernels: núcleo p, medida estacionária m, dual q, constante C.
        |> circle_dynamics: mapas f_α, imagens de arcos e push-forward na grade.
        |> measure_engine: operador de Markov da cadeia Z_n e medidas estacionárias ν.
        |> correspondence: bijeção Θ, Ξ entre medidas estacionárias e invariantes.
        |> trajectory: amostragem das órbitas, médias de Birkhoff e lemas por enumeração.
        |> sync_lab: expoente de contração e sincronização local.
        |> cli_runner: execução dos experimentos a partir de um documento YAML.
'''

__version__ = "1.0.0"

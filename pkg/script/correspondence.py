'''
    ITERACOES_MARKOV

    ||> Objetivo: bijeção entre medidas estacionárias S(φ) e medidas invariantes I₀(φ).
        |> Θ(μ̂)_α = f_α* μ_α
        |> Ξ(ν)_α = Σ_β q_αβ ν_β
        |> Resíduos das idas e voltas Θ∘Ξ e Ξ∘Θ (só fazem sentido sobre S(φ) e I₀(φ)).
'''

from typing import NamedTuple

import numpy as np

from script.errors import ShapeMismatch
from script.measure_engine import ProductMeasure, SkewMeasure, max_state_tv, push_rows


def theta(mu_hat, F):
    """ν com marginal igual à base de μ̂ e ν_α = f_α* μ_α."""
    F.require_size(mu_hat.size)
    return ProductMeasure.from_array(mu_hat.base, push_rows(F, mu_hat.stack()))


def xi(nu, Q):
    """
    μ̂ com μ_α = Σ_β q_αβ ν_β.

    Args:
        nu (ProductMeasure): Medida estacionária.
        Q (FiniteKernel): Núcleo dual de p relativo a m.

    Returns:
        SkewMeasure: Família sobre a mesma base m.
    """
    if Q.size != nu.size:
        raise ShapeMismatch(f"núcleo dual com {Q.size} estados para medida com {nu.size}")
    return SkewMeasure.from_array(nu.marginal, Q.rows @ nu.stack())


class RoundTrip(NamedTuple):
    r1: float
    r2: float


def roundtrip_residuals(nu, mu_hat, F, Q):
    """
    r1 = max_α TV(Θ(Ξ(ν))_α, ν_α) e r2 = max_α TV(Ξ(Θ(μ̂))_α, μ_α).

    Pequenos apenas quando ν ∈ S(φ) e μ̂ ∈ I₀(φ); para medidas arbitrárias o valor é só reportado.
    """
    r1 = max_state_tv(theta(xi(nu, Q), F).stack(), nu.stack())
    r2 = max_state_tv(xi(theta(mu_hat, F), Q).stack(), mu_hat.stack())
    return RoundTrip(r1, r2)


def classical_limit_residual(nu, Q):
    """
    max_{α,β} TV(Ξ(ν)_α, Ξ(ν)_β). Nulo quando as linhas de Q coincidem (sorteio i.i.d.),
    caso em que Ξ(ν) é a medida produto ℙ×Π₂*ν.
    """
    family = xi(nu, Q).stack()
    gaps = 0.5 * np.abs(family[:, None, :] - family[None, :, :]).sum(axis=2)
    return float(gaps.max())

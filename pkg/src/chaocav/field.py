"""Truncated coherent-state weight vectors for the cavity mode."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np


@dataclass(frozen=True)
class CoherentField:
    """Coherent cavity state |alpha> truncated at Fock level n_max.

    alpha is the coherent amplitude, so the mean photon number is
    alpha**2. weights[n] is the real Fock amplitude W_n with
    sum(W_n**2) = 1 up to the truncation tolerance.
    """

    alpha: float
    eps_trunc: float
    n_max: int
    weights: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))


def coherent_weights(alpha, eps_trunc=1e-12):
    """Build the coherent weight vector W_n = alpha^n / sqrt(n!) * exp(-alpha^2 / 2).

    Evaluated in log space so large alpha neither overflows nor underflows.
    n_max is the smallest cutoff whose photon-number tail probability is
    below eps_trunc.
    """
    alpha = float(alpha)
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if not (0.0 < eps_trunc < 1.0):
        raise ValueError(f"eps_trunc must lie in (0, 1), got {eps_trunc}")
    if alpha == 0.0:
        return CoherentField(alpha=0.0, eps_trunc=eps_trunc, n_max=0, weights=np.array([1.0]))
    mean = alpha * alpha
    # Poisson tails beyond mean + 20 sqrt(mean) + 60 are far below any sane eps_trunc.
    hard_cap = int(mean + 20.0 * math.sqrt(mean) + 60.0)
    log_w = np.empty(hard_cap + 1)
    cum = 0.0
    n_max = hard_cap
    for n in range(hard_cap + 1):
        log_w[n] = n * math.log(alpha) - 0.5 * math.lgamma(n + 1) - 0.5 * mean
        cum += math.exp(2.0 * log_w[n])
        if 1.0 - cum < eps_trunc:
            n_max = n
            break
    weights = np.exp(log_w[: n_max + 1])
    return CoherentField(alpha=alpha, eps_trunc=eps_trunc, n_max=n_max, weights=weights)


def mean_photon_number(field):
    """Mean photon number implied by the truncated weights."""
    n = np.arange(field.n_max + 1)
    return float(np.sum(n * field.weights**2))

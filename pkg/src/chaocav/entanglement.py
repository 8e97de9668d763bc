"""Entanglement degree of two-atom states via the partial transpose."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import amplitude_table, table_density
from .linalg import InvariantViolation, is_hermitian, jacobi_eigh, partial_transpose_batch

DOE_CEILING_TOL = 1e-12


@dataclass(frozen=True)
class EntanglementRecord:
    """Degree of entanglement at one (t, gamma) point with its PT spectrum."""

    t: float
    gamma: float
    doe: float
    pt_eigenvalues: np.ndarray
    pre_norm_trace: float


def _doe_from_rhos(rhos):
    pt = partial_transpose_batch(rhos, subsystem=2)
    mu = jacobi_eigh(pt)
    doe = np.sum(np.abs(mu), axis=-1) - 1.0
    doe = np.where(doe > 0.0, doe, 0.0)
    if np.any(~np.isfinite(doe)) or np.any(doe > 1.0 + DOE_CEILING_TOL):
        raise InvariantViolation(f"degree of entanglement left [0, 1]: max {np.max(doe)}")
    return np.minimum(doe, 1.0), mu


def negativity(rho):
    """Degree of entanglement of a single 4x4 two-atom density matrix.

    Twice the negativity: the absolute sum of the negative eigenvalues of
    the partial transpose, doubled, so that Bell states score 1 and
    product states 0.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvariantViolation(f"negativity needs a 4x4 matrix, got {rho.shape}")
    if not is_hermitian(rho):
        raise InvariantViolation("negativity: input is not Hermitian within 1e-9")
    doe, _ = _doe_from_rhos(rho[None, :, :])
    return float(doe[0])


def entanglement_sweep(times, gammas, init, field, omega_rabi=1.0, g0=1.0,
                       variant="corrected"):
    """Degree of entanglement of the averaged channel on a (gamma, t) grid.

    Returns records in row-major order: all times for the first gamma,
    then the next gamma. One batched eigensolve covers each gamma row.
    """
    from .dynamics import ModelParams

    times = np.atleast_1d(np.asarray(times, dtype=float))
    records = []
    for gamma in np.atleast_1d(np.asarray(gammas, dtype=float)):
        params = ModelParams(gamma=float(gamma), omega_rabi=omega_rabi, g0=g0)
        table = amplitude_table(times, init, field, params, variant)
        rhos, pre = table_density(table)
        doe, mu = _doe_from_rhos(rhos)
        for k, t in enumerate(times):
            records.append(EntanglementRecord(t=float(t), gamma=float(gamma),
                                              doe=float(doe[k]), pt_eigenvalues=mu[k],
                                              pre_norm_trace=float(pre[k])))
    return records

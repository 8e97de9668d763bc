"""Teleportation of an unknown qubit through the averaged two-atom channel.

Two routes to Bob's state are provided: a closed form built from the
photon-grouped amplitude sums, and a direct Bell-projection reference
that works on any explicit channel density matrix. For the 'corrected'
variant the two agree; the 'verbatim' variant keeps the legacy sector
sums whose cross terms are not mutually conjugate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ModelParams, amplitude_table, table_density
from .linalg import partial_trace, tensor

WEIGHT_FLOOR = 1e-15

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_ID2 = np.eye(2, dtype=complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

#: Bell vectors over (|gg>, |ge>, |eg>, |ee>) and the unitary Bob applies.
BELL_OUTCOMES = (
    ("phi_plus", np.array([1.0, 0.0, 0.0, 1.0]) * _INV_SQRT2, _ID2),
    ("phi_minus", np.array([-1.0, 0.0, 0.0, 1.0]) * _INV_SQRT2, _Z),
    ("psi_plus", np.array([0.0, 1.0, 1.0, 0.0]) * _INV_SQRT2, _X),
    ("psi_minus", np.array([0.0, -1.0, 1.0, 0.0]) * _INV_SQRT2, _X @ _Z),
)


class DegenerateOutcome(Exception):
    """Raised when a Bell outcome carries no weight and Bob's state is undefined."""


@dataclass(frozen=True)
class UnknownQubit:
    """State to teleport, alpha_u |g> + beta_u |e>, unit norm to 1e-12."""

    alpha_u: complex
    beta_u: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha_u", complex(self.alpha_u))
        object.__setattr__(self, "beta_u", complex(self.beta_u))
        norm = abs(self.alpha_u) ** 2 + abs(self.beta_u) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"unknown qubit has norm {norm:.15g}, expected 1 within 1e-12")

    def as_vector(self):
        return np.array([self.alpha_u, self.beta_u], dtype=complex)


@dataclass(frozen=True)
class TeleportOutcome:
    """One Bell-measurement branch: Bob's corrected state and its fidelity."""

    bell_label: str
    bob_state: np.ndarray
    outcome_weight: float
    fidelity: float


def _shift(arr, k):
    # Index-shifted view along the sector axis, zero outside the range.
    out = np.zeros_like(arr)
    n = arr.shape[1]
    if k >= 0:
        out[:, : n - k] = arr[:, k:]
    else:
        out[:, -k:] = arr[:, : n + k]
    return out


def kappa_sums(table, unknown, variant="corrected"):
    """Amplitude sums (kappa1..kappa4) entering Bob's unnormalized state.

    Shapes follow the table, one value per time. The corrected variant
    sums the photon-grouped amplitudes, which is exactly the phi_plus
    Bell projection; kappa3 is then the conjugate of kappa2. The
    verbatim variant evaluates the legacy sector sums literally, index
    shifts included, and does not have that symmetry.
    """
    au = unknown.alpha_u
    bu = unknown.beta_u
    if variant == "corrected":
        top = au * table.photon_a + bu * table.photon_c
        bot = au * table.photon_b + bu * table.photon_d
        k1 = 0.5 * np.sum(np.abs(top) ** 2, axis=1)
        k2 = 0.5 * np.sum(top * np.conj(bot), axis=1)
        k3 = np.conj(k2)
        k4 = 0.5 * np.sum(np.abs(bot) ** 2, axis=1)
        return k1, k2, k3, k4
    if variant != "verbatim":
        raise ValueError(f"variant must be 'corrected' or 'verbatim', got {variant!r}")
    aa = abs(au) ** 2
    bb = abs(bu) ** 2
    ab = au * np.conj(bu)
    ba = np.conj(ab)
    a_n, b_n = table.sector_a, table.sector_b
    c_n, d_n = table.sector_c, table.sector_d
    k1 = 0.5 * np.sum(aa * np.abs(a_n) ** 2 + ab * a_n * np.conj(_shift(c_n, 1))
                      + ba * c_n * np.conj(_shift(a_n, -1)) + bb * np.abs(c_n) ** 2, axis=1)
    k2 = 0.5 * np.sum(aa * a_n * np.conj(_shift(b_n, 1)) + ab * a_n * np.conj(_shift(d_n, 2))
                      + ba * c_n * np.conj(b_n) + bb * c_n * np.conj(_shift(d_n, 2)), axis=1)
    k3 = 0.5 * np.sum(aa * b_n * np.conj(_shift(a_n, -1)) + ab * b_n * np.conj(c_n)
                      + ba * d_n * np.conj(_shift(a_n, -2)) + bb * d_n * np.conj(c_n), axis=1)
    k4 = 0.5 * np.sum(aa * np.abs(b_n) ** 2 + ab * b_n * np.conj(_shift(d_n, 1))
                      + ba * d_n * np.conj(_shift(b_n, -1)) + bb * np.abs(d_n) ** 2, axis=1)
    return k1.real, k2, k3, k4.real


@dataclass(frozen=True)
class FidelitySweep:
    """Closed-form teleportation results on a time grid at one gamma."""

    t: np.ndarray
    gamma: float
    fidelity: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    kappa4: np.ndarray
    weight: np.ndarray
    outcome_weight: np.ndarray
    pre_norm_trace: np.ndarray


def fidelity_curve(times, gamma, init, field, unknown, omega_rabi=1.0, g0=1.0,
                   variant="corrected"):
    """Fidelity of the phi_plus branch over a time grid at fixed gamma.

    Rows where the branch weight kappa1 + kappa4 falls below 1e-15 get
    fidelity nan instead of an exception so sweeps always complete.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    params = ModelParams(gamma=float(gamma), omega_rabi=omega_rabi, g0=g0)
    table = amplitude_table(times, init, field, params, variant)
    _, pre = table_density(table)
    k1, k2, k3, k4 = kappa_sums(table, unknown, variant)
    weight = (k1 + k4).real
    au = unknown.alpha_u
    bu = unknown.beta_u
    numer = (abs(au) ** 2 * k1 + np.conj(au) * bu * k2
             + au * np.conj(bu) * k3 + abs(bu) ** 2 * k4).real
    ok = weight > WEIGHT_FLOOR
    fid = np.full(times.shape, np.nan)
    np.divide(numer, weight, out=fid, where=ok)
    return FidelitySweep(t=times, gamma=float(gamma), fidelity=fid,
                         kappa1=k1.real, kappa2=k2, kappa4=k4.real,
                         weight=weight, outcome_weight=weight / pre,
                         pre_norm_trace=pre)


def bob_state_closed_form(t, init, field, params, unknown, variant="corrected"):
    """Bob's state for the phi_plus branch at one time, via the kappa sums.

    Raises DegenerateOutcome when the branch weight vanishes. For the
    verbatim variant the assembled matrix need not be Hermitian and the
    fidelity is the real part of the overlap.
    """
    table = amplitude_table(float(t), init, field, params, variant)
    _, pre = table_density(table)
    k1, k2, k3, k4 = kappa_sums(table, unknown, variant)
    weight = float((k1[0] + k4[0]).real)
    if weight <= WEIGHT_FLOOR:
        raise DegenerateOutcome(f"phi_plus branch weight {weight:.3e} at t={float(t)}")
    bob = np.array([[k1[0], k2[0]], [k3[0], k4[0]]], dtype=complex) / weight
    chi = unknown.as_vector()
    fidelity = float(np.real(np.conj(chi) @ bob @ chi))
    return TeleportOutcome(bell_label="phi_plus", bob_state=bob,
                           outcome_weight=weight / float(pre[0]), fidelity=fidelity)


def bell_project_teleport(channel_rho, unknown):
    """All four Bell branches by explicit projection on a channel matrix.

    channel_rho is any normalized 4x4 two-atom state. Returns the four
    TeleportOutcome branches in the fixed order phi_plus, phi_minus,
    psi_plus, psi_minus; a branch with vanishing weight gets the
    maximally mixed Bob state and fidelity nan.
    """
    channel_rho = np.asarray(channel_rho, dtype=complex)
    chi = unknown.as_vector()
    rho_in = np.outer(chi, np.conj(chi))
    rho3 = tensor(rho_in, channel_rho)
    outcomes = []
    for label, bell_vec, correction in BELL_OUTCOMES:
        proj4 = np.outer(bell_vec, np.conj(bell_vec))
        proj8 = tensor(proj4, _ID2)
        selected = proj8 @ rho3 @ proj8
        weight = float(np.trace(selected).real)
        if weight <= WEIGHT_FLOOR:
            outcomes.append(TeleportOutcome(bell_label=label, bob_state=_ID2 / 2.0,
                                            outcome_weight=0.0, fidelity=float("nan")))
            continue
        bob_raw = partial_trace(selected, keep=3) / weight
        bob = correction @ bob_raw @ np.conj(correction.T)
        fidelity = float(np.real(np.conj(chi) @ bob @ chi))
        outcomes.append(TeleportOutcome(bell_label=label, bob_state=bob,
                                        outcome_weight=weight, fidelity=fidelity))
    return outcomes

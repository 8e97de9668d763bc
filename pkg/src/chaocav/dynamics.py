"""Closed-form dynamics of two atoms exchanging excitation with a cavity mode.

The atom-field coupling carries a position phase that is treated as a
random process. Everything here works in the interaction picture, with
the randomness entering through the phase factors q_plus and q_minus.
In the ensemble-averaged channel both factors are replaced by the same
real scalar averaged_q(t, gamma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import InvariantViolation

SQRT2 = math.sqrt(2.0)
NORM_TOL = 1e-12


def _erf_series(x):
    # Alternating Maclaurin sum with a term recurrence, used for |x| <= 3.
    x2 = x * x
    term = x
    total = x
    k = 0
    while True:
        k += 1
        term *= -x2 / k
        contrib = term / (2 * k + 1)
        total += contrib
        if abs(contrib) < 1e-18:
            return total * 2.0 / math.sqrt(math.pi)


def _erfc_fraction(x):
    # Modified Lentz evaluation of the continued fraction
    # erfc(x) * sqrt(pi) * exp(x^2) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
    tiny = 1e-300
    f = tiny
    c = tiny
    d = 0.0
    for k in range(1, 300):
        a = 1.0 if k == 1 else 0.5 * (k - 1)
        d = x + a * d
        if d == 0.0:
            d = tiny
        c = x + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x * x) / math.sqrt(math.pi) * f


def erf(x):
    """Error function, absolute accuracy better than 1e-12 on all reals.

    Series for |x| <= 3, continued fraction for the tail, saturation at
    |x| >= 6. Odd symmetry holds exactly because only |x| is evaluated.
    """
    x = float(x)
    if x == 0.0:
        return 0.0
    ax = abs(x)
    if ax <= 3.0:
        val = _erf_series(ax)
    elif ax < 6.0:
        val = 1.0 - _erfc_fraction(ax)
    else:
        val = 1.0
    return val if x > 0 else -val


def averaged_q(t, gamma):
    """Ensemble average of the random phase factor at time t.

    Returns exp(-(t/2) sqrt(pi gamma) erf(t sqrt(gamma))), a real value in
    (0, 1], for scalar or array t. Monotone non-increasing in both t and
    gamma; gamma = 0 gives exactly 1.
    """
    gamma = float(gamma)
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise ValueError("time must be >= 0")
    root = math.sqrt(math.pi * gamma)
    rg = math.sqrt(gamma)
    if t_arr.ndim == 0:
        ts = float(t_arr)
        return math.exp(-0.5 * ts * root * erf(ts * rg))
    flat = np.array([math.exp(-0.5 * ts * root * erf(ts * rg)) for ts in t_arr.ravel()])
    return flat.reshape(t_arr.shape)


@dataclass(frozen=True)
class ModelParams:
    """Coupling constants: chaotic parameter gamma, spin-spin coupling, field coupling."""

    gamma: float = 0.0
    omega_rabi: float = 1.0
    g0: float = 1.0

    def __post_init__(self):
        if not (self.gamma >= 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma}")
        if not (math.isfinite(self.omega_rabi) and math.isfinite(self.g0)):
            raise ValueError("omega_rabi and g0 must be finite")


@dataclass(frozen=True)
class AtomicInit:
    """Initial two-atom amplitudes over (|gg>, |ge>, |eg>, |ee>).

    Unit norm is enforced to 1e-12 unless enforce_norm is disabled for
    linearity tests on raw amplitudes.
    """

    c00: complex
    c01: complex
    c10: complex
    c11: complex
    enforce_norm: bool = True

    def __post_init__(self):
        for name in ("c00", "c01", "c10", "c11"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.enforce_norm:
            norm = self.norm_squared()
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"initial amplitudes have norm {norm:.15g}, expected 1 within {NORM_TOL}")

    def norm_squared(self):
        return abs(self.c00) ** 2 + abs(self.c01) ** 2 + abs(self.c10) ** 2 + abs(self.c11) ** 2

    def as_vector(self):
        return np.array([self.c00, self.c01, self.c10, self.c11], dtype=complex)

    @classmethod
    def bell_phi_plus(cls):
        return cls(1.0 / SQRT2, 0.0, 0.0, 1.0 / SQRT2)


@dataclass(frozen=True)
class DressedAmplitudes:
    """Amplitude quadruple of one excitation sector.

    a_n, b_n, c_n, d_n multiply |gg,n+1>, |ge,n>, |eg,n>, |ee,n-1>; the
    d_0 component vanishes because |ee,-1> does not exist.
    """

    n: int
    a_n: complex
    b_n: complex
    c_n: complex
    d_n: complex


@dataclass(frozen=True)
class AmplitudeTable:
    """All sector amplitudes at the sampled times, plus photon-grouped views.

    sector_* arrays have shape (T, N) over sectors n = 0..N-1. The
    photon_* arrays regroup the same amplitudes by Fock level m, so that
    photon_a[m] multiplies |gg,m> (m = 0 holds the decoupled |gg,0>
    component), photon_b[m] and photon_c[m] multiply |ge,m> and |eg,m>,
    and photon_d[m] multiplies |ee,m>.
    """

    t: np.ndarray
    sector_n: np.ndarray
    sector_a: np.ndarray
    sector_b: np.ndarray
    sector_c: np.ndarray
    sector_d: np.ndarray
    ground: np.ndarray
    photon_a: np.ndarray
    photon_b: np.ndarray
    photon_c: np.ndarray
    photon_d: np.ndarray


def _sector_amplitudes(ns, qp, qm, ep, em, init, w_ext, variant):
    """Evaluate the closed-form quadruples for every sector in ns.

    qp and qm are the phase factors standing in for Q and its inverse;
    they may be per-sector arrays or ensemble-averaged scalars. The
    'corrected' variant solves the bright/dark coupling block exactly and
    reproduces the initial state at t = 0. The 'verbatim' variant keeps a
    legacy algebraic form with inconsistent index shifts; it is retained,
    unrepaired, for side-by-side comparison.
    """
    c00, c01, c10, c11 = init.c00, init.c01, init.c10, init.c11
    nf = ns.astype(float)
    wn = w_ext[ns]
    if variant == "corrected":
        a0 = w_ext[ns + 1] * c00
        b0 = wn * c01
        c0 = wn * c10
        d0 = np.where(ns > 0, w_ext[np.maximum(ns - 1, 0)] * c11, 0.0j)
        r1 = np.sqrt((nf + 1.0) / (2.0 * nf + 1.0))
        r2 = np.sqrt(nf / (2.0 * nf + 1.0))
        ub0 = r1 * a0 + r2 * d0
        ud0 = r2 * a0 - r1 * d0
        s0 = (b0 + c0) / SQRT2
        an0 = (b0 - c0) / SQRT2
        cosf = (qp + qm) / 2.0
        isin = (qp - qm) / 2.0
        ub = cosf * ub0 + isin * s0
        sym = isin * ub0 + cosf * s0
        amp_a = ep * (r1 * ub + r2 * ud0)
        amp_d = ep * (r2 * ub - r1 * ud0)
        amp_b = (ep * sym + em * an0) / SQRT2
        amp_c = (ep * sym - em * an0) / SQRT2
    elif variant == "verbatim":
        pref = 1.0 / (2.0 * SQRT2 * (2.0 * nf + 1.0))
        com = c00 * qp - c01 * qm
        amp_a = wn * (np.sqrt(nf + 1.0) * pref * ep * com
                      + ep / (2.0 * np.sqrt(nf + 1.0)) * (c11 - pref * (c00 - c01)))
        amp_b = wn * (ep / (4.0 * np.sqrt(2.0 * nf + 1.0)) * com - 0.5 * c10 * em)
        amp_c = wn * (ep / (4.0 * np.sqrt(2.0 * nf + 1.0)) * com + 0.5 * c10 * em)
        amp_d = wn * (np.sqrt(nf) * pref * ep * com
                      - ep / (2.0 * np.sqrt(nf + 1.0)) * (c11 - pref * (c01 - c00)))
        # |ee,-1> does not exist, so the n = 0 quadruple has no d component.
        amp_d = np.where(ns > 0, amp_d, 0.0j)
    else:
        raise ValueError(f"variant must be 'corrected' or 'verbatim', got {variant!r}")
    return amp_a, amp_b, amp_c, amp_d


def _build_table(t, qp, qm, init, field, params, variant):
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    n_sec = field.n_max + 2
    ns = np.arange(n_sec)
    w_ext = np.zeros(n_sec + 1)
    w_ext[: field.n_max + 1] = field.weights
    ep = np.exp(-1j * params.omega_rabi * t_arr)[:, None]
    em = np.conj(ep)
    amp_a, amp_b, amp_c, amp_d = _sector_amplitudes(ns, qp, qm, ep, em, init, w_ext, variant)
    if variant == "corrected":
        ground = ep[:, 0] * (w_ext[0] * init.c00)
    else:
        ground = np.zeros(t_arr.shape, dtype=complex)
    m = n_sec + 1
    shape = (t_arr.size, m)
    pa = np.zeros(shape, dtype=complex)
    pb = np.zeros(shape, dtype=complex)
    pc = np.zeros(shape, dtype=complex)
    pd = np.zeros(shape, dtype=complex)
    pa[:, 0] = ground
    pa[:, 1:] = amp_a
    pb[:, :n_sec] = amp_b
    pc[:, :n_sec] = amp_c
    pd[:, : n_sec - 1] = amp_d[:, 1:]
    return AmplitudeTable(t=t_arr, sector_n=ns, sector_a=amp_a, sector_b=amp_b,
                          sector_c=amp_c, sector_d=amp_d, ground=ground,
                          photon_a=pa, photon_b=pb, photon_c=pc, photon_d=pd)


def amplitude_table(t, init, field, params, variant="corrected"):
    """Amplitudes of the ensemble-averaged channel at the given times.

    Both random phase factors are replaced by the scalar
    averaged_q(t, params.gamma), which freezes the coupled dynamics
    entirely at gamma = 0.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    q = averaged_q(t_arr, params.gamma).astype(complex)[:, None]
    return _build_table(t_arr, q, q, init, field, params, variant)


def deterministic_table(t, init, field, params, variant="corrected", kf_x=0.0):
    """Amplitudes for one frozen realization of the coupling phase.

    Every sector evolves with its own phase exp(+-i omega_n t) where
    omega_n = sqrt(2 (2n+1)) g0 cos(kf_x). This is the reference dynamics
    the numerical integrator must reproduce.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    n_sec = field.n_max + 2
    ns = np.arange(n_sec)
    g_eff = params.g0 * math.cos(kf_x)
    omega_n = np.sqrt(2.0 * (2.0 * ns + 1.0)) * g_eff
    phase = t_arr[:, None] * omega_n[None, :]
    qp = np.exp(1j * phase)
    return _build_table(t_arr, qp, np.conj(qp), init, field, params, variant)


def dressed_amplitudes(n, t, q_plus, q_minus, init, field, params, variant="corrected"):
    """Closed-form quadruple of sector n with explicit phase factors.

    q_plus and q_minus stand for the random factor and its inverse; pass
    conjugate unit phases for a deterministic run or the same averaged
    scalar for the ensemble channel.
    """
    n = int(n)
    if n < 0 or n > field.n_max:
        raise ValueError(f"sector {n} outside the truncation range 0..{field.n_max}")
    w_ext = np.zeros(field.n_max + 3)
    w_ext[: field.n_max + 1] = field.weights
    ns = np.array([n])
    ep = np.exp(-1j * params.omega_rabi * float(t))
    qp = np.asarray(q_plus, dtype=complex).reshape(1, 1)
    qm = np.asarray(q_minus, dtype=complex).reshape(1, 1)
    amp_a, amp_b, amp_c, amp_d = _sector_amplitudes(
        ns, qp, qm, np.array([[ep]]), np.array([[np.conj(ep)]]), init, w_ext, variant)
    return DressedAmplitudes(n=n, a_n=complex(amp_a[0, 0]), b_n=complex(amp_b[0, 0]),
                             c_n=complex(amp_c[0, 0]), d_n=complex(amp_d[0, 0]))


@dataclass(frozen=True)
class ReducedState:
    """Two-atom density matrix after tracing the field, plus its raw trace.

    Averaging shrinks the raw trace below 1, so the matrix is always
    renormalized and the pre-normalization trace reported alongside.
    """

    rho: np.ndarray
    pre_norm_trace: object
    t: object


def table_density(table):
    """Photon-summed density matrices for every time in the table.

    Returns (rho, pre_norm_trace) with shapes (T, 4, 4) and (T,). The
    outer-product assembly keeps the matrix Hermitian and positive by
    construction before renormalization.
    """
    v = np.stack([table.photon_a, table.photon_b, table.photon_c, table.photon_d], axis=1)
    rho = np.einsum("tim,tjm->tij", v, np.conj(v))
    pre = np.einsum("tii->t", rho).real
    if np.any(pre <= 0.0):
        raise InvariantViolation("density matrix trace vanished; initial state carries no weight")
    return rho / pre[:, None, None], pre


def atomic_density(t, init, field, params, variant="corrected"):
    """Ensemble-averaged two-atom state at time t (scalar or array)."""
    scalar = np.ndim(t) == 0
    table = amplitude_table(t, init, field, params, variant)
    rho, pre = table_density(table)
    if scalar:
        return ReducedState(rho=rho[0], pre_norm_trace=float(pre[0]), t=float(table.t[0]))
    return ReducedState(rho=rho, pre_norm_trace=pre, t=table.t)


def deterministic_density(t, init, field, params, variant="corrected", kf_x=0.0):
    """Two-atom state for one frozen coupling phase (no averaging)."""
    scalar = np.ndim(t) == 0
    table = deterministic_table(t, init, field, params, variant, kf_x)
    rho, pre = table_density(table)
    if scalar:
        return ReducedState(rho=rho[0], pre_norm_trace=float(pre[0]), t=float(table.t[0]))
    return ReducedState(rho=rho, pre_norm_trace=pre, t=table.t)

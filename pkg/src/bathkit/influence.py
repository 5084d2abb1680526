"""Discretized influence functional coefficients and reorganization energies.

The coefficients eta_{k k'} are double time integrals of the bath response
function alpha(t - t') over windows fixed by the propagator splitting.  For a
response function given as an exponential series every window integral has a
closed form; this module evaluates those closed forms stably for any step
size and provides a brute-force two-dimensional quadrature oracle used by the
test-suite to pin the window geometry.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate as _si

from .errors import AccuracyError, DivergenceError, InvalidInputError
from .model import (GLDD, MeierTannor, PowerLaw, SpectralDensity, Tabulated,
                    TGLDD, ExponentialSeries, ThermalContext,
                    eval_spectral_density)

__all__ = [
    "EtaGrid",
    "eta_trotter",
    "eta_strang",
    "reorganization_energy",
    "quapi_correct",
    "eta_oracle",
]


@dataclass(frozen=True)
class EtaGrid:
    """Influence coefficients on an N-step grid with step dt.

    Off-diagonal interior entries depend on (k, k') only through the lag
    m = k - k', so they are stored as a length-N lag kernel instead of an
    N x N table.  Strang grids additionally carry the boundary columns and
    rows with half-width windows; ``eta_00``/``eta_NN`` live in ``diag``.
    """

    N: int
    dt: float
    splitting: str
    diag: np.ndarray = field(repr=False)
    lag_kernel: np.ndarray = field(repr=False)
    eta_k0: np.ndarray = field(repr=False, default=None)  # k = 1..N-1
    eta_Nk: np.ndarray = field(repr=False, default=None)  # k = 1..N-1
    eta_N0: complex = None

    def kernel(self, m: int) -> complex:
        """Interior off-diagonal coefficient at lag m = k - k' >= 1."""
        if not 1 <= m <= self.N:
            raise InvalidInputError(f"lag must be in [1, {self.N}], got {m}")
        return complex(self.lag_kernel[m - 1])

    def value(self, k: int, kp: int) -> complex:
        """eta_{k k'} for 0 <= k' <= k <= N."""
        if not 0 <= kp <= k <= self.N:
            raise InvalidInputError(
                f"indices must satisfy 0 <= k' <= k <= N, got ({k}, {kp})")
        if k == kp:
            return complex(self.diag[k])
        if self.splitting == "strang":
            if k == self.N and kp == 0:
                return complex(self.eta_N0)
            if kp == 0:
                return complex(self.eta_k0[k - 1])
            if k == self.N:
                return complex(self.eta_Nk[kp - 1])
        return self.kernel(k - kp)


def _check_series(series):
    if series.count == 0:
        raise InvalidInputError("series must have at least one term")
    if np.any(series.omega.real >= 0):
        raise InvalidInputError(
            "influence coefficients require a decaying series "
            "(all Re(omega) < 0)")


def _sinhc(z):
    """sinh(z)/z, stable at z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    out = np.where(small, 1.0 + z**2 / 6.0 + z**4 / 120.0, np.sinh(safe) / safe)
    return out


def _phi2(z):
    """(exp(z) - 1 - z)/z**2, stable at z = 0 (limit 1/2)."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    series = 0.5 + z / 6.0 + z**2 / 24.0 + z**3 / 120.0
    return np.where(small, series, (np.exp(safe) - 1.0 - safe) / safe**2)


def _full_diag(series, dt):
    # triangle window of width dt: sum_k p (e^{w dt} - 1 - w dt)/w^2
    return complex(np.sum(series.p * dt**2 * _phi2(series.omega * dt)))


def _half_diag(series, dt):
    # triangle window of width dt/2 at the grid ends of a Strang splitting
    h = dt / 2.0
    return complex(np.sum(series.p * h**2 * _phi2(series.omega * h)))


def _lag_kernel(series, dt, N):
    # full rectangle windows: 4 sum p/w^2 sinh^2(w dt/2) e^{w m dt}
    m = np.arange(1, N + 1)
    s = _sinhc(series.omega * dt / 2.0)
    amp = 4.0 * series.p * (dt / 2.0) ** 2 * s**2
    grow = np.exp(series.omega[:, None] * (m[None, :] * dt))
    return (amp[:, None] * grow).sum(axis=0)


def eta_trotter(series: ExponentialSeries, dt: float, N: int) -> EtaGrid:
    """Influence coefficients for a first-order (Trotter) splitting.

    Every window is the full square [k dt, (k+1) dt] x [k' dt, (k'+1) dt]
    (triangle half for the diagonal), so off-diagonal entries depend only on
    the lag and the diagonal is uniform.
    """
    _check_series(series)
    if dt <= 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    if N < 1:
        raise InvalidInputError(f"N must be >= 1, got {N}")
    diag = np.full(N + 1, _full_diag(series, dt), dtype=complex)
    return EtaGrid(N=N, dt=dt, splitting="trotter", diag=diag,
                   lag_kernel=_lag_kernel(series, dt, N))


def eta_strang(series: ExponentialSeries, dt: float, N: int) -> EtaGrid:
    """Influence coefficients for a second-order (Strang) splitting.

    The first and last grid points carry half-width windows [0, dt/2] and
    [N dt - dt/2, N dt]; interior windows are full width and centred,
    [k dt - dt/2, k dt + dt/2].  Interior entries therefore coincide with the
    Trotter formulas while the boundary column, row and corner pick up
    half-window factors.
    """
    _check_series(series)
    if dt <= 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    if N < 2:
        raise InvalidInputError(f"N must be >= 2, got {N}")
    p, w = series.p, series.omega
    t_end = N * dt
    s2 = _sinhc(w * dt / 2.0)  # sinh(w dt/2) = (w dt/2) s2
    s4 = _sinhc(w * dt / 4.0)

    diag = np.full(N + 1, _full_diag(series, dt), dtype=complex)
    diag[0] = diag[N] = _half_diag(series, dt)

    k = np.arange(1, N)
    # full column window x half source window [0, dt/2]
    amp_k0 = p * (dt**2 / 2.0) * s2 * s4
    eta_k0 = (amp_k0[:, None]
              * np.exp(w[:, None] * (k[None, :] * dt - dt / 4.0))).sum(axis=0)
    # half end window x full source window around k' dt
    amp_Nk = p * (dt**2 / 2.0) * s2 * s4
    eta_Nk = (amp_Nk[:, None]
              * np.exp(w[:, None] * (t_end - k[None, :] * dt - dt / 4.0))).sum(axis=0)
    # half end window x half source window
    eta_N0 = complex(np.sum(
        p * (dt**2 / 4.0) * s4**2 * np.exp(w * (t_end - dt / 2.0))))

    return EtaGrid(N=N, dt=dt, splitting="strang", diag=diag,
                   lag_kernel=_lag_kernel(series, dt, N),
                   eta_k0=eta_k0, eta_Nk=eta_Nk, eta_N0=eta_N0)


# ---------------------------------------------------------------------------
# reorganization energy
# ---------------------------------------------------------------------------

def reorganization_energy(J: SpectralDensity, ctx: ThermalContext = None) -> float:
    """lambda = int_0^inf J(w)/w dw, analytically where the family allows it.

    ``ctx`` is required for the thermally scaled family, whose definition
    carries tanh(beta*hbar*w/2); the other families have temperature-free
    values.
    """
    if isinstance(J, GLDD):
        return float(sum(t.lam for t in J.terms))
    if isinstance(J, MeierTannor):
        return float(sum(
            np.pi**2 * t.lam / (8.0 * t.gamma * (t.gamma**2 + t.omega_tilde**2))
            for t in J.terms))
    if isinstance(J, PowerLaw):
        prm = J.params
        if prm.exponent <= 0:
            raise DivergenceError(
                "reorganization energy diverges for exponent s <= 0")
        return prm.amplitude / prm.stretching * prm.cutoff**prm.exponent \
            * math.gamma(prm.exponent / prm.stretching)
    if isinstance(J, TGLDD):
        if ctx is None:
            raise InvalidInputError(
                "a ThermalContext is required for the thermally scaled family")
        bh = ctx.beta_hbar

        def integrand(w):
            if w == 0.0:
                return bh / 2.0 / np.pi * sum(
                    2 * t.lam * t.gamma / (t.gamma**2 + t.omega_tilde**2)
                    for t in J.terms)
            return eval_spectral_density(J, w, ctx) / w

        return _quad_lambda(integrand, 0.0, np.inf)
    if isinstance(J, Tabulated):
        if J.omega[0] == 0.0 and J.j[0] != 0.0:
            raise DivergenceError(
                "tabulated J(0) != 0: the reorganization integral diverges")

        def integrand(w):
            if w == 0.0:
                return 0.0
            return eval_spectral_density(J, w) / w

        return _quad_lambda(integrand, 0.0, float(J.omega[-1]))
    raise InvalidInputError(f"unknown spectral density {J!r}")


def _quad_lambda(f, a, b):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", _si.IntegrationWarning)
        value, abserr = _si.quad(f, a, b, limit=400, epsabs=1e-12, epsrel=1e-12)
    for w in caught:
        if issubclass(w.category, _si.IntegrationWarning):
            raise AccuracyError(
                f"reorganization quadrature did not converge: {w.message}",
                achieved=abserr)
    return float(value)


# ---------------------------------------------------------------------------
# QUAPI counter term
# ---------------------------------------------------------------------------

def quapi_correct(grid: EtaGrid, lam: float, ctx: ThermalContext) -> EtaGrid:
    """Shift every diagonal coefficient by i dt lambda / (hbar pi).

    Off-diagonal entries are unchanged.  The shift is applied uniformly,
    including the half-width endpoint windows of a Strang grid; whether those
    should carry half the counter term is an open modeling question, so the
    uniform choice is documented here rather than silently halved.
    """
    if lam < 0:
        raise InvalidInputError(
            f"reorganization energy must be >= 0, got {lam}")
    shift = 1j * grid.dt * lam / (ctx.hbar * np.pi)
    return EtaGrid(N=grid.N, dt=grid.dt, splitting=grid.splitting,
                   diag=grid.diag + shift, lag_kernel=grid.lag_kernel,
                   eta_k0=grid.eta_k0, eta_Nk=grid.eta_Nk, eta_N0=grid.eta_N0)


# ---------------------------------------------------------------------------
# window-integration oracle
# ---------------------------------------------------------------------------

def eta_oracle(alpha_fn, window_t, window_tp, triangular: bool = False,
               tol: float = 1e-10) -> complex:
    """Brute-force double integral of alpha(t - t') over a window.

    For ``triangular`` the region is a <= t' <= t <= b on ``window_t``
    (``window_tp`` is ignored); otherwise the full rectangle
    ``window_t`` x ``window_tp``.  Used to validate the closed forms.
    """
    a, b = map(float, window_t)
    if b < a:
        raise InvalidInputError(f"empty t window [{a}, {b}]")
    if triangular:
        lo, hi = lambda t: a, lambda t: t
        c, d = a, b
    else:
        c, d = map(float, window_tp)
        if d < c:
            raise InvalidInputError(f"empty t' window [{c}, {d}]")
        lo, hi = lambda t: c, lambda t: d
    if b == a or (not triangular and d == c):
        return 0.0 + 0.0j

    def run(part):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", _si.IntegrationWarning)
            value, abserr = _si.dblquad(
                lambda tp, t: part(alpha_fn(t - tp)), a, b, lo, hi,
                epsabs=tol, epsrel=tol)
        for w in caught:
            if issubclass(w.category, _si.IntegrationWarning):
                raise AccuracyError(
                    f"window quadrature did not converge: {w.message}",
                    achieved=abserr)
        return value

    return complex(run(lambda v: v.real), run(lambda v: v.imag))

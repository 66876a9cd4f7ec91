"""Closed-form dispersive-readout physics for the dual-rail erasure check.

Everything here is a pure function of :class:`~erasim.core.SystemParams`.
The driven resonator settles, depending on the qubit sector, into one of
three coherent steady states

    alpha_state = -i * eps_d / (kappa/2 + i * Delta_state),

with ``Delta_state`` equal to ``drive_detuning + chi -/+ chi_dr`` for the
two logical states and ``drive_detuning - chi`` for the erased state.  From
those amplitudes follow the measurement rate (information gain about
erased-vs-logical), the logical dephasing rate induced by the mismatch
``chi_dr``, and the drive detuning that minimizes the induced dephasing at
fixed SNR.

Sign conventions: the drive is resonant with the erased-state response at
``drive_detuning = chi``; the optimal detuning is
``sign(chi) * sqrt((kappa/2)^2 + chi^2)``, i.e. slightly beyond the
erased-state resonance, which darkens the logical-state response.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erf

from .core import SystemParams


@dataclass(frozen=True)
class SteadyStateSet:
    """Steady-state resonator amplitudes and photon numbers.

    ``n_dr`` is the photon number averaged over the logical subspace,
    computed from the mean logical amplitude; ``n_gg`` is the erased-state
    photon number.
    """

    alpha_0: complex
    alpha_1: complex
    alpha_gg: complex
    n_dr: float
    n_gg: float

    @property
    def alpha_logical(self) -> complex:
        return 0.5 * (self.alpha_0 + self.alpha_1)


def _kappa(params: SystemParams, kappa: float | None) -> float:
    # Analytic formulas default to the erased-state linewidth; the
    # state-dependent value only matters for trajectory-level decay.
    return params.kappa_gg if kappa is None else kappa


def steady_states(params: SystemParams, kappa: float | None = None) -> SteadyStateSet:
    """Coherent steady states for the three qubit sectors.

    Parameters
    ----------
    params : SystemParams
        Validated parameters.
    kappa : float, optional
        Linewidth override (rad/s); defaults to ``params.kappa_gg``.
    """
    k = _kappa(params, kappa)
    eps = params.drive_amp
    delta = params.drive_detuning
    a0 = -1j * eps / (k / 2 + 1j * (delta + params.chi - params.chi_dr))
    a1 = -1j * eps / (k / 2 + 1j * (delta + params.chi + params.chi_dr))
    agg = -1j * eps / (k / 2 + 1j * (delta - params.chi))
    a_log = 0.5 * (a0 + a1)
    return SteadyStateSet(a0, a1, agg, abs(a_log) ** 2, abs(agg) ** 2)


def field_steady_state(drive_amp: float, detuning: float, kappa: float) -> complex:
    """Steady state -i*eps / (kappa/2 + i*detuning) for one sector."""
    return -1j * drive_amp / (kappa / 2 + 1j * detuning)


def sector_detunings(params: SystemParams) -> dict[str, float]:
    """Effective drive detuning seen by the resonator in each sector."""
    d = params.drive_detuning
    return {
        "logical_0": d + params.chi - params.chi_dr,
        "logical_1": d + params.chi + params.chi_dr,
        "erased": d - params.chi,
    }


def photon_ratio(params: SystemParams, kappa: float | None = None) -> float:
    """Ratio n_dr/n_gg of logical to erased steady-state photon number.

    Closed form (mismatch neglected in the logical photon number):

        [1 + (2*Delta_d/kappa - 2*chi/kappa)^2] /
        [1 + (2*Delta_d/kappa + 2*chi/kappa)^2]

    Detuning the drive past the erased-state resonance makes this ratio
    small (selective darkening), suppressing induced dephasing.
    """
    k = _kappa(params, kappa)
    u = 2 * params.drive_detuning / k
    c = 2 * params.chi / k
    return (1 + (u - c) ** 2) / (1 + (u + c) ** 2)


def measurement_rate(params: SystemParams, kappa: float | None = None) -> float:
    """Steady-state rate of information gain about erased vs logical (rad/s).

    Defined as ``2*kappa*eta_eff*|delta_alpha|^2`` with
    ``delta_alpha = alpha_gg - (alpha_0 + alpha_1)/2`` evaluated at
    ``chi_dr = 0`` (the erasure check does not resolve the logical states;
    the finite-mismatch correction is O((chi_dr/chi)^2), see
    :func:`measurement_rate_exact`).  Integrated for a duration T this
    gives the check SNR: ``SNR = rate * T``.
    """
    k = _kappa(params, kappa)
    matched = params.replace(chi_dr=0.0)
    ss = steady_states(matched, kappa=k)
    delta_alpha = ss.alpha_gg - ss.alpha_logical
    return 2 * k * params.eta_eff * abs(delta_alpha) ** 2


def measurement_rate_exact(params: SystemParams, kappa: float | None = None) -> float:
    """Measurement rate with the finite-mismatch steady states retained."""
    k = _kappa(params, kappa)
    ss = steady_states(params, kappa=k)
    delta_alpha = ss.alpha_gg - ss.alpha_logical
    return 2 * k * params.eta_eff * abs(delta_alpha) ** 2


def dephasing_rate(params: SystemParams, kappa: float | None = None) -> float:
    """Mismatch-induced dephasing rate within the logical subspace (rad/s).

    Exact form ``-2*chi_dr*Im[conj(alpha_0) * alpha_1]``, equal to

        2*eps^2*chi_dr^2*kappa /
        ([(k/2)^2 + (D+chi+chi_dr)^2] * [(k/2)^2 + (D+chi-chi_dr)^2]).

    This is the decay rate of the ensemble logical coherence,
    <X>(t) = <X>(0) * exp(-rate * t), under a constant probe.
    """
    k = _kappa(params, kappa)
    ss = steady_states(params, kappa=k)
    return -2 * params.chi_dr * float(np.imag(np.conj(ss.alpha_0) * ss.alpha_1))


def dephasing_rate_approx(params: SystemParams, kappa: float | None = None) -> float:
    """Dephasing rate with chi_dr dropped from the denominators.

    Agrees with :func:`dephasing_rate` to relative order (chi_dr/chi)^2 in
    the mismatch regime.
    """
    k = _kappa(params, kappa)
    denom = (k / 2) ** 2 + (params.drive_detuning + params.chi) ** 2
    return 2 * params.drive_amp**2 * params.chi_dr**2 * k / denom**2


def separation_error(snr: float) -> float:
    """Gaussian separation error [1 - erf(sqrt(SNR)/2)] / 2.

    This is the misclassification probability per side of a midpoint
    threshold between two equal-variance Gaussians at the given SNR
    (convention SNR = d^2 / (2 sigma^2)).
    """
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    return 0.5 * (1.0 - erf(math.sqrt(snr) / 2.0))


def induced_dephasing_error(
    snr: float, params: SystemParams, kappa: float | None = None
) -> float:
    """Dephasing error per check at fixed SNR.

        (SNR / 12 eta_eff) * (chi_dr/chi)^2 * n_dr/n_gg

    Equivalent to ``(dephasing_rate_approx / measurement_rate) * SNR / 3``.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    if params.chi == 0:
        raise ValueError("chi must be nonzero")
    ratio = photon_ratio(params, kappa=kappa)
    return snr / (12 * params.eta_eff) * (params.chi_dr / params.chi) ** 2 * ratio


def detuning_bracket_factor(chi: float, kappa: float) -> float:
    """Minimum of the photon ratio over drive detuning.

        (sqrt(1 + (2 chi/kappa)^2) - 2|chi|/kappa)^2

    Limits: 1 for 2|chi|/kappa << 1, (sqrt(2)-1)^2 ~ 0.1716 at
    2|chi|/kappa = 1, and (kappa/2chi)^2 / 4 for 2|chi|/kappa >> 1.
    """
    c = 2 * abs(chi) / kappa
    return (math.sqrt(1 + c * c) - c) ** 2


def min_dephasing_error(
    snr: float, params: SystemParams, kappa: float | None = None
) -> tuple[float, float]:
    """Detuning-minimized dephasing error and the optimal detuning.

    Returns
    -------
    (error, detuning) : tuple of float
        ``error = (SNR / 12 eta_eff) (chi_dr/chi)^2
        (sqrt(1+(2chi/kappa)^2) - 2|chi|/kappa)^2`` and
        ``detuning = sign(chi) * sqrt((kappa/2)^2 + chi^2)``.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    if params.chi == 0:
        raise ValueError("chi must be nonzero")
    k = _kappa(params, kappa)
    factor = detuning_bracket_factor(params.chi, k)
    error = snr / (12 * params.eta_eff) * (params.chi_dr / params.chi) ** 2 * factor
    detuning = math.copysign(
        math.sqrt((k / 2) ** 2 + params.chi**2), params.chi
    )
    return error, detuning


def min_dephasing_error_asymptotic(
    snr: float, params: SystemParams, kappa: float | None = None
) -> float:
    """Large-shift branch (SNR / 24 eta_eff)(chi_dr/chi)^2 (kappa/2chi)^2.

    Conventional resolved-regime estimate; it sits a factor ~2 above the
    exact minimum's large-2|chi|/kappa limit and roughly 3x above the
    exact minimum at 2|chi|/kappa = 1, so treat it as an order-of-magnitude
    budget number, not a bound.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    if params.chi == 0:
        raise ValueError("chi must be nonzero")
    k = _kappa(params, kappa)
    return (
        snr
        / (24 * params.eta_eff)
        * (params.chi_dr / params.chi) ** 2
        * (k / (2 * params.chi)) ** 2
    )


def optimize_detuning_numeric(
    snr: float, params: SystemParams, kappa: float | None = None
) -> tuple[float, float]:
    """Numeric cross-check of :func:`min_dephasing_error`.

    Bracketed scalar minimization of the induced dephasing error over the
    drive detuning in [-10 kappa, 10 kappa].  The objective is unimodal on
    the bracket, so bounded Brent converges; non-convergence raises with
    the bracket in the message.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    if params.chi == 0:
        raise ValueError("chi must be nonzero")
    k = _kappa(params, kappa)
    if params.chi_dr == 0:
        # Zero mismatch: objective is identically zero, any detuning works.
        return 0.0, params.drive_detuning

    def objective(detuning: float) -> float:
        return induced_dephasing_error(
            snr, params.replace(drive_detuning=detuning), kappa=k
        )

    bracket = (-10 * k, 10 * k)
    result = minimize_scalar(
        objective,
        bounds=bracket,
        method="bounded",
        options={"xatol": 1e-8 * k, "maxiter": 500},
    )
    if not result.success:
        raise RuntimeError(
            f"detuning optimization failed on bracket {bracket}: {result.message}"
        )
    return float(result.fun), float(result.x)


def calibrate_drive_amp(
    params: SystemParams, snr: float, duration: float
) -> SystemParams:
    """Return params with drive_amp set so SNR accumulates in ``duration``.

    Uses ``measurement_rate * duration = SNR`` and the quadratic dependence
    of the rate on the drive amplitude.
    """
    if snr <= 0 or duration <= 0:
        raise ValueError("snr and duration must be positive")
    probe = params.replace(drive_amp=1.0)
    rate_unit = measurement_rate(probe)
    if rate_unit == 0:
        raise ValueError("no erased/logical distinguishability at these parameters")
    return params.replace(drive_amp=math.sqrt(snr / (rate_unit * duration)))


def stark_photon_number(
    chi_1: float, scale_c: float, amp: float
) -> tuple[float, float]:
    """Stark shift and photon number from a drive-amplitude calibration.

    The transition shift is ``2 * chi_1 * n_r`` with ``n_r = (C * A)^2``,
    where ``C`` converts the room-temperature amplitude ``A`` to a field.

    Returns
    -------
    (shift, n_r) : tuple of float
        Shift in rad/s (if chi_1 is rad/s) and the photon number.
    """
    if scale_c <= 0:
        raise ValueError("scale_c must be positive")
    n_r = (scale_c * amp) ** 2
    return 2 * chi_1 * n_r, n_r


def dr_detuning_vs_photon(params: SystemParams, n_r: float) -> float:
    """Dual-rail gap detuning versus resonator photon number.

    Degree-2 law ``2*chi_dr*n_r + 2*chi_dr_2*n_r^2``; the linear
    coefficient is the reported mismatch.
    """
    if n_r < 0:
        raise ValueError("n_r must be nonnegative")
    return 2 * params.chi_dr * n_r + 2 * params.chi_dr_2 * n_r**2

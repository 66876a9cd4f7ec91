"""Curve fitting used by the benchmarking extractions.

Exponential decays with *fixed* offsets (0 or 1/2 — the offset is part of
the model, never fitted), Lorentzian pairs for Stark spectroscopy, a
degree-2 polynomial through the origin for the mismatch calibration, and
the decay-to-error conversions for reference and interleaved RB.

Nonlinear fits use damped least squares with analytic Jacobians and an
initial guess from log-linear regression; 1-sigma uncertainties come from
the Jacobian-based covariance scaled by the reduced chi-square, which makes
them calibrated for unweighted Gaussian noise.  Per-point weights are
accepted everywhere but default to None (unweighted).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares


@dataclass(frozen=True)
class FitResult:
    """Named parameters with 1-sigma uncertainties and fit diagnostics."""

    params: dict[str, float]
    stderr: dict[str, float]
    covariance: np.ndarray
    residual_norm: float
    converged: bool
    flags: tuple[str, ...] = ()

    def __getitem__(self, name: str) -> float:
        return self.params[name]

    def sigma(self, name: str) -> float:
        return self.stderr[name]


def _package(
    names: list[str],
    values: np.ndarray,
    jac: np.ndarray,
    residuals: np.ndarray,
    weights: np.ndarray | None,
    converged: bool,
    flags: tuple[str, ...] = (),
) -> FitResult:
    n, k = len(residuals), len(values)
    dof = max(n - k, 1)
    chi2_red = float(residuals @ residuals) / dof
    jtj = jac.T @ jac
    try:
        cov = np.linalg.inv(jtj) * chi2_red
    except np.linalg.LinAlgError:
        cov = np.full((k, k), np.nan)
        converged = False
        flags = flags + ("singular jacobian",)
    stderr = {
        name: float(np.sqrt(max(cov[i, i], 0.0))) for i, name in enumerate(names)
    }
    if weights is not None:
        # Residuals were pre-weighted; norm reported on the weighted scale.
        pass
    return FitResult(
        params={name: float(v) for name, v in zip(names, values)},
        stderr=stderr,
        covariance=cov,
        residual_norm=float(np.linalg.norm(residuals)),
        converged=converged,
        flags=flags,
    )


def fit_exp_decay(
    x: np.ndarray,
    y: np.ndarray,
    fixed_offset: float,
    weights: np.ndarray | None = None,
) -> FitResult:
    """Least-squares fit of ``y = A * p**x + fixed_offset``.

    Parameters
    ----------
    x : array
        Strictly increasing abscissa (check counts, Clifford numbers, or
        delays); need not be integer.
    y : array
        Observed values.
    fixed_offset : float
        The fixed asymptote B (0 for postselection curves, 1/2 for
        symmetrized survival).
    weights : array, optional
        Per-point weights (1/sigma); unweighted when omitted.

    Returns
    -------
    FitResult
        Parameters ``amplitude`` (A) and ``decay`` (p).  A ``decay``
        outside (0, 1] is flagged, not rejected.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 4:
        raise ValueError("need at least 4 points")
    if np.any(np.diff(x) <= 0):
        raise ValueError("x must be strictly increasing")
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)

    z = y - fixed_offset
    amp0 = z[0] if z[0] != 0 else (np.max(np.abs(z)) or 1.0)
    usable = (np.sign(z) == np.sign(amp0)) & (np.abs(z) > 1e-4 * abs(amp0))
    if usable.sum() >= 2:
        slope = np.polyfit(x[usable], np.log(np.abs(z[usable])), 1)[0]
        p0 = float(np.clip(np.exp(slope), 1e-6, 2.0))
    else:
        p0 = 0.9

    def residuals(theta):
        a, p = theta
        return w * (a * p**x + fixed_offset - y)

    def jacobian(theta):
        a, p = theta
        px = p**x
        return np.column_stack([w * px, w * a * x * p ** (x - 1)])

    result = least_squares(
        residuals,
        x0=[amp0, p0],
        jac=jacobian,
        bounds=([-np.inf, 1e-12], [np.inf, np.inf]),
        method="trf",
        xtol=1e-14,
        ftol=1e-14,
        gtol=1e-14,
    )
    if not result.success:
        raise RuntimeError(f"exponential fit did not converge: {result.message}")
    flags = ()
    p_fit = result.x[1]
    if not 0 < p_fit <= 1:
        flags = (f"decay parameter {p_fit:.6g} outside (0, 1]",)
    return _package(
        ["amplitude", "decay"],
        result.x,
        jacobian(result.x),
        residuals(result.x),
        weights,
        True,
        flags,
    )


def rb_error_from_decay(p_ref: float) -> float:
    """Average error per Clifford from the reference decay, (1 - p)/2."""
    if not 0 < p_ref <= 1:
        raise ValueError("decay parameter must lie in (0, 1]")
    return (1.0 - p_ref) / 2.0


def ilrb_error_from_decays(p_int: float, p_ref: float) -> float:
    """Interleaved-operation error from the two decays, (1 - p_int/p_ref)/2.

    A ``p_int`` exceeding ``p_ref`` (negative extracted error, possible on
    noisy fits) raises rather than silently returning a negative rate.
    """
    if not 0 < p_ref <= 1 or p_int <= 0:
        raise ValueError("decay parameters must be positive (and p_ref <= 1)")
    if p_int > p_ref:
        raise ValueError(
            f"interleaved decay {p_int:.6g} exceeds reference {p_ref:.6g}: "
            "negative extracted error"
        )
    return (1.0 - p_int / p_ref) / 2.0


def ilrb_error_uncertainty(
    p_int: float, u_int: float, p_ref: float, u_ref: float
) -> float:
    """1-sigma uncertainty on :func:`ilrb_error_from_decays` by propagation."""
    ratio = p_int / p_ref
    return 0.5 * ratio * float(np.hypot(u_int / p_int, u_ref / p_ref))


def _lorentzian(f, center, width, amplitude):
    half = width / 2.0
    return amplitude * half**2 / ((f - center) ** 2 + half**2)


def fit_lorentzian_pair(
    freq: np.ndarray,
    response: np.ndarray,
    weights: np.ndarray | None = None,
) -> FitResult:
    """Fit a sum of two Lorentzian peaks.

    Returns centers, widths (FWHM), and amplitudes, ordered so that
    ``center_a <= center_b``.  Peaks closer than the mean of their widths
    are flagged as unresolved.
    """
    freq = np.asarray(freq, dtype=float)
    response = np.asarray(response, dtype=float)
    if len(freq) < 8:
        raise ValueError("need at least 8 points spanning both peaks")
    w = np.ones_like(response) if weights is None else np.asarray(weights, float)

    span = freq[-1] - freq[0]
    i1 = int(np.argmax(response))
    exclusion = np.abs(freq - freq[i1]) < span / 6
    masked = np.where(exclusion, -np.inf, response)
    i2 = int(np.argmax(masked))
    width0 = span / 10
    theta0 = [
        freq[i1], width0, response[i1],
        freq[i2], width0, response[i2],
    ]

    def residuals(theta):
        c1, w1, a1, c2, w2, a2 = theta
        model = _lorentzian(freq, c1, w1, a1) + _lorentzian(freq, c2, w2, a2)
        return w * (model - response)

    def jacobian(theta):
        cols = []
        for offset in (0, 3):
            c, wd, a = theta[offset : offset + 3]
            half = wd / 2.0
            denom = (freq - c) ** 2 + half**2
            dc = a * half**2 * 2 * (freq - c) / denom**2
            dw = a * (half * denom - half**3) / denom**2
            da = half**2 / denom
            cols.extend([w * dc, w * dw, w * da])
        return np.column_stack(cols)

    lower = [-np.inf, 1e-30, -np.inf, -np.inf, 1e-30, -np.inf]
    result = least_squares(
        residuals, x0=theta0, jac=jacobian, bounds=(lower, np.inf),
        xtol=1e-14, ftol=1e-14, gtol=1e-14,
    )
    if not result.success:
        raise RuntimeError(f"Lorentzian pair fit did not converge: {result.message}")

    theta = result.x
    if theta[0] > theta[3]:
        theta = np.concatenate([theta[3:], theta[:3]])
    flags = ()
    if abs(theta[0] - theta[3]) < (theta[1] + theta[4]) / 2:
        flags = ("peaks overlap: centers closer than mean width",)
    names = [
        "center_a", "width_a", "amplitude_a",
        "center_b", "width_b", "amplitude_b",
    ]

    def residuals_ordered(t):
        c1, w1, a1, c2, w2, a2 = t
        model = _lorentzian(freq, c1, w1, a1) + _lorentzian(freq, c2, w2, a2)
        return w * (model - response)

    def jac_ordered(t):
        cols = []
        for offset in (0, 3):
            c, wd, a = t[offset : offset + 3]
            half = wd / 2.0
            denom = (freq - c) ** 2 + half**2
            cols.extend(
                [
                    w * a * half**2 * 2 * (freq - c) / denom**2,
                    w * a * (half * denom - half**3) / denom**2,
                    w * half**2 / denom,
                ]
            )
        return np.column_stack(cols)

    return _package(
        names, theta, jac_ordered(theta), residuals_ordered(theta), weights,
        True, flags,
    )


def fit_poly2_through_origin(
    n_r: np.ndarray,
    detuning: np.ndarray,
    weights: np.ndarray | None = None,
) -> FitResult:
    """Linear least squares for ``detuning = linear*n_r + quadratic*n_r^2``.

    The ``linear`` coefficient equals twice the mismatch (2*chi_dr) and
    ``quadratic`` twice the second-order mismatch; callers halve the linear
    coefficient to report the mismatch itself.
    """
    n_r = np.asarray(n_r, dtype=float)
    detuning = np.asarray(detuning, dtype=float)
    if len(n_r) < 3:
        raise ValueError("need at least 3 points")
    if np.any(n_r < 0):
        raise ValueError("photon numbers must be nonnegative")
    w = np.ones_like(detuning) if weights is None else np.asarray(weights, float)

    design = np.column_stack([n_r, n_r**2]) * w[:, None]
    target = detuning * w
    if np.linalg.matrix_rank(design) < 2:
        raise ValueError("rank-deficient design matrix: need distinct n_r > 0")
    coeffs, *_ = np.linalg.lstsq(design, target, rcond=None)
    residuals = design @ coeffs - target
    return _package(
        ["linear", "quadratic"], coeffs, design, residuals, weights, True
    )

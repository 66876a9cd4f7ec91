"""Turning I/Q records into erasure/logical/leak decisions.

Two integration kernels: a rectangular moving window with no overlaps (one
complex point per complete window, trailing partial window dropped) and a
matched filter (one point per record, weights proportional to the mean
separation trajectory between the calibration classes).

Two classifiers on the integrated points: a midpoint threshold along the
calibrated separation axis (erased vs logical), and a circular acceptance
region around the logical mean that additionally flags leaked states
displaced from both calibration clouds.  A point exactly on the binary
threshold classifies as erased: in erasure-based error correction a false
positive only costs postselection efficiency, a false negative costs an
undetected error.

SNR convention throughout: ``|mean_b - mean_a|^2 / (2 * pooled variance)``
along the separation axis, chosen so that ``separation_error(SNR)`` equals
the midpoint-threshold misclassification probability for equal Gaussians.
The pooled-variance estimator (rather than per-class) keeps that identity
exact for equal-variance clouds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import MeasurementRecord


class BinaryLabel(enum.Enum):
    LOGICAL = "logical"
    ERASED = "erased"


class CircularLabel(enum.Enum):
    LOGICAL = "logical"
    ERASED_OR_LEAKED = "erased_or_leaked"


@dataclass(frozen=True)
class Boxcar:
    """Non-overlapping rectangular integration window."""

    window: float

    def __post_init__(self):
        if self.window <= 0:
            raise ValueError("window must be positive")


@dataclass(frozen=True)
class MatchedFilter:
    """Linear kernel proportional to the mean separation trajectory."""

    template: np.ndarray
    dt: float

    def __post_init__(self):
        arr = np.asarray(self.template, dtype=complex)
        if arr.ndim != 1 or len(arr) == 0:
            raise ValueError("template must be a nonempty 1-d array")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "template", arr)
        self.template.setflags(write=False)


Kernel = Boxcar | MatchedFilter


@dataclass(frozen=True)
class ClassifierConfig:
    """Calibrated kernel, separation axis, threshold, and circular region.

    ``projection_axis`` is a unit complex number pointing from the logical
    mean toward the erased mean; ``threshold`` is the midpoint projection.
    ``center``/``radius`` define the circular acceptance region (radius in
    signal units; ``radius/logical_std`` is the radius in sigmas).
    """

    kernel: Kernel
    projection_axis: complex
    threshold: float
    center: complex = 0j
    radius: float = float("inf")
    logical_std: float = float("nan")

    def __post_init__(self):
        if abs(abs(self.projection_axis) - 1.0) > 1e-9:
            raise ValueError("projection_axis must be a unit complex number")
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def project(self, points: np.ndarray) -> np.ndarray:
        """Signed coordinate of points along the separation axis."""
        return np.real(np.conj(self.projection_axis) * np.asarray(points))


def integrate(record: MeasurementRecord, config: ClassifierConfig) -> np.ndarray:
    """Reduce a record to complex classification points.

    Boxcar: one point per complete non-overlapping window (the mean of the
    window's samples); the trailing partial window is dropped.  Matched
    filter: a single point per record, ``sum(conj(w) r) / sum(|w|)``.
    """
    kernel = config.kernel
    samples = record.samples
    if isinstance(kernel, Boxcar):
        per_window = int(round(kernel.window / record.dt))
        if per_window < 1:
            raise ValueError("window shorter than one sample")
        n_windows = len(samples) // per_window
        if n_windows == 0:
            raise ValueError(
                f"record of {len(samples)} samples is shorter than one "
                f"{per_window}-sample window"
            )
        trimmed = samples[: n_windows * per_window]
        return trimmed.reshape(n_windows, per_window).mean(axis=1)
    template = kernel.template
    if len(samples) < len(template):
        raise ValueError("record shorter than the matched-filter template")
    weights = np.conj(template)
    norm = np.sum(np.abs(template))
    point = np.sum(weights * samples[: len(template)]) / norm
    return np.array([point])


def binary_flags(points: np.ndarray, config: ClassifierConfig) -> np.ndarray:
    """Vectorized midpoint-threshold decisions; True means erased."""
    return config.project(points) >= config.threshold


def classify_binary(point: complex, config: ClassifierConfig) -> BinaryLabel:
    """Side-of-threshold decision along the projection axis.

    A point exactly on the threshold flags as erased (tie-break toward
    flagging).
    """
    erased = bool(binary_flags(np.array([point]), config)[0])
    return BinaryLabel.ERASED if erased else BinaryLabel.LOGICAL


def circular_flags(points: np.ndarray, config: ClassifierConfig) -> np.ndarray:
    """Vectorized circular decisions; True means erased-or-leaked."""
    return np.abs(np.asarray(points) - config.center) > config.radius


def classify_circular(point: complex, config: ClassifierConfig) -> CircularLabel:
    """Accept as logical iff the point lies within the circular region."""
    flagged = bool(circular_flags(np.array([point]), config)[0])
    return CircularLabel.ERASED_OR_LEAKED if flagged else CircularLabel.LOGICAL


def estimate_snr(points_a: np.ndarray, points_b: np.ndarray) -> float:
    """Empirical SNR |mean_b - mean_a|^2 / (2 s^2) along the separation axis.

    ``s^2`` is the pooled variance of the two ensembles projected onto the
    mean-difference axis.  Requires at least 30 points per ensemble;
    rejects degenerate (zero-variance) input.
    """
    a = np.asarray(points_a, dtype=complex)
    b = np.asarray(points_b, dtype=complex)
    if len(a) < 30 or len(b) < 30:
        raise ValueError("need at least 30 points per ensemble")
    diff = b.mean() - a.mean()
    if diff == 0:
        axis = 1.0 + 0j
    else:
        axis = diff / abs(diff)
    proj_a = np.real(np.conj(axis) * a)
    proj_b = np.real(np.conj(axis) * b)
    pooled = (
        np.sum((proj_a - proj_a.mean()) ** 2) + np.sum((proj_b - proj_b.mean()) ** 2)
    ) / (len(a) + len(b) - 2)
    if pooled <= 0:
        raise ValueError("degenerate ensembles: zero variance along the axis")
    return float(abs(diff) ** 2 / (2.0 * pooled))


def calibrate(
    points_logical: np.ndarray,
    points_erased: np.ndarray,
    kernel: Kernel | None = None,
    radius_sigmas: float = 3.0,
) -> ClassifierConfig:
    """Build a classifier from labeled calibration ensembles.

    The projection axis points along the mean difference (logical to
    erased), the threshold sits at the midpoint projection, and the
    circular region is centered on the logical mean with radius
    ``radius_sigmas`` times the logical per-axis standard deviation.
    Completely overlapping ensembles (SNR < 0.1) are uncalibratable.
    """
    logical = np.asarray(points_logical, dtype=complex)
    erased = np.asarray(points_erased, dtype=complex)
    snr = estimate_snr(logical, erased)
    if snr < 0.1:
        raise ValueError(f"ensembles overlap (SNR = {snr:.3g} < 0.1): uncalibratable")
    mean_l = logical.mean()
    mean_e = erased.mean()
    axis = (mean_e - mean_l) / abs(mean_e - mean_l)
    midpoint = 0.5 * (mean_l + mean_e)
    threshold = float(np.real(np.conj(axis) * midpoint))
    std = float(
        np.sqrt(0.5 * (np.var(np.real(logical - mean_l)) + np.var(np.imag(logical - mean_l))))
    )
    return ClassifierConfig(
        kernel=kernel if kernel is not None else Boxcar(480e-9),
        projection_axis=complex(axis),
        threshold=threshold,
        center=complex(mean_l),
        radius=radius_sigmas * std,
        logical_std=std,
    )


def matched_filter_template(
    records_logical: list[MeasurementRecord],
    records_erased: list[MeasurementRecord],
) -> MatchedFilter:
    """Matched-filter kernel from calibration records.

    The template is the mean erased-minus-logical signal trajectory; the
    filter applies its conjugate, which is the optimal linear statistic for
    white Gaussian noise.
    """
    if not records_logical or not records_erased:
        raise ValueError("need calibration records for both classes")
    dt = records_logical[0].dt
    n = min(
        min(len(r.samples) for r in records_logical),
        min(len(r.samples) for r in records_erased),
    )
    mean_l = np.mean([r.samples[:n] for r in records_logical], axis=0)
    mean_e = np.mean([r.samples[:n] for r in records_erased], axis=0)
    return MatchedFilter(mean_e - mean_l, dt)


def missed_erasure_fraction(
    checks_between: int, erasure_per_check: float, false_negative: float
) -> float:
    """Erasures missed between consecutive common checks.

    The product ``checks_between * erasure_per_check * false_negative``:
    each of the intervening checks contributes an erasure that the nearest
    detection opportunity misses with the false-negative probability.
    """
    if checks_between < 0:
        raise ValueError("checks_between must be nonnegative")
    for name, value in (
        ("erasure_per_check", erasure_per_check),
        ("false_negative", false_negative),
    ):
        if not 0 <= value <= 1:
            raise ValueError(f"{name} must lie in [0, 1]")
    return checks_between * erasure_per_check * false_negative

"""Stochastic simulation of a single experimental shot.

The model is semiclassical: the resonator field is a deterministic complex
amplitude per occupancy sector (the field equation is linear, so each step
uses the exact propagator ``alpha -> alpha_ss + (alpha - alpha_ss)
e^{-(kappa/2 + i Delta) dt}``), while sector changes are stochastic jumps
with state-dependent hazards:

* erasure out of the logical subspace at ``1/T_erasure`` (population
  weighted between the two logical lifetimes), multiplied by
  ``readout_degradation`` while the probe is on;
* reheating from the erased state back to the logical subspace at
  ``1/t_heat``, into the maximally mixed logical state (the destination
  distribution is an assumption of this simulator, not a measured fact);
* leakage to higher excited states sampled once per probe segment with
  ``mist_prob_per_check``; leaked population is absorbing.

Logical dephasing from the dispersive mismatch is realized as Bernoulli Z
kicks with per-step probability ``Gamma_deph(t) * dt / 2`` (a Z flip with
probability p shrinks the transverse Bloch components by 1 - 2p, so this
choice reproduces the ensemble coherence decay ``exp(-int Gamma_deph dt)``).
Transient negative excursions of the instantaneous rate are clamped to
zero: short-time recoherence is not reproduced, steady-state decay is.

Records are the sector field plus complex white Gaussian noise whose
per-quadrature standard deviation ``1/(2 sqrt(eta_eff kappa_gg dt))`` is
fixed by requiring that integrating a record of duration T yields an
empirical SNR of ``measurement_rate * T``.

Leaked-state fields evolve at detuning ``drive_detuning + 3 chi`` (each
excitation adds one dispersive step of 2 chi beyond the logical sector);
nothing in the measured inputs constrains this placement.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import clifford
from .channel import ErrorChannelParams
from .core import DualRailState, MeasurementRecord, Sector, SystemParams

# Dispersive ladder multiple placing the n>=2 leakage sector.
LEAK_DETUNING_CHI_MULTIPLE = 3.0


class Activity(enum.Enum):
    IDLE = "idle"
    GATE = "gate"
    PROBE_ON = "probe_on"
    ECHO_PULSE = "echo_pulse"


class EventKind(enum.Enum):
    ERASURE_JUMP = "erasure_jump"
    REHEAT_JUMP = "reheat_jump"
    LEAK_JUMP = "leak_jump"
    Z_KICK = "z_kick"
    BIT_FLIP = "bit_flip"


@dataclass(frozen=True)
class Segment:
    duration: float
    activity: Activity
    clifford_index: int | None = None

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("segment durations must be positive")
        if self.activity is Activity.GATE and self.clifford_index is None:
            raise ValueError("gate segments need a Clifford index")


@dataclass(frozen=True)
class ShotTimeline:
    """Ordered activity segments plus the shot's RNG seed."""

    segments: tuple[Segment, ...]
    rng_seed: int

    def __post_init__(self):
        if not self.segments:
            raise ValueError("timeline needs at least one segment")

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)


@dataclass(frozen=True)
class ShotResult:
    record: MeasurementRecord | None
    final_state: DualRailState
    event_log: tuple[tuple[float, EventKind], ...]


def noise_std(params: SystemParams, dt: float) -> float:
    """Per-quadrature noise standard deviation of one record sample."""
    return 1.0 / (2.0 * math.sqrt(params.eta_eff * params.kappa_gg * dt))


def default_dt(params: SystemParams, min_segment: float | None = None) -> float:
    kappa = max(params.kappa_gg, params.kappa_logical)
    dt = 1.0 / (20.0 * kappa)
    if min_segment is not None:
        dt = min(dt, min_segment / 10.0)
    return dt


def generate_record(
    alpha_path: np.ndarray,
    params: SystemParams,
    dt: float,
    seed: int | np.random.Generator,
    origin_time: float = 0.0,
) -> MeasurementRecord:
    """Turn a deterministic field path into a noisy I/Q record.

    The noise is white, complex, and independent per sample, normalized so
    that two constant steady-state fields integrated for a duration T
    separate with empirical SNR ``measurement_rate * T``; larger
    ``eta_eff`` therefore gives proportionally larger empirical SNR.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    alpha_path = np.asarray(alpha_path, dtype=complex)
    sigma = noise_std(params, dt)
    noise = sigma * (
        rng.standard_normal(len(alpha_path))
        + 1j * rng.standard_normal(len(alpha_path))
    )
    return MeasurementRecord(alpha_path + noise, dt, origin_time)


def ringdown_tail(
    params: SystemParams, t: float, detuning: float | None = None
) -> complex:
    """Field decay factor exp(-(kappa/2 + i Delta_state) t) after drive-off.

    Defaults to the erased-state detuning (the bright state of the check);
    pass any value from :func:`erasim.dispersive.sector_detunings` to
    override.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if detuning is None:
        detuning = params.drive_detuning - params.chi
    return complex(np.exp(-(params.kappa_gg / 2 + 1j * detuning) * t))


class _FieldState:
    """Exact-propagator integrator for the per-sector cavity amplitudes."""

    def __init__(self, params: SystemParams):
        self.p = params
        self.alpha_0 = 0j
        self.alpha_1 = 0j
        self.alpha_single = 0j  # erased or leaked sector amplitude

    def detunings(self, sector: Sector) -> tuple[float, ...]:
        d, chi, chi_dr = self.p.drive_detuning, self.p.chi, self.p.chi_dr
        if sector is Sector.LOGICAL:
            return (d + chi - chi_dr, d + chi + chi_dr)
        if sector is Sector.ERASED:
            return (d - chi,)
        return (d + LEAK_DETUNING_CHI_MULTIPLE * chi,)

    def kappa(self, sector: Sector) -> float:
        return self.p.kappa_logical if sector is Sector.LOGICAL else self.p.kappa_gg

    def enter_sector(self, old: Sector, new: Sector) -> None:
        # The field is continuous across a jump; only its drift changes.
        if old is new:
            return
        if old is Sector.LOGICAL:
            current = 0.5 * (self.alpha_0 + self.alpha_1)
        else:
            current = self.alpha_single
        if new is Sector.LOGICAL:
            self.alpha_0 = self.alpha_1 = current
        else:
            self.alpha_single = current

    def set_logical_steady_state(self, drive_on: bool = True) -> None:
        eps = self.p.drive_amp if drive_on else 0.0
        kappa = self.kappa(Sector.LOGICAL)
        d0, d1 = self.detunings(Sector.LOGICAL)
        self.alpha_0 = -1j * eps / (kappa / 2 + 1j * d0)
        self.alpha_1 = -1j * eps / (kappa / 2 + 1j * d1)

    def is_empty(self, sector: Sector) -> bool:
        """True when the cavity holds no field worth integrating."""
        tol = 1e-30
        if sector is Sector.LOGICAL:
            if abs(self.alpha_0) < tol and abs(self.alpha_1) < tol:
                self.alpha_0 = self.alpha_1 = 0j
                return True
            return False
        if abs(self.alpha_single) < tol:
            self.alpha_single = 0j
            return True
        return False

    def evolve(
        self, sector: Sector, drive_on: bool, dt: float, n_steps: int
    ) -> tuple[np.ndarray, np.ndarray | None]:
        """Advance n_steps; return the emitted field path and, in the
        logical sector, the instantaneous dephasing rate at each step."""
        eps = self.p.drive_amp if drive_on else 0.0
        kappa = self.kappa(sector)
        ks = np.arange(1, n_steps + 1)
        paths = []
        amplitudes = (
            (self.alpha_0, self.alpha_1)
            if sector is Sector.LOGICAL
            else (self.alpha_single,)
        )
        for detuning, alpha in zip(self.detunings(sector), amplitudes):
            pole = kappa / 2 + 1j * detuning
            alpha_ss = -1j * eps / pole
            paths.append(alpha_ss + (alpha - alpha_ss) * np.exp(-pole * dt * ks))
        if sector is Sector.LOGICAL:
            self.alpha_0 = complex(paths[0][-1])
            self.alpha_1 = complex(paths[1][-1])
            emitted = 0.5 * (paths[0] + paths[1])
            gamma = np.maximum(
                0.0, -2.0 * self.p.chi_dr * np.imag(np.conj(paths[0]) * paths[1])
            )
            return emitted, gamma
        self.alpha_single = complex(paths[0][-1])
        return paths[0], None


def _erasure_rate(params: SystemParams, bloch_z: float, probe_on: bool) -> float:
    p0 = (1.0 + bloch_z) / 2.0
    rate = p0 / params.t_erasure_0l + (1.0 - p0) / params.t_erasure_1l
    return rate * params.readout_degradation if probe_on else rate


_X_FLIP = np.array([1.0, -1.0, -1.0])
_Y_FLIP = np.array([-1.0, 1.0, -1.0])
_Z_FLIP = np.array([-1.0, -1.0, 1.0])


def _sample_pauli_kick(
    rng: np.random.Generator,
    ch: ErrorChannelParams,
    bloch: np.ndarray,
    time: float,
    events: list,
) -> np.ndarray:
    r = float(rng.random())
    q_identity = 1.0 - ch.p1 / 2 - ch.p_phi / 2
    if r < q_identity:
        return bloch
    if r < q_identity + ch.p1 / 4:
        events.append((time, EventKind.BIT_FLIP))
        return bloch * _X_FLIP
    if r < q_identity + ch.p1 / 2:
        events.append((time, EventKind.BIT_FLIP))
        return bloch * _Y_FLIP
    events.append((time, EventKind.Z_KICK))
    return bloch * _Z_FLIP


def simulate_shot(
    timeline: ShotTimeline,
    params: SystemParams,
    injected: ErrorChannelParams = ErrorChannelParams(),
    initial_state: DualRailState | None = None,
    dt: float | None = None,
    keep_record: bool = True,
    seep_episodes: tuple[tuple[float, float], ...] = (),
) -> ShotResult:
    """Simulate one shot over the given timeline.

    Parameters
    ----------
    timeline : ShotTimeline
        Activity schedule; the probe drive is on exactly during
        ``PROBE_ON`` segments.  Segment durations are quantized to the
        integration grid (within half a step).
    params : SystemParams
        Validated device parameters.
    injected : ErrorChannelParams
        Pauli channel sampled once per gate and once per probe segment.
    initial_state : DualRailState, optional
        Defaults to logical |0_L>.
    dt : float, optional
        Integration step; rejected above the stability bound
        ``1/(20 kappa)``.  Defaults to
        ``min(1/(20 kappa), shortest_segment/10)``.
    keep_record : bool
        Set False to skip sample generation (returns ``record=None``);
        the dynamics RNG stream is unaffected.
    seep_episodes : tuple of (start, duration)
        Scheduled fast erasure-then-seepage excursions: the shot is forced
        into the erased sector at ``start`` and returns to the maximally
        mixed logical state ``duration`` later.  Models fast
        defect-mediated leakage-seepage, logged as ordinary erasure and
        reheat jumps.

    Identical (timeline, params, injected, options) give a bit-identical
    result: all randomness derives from ``timeline.rng_seed``.
    """
    kappa_max = max(params.kappa_gg, params.kappa_logical)
    bound = 1.0 / (20.0 * kappa_max)
    min_seg = min(s.duration for s in timeline.segments)
    if dt is None:
        dt = min(bound, min_seg / 10.0)
    elif dt > bound * (1 + 1e-9):
        raise ValueError(
            f"dt = {dt:g} exceeds the stability bound 1/(20 kappa) = {bound:g}"
        )

    rng_dyn, rng_noise = (
        np.random.default_rng(s)
        for s in np.random.SeedSequence(timeline.rng_seed).spawn(2)
    )
    state = initial_state or DualRailState.logical()
    sector = state.sector
    bloch = np.array(state.bloch, dtype=float)
    fields = _FieldState(params)
    events: list[tuple[float, EventKind]] = []
    chunks: list[np.ndarray] = []
    sigma = noise_std(params, dt)

    # Episode edges on the global step grid.
    episode_marks: list[tuple[int, str]] = []
    for start, duration in sorted(seep_episodes):
        if duration <= 0:
            raise ValueError("episode durations must be positive")
        s = round(start / dt)
        episode_marks.append((s, "begin"))
        episode_marks.append((s + max(1, round(duration / dt)), "end"))
    episode_marks.sort()
    in_episode = False

    def advance(n_total: int, probe_on: bool, now_step: int) -> int:
        """Evolve n_total grid steps with stochastic jumps; returns steps."""
        nonlocal sector, bloch, in_episode
        done = 0
        while done < n_total:
            if sector is Sector.LOGICAL:
                rate = _erasure_rate(params, bloch[2], probe_on)
            elif sector is Sector.ERASED and not in_episode:
                rate = 1.0 / params.t_heat
            else:
                rate = 0.0
            if rate > 0:
                k_jump = max(1, math.ceil(rng_dyn.exponential(1.0 / rate) / dt))
            else:
                k_jump = n_total  # no jump within this stretch
            jump = rate > 0 and k_jump <= n_total - done
            n = min(k_jump, n_total - done)
            drive_on = probe_on and params.drive_amp > 0
            if not drive_on and fields.is_empty(sector):
                # Empty cavity, no drive: the field stays zero and no
                # dephasing accumulates; only noise samples are needed.
                if keep_record:
                    chunks.append(
                        sigma
                        * (
                            rng_noise.standard_normal(n)
                            + 1j * rng_noise.standard_normal(n)
                        )
                    )
            else:
                emitted, gamma = fields.evolve(sector, probe_on, dt, n)
                if keep_record:
                    noise = sigma * (
                        rng_noise.standard_normal(n)
                        + 1j * rng_noise.standard_normal(n)
                    )
                    chunks.append(emitted + noise)
                if gamma is not None:
                    p_kick = np.clip(gamma * dt / 2.0, 0.0, 1.0)
                    kicks = np.nonzero(rng_dyn.random(n) < p_kick)[0]
                    for k in kicks:
                        events.append(
                            ((now_step + done + k + 1) * dt, EventKind.Z_KICK)
                        )
                    if len(kicks) % 2:
                        bloch = bloch * _Z_FLIP
            done += n
            if jump:
                t_now = (now_step + done) * dt
                if sector is Sector.LOGICAL:
                    events.append((t_now, EventKind.ERASURE_JUMP))
                    fields.enter_sector(sector, Sector.ERASED)
                    sector = Sector.ERASED
                    bloch = np.zeros(3)
                else:
                    events.append((t_now, EventKind.REHEAT_JUMP))
                    fields.enter_sector(sector, Sector.LOGICAL)
                    sector = Sector.LOGICAL
                    bloch = np.zeros(3)
        return done

    step_now = 0
    mark_idx = 0
    for segment in timeline.segments:
        probe_on = segment.activity is Activity.PROBE_ON
        t_now = step_now * dt
        if segment.activity is Activity.GATE and sector is Sector.LOGICAL:
            bloch = clifford.CliffordElement(segment.clifford_index).apply(bloch)
            bloch = _sample_pauli_kick(rng_dyn, injected, bloch, t_now, events)
        elif segment.activity is Activity.ECHO_PULSE and sector is Sector.LOGICAL:
            bloch = clifford.X180.apply(bloch)
        elif probe_on and sector is Sector.LOGICAL:
            bloch = _sample_pauli_kick(rng_dyn, injected, bloch, t_now, events)
            if params.mist_prob_per_check > 0 and (
                rng_dyn.random() < params.mist_prob_per_check
            ):
                events.append((t_now, EventKind.LEAK_JUMP))
                fields.enter_sector(sector, Sector.LEAKED)
                sector = Sector.LEAKED
                bloch = np.zeros(3)

        seg_steps = max(1, round(segment.duration / dt))
        seg_end = step_now + seg_steps
        while step_now < seg_end:
            next_mark = (
                episode_marks[mark_idx][0]
                if mark_idx < len(episode_marks)
                else seg_end + 1
            )
            target = min(seg_end, max(next_mark, step_now))
            if target > step_now:
                step_now += advance(target - step_now, probe_on, step_now)
            while mark_idx < len(episode_marks) and episode_marks[mark_idx][0] <= step_now:
                _, kind = episode_marks[mark_idx]
                t_mark = step_now * dt
                if kind == "begin":
                    in_episode = True
                    if sector is Sector.LOGICAL:
                        events.append((t_mark, EventKind.ERASURE_JUMP))
                        fields.enter_sector(sector, Sector.ERASED)
                        sector = Sector.ERASED
                        bloch = np.zeros(3)
                else:
                    in_episode = False
                    if sector is Sector.ERASED:
                        events.append((t_mark, EventKind.REHEAT_JUMP))
                        fields.enter_sector(sector, Sector.LOGICAL)
                        sector = Sector.LOGICAL
                        bloch = np.zeros(3)
                mark_idx += 1

    record = None
    if keep_record:
        samples = np.concatenate(chunks) if chunks else np.zeros(0, dtype=complex)
        record = MeasurementRecord(samples, dt)
    if sector is Sector.LOGICAL:
        final = DualRailState(sector, bloch)
    else:
        final = DualRailState(sector)
    return ShotResult(record, final, tuple(events))


def logical_coherence_ensemble(
    params: SystemParams,
    duration: float,
    n_shots: int,
    seed: int,
    start_in_steady_state: bool = True,
    dt: float | None = None,
) -> tuple[float, float]:
    """Ensemble <X> after holding a +X logical state under constant probe.

    Vectorized over shots (the field path is shared and deterministic; only
    the Z kicks are stochastic), for validating the mismatch-induced
    coherence decay against ``exp(-dephasing_rate * duration)``.  Sector
    jumps are not sampled: this isolates the probe-dephasing channel.

    Returns
    -------
    (x_mean, x_sigma) : tuple of float
        Ensemble-mean X coherence and its standard error.
    """
    if dt is None:
        dt = default_dt(params)
    n_steps = max(1, round(duration / dt))
    step = duration / n_steps
    fields = _FieldState(params)
    if start_in_steady_state:
        fields.set_logical_steady_state(drive_on=True)
    _, gamma = fields.evolve(Sector.LOGICAL, True, step, n_steps)
    p_kick = np.clip(gamma * step / 2.0, 0.0, 1.0)
    rng = np.random.default_rng(seed)
    flips = (rng.random((n_shots, n_steps)) < p_kick).sum(axis=1)
    x_values = np.where(flips % 2 == 0, 1.0, -1.0)
    return float(np.mean(x_values)), float(np.std(x_values) / math.sqrt(n_shots))

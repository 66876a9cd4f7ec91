"""Per-check logical error channel and derived scalar metrics.

A single erasure check acts on the logical qubit as the Pauli channel

    rho -> (1 - p1/2 - p_phi/2) rho + (p1/4)(X rho X + Y rho Y)
           + (p_phi/2) Z rho Z,

with ``p1`` the induced bit-flip probability and ``p_phi`` the induced pure
dephasing per check.  In the Pauli frame this is the diagonal Bloch map
``(x, y, z) -> ((1-p2) x, (1-p2) y, (1-p1) z)`` with ``p2 = p1/2 + p_phi``,
so N checks give exactly ``<Z>_N = (1-p1)^N`` and ``<X>_N = (1-p2)^N``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SIGMA_I = np.eye(2, dtype=complex)
_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class ErrorChannelParams:
    """(p1, p_phi) per-check Pauli channel parameters."""

    p1: float = 0.0
    p_phi: float = 0.0

    def __post_init__(self):
        if not 0 <= self.p1 <= 1:
            raise ValueError("p1 must lie in [0, 1]")
        if not 0 <= self.p_phi <= 1:
            raise ValueError("p_phi must lie in [0, 1]")
        if self.p1 / 2 + self.p_phi / 2 > 1:
            raise ValueError("p1/2 + p_phi/2 must not exceed 1 (completeness)")

    @property
    def p2(self) -> float:
        """Total dephasing per check, p1/2 + p_phi."""
        return self.p1 / 2 + self.p_phi


def apply_check(bloch: np.ndarray, ch: ErrorChannelParams) -> np.ndarray:
    """Apply one check's error channel to a Bloch vector."""
    x, y, z = np.asarray(bloch, dtype=float)
    shrink_xy = 1.0 - ch.p2
    return np.array([shrink_xy * x, shrink_xy * y, (1.0 - ch.p1) * z])


def bloch_transfer(ch: ErrorChannelParams) -> np.ndarray:
    """3x3 Bloch-vector transfer matrix of the channel."""
    return np.diag([1.0 - ch.p2, 1.0 - ch.p2, 1.0 - ch.p1])


def kraus_operators(ch: ErrorChannelParams) -> list[np.ndarray]:
    """Kraus operators {sqrt(w_P) P} of the per-check channel."""
    weights = [
        (1 - ch.p1 / 2 - ch.p_phi / 2, _SIGMA_I),
        (ch.p1 / 4, _SIGMA_X),
        (ch.p1 / 4, _SIGMA_Y),
        (ch.p_phi / 2, _SIGMA_Z),
    ]
    return [np.sqrt(w) * op for w, op in weights]


def avg_fidelity(ch: ErrorChannelParams) -> float:
    """Average gate fidelity of the check channel, 1 - p1/3 - p_phi/3.

    Equals the Kraus trace formula
    ``(1/(d+1)) (1 + (1/d) sum_k |Tr K_k|^2)`` with d = 2.
    """
    return 1.0 - ch.p1 / 3.0 - ch.p_phi / 3.0


def avg_fidelity_kraus(ch: ErrorChannelParams) -> float:
    """Average gate fidelity evaluated directly from the Kraus operators."""
    d = 2
    total = sum(abs(np.trace(k)) ** 2 for k in kraus_operators(ch))
    return (1 + total / d) / (d + 1)


def extract_p_phi(p2: float, p1: float) -> float:
    """Pure dephasing per check from the measured (p2, p1) pair."""
    if p2 < p1 / 2:
        raise ValueError(
            f"p2 = {p2} below p1/2 = {p1 / 2}: unphysical fit result"
        )
    return p2 - p1 / 2


def noise_bias(erasure_per_check: float, residual_per_check: float) -> float:
    """Erasure noise bias: erasure error over residual error per check."""
    if residual_per_check <= 0:
        raise ValueError("residual_per_check must be positive")
    return erasure_per_check / residual_per_check


def heating_time(t_erasure: float, p_equil: float) -> float:
    """Reheating timescale t_erasure / p_equil from the thermal occupation."""
    if p_equil <= 0:
        raise ValueError("p_equil must be positive")
    return t_erasure / p_equil


@dataclass(frozen=True)
class BudgetEntry:
    label: str
    expression: str
    probability: float


@dataclass(frozen=True)
class ErrorBudget:
    """Residual-error budget: named contributions against a measured total."""

    entries: tuple[BudgetEntry, ...]
    measured_total: float | None = None

    @property
    def total(self) -> float:
        return sum(e.probability for e in self.entries)

    @property
    def fraction_accounted(self) -> float | None:
        if self.measured_total is None or self.measured_total == 0:
            return None
        return self.total / self.measured_total

    def render(self) -> str:
        """Aligned text table of the budget."""
        rows = [("Source", "Expression", "Error probability")]
        rows += [
            (e.label, e.expression, f"{e.probability:.3g}") for e in self.entries
        ]
        rows.append(("Total accounted", "", f"{self.total:.3g}"))
        if self.measured_total is not None:
            rows.append(("Measured residual error", "", f"{self.measured_total:.3g}"))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = []
        for i, row in enumerate(rows):
            lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
            if i == 0:
                lines.append("-" * (sum(widths) + 4))
        return "\n".join(lines)

    def to_rows(self) -> list[tuple[str, str, float]]:
        """CSV-ready rows (label, expression, probability) plus the total."""
        rows = [(e.label, e.expression, e.probability) for e in self.entries]
        rows.append(("total_accounted", "", self.total))
        if self.measured_total is not None:
            rows.append(("measured_total", "", self.measured_total))
        return rows


def build_budget(
    components: list[tuple[str, str, float]],
    measured_total: float | None = None,
) -> ErrorBudget:
    """Assemble an ErrorBudget from (label, expression, probability) triples."""
    entries = []
    for label, expression, probability in components:
        if probability < 0:
            raise ValueError(f"budget entry {label!r} is negative")
        entries.append(BudgetEntry(label, expression, float(probability)))
    return ErrorBudget(tuple(entries), measured_total)

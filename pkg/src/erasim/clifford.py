"""Single-qubit Clifford group algebra and RB sequence construction.

Cliffords are represented by their action on the Pauli frame: 3x3 signed
permutation matrices with determinant +1 acting on Bloch column vectors.
There are exactly 24 such matrices; the table is enumerated once at import
in a fixed canonical order (permutation-major, sign-minor), so indices are
stable across runs.  Unitary 2x2 representatives exist only for test
oracles and for the X90 + virtual-Z decomposition.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

# Physical gate timing: every Clifford compiles to two X90 pulses with
# virtual (zero-duration) Z rotations.
X90_DURATION = 24e-9
CLIFFORD_DURATION = 2 * X90_DURATION

_PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _unitary_to_rotation(u: np.ndarray) -> np.ndarray:
    """Adjoint action of a 2x2 unitary on the Pauli frame."""
    rot = np.empty((3, 3))
    for i, pi in enumerate(_PAULIS):
        for j, pj in enumerate(_PAULIS):
            rot[i, j] = 0.5 * np.real(np.trace(pi @ u @ pj @ u.conj().T))
    return rot


def _rotation_to_unitary(rot: np.ndarray) -> np.ndarray:
    """SU(2) element (up to global phase) implementing a Bloch rotation."""
    trace = np.trace(rot)
    cos_theta = max(-1.0, min(1.0, (trace - 1.0) / 2.0))
    theta = math.acos(cos_theta)
    if abs(theta) < 1e-12:
        return np.eye(2, dtype=complex)
    if abs(theta - math.pi) < 1e-9:
        # Axis from the +1 eigenvector of the rotation.
        vals, vecs = np.linalg.eigh((rot + rot.T) / 2)
        axis = vecs[:, np.argmax(vals)]
    else:
        axis = np.array(
            [rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]
        ) / (2 * math.sin(theta))
    axis = axis / np.linalg.norm(axis)
    n_dot_sigma = sum(a * p for a, p in zip(axis, _PAULIS))
    return math.cos(theta / 2) * np.eye(2) - 1j * math.sin(theta / 2) * n_dot_sigma


def _enumerate_group() -> list[np.ndarray]:
    elements = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            mat = np.zeros((3, 3), dtype=int)
            for col, (row, sign) in enumerate(zip(perm, signs)):
                mat[row, col] = sign
            if round(np.linalg.det(mat)) == 1:
                elements.append(mat)
    assert len(elements) == 24
    return elements


_MATRICES: list[np.ndarray] = _enumerate_group()
_INDEX: dict[bytes, int] = {m.tobytes(): i for i, m in enumerate(_MATRICES)}
for _m in _MATRICES:
    _m.setflags(write=False)


@dataclass(frozen=True)
class CliffordElement:
    """One of the 24 single-qubit Cliffords as a signed axis permutation."""

    index: int

    def __post_init__(self):
        if not 0 <= self.index < 24:
            raise ValueError("Clifford index must lie in 0..23")

    @property
    def matrix(self) -> np.ndarray:
        """Bloch-frame rotation matrix (entries in {0, +-1}, det +1)."""
        return _MATRICES[self.index]

    def unitary(self) -> np.ndarray:
        """2x2 unitary representative (up to global phase)."""
        return _rotation_to_unitary(self.matrix.astype(float))

    def apply(self, bloch: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(bloch, dtype=float)


IDENTITY = CliffordElement(_INDEX[np.eye(3, dtype=int).tobytes()])

_X180_ROT = np.diag([1, -1, -1]).astype(int)
X180 = CliffordElement(_INDEX[_X180_ROT.tobytes()])


def compose(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    """Group composition a after b (b acts first)."""
    product = (a.matrix @ b.matrix).astype(int)
    return CliffordElement(_INDEX[product.tobytes()])


def inverse(e: CliffordElement) -> CliffordElement:
    """Group inverse (transpose of the rotation matrix)."""
    return CliffordElement(_INDEX[e.matrix.T.copy().tobytes()])


def all_elements() -> list[CliffordElement]:
    return [CliffordElement(i) for i in range(24)]


def _x90_rotation() -> np.ndarray:
    u = math.cos(math.pi / 4) * np.eye(2) - 1j * math.sin(math.pi / 4) * _PAULIS[0]
    return np.round(_unitary_to_rotation(u)).astype(int)


def _z_rotation(angle: float) -> np.ndarray:
    u = math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * _PAULIS[2]
    return np.round(_unitary_to_rotation(u)).astype(int)


def _build_x90_vz_table() -> dict[int, tuple[float, float, float]]:
    quarter_turns = [0.0, math.pi / 2, math.pi, 3 * math.pi / 2]
    rx90 = _x90_rotation()
    table: dict[int, tuple[float, float, float]] = {}
    for alpha, beta, gamma in itertools.product(quarter_turns, repeat=3):
        net = (
            _z_rotation(gamma) @ rx90 @ _z_rotation(beta) @ rx90 @ _z_rotation(alpha)
        ).astype(int)
        idx = _INDEX[net.tobytes()]
        table.setdefault(idx, (alpha, beta, gamma))
    assert len(table) == 24
    return table


_X90_VZ_TABLE = _build_x90_vz_table()


def decompose_x90_vz(e: CliffordElement) -> tuple[tuple[float, float, float], int]:
    """Decompose into Z(gamma) X90 Z(beta) X90 Z(alpha).

    Returns the three virtual-Z angles (alpha applied first in time) and
    the fixed X90 count of 2.  The decomposition reproduces the element up
    to global phase.
    """
    return _X90_VZ_TABLE[e.index], 2


@dataclass(frozen=True)
class RBSequence:
    """A randomized-benchmarking sequence with recovery and check schedule.

    ``check_positions`` holds the 1-based Clifford counts after which a
    common erasure check is inserted.  When ``interleave`` is set, every
    Clifford is followed by the interleaved operation plus an echo X gate,
    both folded into the recovery computation.
    """

    length_m: int
    elements: tuple[CliffordElement, ...]
    recovery: CliffordElement
    interleave: str | None = None
    check_positions: tuple[int, ...] = ()

    def __post_init__(self):
        if self.length_m != len(self.elements):
            raise ValueError("length_m must match the number of elements")
        if any(not 1 <= p <= self.length_m for p in self.check_positions):
            raise ValueError("check positions out of bounds")
        if any(
            b <= a for a, b in zip(self.check_positions, self.check_positions[1:])
        ):
            raise ValueError("check positions must be strictly increasing")
        if not np.array_equal(self.net_with_recovery(), np.eye(3, dtype=int)):
            raise ValueError("recovery does not compose the sequence to identity")

    def net_without_recovery(self) -> np.ndarray:
        net = np.eye(3, dtype=int)
        for element in self.elements:
            net = element.matrix @ net
            if self.interleave is not None:
                net = X180.matrix @ net
        return net

    def net_with_recovery(self) -> np.ndarray:
        return self.recovery.matrix @ self.net_without_recovery()

    def to_line(self) -> str:
        """Replayable one-line serialization."""
        idx = ",".join(str(e.index) for e in self.elements)
        checks = ",".join(str(p) for p in self.check_positions)
        tag = self.interleave or "-"
        return f"{self.length_m}|{idx}|{self.recovery.index}|{tag}|{checks}"

    @classmethod
    def from_line(cls, line: str) -> "RBSequence":
        length_s, idx_s, rec_s, tag, checks_s = line.strip().split("|")
        elements = tuple(
            CliffordElement(int(i)) for i in idx_s.split(",") if i != ""
        )
        checks = tuple(int(p) for p in checks_s.split(",") if p != "")
        return cls(
            int(length_s),
            elements,
            CliffordElement(int(rec_s)),
            None if tag == "-" else tag,
            checks,
        )


def generate_sequence(
    m: int,
    rng: np.random.Generator | int,
    interleave: str | None = None,
    check_every: int = 5,
) -> RBSequence:
    """Draw m uniform Cliffords and compute the recovery element.

    Common erasure checks land after every ``check_every``-th Clifford.
    When ``interleave`` is given, the interleaved operation plus its echo X
    follow every Clifford and the echo rotations are folded into the
    recovery.
    """
    if m < 1:
        raise ValueError("sequence length must be at least 1")
    if check_every < 1:
        raise ValueError("check_every must be at least 1")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    elements = tuple(CliffordElement(int(i)) for i in gen.integers(0, 24, size=m))
    net = np.eye(3, dtype=int)
    for element in elements:
        net = element.matrix @ net
        if interleave is not None:
            net = X180.matrix @ net
    recovery = CliffordElement(_INDEX[net.T.copy().tobytes()])
    checks = tuple(range(check_every, m + 1, check_every))
    return RBSequence(m, elements, recovery, interleave, checks)

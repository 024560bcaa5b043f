"""Composite Hilbert space: truncated cavity Fock modes and a V-type dot.

The quantum dot (levels g, x, y) is always part of the space and is the
slowest tensor factor; cavity occupations are ordered lexicographically
with the first cavity most significant.  Operators are dense numpy arrays,
adequate for every network simulated here (dimension <= a few hundred).
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionOverflow, OutOfTruncation, UnknownLabel, UnknownLevel

QD_LEVELS = ("g", "x", "y")

#: Spaces larger than this are refused: nothing in the gate protocols needs them.
DEFAULT_DIMENSION_CAP = 10_000


def _lowering(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(complex)


class Space:
    """Basis bookkeeping and elementary operators for one cavity network.

    Parameters
    ----------
    cavities : sequence of (label, n_max)
        Ordered cavity modes with their Fock truncation (n_max >= 1).
    cap : int
        Refuse to build spaces larger than this many basis states.
    """

    def __init__(self, cavities, cap: int = DEFAULT_DIMENSION_CAP):
        cavities = [(str(label), int(n_max)) for label, n_max in cavities]
        if any(n_max < 1 for _, n_max in cavities):
            raise ValueError("every cavity needs n_max >= 1")
        labels = [label for label, _ in cavities]
        if len(set(labels)) != len(labels):
            raise ValueError("cavity labels must be unique")
        self.cavity_labels = tuple(labels)
        self.n_max = dict(cavities)
        self._cav_dims = [n + 1 for _, n in cavities]
        self.dim = 3 * int(np.prod(self._cav_dims, dtype=np.int64))
        if self.dim > cap:
            raise DimensionOverflow(f"dimension {self.dim} exceeds cap {cap}")
        self._ops: dict = {}

    # -- index mapping -------------------------------------------------

    def index_of(self, occupations, qd_level: str = "g") -> int:
        """Basis index of a product state; raises on bad occupations/level."""
        if qd_level not in QD_LEVELS:
            raise UnknownLevel(f"level {qd_level!r} not in {QD_LEVELS}")
        occupations = list(occupations)
        if len(occupations) != len(self.cavity_labels):
            raise ValueError("one occupation per cavity required")
        rank = 0
        for label, dim, occ in zip(self.cavity_labels, self._cav_dims, occupations):
            occ = int(occ)
            if not 0 <= occ < dim:
                raise OutOfTruncation(f"occupation {occ} exceeds n_max of {label}")
            rank = rank * dim + occ
        return QD_LEVELS.index(qd_level) * int(np.prod(self._cav_dims, dtype=np.int64)) + rank

    def occupations_of(self, index: int) -> tuple[tuple[int, ...], str]:
        """Inverse of `index_of`: (occupations, qd_level)."""
        n_cav = int(np.prod(self._cav_dims, dtype=np.int64))
        qd, rank = divmod(int(index), n_cav)
        occs = []
        for dim in reversed(self._cav_dims):
            rank, occ = divmod(rank, dim)
            occs.append(occ)
        return tuple(reversed(occs)), QD_LEVELS[qd]

    def basis_label(self, index: int) -> str:
        occs, level = self.occupations_of(index)
        return "".join(str(o) for o in occs) + ":" + level

    # -- operators -----------------------------------------------------

    def _embed(self, factor_ops: dict) -> np.ndarray:
        """Kron together per-factor operators; identity where unspecified."""
        mat = factor_ops.get("qd", np.eye(3, dtype=complex))
        for label, dim in zip(self.cavity_labels, self._cav_dims):
            mat = np.kron(mat, factor_ops.get(label, np.eye(dim, dtype=complex)))
        return mat

    def annihilation(self, label: str) -> np.ndarray:
        if label not in self.n_max:
            raise UnknownLabel(f"no cavity {label!r} in {self.cavity_labels}")
        key = ("a", label)
        if key not in self._ops:
            self._ops[key] = self._embed({label: _lowering(self.n_max[label])})
        return self._ops[key]

    def number(self, label: str) -> np.ndarray:
        a = self.annihilation(label)
        return a.conj().T @ a

    def qd_transition(self, i: str, j: str) -> np.ndarray:
        """|i><j| on the dot, identity on the cavities."""
        for level in (i, j):
            if level not in QD_LEVELS:
                raise UnknownLevel(f"level {level!r} not in {QD_LEVELS}")
        key = ("sigma", i, j)
        if key not in self._ops:
            op = np.zeros((3, 3), dtype=complex)
            op[QD_LEVELS.index(i), QD_LEVELS.index(j)] = 1.0
            self._ops[key] = self._embed({"qd": op})
        return self._ops[key]

    def excitation_number(self) -> np.ndarray:
        """Total excitation count: photons plus dot population in x or y."""
        key = ("n_total",)
        if key not in self._ops:
            op = self.qd_transition("x", "x") + self.qd_transition("y", "y")
            for label in self.cavity_labels:
                op = op + self.number(label)
            self._ops[key] = op
        return self._ops[key]

    # -- states ----------------------------------------------------------

    def state(self, occupations, qd_level: str = "g") -> np.ndarray:
        """Unit basis vector for the given occupations and dot level."""
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index_of(occupations, qd_level)] = 1.0
        return psi

    def vacuum(self, qd_level: str = "g") -> np.ndarray:
        return self.state([0] * len(self.cavity_labels), qd_level)

    def amplitude_map(self, psi: np.ndarray, cutoff: float = 0.0) -> dict:
        """(occupations, level) -> amplitude, for comparing across truncations."""
        out = {}
        for index in np.flatnonzero(np.abs(psi) > cutoff):
            occs, level = self.occupations_of(int(index))
            out[(occs, level)] = complex(psi[index])
        return out


def one_qubit_space(n_max: int = 1) -> Space:
    """Cavities c1, c2 plus the dot (the dot idles in one-qubit protocols)."""
    return Space([("c1", n_max), ("c2", n_max)])


def two_qubit_space(n_max: int = 1) -> Space:
    """Cavities c3..c6 plus the dot."""
    return Space([("c3", n_max), ("c4", n_max), ("c5", n_max), ("c6", n_max)])


def is_hermitian(matrix: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(matrix - matrix.conj().T)) < tol)

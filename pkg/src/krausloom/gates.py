"""Elementary gates: the U3 rotation, polarization-controlled path flips, and
embeddings of 2x2 blocks into a multi-qubit register.

A register is an ordered tuple of wires. Wire 0 is the leftmost tensor factor
(slowest-varying index). Exactly one wire carries the polarization role; the
others are path qubits. Registers here never exceed 4 qubits, so everything
is built dense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidArgument, InvalidWiring

TWO_PI = 2.0 * math.pi


class Role(str, Enum):
    SYSTEM_PATH = "system-path"
    ENVIRONMENT_PATH = "environment-path"
    RESERVOIR_PATH = "reservoir-path"
    POLARIZATION = "polarization"

    @property
    def is_path(self) -> bool:
        return self is not Role.POLARIZATION


@dataclass(frozen=True)
class WireIndex:
    index: int
    role: Role

    def __post_init__(self):
        if self.index < 0:
            raise InvalidWiring(f"wire index must be nonnegative, got {self.index}")


Register = tuple[WireIndex, ...]


def make_register(*roles: Role | str) -> Register:
    """Build a register from roles in wire order; exactly one polarization."""
    wires = tuple(WireIndex(i, Role(r)) for i, r in enumerate(roles))
    n_pol = sum(1 for w in wires if w.role is Role.POLARIZATION)
    if n_pol != 1:
        raise InvalidWiring(f"register needs exactly one polarization wire, got {n_pol}")
    return wires


def polarization_wire(register: Register) -> WireIndex:
    return next(w for w in register if w.role is Role.POLARIZATION)


def path_wires(register: Register) -> tuple[WireIndex, ...]:
    return tuple(w for w in register if w.role.is_path)


@dataclass(frozen=True)
class U3Params:
    """Angles of the standard single-qubit rotation, reduced into [0, 2pi).

    Reducing theta by 2pi flips the global sign of the matrix, which is
    irrelevant everywhere densities or mode intensities are compared.
    """

    theta: float
    phi: float
    lam: float

    def __post_init__(self):
        for name in ("theta", "phi", "lam"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidArgument(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, float(v) % TWO_PI)


def u3(params: U3Params) -> np.ndarray:
    """2x2 rotation [[cos(t/2), -e^{il} sin(t/2)], [e^{ip} sin(t/2), e^{i(l+p)} cos(t/2)]]."""
    c = math.cos(params.theta / 2.0)
    s = math.sin(params.theta / 2.0)
    el = np.exp(1j * params.lam)
    ep = np.exp(1j * params.phi)
    return np.array([[c, -el * s], [ep * s, el * ep * c]], dtype=complex)


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _bit(index: int, wire: int, n: int) -> int:
    # wire 0 is the most significant bit of the basis index
    return (index >> (n - 1 - wire)) & 1


def _flip(index: int, wire: int, n: int) -> int:
    return index ^ (1 << (n - 1 - wire))


def embed(gate: np.ndarray, wire: int | WireIndex, n: int) -> np.ndarray:
    """Act with a 2x2 gate on one wire of an n-qubit register, identity elsewhere."""
    w = wire.index if isinstance(wire, WireIndex) else int(wire)
    if not (0 <= w < n):
        raise InvalidArgument(f"wire {w} out of range for register size {n}")
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (2, 2):
        raise InvalidArgument(f"embed expects a 2x2 gate, got {gate.shape}")
    out = np.eye(1, dtype=complex)
    for i in range(n):
        out = np.kron(out, gate if i == w else np.eye(2, dtype=complex))
    return out


def cnot_pol_path(control: WireIndex, target: WireIndex, n: int) -> np.ndarray:
    """Permutation flipping the target path qubit exactly when polarization is V.

    This is the action of a polarizing beam splitter / beam displacer: a
    vertically polarized photon changes path, a horizontal one does not.
    """
    if control.role is not Role.POLARIZATION:
        raise InvalidWiring("cnot control must be the polarization wire")
    if not target.role.is_path:
        raise InvalidWiring("cnot target must be a path wire")
    if control.index == target.index:
        raise InvalidWiring("control and target must differ")
    if control.index >= n or target.index >= n:
        raise InvalidArgument(f"wires ({control.index},{target.index}) exceed register size {n}")
    dim = 2**n
    mat = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        dest = _flip(b, target.index, n) if _bit(b, control.index, n) else b
        mat[dest, b] = 1.0
    return mat


def condition_matches(condition: str, basis_index: int, register: Register) -> bool:
    """Wildcard match of a path condition string against one basis index."""
    paths = path_wires(register)
    for ch, wire in zip(condition, paths):
        if ch == "*":
            continue
        if int(ch) != _bit(basis_index, wire.index, len(register)):
            return False
    return True


def controlled_on_path(gate: np.ndarray, condition: str, register: Register) -> np.ndarray:
    """Apply a 2x2 gate to the polarization wire on path modes matching condition.

    ``condition`` has one character per path wire, in register order, from
    {'0','1','*'}. Amplitudes whose path bits do not match are untouched.
    """
    paths = path_wires(register)
    if len(condition) != len(paths):
        raise InvalidWiring(
            f"condition {condition!r} must address the {len(paths)} path wires only"
        )
    if any(ch not in "01*" for ch in condition):
        raise InvalidArgument(f"condition characters must be 0, 1 or *, got {condition!r}")
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (2, 2):
        raise InvalidArgument(f"expected a 2x2 gate, got {gate.shape}")

    n = len(register)
    pol = polarization_wire(register)
    dim = 2**n
    mat = np.eye(dim, dtype=complex)
    for b in range(dim):
        if _bit(b, pol.index, n) == 1:
            continue  # visit each (H, V) slot pair once, from its H member
        if not condition_matches(condition, b, register):
            continue
        bv = _flip(b, pol.index, n)
        mat[b, b] = gate[0, 0]
        mat[b, bv] = gate[0, 1]
        mat[bv, b] = gate[1, 0]
        mat[bv, bv] = gate[1, 1]
    return mat

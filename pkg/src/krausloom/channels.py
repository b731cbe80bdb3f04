"""Kraus-formalism engine: channel constructors, application, and extraction.

The four channel families map onto the interferometer lattices in
``circuit``; here they live as operator sets acting on a single qubit.
Kraus sets are compared by channel action, never by operator lists, since
the operator representation is basis dependent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidChannel
from .gates import PAULI_X, PAULI_Y, PAULI_Z
from .qmath import DensityMatrix, dagger, structural_atol


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0) or not math.isfinite(value):
        raise InvalidArgument(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class DephasingParams:
    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_prob("p", self.p))


@dataclass(frozen=True)
class GADParams:
    p: float
    alpha2_sq: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_prob("p", self.p))
        object.__setattr__(self, "alpha2_sq", _check_prob("alpha2_sq", self.alpha2_sq))


@dataclass(frozen=True)
class SGADParams:
    alpha: float
    beta: float
    mu: float
    nu: float
    phi: float
    lam: float
    alpha2_sq: float

    def __post_init__(self):
        for name in ("alpha", "beta", "mu", "nu", "alpha2_sq"):
            object.__setattr__(self, name, _check_prob(name, getattr(self, name)))
        for name in ("phi", "lam"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidArgument(f"{name} must be finite")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class PauliParams:
    p: float
    q1: float
    q2: float
    q3: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_prob("p", self.p))
        for name in ("q1", "q2", "q3"):
            object.__setattr__(self, name, _check_prob(name, getattr(self, name)))
        s = self.q1 + self.q2 + self.q3
        if abs(s - 1.0) > 1e-12:
            raise InvalidArgument(f"q1+q2+q3 must equal 1 within 1e-12, got {s!r}")


ChannelParams = DephasingParams | GADParams | SGADParams | PauliParams


def completeness_residual(operators) -> float:
    """Frobenius norm of sum(M^dagger M) - I."""
    ops = operators.operators if isinstance(operators, KrausSet) else operators
    ops = [np.asarray(m, dtype=complex) for m in ops]
    d = ops[0].shape[0]
    acc = np.zeros((d, d), dtype=complex)
    for m in ops:
        acc += dagger(m) @ m
    return float(np.linalg.norm(acc - np.eye(d)))


@dataclass(frozen=True)
class KrausSet:
    """Equal-shaped operators satisfying sum(M^dagger M) = I."""

    operators: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __init__(self, operators, labels=None):
        ops = tuple(np.asarray(m, dtype=complex) for m in operators)
        if not ops:
            raise InvalidChannel("a Kraus set must be nonempty")
        shape = ops[0].shape
        if any(m.shape != shape for m in ops) or shape[0] != shape[1]:
            raise InvalidChannel("Kraus operators must share one square shape")
        if labels is None:
            labels = tuple(f"M{k}" for k in range(len(ops)))
        labels = tuple(str(s) for s in labels)
        if len(labels) != len(ops):
            raise InvalidChannel("one label per operator required")
        res = completeness_residual(ops)
        if res > structural_atol():
            raise InvalidChannel(f"completeness residual {res:.3e} exceeds tolerance")
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)


def kraus_apply(rho, k: KrausSet):
    """Apply the channel: rho' = sum_mu M_mu rho M_mu^dagger.

    Accepts a DensityMatrix (returned as DensityMatrix) or a bare square
    array (returned bare; useful for operator-basis probes).
    """
    wrapped = isinstance(rho, DensityMatrix)
    mat = rho.matrix if wrapped else np.asarray(rho, dtype=complex)
    if mat.shape != (k.dim, k.dim):
        raise InvalidArgument(f"state dim {mat.shape} does not match Kraus dim {k.dim}")
    out = np.zeros_like(mat)
    for m in k.operators:
        out += m @ mat @ dagger(m)
    if wrapped:
        return DensityMatrix(out, rho.dims)
    return out


def dephasing_kraus(p: float) -> KrausSet:
    """Phase damping: coherences decay with probability p, populations fixed."""
    p = _check_prob("p", p)
    m0 = np.array([[1, 0], [0, math.sqrt(1 - p)]], dtype=complex)
    m1 = np.array([[0, 0], [0, math.sqrt(p)]], dtype=complex)
    return KrausSet((m0, m1), ("M0", "M1"))


def gad_kraus(p: float, alpha2_sq: float) -> KrausSet:
    """Amplitude damping against a thermal bath with ground population alpha2_sq.

    Four operators; the bath weights enter as sqrt prefactors so the raw list
    satisfies completeness on its own.
    """
    p = _check_prob("p", p)
    a2 = _check_prob("alpha2_sq", alpha2_sq)
    b2 = 1.0 - a2
    sa, sb = math.sqrt(a2), math.sqrt(b2)
    sp, sq = math.sqrt(p), math.sqrt(1 - p)
    m00 = sa * np.array([[1, 0], [0, sq]], dtype=complex)
    m01 = sa * np.array([[0, sp], [0, 0]], dtype=complex)
    m10 = sb * np.array([[0, 0], [sp, 0]], dtype=complex)
    m11 = sb * np.array([[sq, 0], [0, 1]], dtype=complex)
    return KrausSet((m00, m01, m10, m11), ("M00", "M01", "M10", "M11"))


def sgad_kraus(params: SGADParams) -> KrausSet:
    """Damping against a squeezed thermal bath.

    Each mode pair gets its own transition rate (alpha, beta, mu, nu) and the
    upward transitions carry phases e^{-i phi}, e^{-i lam}.
    """
    a, b, mu, nu = params.alpha, params.beta, params.mu, params.nu
    sa2 = math.sqrt(params.alpha2_sq)
    sb2 = math.sqrt(1.0 - params.alpha2_sq)
    eph = np.exp(-1j * params.phi)
    ela = np.exp(-1j * params.lam)
    m00 = sa2 * np.array([[math.sqrt(1 - a), 0], [0, math.sqrt(1 - b)]], dtype=complex)
    m01 = sa2 * np.array([[0, math.sqrt(b)], [math.sqrt(a) * eph, 0]], dtype=complex)
    m11 = sb2 * np.array([[math.sqrt(1 - mu), 0], [0, math.sqrt(1 - nu)]], dtype=complex)
    m10 = sb2 * np.array([[0, math.sqrt(nu)], [math.sqrt(mu) * ela, 0]], dtype=complex)
    return KrausSet((m00, m01, m11, m10), ("M00", "M01", "M11", "M10"))


def pauli_kraus(p: float, q1: float, q2: float, q3: float) -> KrausSet:
    """Probabilistic Pauli noise: (1-p) rho + p sum_i q_i sigma_i rho sigma_i."""
    params = PauliParams(p, q1, q2, q3)
    ops = (
        math.sqrt(1 - params.p) * np.eye(2, dtype=complex),
        math.sqrt(params.p * params.q1) * PAULI_X,
        math.sqrt(params.p * params.q2) * PAULI_Y,
        math.sqrt(params.p * params.q3) * PAULI_Z,
    )
    return KrausSet(ops, ("MI", "MX", "MY", "MZ"))


def channel_kraus(params: ChannelParams) -> KrausSet:
    """Dispatch a parameter record to its constructor."""
    if isinstance(params, DephasingParams):
        return dephasing_kraus(params.p)
    if isinstance(params, GADParams):
        return gad_kraus(params.p, params.alpha2_sq)
    if isinstance(params, SGADParams):
        return sgad_kraus(params)
    if isinstance(params, PauliParams):
        return pauli_kraus(params.p, params.q1, params.q2, params.q3)
    raise InvalidArgument(f"unknown channel parameter type {type(params).__name__}")


def kraus_from_unitary(u: np.ndarray, env_weights: tuple[float, float]) -> KrausSet:
    """Extract operators M_ij = sqrt(gamma_j) <i|U|j> from a joint system-bath map.

    ``u`` acts on system (x) environment, both qubits, environment the right
    (faster-varying) factor; i and j index environment output and input.
    Completeness only needs each environment-input column of ``u`` to be an
    isometry from the system into the joint space, which is weaker than
    unitarity; polarization-tagged lattice maps satisfy the former but not
    always the latter, so that is what gets checked.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise InvalidArgument(f"expected a 4x4 joint map, got {u.shape}")
    g0, g1 = float(env_weights[0]), float(env_weights[1])
    if g0 < 0 or g1 < 0 or abs(g0 + g1 - 1.0) > 1e-12:
        raise InvalidArgument(f"environment weights must be normalized, got ({g0}, {g1})")

    blocks = {}
    for i in (0, 1):
        for j in (0, 1):
            # <s' i|U|s j> laid out as a 2x2 system operator
            blocks[i, j] = np.array(
                [[u[2 * sp + i, 2 * s + j] for s in (0, 1)] for sp in (0, 1)], dtype=complex
            )
    for j in (0, 1):
        iso = dagger(blocks[0, j]) @ blocks[0, j] + dagger(blocks[1, j]) @ blocks[1, j]
        res = float(np.linalg.norm(iso - np.eye(2)))
        if res > structural_atol():
            raise InvalidChannel(
                f"environment-input column {j} is not an isometry (residual {res:.3e})"
            )
    ops, labels = [], []
    for i in (0, 1):
        for j in (0, 1):
            ops.append(math.sqrt((g0, g1)[j]) * blocks[i, j])
            labels.append(f"M{i}{j}")
    return KrausSet(tuple(ops), tuple(labels))


def bloch_vector(rho) -> tuple[float, float, float]:
    """(Tr rho sigma_x, Tr rho sigma_y, Tr rho sigma_z) for a qubit state."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (2, 2):
        raise InvalidArgument(f"bloch_vector needs a 2x2 state, got {mat.shape}")
    return (
        float(np.real(np.trace(mat @ PAULI_X))),
        float(np.real(np.trace(mat @ PAULI_Y))),
        float(np.real(np.trace(mat @ PAULI_Z))),
    )


def channel_action_distance(k1: KrausSet, k2: KrausSet) -> float:
    """Max entrywise deviation of the two channel actions over the basis |i><j|."""
    if k1.dim != k2.dim:
        raise InvalidArgument("channels act on different dimensions")
    d = k1.dim
    worst = 0.0
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            diff = kraus_apply(e, k1) - kraus_apply(e, k2)
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def kraus_set_to_payload(k: KrausSet) -> dict:
    return {
        "labels": list(k.labels),
        "operators": [{"re": m.real.tolist(), "im": m.imag.tolist()} for m in k.operators],
    }

"""Quantum-probabilistic ansatz: factored latent distribution plus circuit.

The latent side is a product of per-qubit Bernoulli distributions,
p_i = logistic(theta_i) for the |0> outcome, so two real parameters cover the
four computational basis states.  The circuit side is a layered two-qubit
unitary; each layer consumes eight angles in this fixed order:

    [RX q0, RY q0, RZ q0, RX q1, RY q1, RZ q1, CRX(0 -> 1), CRX(1 -> 0)]

Qubit 0 is the left (most significant) tensor factor.  All angle-zero gates
are the identity, so the all-zero parameter vector gives U = I.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

ANGLES_PER_LAYER = 8
N_QUBITS = 2

_I2 = np.eye(2, dtype=np.complex128)
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]],
                    dtype=np.complex128)


def crx(control: int, target: int, theta: float) -> np.ndarray:
    """Controlled RX on two qubits; identity when the control qubit is |0>.

    Filled directly: the RX block couples the two basis states whose control
    bit is 1 and whose target bits differ.
    """
    if {control, target} != {0, 1}:
        raise ConfigError("control/target must be qubits 0 and 1")
    c, s = np.cos(theta / 2.0), -1j * np.sin(theta / 2.0)
    u = np.eye(4, dtype=np.complex128)
    i, j = (2, 3) if control == 0 else (1, 3)
    u[i, i] = c
    u[j, j] = c
    u[i, j] = s
    u[j, i] = s
    return u


def _kron2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """2x2 (x) 2x2 tensor product, cheaper than np.kron for this hot path."""
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(4, 4)


@dataclass(frozen=True)
class LatentParams:
    """Unconstrained logits theta for the two per-qubit Bernoulli factors."""

    theta: tuple[float, float]

    def __post_init__(self):
        if len(self.theta) != N_QUBITS or not all(np.isfinite(v) for v in self.theta):
            raise ConfigError("theta must be two finite reals")


@dataclass(frozen=True)
class CircuitParams:
    """Flat angle vector phi (length 8 * layers) plus the layer count."""

    phi: tuple[float, ...]
    layers: int

    def __post_init__(self):
        if self.layers < 1:
            raise ConfigError("layers must be >= 1")
        if len(self.phi) != ANGLES_PER_LAYER * self.layers:
            raise ConfigError(
                f"phi has length {len(self.phi)}, expected "
                f"{ANGLES_PER_LAYER * self.layers} for {self.layers} layer(s)")
        if not all(np.isfinite(v) for v in self.phi):
            raise ConfigError("phi must be finite")


def _logistic(x: float) -> float:
    # stable in both tails
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


def qubit_probabilities(lp: LatentParams) -> np.ndarray:
    """Per-qubit probabilities of the |0> outcome."""
    return np.array([_logistic(t) for t in lp.theta])


def latent_probability(lp: LatentParams, bits: tuple[int, int]) -> float:
    """Probability of the basis state |b0 b1> under the product distribution."""
    p = qubit_probabilities(lp)
    out = 1.0
    for pi, bit in zip(p, bits):
        out *= pi if bit == 0 else 1.0 - pi
    return float(out)


def latent_distribution(lp: LatentParams) -> np.ndarray:
    """All four basis-state probabilities in basis order (00, 01, 10, 11)."""
    p = qubit_probabilities(lp)
    out = np.array([p[0] * p[1],
                    p[0] * (1 - p[1]),
                    (1 - p[0]) * p[1],
                    (1 - p[0]) * (1 - p[1])])
    return out


def enumerate_weighted_states(lp: LatentParams) -> list[tuple[tuple[int, int], float]]:
    """The exhaustive (basis state, probability) list; weights sum to 1."""
    dist = latent_distribution(lp)
    bits = [(0, 0), (0, 1), (1, 0), (1, 1)]
    return list(zip(bits, dist.tolist()))


def latent_entropy(lp: LatentParams) -> float:
    """Shannon entropy of the product distribution in nats.

    Computed per qubit through softplus identities, so saturated logits give
    exactly the 0*log 0 -> 0 limit instead of NaN.
    """
    total = 0.0
    for t in lp.theta:
        p = _logistic(t)
        # -p ln p - (1-p) ln(1-p) with ln p = -softplus(-t), ln(1-p) = -softplus(t)
        total += p * np.logaddexp(0.0, -t) + (1.0 - p) * np.logaddexp(0.0, t)
    return float(total)


def sample_basis_state(lp: LatentParams, rng: np.random.Generator) -> tuple[int, int]:
    """One draw from the latent distribution; the caller owns the rng stream."""
    p = qubit_probabilities(lp)
    u = rng.random(N_QUBITS)
    return (int(u[0] >= p[0]), int(u[1] >= p[1]))


def build_unitary(cp: CircuitParams) -> np.ndarray:
    """The full 4x4 circuit unitary, layers applied left to right in time."""
    u = np.eye(4, dtype=np.complex128)
    phi = cp.phi
    for layer in range(cp.layers):
        a = phi[ANGLES_PER_LAYER * layer: ANGLES_PER_LAYER * (layer + 1)]
        single0 = rz(a[2]) @ ry(a[1]) @ rx(a[0])
        single1 = rz(a[5]) @ ry(a[4]) @ rx(a[3])
        u = _kron2(single0, single1) @ u
        u = crx(0, 1, a[6]) @ u
        u = crx(1, 0, a[7]) @ u
    return u


def prepare_state(bits: tuple[int, int], cp: CircuitParams) -> np.ndarray:
    """U(phi) applied to the basis state |b0 b1>."""
    index = 2 * bits[0] + bits[1]
    vec = np.zeros(4, dtype=np.complex128)
    vec[index] = 1.0
    return build_unitary(cp) @ vec


def mixed_state(lp: LatentParams) -> np.ndarray:
    """The diagonal latent density matrix sum_b p(b) |b><b|."""
    return np.diag(latent_distribution(lp)).astype(np.complex128)


def transformed_state(lp: LatentParams, cp: CircuitParams) -> np.ndarray:
    """U rho_theta U^dagger -- the mixed state the ansatz actually prepares."""
    u = build_unitary(cp)
    return u @ mixed_state(lp) @ u.conj().T


def basis_rotation(axes: tuple[str, str]) -> np.ndarray:
    """Pre-measurement rotation taking the chosen Pauli pair to the ZZ basis.

    Per qubit: Z -> identity, X -> Hadamard, Y -> RX(-pi/2).  The RX(-pi/2)
    choice maps Y to -Z, so single-qubit Y readouts come back sign-flipped;
    the flips cancel in the two-qubit YY products this package measures.
    """
    per_axis = {"Z": _I2, "X": _H, "Y": rx(-np.pi / 2.0)}
    try:
        g0, g1 = per_axis[axes[0]], per_axis[axes[1]]
    except KeyError as exc:
        raise ConfigError(f"unknown measurement axis in {axes}") from exc
    return np.kron(g0, g1)

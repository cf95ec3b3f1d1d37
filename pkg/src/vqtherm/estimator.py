"""Expectation-value estimation for the dimer Hamiltonian under the ansatz.

Three modes:

* exact  -- enumerate the four basis states and contract with the Hamiltonian;
            deterministic, zero standard error.
* shots  -- per Pauli term, rotate into the ZZ basis, draw categorical
            measurement outcomes from the state populations, average the +-1
            eigenvalue products.
* noisy  -- same sampling, but the state is propagated as a density matrix
            with a depolarizing channel after every gate and readout bit
            flips before counting.

Each term holds its own random substream derived from (seed, term index,
evaluation index), so results do not depend on evaluation order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import ansatz, model
from .errors import ConfigError

_EIG_ZZ = np.array([1.0, -1.0, -1.0, 1.0])  # ZZ eigenvalues in basis order


@lru_cache(maxsize=64)
def _cached_hamiltonian(j_over_kb: float) -> np.ndarray:
    h = model.build_hamiltonian(model.DimerModel(j_over_kb))
    h.setflags(write=False)
    return h


@dataclass(frozen=True)
class ShotConfig:
    """Shots per Pauli-term circuit and the master seed."""

    shots_per_term: int = 8192
    seed: int = 0

    def __post_init__(self):
        if self.shots_per_term < 1:
            raise ConfigError("shots_per_term must be >= 1")


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing-plus-readout emulation of a noisy backend.

    Defaults are this artifact's own emulation values, not calibrated against
    any specific device.
    """

    p_depol_1q: float = 2e-4
    p_depol_2q: float = 7e-3
    p_readout_flip: float = 1e-2

    def __post_init__(self):
        for name in ("p_depol_1q", "p_depol_2q", "p_readout_flip"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class ExpectationEstimate:
    """<H> in Kelvin with its standard error and the producing mode."""

    value: float
    std_error: float
    mode: str  # exact | shots | noisy


def _partial_trace(rho: np.ndarray, qubit: int) -> np.ndarray:
    """Trace out the given qubit of a two-qubit density matrix."""
    r = rho.reshape(2, 2, 2, 2)  # (q0, q1, q0', q1')
    if qubit == 0:
        return np.einsum("ijik->jk", r)
    return np.einsum("jiki->jk", r)


def apply_depolarizing(rho_or_state: np.ndarray, p: float, locus) -> np.ndarray:
    """Depolarizing channel on one qubit (locus 0 or 1) or on both ("both").

    Accepts a state vector or a density matrix; always returns a density
    matrix.  Trace preserving and positivity preserving for p in [0, 1].
    """
    if not (0.0 <= p <= 1.0):
        raise ConfigError(f"depolarizing probability must be in [0, 1], got {p}")
    a = np.asarray(rho_or_state, dtype=np.complex128)
    rho = np.outer(a, a.conj()) if a.ndim == 1 else a
    if p == 0.0:
        return rho
    if locus == "both":
        mixed = np.eye(4, dtype=np.complex128) * (np.trace(rho) / 4.0)
    elif locus == 0:
        mixed = np.kron(np.eye(2, dtype=np.complex128) / 2.0, _partial_trace(rho, 0))
    elif locus == 1:
        mixed = np.kron(_partial_trace(rho, 1), np.eye(2, dtype=np.complex128) / 2.0)
    else:
        raise ConfigError(f"locus must be 0, 1 or 'both', got {locus!r}")
    return (1.0 - p) * rho + p * mixed


def _apply_gate(rho: np.ndarray, gate: np.ndarray) -> np.ndarray:
    return gate @ rho @ gate.conj().T


def _noisy_circuit(rho: np.ndarray, cp: ansatz.CircuitParams, nm: NoiseModel) -> np.ndarray:
    """Run the ansatz circuit on a density matrix, depolarizing after each gate."""
    i2 = np.eye(2, dtype=np.complex128)
    for layer in range(cp.layers):
        a = cp.phi[ansatz.ANGLES_PER_LAYER * layer: ansatz.ANGLES_PER_LAYER * (layer + 1)]
        for qubit, angles in ((0, a[0:3]), (1, a[3:6])):
            for rot, angle in zip((ansatz.rx, ansatz.ry, ansatz.rz), angles):
                g = rot(angle)
                full = np.kron(g, i2) if qubit == 0 else np.kron(i2, g)
                rho = _apply_gate(rho, full)
                rho = apply_depolarizing(rho, nm.p_depol_1q, qubit)
        rho = _apply_gate(rho, ansatz.crx(0, 1, a[6]))
        rho = apply_depolarizing(rho, nm.p_depol_2q, "both")
        rho = _apply_gate(rho, ansatz.crx(1, 0, a[7]))
        rho = apply_depolarizing(rho, nm.p_depol_2q, "both")
    return rho


def _noisy_basis_rotation(rho: np.ndarray, axes: tuple[str, str],
                          nm: NoiseModel) -> np.ndarray:
    """Apply the measurement-basis rotation with per-gate depolarizing noise."""
    rho = _apply_gate(rho, ansatz.basis_rotation(axes))
    for qubit, axis in enumerate(axes):
        if axis != "Z":  # Z needs no physical gate
            rho = apply_depolarizing(rho, nm.p_depol_1q, qubit)
    return rho


def _readout_flip_matrix(p: float) -> np.ndarray:
    """Outcome-probability map for independent per-bit readout flips."""
    f = np.array([[1.0 - p, p], [p, 1.0 - p]])
    return np.kron(f, f)


def exact_expectation(lp: ansatz.LatentParams, cp: ansatz.CircuitParams,
                      m: model.DimerModel) -> ExpectationEstimate:
    """sum_b p(b) <b| U^dag H U |b> over all four basis states."""
    h = _cached_hamiltonian(m.j_over_kb)
    u = ansatz.build_unitary(cp)
    energies = np.einsum("ji,jk,ki->i", u.conj(), h, u).real
    value = float(ansatz.latent_distribution(lp) @ energies)
    return ExpectationEstimate(value=value, std_error=0.0, mode="exact")


def shot_expectation(lp: ansatz.LatentParams, cp: ansatz.CircuitParams,
                     m: model.DimerModel, sc: ShotConfig,
                     nm: NoiseModel | None = None,
                     evaluation: int = 0) -> ExpectationEstimate:
    """Shot-based <H>: one measured circuit per Pauli term.

    Outcomes are categorical draws from the populations of the (optionally
    noisy) rotated mixed state; readout flips are folded into those
    populations before drawing.  Standard errors of the three term means are
    propagated in quadrature.  Deterministic for a fixed (seed, evaluation).
    """
    shots = sc.shots_per_term
    value = 0.0
    variance = 0.0
    for k, term in enumerate(model.pauli_decomposition(m)):
        rng = np.random.default_rng(np.random.SeedSequence((sc.seed, k, evaluation)))
        if nm is None:
            rho = ansatz.transformed_state(lp, cp)
            rho = _apply_gate(rho, ansatz.basis_rotation(term.axes))
        else:
            rho = _noisy_circuit(ansatz.mixed_state(lp), cp, nm)
            rho = _noisy_basis_rotation(rho, term.axes, nm)
        probs = np.clip(np.real(np.diag(rho)), 0.0, None)
        if nm is not None:
            probs = _readout_flip_matrix(nm.p_readout_flip) @ probs
        probs = probs / probs.sum()
        counts = rng.multinomial(shots, probs)
        mean = float(counts @ _EIG_ZZ) / shots
        # outcomes are +-1, so the sample variance is (1 - mean^2) * n/(n-1)
        var = (1.0 - mean * mean) * shots / (shots - 1) if shots > 1 else 0.0
        value += term.coefficient * mean
        variance += term.coefficient ** 2 * var / shots
    return ExpectationEstimate(value=value, std_error=float(np.sqrt(variance)),
                               mode="shots" if nm is None else "noisy")

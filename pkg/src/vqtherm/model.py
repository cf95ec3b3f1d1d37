"""Physics of the spin-1/2 dimer: Hamiltonian, exact Gibbs state, closed-form
thermodynamics.

Reduced units throughout: k_B = 1, so the coupling J and the temperature T are
both in Kelvin, entropies are in nats, and specific heat is in units of k_B
per dimer.  SI/CGS conversion happens only in :func:`chi_molar` via a
:class:`PhysicalConstants` record.

Sign convention (pinned by the trace oracle tr(e^{-H/T}) in the tests): for
J > 0 the ground state is the singlet at energy -3J/4, with the threefold
triplet at +J/4, so

    Z(T)         = e^{+3J/(4T)} + 3 e^{-J/(4T)}
    chi_reduced  = 1 / (3 + e^{J/T})          (triplet population)
    U(T)         = 3 J (chi_reduced - 1/4)    (= tr(H rho), per dimer)
    c(T)         = 3 (J/T)^2 e^{J/T} chi_reduced^2   (= dU/dT = T dS/dT)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .errors import ConfigError, DomainError

LN3 = np.log(3.0)

# Heisenberg dimer eigenvectors on the local basis {|00>, |01>, |10>, |11>}.
TRIPLET_UP = qcore.basis_state(0)
TRIPLET_SYM = np.array([0, 1, 1, 0], dtype=np.complex128) / np.sqrt(2.0)
TRIPLET_DOWN = qcore.basis_state(3)
SINGLET = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2.0)

_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@dataclass(frozen=True)
class DimerModel:
    """Isotropic exchange coupling J (Kelvin, k_B = 1) and Lande g-factor."""

    j_over_kb: float
    g_factor: float = 2.0

    def __post_init__(self):
        if not np.isfinite(self.j_over_kb):
            raise ConfigError("j_over_kb must be finite")
        if not (self.g_factor > 0):
            raise ConfigError("g_factor must be positive")


@dataclass(frozen=True)
class PauliTerm:
    """One tensor-product term: coefficient (Kelvin) times axes[0] x axes[1]."""

    coefficient: float
    axes: tuple[str, str]

    def matrix(self) -> np.ndarray:
        return self.coefficient * np.kron(_PAULI[self.axes[0]], _PAULI[self.axes[1]])


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants in a chosen unit system (see :meth:`si` / :meth:`cgs`)."""

    n_avogadro: float
    mu_bohr: float
    k_boltzmann: float

    @classmethod
    def si(cls) -> "PhysicalConstants":
        return cls(n_avogadro=6.02214076e23, mu_bohr=9.2740100783e-24,
                   k_boltzmann=1.380649e-23)

    @classmethod
    def cgs(cls) -> "PhysicalConstants":
        # erg/G and erg/K; chi_molar then comes out in emu/mol.
        return cls(n_avogadro=6.02214076e23, mu_bohr=9.2740100783e-21,
                   k_boltzmann=1.380649e-16)


def _check_temperature(t: float) -> float:
    if not (t > 0) or not np.isfinite(t):
        raise DomainError(f"temperature must be positive and finite, got {t}")
    return float(t)


def build_hamiltonian(m: DimerModel) -> np.ndarray:
    """Exchange Hamiltonian J S_A . S_B on the local basis, entries in Kelvin."""
    block = np.array([[1, 0, 0, 0],
                      [0, -1, 2, 0],
                      [0, 2, -1, 0],
                      [0, 0, 0, 1]], dtype=np.complex128)
    return (m.j_over_kb / 4.0) * block


def pauli_decomposition(m: DimerModel) -> list[PauliTerm]:
    """The three-term tensor decomposition (J/4)(XX + YY + ZZ).

    Summing the term matrices reproduces build_hamiltonian exactly.
    """
    c = m.j_over_kb / 4.0
    return [PauliTerm(c, ("X", "X")), PauliTerm(c, ("Y", "Y")), PauliTerm(c, ("Z", "Z"))]


def log_partition_function(m: DimerModel, t: float) -> float:
    """ln Z, overflow-safe for any J/T."""
    x = m.j_over_kb / _check_temperature(t)
    return float(np.logaddexp(0.75 * x, LN3 - 0.25 * x))


def partition_function(m: DimerModel, t: float) -> float:
    """Z(T) = e^{3J/(4T)} + 3 e^{-J/(4T)}; may overflow to inf for extreme J/T."""
    x = m.j_over_kb / _check_temperature(t)
    with np.errstate(over="ignore"):
        return float(np.exp(0.75 * x) + 3.0 * np.exp(-0.25 * x))


def chi_reduced(m: DimerModel, t: float) -> float:
    """Reduced susceptibility k_B T chi / (2 N_A g^2 mu_B^2) = 1/(3 + e^{J/T}).

    Dimensionless, equal to each triplet population of the Gibbs state;
    lies in (0, 1/3) for finite J/T.
    """
    x = m.j_over_kb / _check_temperature(t)
    return float(np.exp(-np.logaddexp(LN3, x)))


def chi_molar(m: DimerModel, t: float, constants: PhysicalConstants) -> float:
    """Molar susceptibility 2 N_A g^2 mu_B^2 chi_reduced / (k_B T).

    Units follow the constants record: emu/mol for cgs(), the SI analogue
    for si().
    """
    _check_temperature(t)
    pref = 2.0 * constants.n_avogadro * (m.g_factor * constants.mu_bohr) ** 2 \
        / (constants.k_boltzmann * t)
    return pref * chi_reduced(m, t)


def gibbs_populations(m: DimerModel, t: float) -> tuple[float, float]:
    """(triplet population, singlet population); 3*p_t + p_s == 1."""
    p_t = chi_reduced(m, t)
    return p_t, 1.0 - 3.0 * p_t


def gibbs_state(m: DimerModel, t: float) -> np.ndarray:
    """Exact thermal density matrix e^{-H/T}/Z, assembled spectrally.

    X-shaped on the local basis: diagonal (p_t, (p_t+p_s)/2, (p_t+p_s)/2, p_t)
    with anti-diagonal block entries (p_t - p_s)/2.
    """
    p_t, p_s = gibbs_populations(m, t)
    rho = p_t * (np.outer(TRIPLET_UP, TRIPLET_UP.conj())
                 + np.outer(TRIPLET_DOWN, TRIPLET_DOWN.conj())
                 + np.outer(TRIPLET_SYM, TRIPLET_SYM.conj()))
    rho += p_s * np.outer(SINGLET, SINGLET.conj())
    return rho


def magnetic_entropy(m: DimerModel, t: float) -> float:
    """Gibbs entropy -sum p ln p in nats; identical to the von Neumann entropy
    of gibbs_state."""
    p_t, p_s = gibbs_populations(m, t)
    probs = np.array([p_t, p_t, p_t, p_s])
    mask = probs > 0
    return float(-np.sum(probs[mask] * np.log(probs[mask])))


def internal_energy(m: DimerModel, t: float) -> float:
    """Mean energy tr(H rho) = 3 J (chi_reduced - 1/4), Kelvin per dimer."""
    return 3.0 * m.j_over_kb * (chi_reduced(m, t) - 0.25)


def specific_heat(m: DimerModel, t: float) -> float:
    """Magnetic specific heat per dimer in units of k_B.

    Closed form 3 (J/T)^2 e^{J/T} chi_reduced^2, which equals both dU/dT and
    T dS/dT; evaluated in log space so extreme J/T neither overflows nor
    loses the Schottky peak.
    """
    x = m.j_over_kb / _check_temperature(t)
    if x == 0.0:
        return 0.0
    # e^x / (3 + e^x)^2 = exp(x - 2*logaddexp(ln3, x))
    return float(3.0 * x * x * np.exp(x - 2.0 * np.logaddexp(LN3, x)))

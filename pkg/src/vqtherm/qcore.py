"""Dense complex linear algebra for small (dimension-4) quantum systems.

States and operators are plain numpy arrays on the local two-qubit basis
{|00>, |01>, |10>, |11>}, with qubit 0 the left (most significant) tensor
factor:

* state vector  -- shape (4,)  complex, unit norm
* density matrix -- shape (4, 4) complex, Hermitian, PSD, trace 1
* operator       -- shape (4, 4) complex Hermitian (energies in Kelvin, k_B = 1)

All routines are written for general n x n Hermitian matrices; only n = 4 is
exercised elsewhere in the package.  The eigensolver is a self-contained
cyclic Jacobi iteration, so the package core has no dependency on an external
eigenvalue backend; tests cross-check it against independent solvers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, InvalidStateError, NumericConsistencyError

DIM = 4
BASIS_LABELS = ("00", "01", "10", "11")


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances used by the validation and spectral routines.

    hermiticity_tol : max |A - A^dagger| entry allowed before rejection
    trace_tol       : max |tr(rho) - 1| for density matrices
    psd_tol         : eigenvalues below -psd_tol mark an invalid state
    eig_tol         : residual allowed in eigen-reconstruction checks
    imag_tol        : imaginary residue allowed in nominally real scalars
    """

    hermiticity_tol: float = 1e-12
    trace_tol: float = 1e-12
    psd_tol: float = 1e-10
    eig_tol: float = 1e-9
    imag_tol: float = 1e-10
    jacobi_max_sweeps: int = 64


DEFAULT_POLICY = NumericPolicy()


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition: ascending eigenvalues, orthonormal column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column i pairs with eigenvalues[i]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def basis_state(index: int, dim: int = DIM) -> np.ndarray:
    """Computational basis vector |index> as a complex array."""
    vec = np.zeros(dim, dtype=np.complex128)
    vec[index] = 1.0
    return vec


def require_hermitian(op, tol: float = DEFAULT_POLICY.hermiticity_tol,
                      what: str = "operator") -> np.ndarray:
    """Return op as a complex array, raising if it is not square Hermitian."""
    a = np.asarray(op, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolationError(f"{what} must be a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ContractViolationError(f"{what} contains non-finite entries")
    dev = np.max(np.abs(a - a.conj().T))
    if dev > tol:
        raise ContractViolationError(
            f"{what} is not Hermitian: max |A - A^dagger| = {dev:.3e} > {tol:.1e}")
    return a


def validate_density_matrix(rho, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return the validated array."""
    a = require_hermitian(rho, policy.hermiticity_tol, what="density matrix")
    tr = np.trace(a)
    if abs(tr - 1.0) > max(policy.trace_tol, 1e-9):
        raise InvalidStateError(f"density matrix trace is {tr:.12g}, expected 1")
    w = hermitian_eig(a, policy).eigenvalues
    if w.min() < -policy.psd_tol:
        raise InvalidStateError(f"density matrix has negative eigenvalue {w.min():.3e}")
    return a


def hermitian_eig(op, policy: NumericPolicy = DEFAULT_POLICY) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation annihilates one off-diagonal pair; sweeps repeat until the
    off-diagonal Frobenius norm is negligible.  Convergence is unconditional
    for Hermitian input.  Returns ascending eigenvalues with matching
    orthonormal eigenvectors as columns.
    """
    a = require_hermitian(op, policy.hermiticity_tol)
    n = a.shape[0]
    A = a.copy()
    V = np.eye(n, dtype=np.complex128)
    scale = max(float(np.max(np.abs(A))), 1.0)
    for _ in range(policy.jacobi_max_sweeps):
        off = np.sqrt(np.sum(np.abs(A - np.diag(np.diag(A))) ** 2))
        if off <= 1e-15 * n * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-18 * scale:
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                phase = apq / abs(apq)
                tau = (aqq - app) / (2.0 * abs(apq))
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # local unitary: absorb the off-diagonal phase, then rotate
                half = np.sqrt(phase)
                u = np.array([[half * c, half * s],
                              [-np.conj(half) * s, np.conj(half) * c]],
                             dtype=np.complex128)
                cols = [p, q]
                A[:, cols] = A[:, cols] @ u
                A[cols, :] = u.conj().T @ A[cols, :]
                V[:, cols] = V[:, cols] @ u
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    w = np.diag(A).real.copy()
    order = np.argsort(w, kind="stable")
    return EigenSystem(eigenvalues=w[order], eigenvectors=V[:, order])


def matrix_exp_hermitian(op, scale: float, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """exp(scale * op) for Hermitian op, via the Jacobi eigendecomposition.

    The result is re-Hermitized to kill rounding asymmetry; it is positive
    definite by construction.
    """
    if not np.isfinite(scale):
        raise ContractViolationError("scale must be finite")
    es = hermitian_eig(op, policy)
    v = es.eigenvectors
    out = (v * np.exp(scale * es.eigenvalues)) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def _xlogx(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = p[mask] * np.log(p[mask])
    return out


def von_neumann_entropy(rho, policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """Entropy -sum(lambda ln lambda) in nats, with 0 ln 0 := 0.

    Raises InvalidStateError if an eigenvalue is below -psd_tol.
    """
    a = require_hermitian(rho, policy.hermiticity_tol, what="density matrix")
    w = hermitian_eig(a, policy).eigenvalues
    if w.min() < -policy.psd_tol:
        raise InvalidStateError(f"state has negative eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    return float(-np.sum(_xlogx(w)))


def fidelity(a, b, policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(a) b sqrt(a)), amplitude convention.

    Equals |<psi|phi>| for pure states and 1 iff a == b.  Result clamped to
    [0, 1] against rounding overshoot.
    """
    ra = require_hermitian(a, policy.hermiticity_tol, what="density matrix")
    rb = require_hermitian(b, policy.hermiticity_tol, what="density matrix")
    ea = hermitian_eig(ra, policy)
    sqrt_a = (ea.eigenvectors * np.sqrt(np.clip(ea.eigenvalues, 0.0, None))) @ \
        ea.eigenvectors.conj().T
    m = sqrt_a @ rb @ sqrt_a
    w = hermitian_eig(0.5 * (m + m.conj().T), policy).eigenvalues
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))))
    return min(max(f, 0.0), 1.0)


def expectation(op, rho, policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """tr(rho op) as a real number (Kelvin for the dimer Hamiltonian).

    The imaginary residue must stay below imag_tol; it is then discarded.
    """
    o = np.asarray(op, dtype=np.complex128)
    r = np.asarray(rho, dtype=np.complex128)
    if o.shape != r.shape:
        raise ContractViolationError(f"shape mismatch: {o.shape} vs {r.shape}")
    val = complex(np.trace(r @ o))
    scale = max(1.0, abs(val))
    if abs(val.imag) > policy.imag_tol * scale:
        raise NumericConsistencyError(
            f"expectation value has imaginary residue {val.imag:.3e}")
    return val.real

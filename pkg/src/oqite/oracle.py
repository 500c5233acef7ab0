"""Dense exact reference solver for the Lindblad equation.

Everything here works on explicit matrices and is the in-repo oracle the
iterative algorithms are judged against.  The matrix exponential is a
self-contained scaling-and-squaring routine with a degree-16 Taylor
kernel (accuracy ~1e-10 for scaled norms <= 1), so the solver has no
dependencies beyond numpy.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .models import LindbladModel
from .states import DensityMatrix

MAX_DENSE_DIM = 256  # superoperator side 4^n; dense path stops at n = 4
MAX_QUBITS = 6  # hard refusal above this

_TAYLOR_ORDER = 16


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring over a Taylor kernel."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expm needs a square matrix")
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(math.ceil(math.log2(norm)))) if norm > 1.0 else 0
    scaled = a / (2.0**squarings)
    # Horner evaluation of sum_{k<=16} scaled^k / k!
    eye = np.eye(a.shape[0], dtype=np.complex128)
    result = eye + scaled / _TAYLOR_ORDER
    for k in range(_TAYLOR_ORDER - 1, 0, -1):
        result = eye + (scaled @ result) / k
    for _ in range(squarings):
        result = result @ result
    return result


def _dense_ops(m: LindbladModel):
    h = m.hamiltonian.to_matrix()
    jumps = [j.to_matrix() for j in m.jumps]
    return h, jumps


def superoperator(m: LindbladModel) -> np.ndarray:
    """Dense 4^n x 4^n generator in the column-stacking convention."""
    if m.n_qubits > 4:
        raise ValueError("dense superoperator limited to 4 qubits (dim 256)")
    h, jumps = _dense_ops(m)
    dim = h.shape[0]
    eye = np.eye(dim, dtype=np.complex128)
    gen = -1j * np.kron(eye, h) + 1j * np.kron(h.T, eye)
    for l in jumps:
        ldl = l.conj().T @ l
        gen += np.kron(l.conj(), l)
        gen -= 0.5 * np.kron(eye, ldl)
        gen -= 0.5 * np.kron(ldl.T, eye)
    return gen


def _lindblad_rhs(h, jumps, rho):
    out = -1j * (h @ rho - rho @ h)
    for l in jumps:
        ldl = l.conj().T @ l
        out += l @ rho @ l.conj().T - 0.5 * (ldl @ rho + rho @ ldl)
    return out


def default_rk4_steps(m: LindbladModel, t: float) -> int:
    """Step count from a cheap upper bound on the generator 1-norm."""
    h, jumps = _dense_ops(m)
    bound = 2.0 * np.linalg.norm(h, 1)
    for l in jumps:
        ldl = l.conj().T @ l
        bound += np.linalg.norm(l, 1) ** 2 + 2.0 * np.linalg.norm(ldl, 1)
    return max(1000, int(math.ceil(100.0 * t * bound)))


def evolve_exact(
    m: LindbladModel, rho0: DensityMatrix, t: float, steps: int | None = None
) -> DensityMatrix:
    """rho(t) from the dense generator.

    Up to 4 qubits: exp(G t) applied to vec(rho0).  For 5-6 qubits: fixed
    step RK4 on the density matrix (the 4^n superoperator is never built);
    ``steps`` overrides the default count there.  Output is re-Hermitized.
    """
    if m.n_qubits != rho0.n_qubits:
        raise ValueError("model and state register mismatch")
    if m.n_qubits > MAX_QUBITS:
        raise ValueError(f"refusing n > {MAX_QUBITS} (dimension overflow)")
    if t < 0:
        raise ValueError("t must be >= 0")
    if m.n_qubits <= 4:
        gen = superoperator(m)
        v = rho0.entries.reshape(-1, order="F")
        out = expm(gen * t) @ v
        dim = 1 << m.n_qubits
        rho = out.reshape((dim, dim), order="F")
    else:
        h, jumps = _dense_ops(m)
        n_steps = steps if steps is not None else default_rk4_steps(m, t)
        if n_steps < 1:
            raise ValueError("steps must be >= 1")
        dt = t / n_steps
        rho = rho0.entries.copy()
        for _ in range(n_steps):
            k1 = _lindblad_rhs(h, jumps, rho)
            k2 = _lindblad_rhs(h, jumps, rho + 0.5 * dt * k1)
            k3 = _lindblad_rhs(h, jumps, rho + 0.5 * dt * k2)
            k4 = _lindblad_rhs(h, jumps, rho + dt * k3)
            rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(m.n_qubits, rho)


def steady_state(m: LindbladModel, tol: float = 1e-9) -> DensityMatrix:
    """Null vector of the dense generator, Hermitized and trace-normalized.

    A nullspace of dimension > 1 (e.g. gamma = 0) triggers a UserWarning
    and returns the first null vector.
    """
    gen = superoperator(m)
    _, s, vh = np.linalg.svd(gen)
    cutoff = max(tol, 1e-12 * s[0]) if s.size else tol
    null_count = int(np.sum(s < cutoff))
    v = vh[-1].conj()
    if null_count > 1:
        warnings.warn(
            f"steady state not unique: nullspace dimension {null_count}",
            UserWarning,
            stacklevel=2,
        )
    dim = 1 << m.n_qubits
    rho = v.reshape((dim, dim), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho)
    if abs(tr) > 1e-8:
        rho = rho / tr
    residual = np.linalg.norm(gen @ rho.reshape(-1, order="F"))
    if null_count == 1 and residual > tol * max(1.0, float(np.linalg.norm(rho))):
        raise RuntimeError(f"steady-state residual {residual:.2e} above {tol:.0e}")
    return DensityMatrix(m.n_qubits, rho)


def dense_apply(op, vector: np.ndarray) -> np.ndarray:
    """Apply a Pauli sum through its dense matrix (test-oracle path)."""
    mat = op.to_matrix()
    if mat.shape[0] > MAX_DENSE_DIM:
        raise ValueError("dense path limited to dimension 256")
    return mat @ np.asarray(vector, dtype=np.complex128)


def dense_expm_apply(op, tau: float, vector: np.ndarray) -> np.ndarray:
    """exp(tau * op) applied densely; op is a Pauli sum, tau may be complex."""
    mat = op.to_matrix()
    if mat.shape[0] > MAX_DENSE_DIM:
        raise ValueError("dense path limited to dimension 256")
    return expm(tau * mat) @ np.asarray(vector, dtype=np.complex128)

"""Dense complex linear algebra for few-qubit Hilbert and Liouville spaces.

Everything here operates on plain ``numpy`` arrays of ``complex128``.
Dimensions stay small (Hilbert dim <= 32, Liouville dim <= 1024), so
robustness and exactness win over asymptotic speed.
"""
from __future__ import annotations

import numpy as np

from .errors import NotHermitianError, NotPositiveError

HERMITIAN_TOL = 1e-10

# Pade approximant coefficients for exp(A), orders 3/5/7/9/13, and the
# 1-norm thresholds below which each order delivers double precision
# (Higham's scaling-and-squaring analysis).
_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}
_PADE_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068,
    13: 5.371920351148152,
}


def as_complex(m) -> np.ndarray:
    return np.asarray(m, dtype=complex)


def kron(a, b) -> np.ndarray:
    """Kronecker (tensor) product of two matrices."""
    return np.kron(as_complex(a), as_complex(b))


def kron_all(*ops) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    out = as_complex(ops[0])
    for op in ops[1:]:
        out = np.kron(out, as_complex(op))
    return out


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return np.max(np.abs(m - m.conj().T)) <= tol


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues real and
    ascending and eigenvectors as columns, so ``m = V diag(w) V^dag``.

    Raises:
        NotHermitianError: if the symmetry residual exceeds 1e-10.
    """
    m = as_complex(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m):
        raise NotHermitianError(
            f"symmetry residual {np.max(np.abs(m - m.conj().T)):.3e} exceeds {HERMITIAN_TOL:g}"
        )
    w, v = np.linalg.eigh(m)
    return w, v


def _pade_step(a: np.ndarray, order: int) -> np.ndarray:
    b = _PADE_COEFFS[order]
    n = a.shape[0]
    ident = np.eye(n, dtype=complex)
    a2 = a @ a
    if order == 13:
        a4 = a2 @ a2
        a6 = a4 @ a2
        u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
                 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
        v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
             + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    else:
        powers = [ident, a2]
        while 2 * len(powers) - 1 < order:
            powers.append(powers[-1] @ a2)
        u_poly = b[1] * ident
        v_poly = b[0] * ident
        for i, p in enumerate(powers[1:], start=1):
            u_poly = u_poly + b[2 * i + 1] * p
            v_poly = v_poly + b[2 * i] * p
        u = a @ u_poly
        v = v_poly
    return np.linalg.solve(v - u, v + u)


def matrix_exp(m) -> np.ndarray:
    """Matrix exponential via Pade scaling-and-squaring.

    Order 3/5/7/9/13 approximants selected by the 1-norm of the input;
    larger inputs are scaled by a power of two and squared back.
    """
    a = as_complex(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    norm = np.linalg.norm(a, 1)
    if not np.isfinite(norm):
        raise ValueError("matrix norm is not finite")
    for order in (3, 5, 7, 9):
        if norm <= _PADE_THETA[order]:
            return _pade_step(a, order)
    squarings = max(0, int(np.ceil(np.log2(norm / _PADE_THETA[13]))))
    out = _pade_step(a / (2.0 ** squarings), 13)
    for _ in range(squarings):
        out = out @ out
    return out


def hermitian_sqrt(m, neg_tol: float = 1e-6) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-neg_tol, 0)`` are treated as integrator round-off
    and clamped to zero.

    Raises:
        NotPositiveError: if an eigenvalue lies below ``-neg_tol``.
    """
    w, v = hermitian_eig(m)
    if w[0] < -neg_tol:
        raise NotPositiveError(f"eigenvalue {w[0]:.3e} below -{neg_tol:g}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def normalize_state(vec) -> np.ndarray:
    """Return the unit-norm copy of a state vector."""
    v = np.asarray(vec, dtype=complex).ravel()
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise ValueError("cannot normalize a (near-)zero vector")
    return v / n

"""Dense complex linear algebra primitives for small quantum systems.

Everything operates on plain ``numpy`` arrays with complex128 entries. The
target systems are small (dimension at most 64), so all factorizations are
dense LAPACK calls; there is no sparse or iterative path.

Two tolerance regimes are used throughout the package:

* ``DEFAULT_TOL`` (1e-9) for structural predicates (unitarity, diagonality,
  positive semidefiniteness),
* ``EXACT_TOL`` (1e-12) for identities that hold in exact arithmetic.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-9
EXACT_TOL = 1e-12

#: Largest supported system dimension. Dense operations stay cheap below this.
MAX_DIM = 64

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def as_cmatrix(m) -> np.ndarray:
    """Coerce ``m`` to a 2-D complex array and require finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(m)).T


def hs_inner(s, t) -> complex:
    """Hilbert-Schmidt product ``Tr(s t*)``, conjugate-linear in ``t``.

    Both arguments must have the same shape.
    """
    s = as_cmatrix(s)
    t = as_cmatrix(t)
    if s.shape != t.shape:
        raise ValueError(f"shape mismatch: {s.shape} vs {t.shape}")
    return complex(np.trace(s @ dagger(t)))


def singular_values(m) -> np.ndarray:
    """Singular values of ``m`` in descending order."""
    return np.linalg.svd(as_cmatrix(m), compute_uv=False)


def trace_norm(m) -> float:
    """Trace norm: the sum of singular values."""
    return float(np.sum(singular_values(m)))


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    """Entrywise check ``max|m - m*| <= tol``. Non-square input is never Hermitian."""
    a = as_cmatrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return float(np.abs(a - dagger(a)).max(initial=0.0)) <= tol


def psd_sqrt(h, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; this absorbs the tiny
    negative eigenvalues that near-pure density operators produce. Spurious
    positive eigenvalues at machine scale (below ``1e-14`` of the largest)
    are floored to zero as well: the square root would otherwise inflate
    them from 1e-16 to 1e-8, which is exactly the noise that pollutes
    fidelities of rank-deficient states.

    Raises:
        ValueError: if ``h`` is not Hermitian within ``tol``, or has an
            eigenvalue below ``-tol``.
    """
    a = as_cmatrix(h)
    if not is_hermitian(a, tol):
        raise ValueError("psd_sqrt requires a Hermitian matrix")
    w, v = np.linalg.eigh(a)
    if w.size and w[0] < -tol:
        raise ValueError(f"matrix is not positive semidefinite: min eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    if w.size:
        w[w < w[-1] * 1e-14] = 0.0
    return (v * np.sqrt(w)) @ dagger(v)


def pauli_decompose(m) -> tuple[complex, complex, complex, complex]:
    """Coefficients ``(z0, z1, z2, z3)`` with ``m = z0 I + z1 X + z2 Y + z3 Z``.

    The decomposition over the Pauli basis is linear and unique, so the
    coefficients are read off entrywise with no tolerance involved.
    """
    a = as_cmatrix(m)
    if a.shape != (2, 2):
        raise ValueError(f"pauli_decompose requires a 2x2 matrix, got {a.shape}")
    z0 = (a[0, 0] + a[1, 1]) / 2
    z3 = (a[0, 0] - a[1, 1]) / 2
    z1 = (a[0, 1] + a[1, 0]) / 2
    z2 = (a[1, 0] - a[0, 1]) / 2j
    return complex(z0), complex(z1), complex(z2), complex(z3)


def pauli_reconstruct(z0, z1, z2, z3) -> np.ndarray:
    """Inverse of :func:`pauli_decompose`."""
    return (
        z0 * np.eye(2, dtype=complex)
        + z1 * PAULI_X
        + z2 * PAULI_Y
        + z3 * PAULI_Z
    )


def pauli_singular_values(z0, z1, z2, z3, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Singular values of ``z0 I + z1 X + z2 Y + z3 Z`` in closed form.

    For a 2x2 matrix with Pauli coefficients ``z``, the squared singular
    values are the roots of ``x^2 - 2 s x + D^2`` where ``s = sum |z_i|^2``
    and ``D = |z0^2 - z1^2 - z2^2 - z3^2|`` (the modulus of the determinant),
    giving

        sigma_{1,2} = sqrt(s +- sqrt(s^2 - D^2)).

    The inner radicand ``s^2 - D^2`` is nonnegative in exact arithmetic; a
    negative value within ``tol`` is clamped to zero, anything below ``-tol``
    raises.
    """
    s = abs(z0) ** 2 + abs(z1) ** 2 + abs(z2) ** 2 + abs(z3) ** 2
    d = abs(z0 ** 2 - z1 ** 2 - z2 ** 2 - z3 ** 2)
    inner = s * s - d * d
    if inner < -tol:
        raise ValueError(f"inner radicand {inner:.3e} below -tol; invalid decomposition")
    root = np.sqrt(max(inner, 0.0))
    s1 = np.sqrt(max(s + root, 0.0))
    s2 = np.sqrt(max(s - root, 0.0))
    return float(s1), float(s2)


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    """Entrywise check ``max|m* m - I| <= tol``. False for non-square input."""
    a = as_cmatrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return float(np.abs(dagger(a) @ a - np.eye(a.shape[0])).max()) <= tol


def is_diagonal(m, tol: float = DEFAULT_TOL) -> bool:
    """True when every off-diagonal modulus is at most ``tol``."""
    a = as_cmatrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    off = a - np.diag(np.diag(a))
    return float(np.abs(off).max(initial=0.0)) <= tol


def matrix_unit(d: int, j: int, k: int) -> np.ndarray:
    """The ``d x d`` matrix unit ``E_jk`` with a single 1 at row j, column k.

    Indices are 1-based, matching the usual ``E_jk`` notation; everything
    else in this package is 0-based.
    """
    if not (1 <= j <= d and 1 <= k <= d):
        raise ValueError(f"matrix_unit indices out of range: ({j}, {k}) for d={d}")
    e = np.zeros((d, d), dtype=complex)
    e[j - 1, k - 1] = 1.0
    return e

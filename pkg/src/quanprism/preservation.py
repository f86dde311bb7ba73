"""Preservation predicates for distinguishability and fidelity.

Each structural criterion in this module is an exact-arithmetic
characterization checked entrywise with tolerances; the test suite pairs
every one of them with the direct fidelity oracle, which is the ground
truth whenever the two disagree.

Distinguishability criteria reduce to one mechanism: a mixture of unitary
branches keeps a pair of orthogonal states orthogonal exactly when every
branch product ``U_j* U_i``, written in a basis containing the pair, has
zeros at the two off-diagonal positions coupling the pair. For qubits that
forces the products to be diagonal outright; in higher dimension it forces
a symmetric pair of off-diagonal zeros, which for a unitary matrix implies
a two-level block structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .channels import MixedUnitaryChannel, apply, apply_matrix, kraus_ops_of
from .linalg import DEFAULT_TOL, as_cmatrix, dagger, is_unitary
from .states import PureState, density_of, fidelity, fidelity_pure

_ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class RelativityValue:
    """Ratio ``<phi1|U|phi2> / <phi1|phi2>``; undefined for orthogonal pairs."""

    value: complex
    defined: bool


@dataclass(frozen=True)
class PreservationVerdict:
    preserved: bool
    fidelity_in: float
    fidelity_out: float
    criterion_holds: bool | None = None
    certificate: str | None = None


def preserves_fidelity_direct(channel, phi1: PureState, phi2: PureState,
                              tol: float = DEFAULT_TOL) -> PreservationVerdict:
    """Direct check: compare input and output fidelities of the pure pair."""
    if phi1.dim != phi2.dim:
        raise ValueError("states have different dimensions")
    ops = kraus_ops_of(channel)
    if ops[0].shape[1] != phi1.dim:
        raise ValueError("channel and state dimensions differ")
    f_in = fidelity_pure(phi1, phi2)
    f_out = fidelity(apply(channel, density_of(phi1)), apply(channel, density_of(phi2)))
    return PreservationVerdict(
        preserved=abs(f_in - f_out) <= tol, fidelity_in=f_in, fidelity_out=f_out
    )


def _basis_matrix(states, tol: float) -> np.ndarray:
    b = np.stack([np.asarray(s.amplitudes if isinstance(s, PureState) else s, complex)
                  for s in states], axis=1)
    if float(np.abs(dagger(b) @ b - np.eye(b.shape[1])).max()) > tol:
        raise ValueError("basis is not orthonormal within tolerance")
    return b


def _branch_products(channel):
    """All pairwise products ``A_j* A_i`` of the channel's operators."""
    ops = kraus_ops_of(channel) if not isinstance(channel, (list, tuple)) \
        else tuple(as_cmatrix(o) for o in channel)
    n = len(ops)
    for i in range(n):
        for j in range(n):
            yield (i, j), dagger(ops[j]) @ ops[i]


def diagonal_criterion_qubit(mu, basis, tol: float = DEFAULT_TOL) -> bool:
    """Qubit distinguishability criterion for an orthonormal pair.

    True when every branch product, expressed in the basis ``(phi1, phi2)``,
    is diagonal within ``tol``. Equivalent to the channel keeping that
    orthogonal pair at fidelity zero. Works for any Kraus list, since
    diagonality of products survives isometric recombination.
    """
    b = _basis_matrix(basis, DEFAULT_TOL)
    if b.shape != (2, 2):
        raise ValueError("expected an orthonormal basis of a qubit system")
    for _, prod in _branch_products(mu):
        v = dagger(b) @ prod @ b
        if abs(v[0, 1]) > tol or abs(v[1, 0]) > tol:
            return False
    return True


def conjugated_channel(mu: MixedUnitaryChannel, u0) -> MixedUnitaryChannel:
    """Same weights, every branch conjugated to ``u0* U u0``.

    The conjugated channel preserves a pair (phi1, phi2) exactly when the
    original channel preserves (u0 phi1, u0 phi2).
    """
    u0 = as_cmatrix(u0)
    if not is_unitary(u0):
        raise ValueError("u0 must be unitary")
    return MixedUnitaryChannel(
        mu.probs, tuple(dagger(u0) @ u @ u0 for u in mu.unitaries)
    )


def is_two_level(u, tol: float = DEFAULT_TOL) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Partition witnessing two-level structure of a unitary, if one exists.

    Searches index subsets S with ``|S| <= 2`` such that ``u`` is block
    diagonal with respect to (S, complement) and the complement block is a
    common phase times the identity. Returns ``(S, complement)`` with
    0-based indices (subsets enumerated by size then lexicographically, so
    the smallest-index witness is returned), or ``None``.
    """
    u = as_cmatrix(u)
    if not is_unitary(u, max(tol, DEFAULT_TOL)):
        raise ValueError("is_two_level requires a unitary matrix")
    d = u.shape[0]
    subsets = [()]
    subsets += [(i,) for i in range(d)]
    subsets += list(combinations(range(d), 2))
    for s in subsets:
        comp = tuple(i for i in range(d) if i not in s)
        if not comp:
            # complement empty: whole matrix must be the block, needs d <= 2
            if d <= 2:
                return s, comp
            continue
        block_off1 = u[np.ix_(comp, s)] if s else np.zeros((len(comp), 0))
        block_off2 = u[np.ix_(s, comp)] if s else np.zeros((0, len(comp)))
        if s and (np.abs(block_off1).max(initial=0) > tol or np.abs(block_off2).max(initial=0) > tol):
            continue
        diag = u[np.ix_(comp, comp)]
        phase = diag[0, 0]
        if abs(abs(phase) - 1.0) > tol:
            continue
        if float(np.abs(diag - phase * np.eye(len(comp))).max()) <= tol:
            return s, comp
    return None


def two_level_criterion_qutrit(mu, basis, tol: float = DEFAULT_TOL) -> bool:
    """Qutrit distinguishability criterion for the first two basis states.

    ``basis`` is an orthonormal 3-frame whose first two members are the
    target pair. True when every branch product carries the symmetric pair
    of off-diagonal zeros coupling those two states; by unitarity this
    forces each product into a two-level block form, which is what keeps
    the pair's outputs orthogonal.
    """
    b = _basis_matrix(basis, DEFAULT_TOL)
    if b.shape != (3, 3):
        raise ValueError("expected an orthonormal basis of a qutrit system")
    for _, prod in _branch_products(mu):
        v = dagger(b) @ prod @ b
        if abs(v[0, 1]) > tol or abs(v[1, 0]) > tol:
            return False
    return True


def all_diagonal_criterion(mu, tol: float = DEFAULT_TOL) -> bool:
    """True when every branch product is diagonal in the standard basis.

    This is the condition under which the whole standard basis remains
    mutually distinguishable, and equivalently the condition for the
    channel to be a unitary conjugate of a phase-mixing channel.
    """
    for _, prod in _branch_products(mu):
        off = prod - np.diag(np.diag(prod))
        if float(np.abs(off).max(initial=0.0)) > tol:
            return False
    return True


def schur_multiplier(channel, tol: float = DEFAULT_TOL) -> np.ndarray | None:
    """Entrywise multiplier matrix of a Schur channel, or None.

    A channel acts as an entrywise (Hadamard) product ``rho -> S . rho``
    exactly when every matrix unit is mapped to a scalar multiple of
    itself; the scalars assemble into S.
    """
    ops = kraus_ops_of(channel)
    d = ops[0].shape[1]
    if ops[0].shape[0] != d:
        return None
    s = np.zeros((d, d), dtype=complex)
    for j in range(d):
        for k in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[j, k] = 1.0
            out = apply_matrix(channel, unit)
            s[j, k] = out[j, k]
            out[j, k] = 0.0
            if float(np.abs(out).max()) > tol:
                return None
    return s


def is_schur_channel(channel, tol: float = DEFAULT_TOL) -> bool:
    """True when the channel is an entrywise multiplication by a fixed matrix."""
    return schur_multiplier(channel, tol) is not None


def subset_criterion(channel, s, tol: float = DEFAULT_TOL) -> bool:
    """Distinguishability criterion for a subset of standard basis states.

    ``s`` holds 0-based basis indices, at least two of them. True when
    every branch product has zeros at all positions ``(k, l)`` with
    ``k != l`` drawn from ``s``; then all pairs inside the subset keep
    fidelity zero.
    """
    idx = sorted(set(int(i) for i in s))
    ops = kraus_ops_of(channel)
    d = ops[0].shape[1]
    if len(idx) < 2 or idx[0] < 0 or idx[-1] >= d:
        raise ValueError(f"subset must contain >= 2 valid indices for dim {d}")
    for _, prod in _branch_products(channel):
        sub = prod[np.ix_(idx, idx)]
        off = sub - np.diag(np.diag(sub))
        if float(np.abs(off).max(initial=0.0)) > tol:
            return False
    return True


def uncorrelated_criterion(factors, tol: float = DEFAULT_TOL) -> bool:
    """Criterion for an uncorrelated multi-qubit channel to preserve the
    distinguishable pair ``|0...00>``, ``|0...01>``.

    Only the factor acting on the last qubit matters: the other factors
    contribute unit-fidelity terms. True when that last factor satisfies
    the qubit diagonal criterion in the standard basis.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor channel")
    e0 = PureState(np.array([1, 0], dtype=complex))
    e1 = PureState(np.array([0, 1], dtype=complex))
    return diagonal_criterion_qubit(factors[-1], (e0, e1), tol)


def relativity(u, phi1: PureState, phi2: PureState) -> RelativityValue:
    """Relativity of a pair under a unitary: ``<phi1|U|phi2> / <phi1|phi2>``.

    Orthogonal pairs (inner product modulus below 1e-12) yield
    ``defined=False`` instead of an error.
    """
    u = as_cmatrix(u)
    if phi1.dim != phi2.dim or u.shape != (phi1.dim, phi1.dim):
        raise ValueError("dimension mismatch")
    denom = np.vdot(phi1.amplitudes, phi2.amplitudes)
    if abs(denom) < _ORTHO_TOL:
        return RelativityValue(value=0j, defined=False)
    num = np.vdot(phi1.amplitudes, u @ phi2.amplitudes)
    return RelativityValue(value=complex(num / denom), defined=True)


def is_symmetric_pair(u, phi1: PureState, phi2: PureState, tol: float = DEFAULT_TOL) -> bool:
    """True when the relativity is invariant under swapping the pair."""
    r12 = relativity(u, phi1, phi2)
    r21 = relativity(u, phi2, phi1)
    if not (r12.defined and r21.defined):
        raise ValueError("symmetry is undefined for an orthogonal pair")
    return abs(r12.value - r21.value) <= tol


def rank2_fidelity_criterion(u1, u2, t: float, phi1: PureState, phi2: PureState,
                             tol: float = DEFAULT_TOL) -> bool:
    """Exact condition for ``t U1 . U1* + (1-t) U2 . U2*`` to preserve the
    fidelity of a non-orthogonal pure pair.

    With ``U = U1* U2``, the two-branch mixture preserves the pair's
    fidelity precisely when the pair is symmetric under U and the common
    relativity has modulus at most 1; the branch weight ``t`` never enters
    (the endpoints ``t in {0, 1}`` are unitary channels and trivially
    preserve). Note the modulus condition is an upper bound, not an
    equality: a symmetric pair with ``|R| < 1`` is preserved as well, as
    direct computation of the output fidelities confirms.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if t == 0.0 or t == 1.0:
        return True
    u = dagger(as_cmatrix(u1)) @ as_cmatrix(u2)
    r12 = relativity(u, phi1, phi2)
    r21 = relativity(u, phi2, phi1)
    if not (r12.defined and r21.defined):
        raise ValueError("criterion is undefined for an orthogonal pair")
    return abs(r12.value - r21.value) <= tol and abs(r12.value) <= 1.0 + tol


def rank_n_necessary_condition(mu: MixedUnitaryChannel, phi1: PureState, phi2: PureState,
                               tol: float = DEFAULT_TOL) -> bool:
    """Necessary condition for a many-branch mixture to preserve a pair.

    Every two-branch sub-channel of a fidelity-preserving channel must
    itself preserve the pair, so all branch pairs must pass the two-branch
    criterion. False therefore certifies non-preservation; true alone does
    not certify preservation.
    """
    n = mu.rank
    for i in range(n):
        for j in range(i + 1, n):
            if not rank2_fidelity_criterion(mu.unitaries[i], mu.unitaries[j], 0.5,
                                            phi1, phi2, tol):
                return False
    return True


def unit_conjugate_test(c: complex, d: complex, tol: float = DEFAULT_TOL) -> bool:
    """Two-sided scalar test: ``|c|^2 + |d|^2 <= 2`` and ``2|c - d*| = ||c|^2 - |d|^2||``.

    Away from the degenerate locus ``c = d*`` this forces ``c`` and ``d``
    onto the unit circle with ``c = d*``; on that locus it is satisfied by
    any conjugate pair with modulus at most 1.
    """
    c = complex(c)
    d = complex(d)
    lhs = 2.0 * abs(c - np.conj(d))
    rhs = abs(abs(c) ** 2 - abs(d) ** 2)
    return (abs(c) ** 2 + abs(d) ** 2) <= 2.0 + tol and abs(lhs - rhs) <= tol

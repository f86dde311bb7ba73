"""CPTP maps: construction, application, Choi matrices, equivalence, composition.

Channel equality is always decided through Choi matrices, never through
operator lists: Kraus representations of one channel differ by an isometric
recombination, so the lists themselves carry gauge freedom. The Choi matrix
used here is ``C = sum_ij E_ij (x) Phi(E_ij)`` with the input factor first,
equivalently ``C = sum_a |v_a><v_a|`` for ``v_a[i * d_out + k] = A_a[k, i]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, MAX_DIM, PAULI_Z, CNOT, as_cmatrix, dagger, is_unitary
from .states import DensityOperator

_CHOI_RANK_TOL = 1e-8
_SPAN_TOL = 1e-10


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map given by a nonempty list of Kraus operators.

    All operators must share one shape ``(out_dim, in_dim)`` and satisfy the
    completeness relation ``sum_i A_i* A_i = I`` within 1e-9.
    """

    kraus_ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.kraus_ops) == 0:
            raise ValueError("a channel needs at least one Kraus operator")
        ops = tuple(as_cmatrix(a) for a in self.kraus_ops)
        shape = ops[0].shape
        if any(a.shape != shape for a in ops):
            raise ValueError("all Kraus operators must share one shape")
        ident = sum(dagger(a) @ a for a in ops)
        residual = float(np.abs(ident - np.eye(shape[1])).max())
        if residual > DEFAULT_TOL:
            raise ValueError(f"completeness residual {residual:.3e} exceeds {DEFAULT_TOL}")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def in_dim(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus_ops[0].shape[0]


@dataclass(frozen=True)
class MixedUnitaryChannel:
    """Convex mixture of unitary conjugations, ``rho -> sum_i p_i U_i rho U_i*``.

    Every probability must be strictly positive (drop zero-weight branches
    before construction) and the weights must sum to 1 within 1e-12.
    """

    probs: np.ndarray
    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        us = tuple(as_cmatrix(u) for u in self.unitaries)
        if probs.size == 0 or probs.size != len(us):
            raise ValueError("probs and unitaries must be nonempty lists of equal length")
        if np.any(probs <= 0):
            raise ValueError("branch probabilities must be strictly positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {probs.sum()}, not 1")
        d = us[0].shape[0]
        for u in us:
            if u.shape != (d, d) or not is_unitary(u, DEFAULT_TOL):
                raise ValueError("every branch operator must be unitary of one dimension")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "unitaries", us)

    @property
    def dim(self) -> int:
        return self.unitaries[0].shape[0]

    @property
    def rank(self) -> int:
        """Number of branches."""
        return len(self.unitaries)


def as_kraus(mu: MixedUnitaryChannel) -> KrausChannel:
    """Kraus form with operators ``sqrt(p_i) U_i``."""
    return KrausChannel(tuple(np.sqrt(p) * u for p, u in zip(mu.probs, mu.unitaries)))


def kraus_ops_of(channel) -> tuple[np.ndarray, ...]:
    """Kraus operator list of a :class:`KrausChannel` or :class:`MixedUnitaryChannel`."""
    if isinstance(channel, MixedUnitaryChannel):
        return as_kraus(channel).kraus_ops
    if isinstance(channel, KrausChannel):
        return channel.kraus_ops
    raise TypeError(f"not a channel: {type(channel).__name__}")


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=complex),))


def unitary_channel(u) -> KrausChannel:
    u = as_cmatrix(u)
    if not is_unitary(u):
        raise ValueError("unitary_channel requires a unitary matrix")
    return KrausChannel((u,))


def apply_matrix(channel, x) -> np.ndarray:
    """Apply the channel to an arbitrary matrix argument (not only states)."""
    x = as_cmatrix(x)
    ops = kraus_ops_of(channel)
    if x.shape != (ops[0].shape[1], ops[0].shape[1]):
        raise ValueError(f"argument shape {x.shape} does not match channel input dim")
    out = np.zeros((ops[0].shape[0], ops[0].shape[0]), dtype=complex)
    for a in ops:
        out += a @ x @ dagger(a)
    return out


def apply(channel, rho: DensityOperator) -> DensityOperator:
    """Channel action on a density operator; output is validated on construction."""
    return DensityOperator(apply_matrix(channel, rho.matrix))


def _vec(a: np.ndarray) -> np.ndarray:
    # v[i * d_out + k] = a[k, i]
    return a.T.reshape(-1)


def _unvec(v: np.ndarray, in_dim: int, out_dim: int) -> np.ndarray:
    return v.reshape(in_dim, out_dim).T


def choi(channel) -> np.ndarray:
    """Choi matrix ``sum_ij E_ij (x) Phi(E_ij)``, input factor first."""
    ops = kraus_ops_of(channel)
    d2 = ops[0].shape[0] * ops[0].shape[1]
    c = np.zeros((d2, d2), dtype=complex)
    for a in ops:
        v = _vec(a)
        c += np.outer(v, np.conj(v))
    return c


def choi_rank(channel, tol: float = _CHOI_RANK_TOL) -> int:
    """Numerical rank of the Choi matrix: eigenvalues above ``tol``."""
    w = np.linalg.eigvalsh(choi(channel))
    return int(np.sum(w > tol))


def choi_distance(c1, c2) -> float:
    """Max-entry distance between Choi matrices."""
    a, b = choi(c1), choi(c2)
    if a.shape != b.shape:
        raise ValueError("channels have different dimensions")
    return float(np.abs(a - b).max())


def channels_equal(c1, c2, tol: float = DEFAULT_TOL) -> bool:
    """True when the Choi matrices agree entrywise within ``tol``."""
    return choi_distance(c1, c2) <= tol


def complementary_apply(mu: MixedUnitaryChannel, x) -> np.ndarray:
    """Complementary-channel action, an N x N matrix over the branch index.

    Entry ``(j, k)`` is ``sqrt(p_j p_k) <U_k* U_j, x>`` with the
    Hilbert-Schmidt product ``<S, T> = Tr(S T*)``. Arbitrary matrix arguments
    are accepted, in particular rank-1 cross terms ``|phi2><phi1|``, whose
    image has trace norm equal to the fidelity of the two channel outputs.
    """
    x = as_cmatrix(x)
    if x.shape != (mu.dim, mu.dim):
        raise ValueError(f"argument shape {x.shape} does not match channel dim {mu.dim}")
    n = mu.rank
    out = np.zeros((n, n), dtype=complex)
    sq = np.sqrt(mu.probs)
    for j in range(n):
        for k in range(n):
            prod = dagger(mu.unitaries[k]) @ mu.unitaries[j]
            out[j, k] = sq[j] * sq[k] * np.trace(prod @ dagger(x))
    return out


def kraus_equivalent(a_ops, b_ops, tol: float = 1e-8) -> np.ndarray | None:
    """Isometry relating two Kraus representations of one channel.

    If both operator lists generate the same channel, returns a matrix ``u``
    with ``u* u = I`` and ``a_i = sum_j u[i, j] b_j`` (the shorter list is
    first padded with zero operators, so ``u`` has ``max(len(a), len(b))``
    rows). Returns ``None`` when the channels differ.

    Coefficients are found by projecting vectorized operators onto the span
    of the channel's canonical (Choi-eigenvector) operators; singular values
    below 1e-10 are treated as zero. When the ``b`` list is linearly
    dependent the plain least-squares rows are completed with null-space
    directions so the isometry condition still holds.
    """
    a_ops = [as_cmatrix(a) for a in a_ops]
    b_ops = [as_cmatrix(b) for b in b_ops]
    shape = a_ops[0].shape
    if any(o.shape != shape for o in a_ops + b_ops):
        raise ValueError("all operators must share one shape")

    def raw_choi(ops):
        c = np.zeros((shape[0] * shape[1],) * 2, dtype=complex)
        for o in ops:
            v = _vec(o)
            c += np.outer(v, np.conj(v))
        return c

    choi_a, choi_b = raw_choi(a_ops), raw_choi(b_ops)
    if float(np.abs(choi_a - choi_b).max()) > tol:
        return None

    r = len(b_ops)
    while len(a_ops) < r:
        a_ops.append(np.zeros(shape, dtype=complex))
    m = len(a_ops)

    wa = np.stack([_vec(o) for o in a_ops], axis=1)  # d^2 x m
    wb = np.stack([_vec(o) for o in b_ops], axis=1)  # d^2 x r
    w, v = np.linalg.eigh((choi_b + dagger(choi_b)) / 2)
    keep = w > _SPAN_TOL
    wc = v[:, keep] * np.sqrt(w[keep])  # d^2 x r0, orthogonal columns
    r0 = wc.shape[1]
    wc_pinv = np.linalg.pinv(wc, rcond=_SPAN_TOL)
    p = wc_pinv @ wa  # r0 x m
    q = wc_pinv @ wb  # r0 x r

    x = dagger(q) @ p  # r x m, row j holds coefficients of a_? ... (transposed u)
    if r0 < r:
        # Null directions of q keep the reconstruction intact; pick rows
        # orthogonal to the existing coefficient rows to restore u* u = I.
        _, sq_vals, vqh = np.linalg.svd(q)
        null_q = dagger(vqh)[:, r0:]  # r x (r - r0)
        _, sp_vals, vph = np.linalg.svd(np.conj(p))
        rank_p = int(np.sum(sp_vals > _SPAN_TOL))
        null_p = dagger(vph)[:, rank_p:]  # m x (m - rank_p)
        if null_p.shape[1] < r - r0:
            return None
        x = x + null_q @ null_p[:, : r - r0].T
    u = x.T  # m x r

    if float(np.abs(dagger(u) @ u - np.eye(r)).max()) > tol:
        return None
    for i, a in enumerate(a_ops):
        rec = sum(u[i, j] * b_ops[j] for j in range(r))
        if float(np.abs(rec - a).max()) > tol:
            return None
    return u


def tensor(c1, c2) -> KrausChannel:
    """Tensor product channel: all pairwise Kraus products ``A_i (x) B_j``."""
    ops1, ops2 = kraus_ops_of(c1), kraus_ops_of(c2)
    return KrausChannel(tuple(np.kron(a, b) for a in ops1 for b in ops2))


def n_consecutive(mu: MixedUnitaryChannel, n: int) -> MixedUnitaryChannel:
    """``n`` consecutive uses of a channel: product weights, tensored branches."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if mu.dim ** n > MAX_DIM:
        raise ValueError(f"composite dimension {mu.dim ** n} exceeds budget {MAX_DIM}")
    probs = mu.probs
    us = mu.unitaries
    for _ in range(n - 1):
        probs = np.array([p * q for p in probs for q in mu.probs])
        us = tuple(np.kron(u, w) for u in us for w in mu.unitaries)
    return MixedUnitaryChannel(probs, us)


def controlled_phase_damping(lam: float) -> KrausChannel:
    """Two-qubit channel: a controlled-NOT followed by independent dephasing.

    Kraus operators are ``(E_i (x) E_j) @ CNOT`` with ``E_0 = sqrt(1-lam) I``
    and ``E_1 = sqrt(lam) Z``. The standard basis stays mutually
    distinguishable for every ``lam``, yet the channel is not a tensor
    product of qubit channels for ``lam`` in (0, 1).
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam must lie in [0, 1], got {lam}")
    e0 = np.sqrt(1.0 - lam) * np.eye(2, dtype=complex)
    e1 = np.sqrt(lam) * PAULI_Z
    ops = [np.kron(a, b) @ CNOT for a in (e0, e1) for b in (e0, e1)]
    ops = [o for o in ops if np.abs(o).max() > 0.0]
    return KrausChannel(tuple(ops))


def _reorder_choi_bipartite(c: np.ndarray, d1: int, d2: int) -> np.ndarray:
    """Regroup Choi indices so each side of the matrix carries one factor's
    (input, output, input', output') indices; a product channel becomes a
    rank-1 outer product in this layout."""
    t = c.reshape(d1, d2, d1, d2, d1, d2, d1, d2)  # i1 i2 k1 k2 j1 j2 l1 l2
    t = t.transpose(0, 2, 4, 6, 1, 3, 5, 7)
    return t.reshape(d1 ** 4, d2 ** 4)


def _kraus_from_choi(c: np.ndarray, dim: int, tol: float = 1e-10) -> list[np.ndarray]:
    w, v = np.linalg.eigh((c + dagger(c)) / 2)
    ops = []
    for k in range(w.size):
        if w[k] > tol:
            ops.append(np.sqrt(w[k]) * _unvec(v[:, k], dim, dim))
    return ops


def tensor_factorization_check(
    c, dims: tuple[int, int], ratio_tol: float = 1e-7
) -> tuple[bool, tuple[KrausChannel, KrausChannel] | None]:
    """Decide whether a channel on a ``d1*d2`` system is a tensor product.

    The Choi matrix is regrouped across the (factor-1, factor-2) cut and its
    operator Schmidt spectrum computed; the channel counts as a product when
    the second Schmidt coefficient is at most ``ratio_tol`` times the first.
    On success the two factor channels are recovered from the dominant
    Schmidt pair and returned as a witness.
    """
    d1, d2 = dims
    ops = kraus_ops_of(c)
    if ops[0].shape != (d1 * d2, d1 * d2):
        raise ValueError(f"channel dimension {ops[0].shape} does not factor as {d1}*{d2}")
    m = _reorder_choi_bipartite(choi(c), d1, d2)
    u, s, vh = np.linalg.svd(m)
    if s[0] <= 0 or s[1] > ratio_tol * s[0]:
        return False, None
    h1 = u[:, 0].reshape(d1 * d1, d1 * d1)
    h2 = np.conj(vh[0, :]).reshape(d2 * d2, d2 * d2)
    ph = np.trace(h1)
    if abs(ph) < _SPAN_TOL:
        return False, None
    # Scale the dominant pair so each factor is a unit-trace-preserving Choi:
    # a valid Choi has trace equal to its input dimension.
    h1_rotated = h1 * (np.conj(ph) / abs(ph))
    beta = (np.conj(ph) / abs(ph)) * (d1 / np.trace(h1_rotated).real)
    chi1 = h1 * beta
    chi2 = h2 * (s[0] / beta)
    try:
        f1 = KrausChannel(tuple(_kraus_from_choi(chi1, d1)))
        f2 = KrausChannel(tuple(_kraus_from_choi(chi2, d2)))
    except ValueError:
        return False, None
    return True, (f1, f2)


def local_operation(mu: MixedUnitaryChannel, subset) -> MixedUnitaryChannel:
    """Sub-channel on a branch subset with renormalized probabilities.

    ``subset`` holds 0-based branch indices; weights are rescaled by the
    selected total so the result is again a valid mixed unitary channel.
    """
    idx = sorted(set(int(i) for i in subset))
    if not idx:
        raise ValueError("subset must be nonempty")
    if idx[0] < 0 or idx[-1] >= mu.rank:
        raise ValueError(f"subset indices out of range for {mu.rank} branches")
    total = float(mu.probs[idx].sum())
    return MixedUnitaryChannel(mu.probs[idx] / total, tuple(mu.unitaries[i] for i in idx))

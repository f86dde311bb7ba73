"""The general phase damping family: construction, recognition, sweeps.

A general phase damping (GPD) channel mixes diagonal phase unitaries
``D_i = diag(1, e^{i theta_i}, ...)`` with weights ``p_i`` (first branch is
the identity). Its observable effect on a qubit is a single complex
multiplier on the off-diagonal density matrix entry; the sweep helpers
tabulate that coherence loss over parameter grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import (
    KrausChannel,
    MixedUnitaryChannel,
    apply,
    channels_equal,
    choi_distance,
    kraus_ops_of,
)
from .linalg import (
    DEFAULT_TOL,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    as_cmatrix,
    dagger,
    is_unitary,
)
from .preservation import all_diagonal_criterion
from .states import DensityOperator, PureState, density_of, fidelity, fidelity_pure

TWO_PI = 2.0 * np.pi

#: Default seed for the randomized preserved-set search (reproducibility).
DEFAULT_PROBE_SEED = 0x5EED


@dataclass(frozen=True)
class GPDChannel:
    """General phase damping channel: branch weights plus relative phases.

    ``phases`` is a length-N vector for qubit channels, or an ``(N, dim-1)``
    array for higher-dimensional systems (one independent phase per level
    beyond the first). The first branch must carry phase zero everywhere:
    global phases are stripped so every ``D_i`` has leading entry exactly 1.
    """

    probs: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        phases = np.asarray(self.phases, dtype=float)
        if phases.ndim == 1:
            phases = np.mod(phases, TWO_PI)
        elif phases.ndim == 2:
            phases = np.mod(phases, TWO_PI)
        else:
            raise ValueError("phases must be a vector or an (N, dim-1) array")
        n = probs.size
        if n == 0 or phases.shape[0] != n:
            raise ValueError("probs and phases must agree on the branch count")
        if np.any(probs <= 0):
            raise ValueError("branch probabilities must be strictly positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {probs.sum()}, not 1")
        first = np.atleast_1d(phases[0])
        if np.any(np.minimum(first, TWO_PI - first) > 1e-12):
            raise ValueError("first branch must carry phase 0 (identity branch)")
        phases = phases.copy()
        phases[0] = 0.0
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "phases", phases)

    @property
    def rank(self) -> int:
        return self.probs.size

    @property
    def dim(self) -> int:
        return 2 if self.phases.ndim == 1 else self.phases.shape[1] + 1

    @property
    def mixing_parameter(self) -> float:
        """Product of the branch probabilities."""
        return float(np.prod(self.probs))


def make_gpd(probs, phases) -> GPDChannel:
    """Build a validated :class:`GPDChannel` from plain sequences."""
    return GPDChannel(np.asarray(probs, dtype=float), np.asarray(phases, dtype=float))


def phase_matrices(gpd: GPDChannel) -> tuple[np.ndarray, ...]:
    """The diagonal branch unitaries ``D_i``."""
    mats = []
    for i in range(gpd.rank):
        row = np.atleast_1d(gpd.phases[i])
        mats.append(np.diag(np.concatenate([[1.0], np.exp(1j * row)])))
    return tuple(mats)


def to_mixed_unitary(gpd: GPDChannel) -> MixedUnitaryChannel:
    return MixedUnitaryChannel(gpd.probs, phase_matrices(gpd))


def phase_damping(lam: float) -> KrausChannel:
    """Qubit phase damping in its textbook Kraus form.

    ``K1 = diag(1, sqrt(1-lam))``, ``K2 = diag(0, sqrt(lam))``.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam must lie in [0, 1], got {lam}")
    k1 = np.diag([1.0, np.sqrt(1.0 - lam)]).astype(complex)
    k2 = np.diag([0.0, np.sqrt(lam)]).astype(complex)
    return KrausChannel((k1, k2))


def from_phase_damping(lam: float) -> GPDChannel:
    """Phase damping rewritten as a two-branch phase mixture.

    The damping parameter maps to ``p1 = (1 + sqrt(1-lam)) / 2`` with
    relative phase pi; the resulting channel is Choi-equal to the Kraus
    form. ``lam = 0`` degenerates to the identity (single branch).
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam must lie in [0, 1], got {lam}")
    p1 = (1.0 + np.sqrt(1.0 - lam)) / 2.0
    if 1.0 - p1 <= 0.0:
        return make_gpd([1.0], [0.0])
    return make_gpd([p1, 1.0 - p1], [0.0, np.pi])


def amplitude_damping(eta: float) -> KrausChannel:
    """Qubit amplitude damping with decay parameter ``eta`` in [0, 1]."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    s1 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - eta)]], dtype=complex)
    s2 = np.array([[0.0, np.sqrt(eta)], [0.0, 0.0]], dtype=complex)
    return KrausChannel((s1, s2))


def depolarizing(zeta: float) -> KrausChannel:
    """Qubit depolarizing channel with parameter ``zeta`` in [0, 4/3]."""
    if not 0.0 <= zeta <= 4.0 / 3.0:
        raise ValueError(f"zeta must lie in [0, 4/3], got {zeta}")
    ops = [
        np.sqrt(max(0.0, 1.0 - 0.75 * zeta)) * np.eye(2, dtype=complex),
        np.sqrt(zeta / 4.0) * PAULI_X,
        np.sqrt(zeta / 4.0) * PAULI_Y,
        np.sqrt(zeta / 4.0) * PAULI_Z,
    ]
    return KrausChannel(tuple(o for o in ops if np.abs(o).max() > 0.0))


def _anchor_unitary_from_kraus(ops, dim: int, tol: float) -> np.ndarray | None:
    """Unitary w with every ``w* A_i`` diagonal, built column by column.

    Valid whenever all operator products are diagonal: the i-th columns of
    all Kraus operators are then parallel, and columns for different basis
    indices are orthogonal.
    """
    w = np.zeros((dim, dim), dtype=complex)
    for c in range(dim):
        col = max((a[:, c] for a in ops), key=lambda v: float(np.linalg.norm(v)))
        nrm = float(np.linalg.norm(col))
        if nrm <= tol:
            return None
        w[:, c] = col / nrm
    if not is_unitary(w, 1e-7):
        return None
    for a in ops:
        b = dagger(w) @ a
        if float(np.abs(b - np.diag(np.diag(b))).max()) > 1e-7:
            return None
    return w


def _phase_unitary_branches(ops, dim: int, tol: float):
    """Interpret each diagonal operator as ``sqrt(q) * (unimodular diagonal)``.

    Returns ``(weights, phase_vectors)`` or None when some operator is not a
    scaled phase unitary.
    """
    weights, vecs = [], []
    for op in ops:
        entries = np.diag(op)
        if float(np.abs(op - np.diag(entries)).max()) > tol:
            return None
        scale = np.abs(entries)
        if float(scale.max() - scale.min()) > 1e-7 or scale[0] <= tol:
            return None
        weights.append(float(np.mean(scale)) ** 2)
        vecs.append(entries / scale)
    return np.array(weights), vecs


def recognize_gpd(channel, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, GPDChannel] | None:
    """Recover a unitary-conjugated phase-mixing form, if the channel has one.

    A channel preserves the whole standard basis mutually distinguishable
    exactly when all its operator products are diagonal; in that case it
    factors as ``rho -> u0 (sum_i p_i D_i rho D_i*) u0*``. Returns
    ``(u0, gpd)`` with global phases stripped from each ``D_i``, or ``None``.
    The reconstruction is accepted only if its Choi matrix reproduces the
    input within 1e-9.
    """
    if not all_diagonal_criterion(channel, tol):
        return None
    if isinstance(channel, MixedUnitaryChannel):
        u0 = channel.unitaries[0]
        probs = channel.probs
        rows = []
        for u in channel.unitaries:
            entries = np.diag(dagger(u0) @ u)
            entries = entries / entries[0]
            rows.append(np.mod(np.angle(entries[1:]), TWO_PI))
        phases = np.array(rows)
        if channel.dim == 2:
            phases = phases.reshape(-1)
        gpd = GPDChannel(probs, phases)
    else:
        ops = kraus_ops_of(channel)
        dim = ops[0].shape[1]
        w = _anchor_unitary_from_kraus(ops, dim, tol)
        if w is None:
            return None
        diags = [np.diag(dagger(w) @ a) for a in ops]
        if dim == 2:
            m = sum(b[1] * np.conj(b[0]) for b in diags)
            if abs(m - 1.0) <= tol:
                u0, gpd = w, make_gpd([1.0], [0.0])
            else:
                p1 = (1.0 - abs(m) ** 2) / (2.0 * (1.0 - m.real))
                if p1 <= tol:
                    u0 = w @ np.diag([1.0, m / abs(m)])
                    gpd = make_gpd([1.0], [0.0])
                else:
                    theta = np.angle((m - p1) / (1.0 - p1))
                    u0 = w
                    gpd = make_gpd([p1, 1.0 - p1], [0.0, theta])
        else:
            # Higher-dimensional Kraus form: look for scaled phase unitaries,
            # first among the rotated operators themselves, then among the
            # canonical (Choi-eigenvector) operators of the rotated channel.
            # Degenerate Choi spectra can hide the phase structure from the
            # second route, which is why the direct one is tried first.
            from .channels import _kraus_from_choi, choi  # local: avoids import cycle

            diag_ops = tuple(dagger(w) @ a for a in ops)
            decomposition = _phase_unitary_branches(diag_ops, dim, tol)
            if decomposition is None:
                canon = _kraus_from_choi(choi(KrausChannel(diag_ops)), dim)
                decomposition = _phase_unitary_branches(tuple(canon), dim, tol)
            if decomposition is None:
                return None
            weights_arr, branch_vecs = decomposition
            u0 = w @ np.diag(branch_vecs[0])
            rows = []
            for vec in branch_vecs:
                rel = vec / branch_vecs[0]
                rel = rel / rel[0]
                rows.append(np.mod(np.angle(rel[1:]), TWO_PI))
            gpd = GPDChannel(weights_arr / weights_arr.sum(), np.array(rows))
    rebuilt = MixedUnitaryChannel(
        gpd.probs, tuple(u0 @ d for d in phase_matrices(gpd))
    )
    if choi_distance(rebuilt, channel) > 1e-9:
        return None
    return u0, gpd


def coherence_multiplier(gpd: GPDChannel) -> float:
    """Modulus of the factor applied to a qubit's off-diagonal entry.

    The channel maps ``rho_01`` to ``rho_01 * sum_k p_k e^{-i theta_k}``;
    the output coherence of the maximally coherent state is half this
    modulus. Always at most 1, with equality only for all-zero phases.
    """
    if gpd.dim != 2:
        raise ValueError("coherence_multiplier applies to qubit channels")
    return float(abs(np.sum(gpd.probs * np.exp(-1j * gpd.phases))))


@dataclass(frozen=True)
class SweepSpec:
    """Parameter grid description for a decoherence sweep.

    rank2 sweeps vary the mixing parameter ``p = p1 (1 - p1)`` and the
    relative phase; rank3 sweeps fix the three branch weights and vary both
    relative phases over ``theta_grid``.
    """

    family: str
    p_grid: tuple[float, ...] = ()
    theta_grid: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()
    state: tuple[complex, ...] | None = None


@dataclass(frozen=True)
class SweepTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    metadata: dict = field(default_factory=dict)

    def to_csv(self, fh) -> None:
        """Write comment metadata, a header line, and 12-significant-digit rows."""
        for key in sorted(self.metadata):
            fh.write(f"# {key}: {self.metadata[key]}\n")
        fh.write(",".join(self.columns) + "\n")
        for row in self.rows:
            fh.write(",".join(f"{x:.12g}" for x in row) + "\n")


def _input_coherence(state) -> float:
    if state is None:
        return 0.5  # maximally coherent qubit state
    amps = np.asarray(state, dtype=complex).reshape(-1)
    if amps.size != 2:
        raise ValueError("sweep input state must be a qubit state")
    amps = amps / np.linalg.norm(amps)
    return float(abs(amps[0] * np.conj(amps[1])))


def decoherence_sweep(spec: SweepSpec) -> SweepTable:
    """Tabulate output coherence over the requested parameter grid.

    rank2 rows are ``(p, theta, coherence)`` with ``p1`` resolved from the
    mixing parameter through the larger root ``p1 = (1 + sqrt(1-4p)) / 2``;
    rank3 rows are ``(theta2, theta3, coherence)`` at fixed branch weights.
    """
    base = _input_coherence(spec.state)
    meta = {"family": spec.family, "input_state": "rho_m" if spec.state is None else "custom"}
    if spec.family == "rank2":
        if not spec.p_grid or not spec.theta_grid:
            raise ValueError("rank2 sweep needs nonempty p and theta grids")
        for p in spec.p_grid:
            if not 0.0 <= p <= 0.25 + 1e-12:
                raise ValueError(f"rank-2 mixing parameter {p} outside [0, 1/4]")
        meta["root"] = "p1=(1+sqrt(1-4p))/2"
        rows = []
        for p in spec.p_grid:
            p1 = (1.0 + np.sqrt(max(0.0, 1.0 - 4.0 * p))) / 2.0
            for theta in spec.theta_grid:
                mult = abs(p1 + (1.0 - p1) * np.exp(-1j * theta))
                rows.append((float(p), float(theta), float(mult * base)))
        return SweepTable(("p", "theta", "coherence"), tuple(rows), meta)
    if spec.family == "rank3":
        if len(spec.probs) != 3:
            raise ValueError("rank3 sweep needs exactly three branch probabilities")
        probs = np.asarray(spec.probs, dtype=float)
        if np.any(probs <= 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("rank3 probabilities must be positive and sum to 1")
        if not spec.theta_grid:
            raise ValueError("rank3 sweep needs a nonempty theta grid")
        meta["probs"] = ",".join(f"{p:.12g}" for p in probs)
        rows = []
        for t2 in spec.theta_grid:
            for t3 in spec.theta_grid:
                mult = abs(probs[0] + probs[1] * np.exp(-1j * t2) + probs[2] * np.exp(-1j * t3))
                rows.append((float(t2), float(t3), float(mult * base)))
        return SweepTable(("theta2", "theta3", "coherence"), tuple(rows), meta)
    raise ValueError(f"unknown sweep family {spec.family!r}")


@dataclass(frozen=True)
class PreservedPair:
    phi1: np.ndarray
    phi2: np.ndarray
    fidelity_in: float
    fidelity_out: float


@dataclass(frozen=True)
class ProbeReport:
    samples: int
    seed: int
    pair_tolerance: float
    anchor_max_error: float
    min_gap: float
    preserved_pairs: tuple[PreservedPair, ...]

    @property
    def found(self) -> int:
        return len(self.preserved_pairs)


def preserved_set_probe(
    gpd: GPDChannel,
    samples: int = 10_000,
    seed: int = DEFAULT_PROBE_SEED,
    pair_tol: float = 1e-8,
) -> ProbeReport:
    """Randomized search for fidelity-preserved superposition pairs.

    Two checks run over ``samples`` draws:

    * every sampled state is tested against both basis states; those
      anchored fidelities are always preserved, and the report records the
      worst numerical deviation seen;
    * pairs of sampled superpositions (both components nonzero,
      non-orthogonal) are classified as preserved when
      ``|F_in - F_out| <= pair_tol``, and every such pair is reported.

    The search samples phases uniformly, so it can land near the exactly
    preserved locus (pairs whose relative phases differ by a multiple of
    pi); reported pairs therefore include near-misses whose gap is merely
    below ``pair_tol``, with the true minimum gap recorded in ``min_gap``.
    """
    if gpd.dim != 2:
        raise ValueError("the probe applies to qubit channels")
    degenerate = gpd.rank < 2 or np.all(
        np.minimum(gpd.phases, TWO_PI - gpd.phases) <= 1e-12
    )
    if degenerate:
        raise ValueError("degenerate channel: every state pair is trivially preserved")
    channel = to_mixed_unitary(gpd)
    rng = np.random.default_rng(seed)
    e0 = density_of(PureState(np.array([1, 0], dtype=complex)))
    e1 = density_of(PureState(np.array([0, 1], dtype=complex)))

    def draw() -> PureState:
        while True:
            chi = rng.uniform(0.0, np.pi / 2.0)
            gam = rng.uniform(0.0, TWO_PI)
            amps = np.array([np.cos(chi), np.sin(chi) * np.exp(1j * gam)])
            if min(abs(amps[0]), abs(amps[1])) > 1e-12:
                return PureState(amps)

    anchor_err = 0.0
    min_gap = np.inf
    hits: list[PreservedPair] = []
    for _ in range(samples):
        phi1 = draw()
        phi2 = draw()
        while abs(np.vdot(phi1.amplitudes, phi2.amplitudes)) < 1e-6:
            phi2 = draw()
        out1 = apply(channel, density_of(phi1))
        out2 = apply(channel, density_of(phi2))
        for phi, out in ((phi1, out1), (phi2, out2)):
            anchor_err = max(
                anchor_err,
                abs(fidelity(e0, out) - abs(phi.amplitudes[0])),
                abs(fidelity(e1, out) - abs(phi.amplitudes[1])),
            )
        f_in = fidelity_pure(phi1, phi2)
        f_out = fidelity(out1, out2)
        gap = abs(f_in - f_out)
        min_gap = min(min_gap, gap)
        if gap <= pair_tol:
            hits.append(PreservedPair(phi1.amplitudes, phi2.amplitudes, f_in, f_out))
    return ProbeReport(
        samples=samples,
        seed=seed,
        pair_tolerance=pair_tol,
        anchor_max_error=float(anchor_err),
        min_gap=float(min_gap),
        preserved_pairs=tuple(hits),
    )

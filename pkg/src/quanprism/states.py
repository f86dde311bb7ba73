"""Pure states, density operators, fidelity, purification, partial trace.

Composite systems follow the system-major indexing convention: the basis
vector ``|i> (x) |k>`` of a (system dim d) x (ancilla dim N) space sits at
flat index ``i * N + k``. All partial traces and purifications in this module
assume that layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .linalg import DEFAULT_TOL, dagger, is_hermitian, psd_sqrt, singular_values

if TYPE_CHECKING:  # pragma: no cover
    from .channels import MixedUnitaryChannel


@dataclass(frozen=True)
class PureState:
    """Unit vector in a finite-dimensional complex Hilbert space."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise ValueError("empty amplitude vector")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > DEFAULT_TOL:
            raise ValueError(f"state norm {norm} is not 1 within {DEFAULT_TOL}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class DensityOperator:
    """Positive semidefinite operator with unit trace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density operator must be square, got {m.shape}")
        if not is_hermitian(m, DEFAULT_TOL):
            raise ValueError("density operator must be Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > DEFAULT_TOL:
            raise ValueError(f"density operator trace {tr} is not 1")
        eigmin = float(np.linalg.eigvalsh(m)[0])
        if eigmin < -DEFAULT_TOL:
            raise ValueError(f"density operator has eigenvalue {eigmin:.3e} < 0")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Purification:
    """Pure state on system (x) ancilla whose ancilla trace is a channel output."""

    vector: PureState
    system_dim: int
    ancilla_dim: int

    def __post_init__(self):
        if self.vector.dim != self.system_dim * self.ancilla_dim:
            raise ValueError(
                f"vector dim {self.vector.dim} != {self.system_dim} * {self.ancilla_dim}"
            )


def state(amplitudes) -> PureState:
    """Build a :class:`PureState`, normalizing exactly-unit input only by validation."""
    return PureState(np.asarray(amplitudes, dtype=complex))


def density_of(phi: PureState) -> DensityOperator:
    """Rank-1 projector ``|phi><phi|``."""
    v = phi.amplitudes
    return DensityOperator(np.outer(v, np.conj(v)))


def fidelity(rho1: DensityOperator, rho2: DensityOperator) -> float:
    """Fidelity ``|| sqrt(rho1) sqrt(rho2) ||_1``, clamped to [0, 1].

    The trace-norm-of-product form is used instead of the nested square root
    ``Tr sqrt(sqrt(rho2) rho1 sqrt(rho2))``: the two agree in exact
    arithmetic, but the nested form squares up eigenvalue error near rank
    deficiency while the product form keeps it at machine scale.
    """
    if rho1.dim != rho2.dim:
        raise ValueError(f"dimension mismatch: {rho1.dim} vs {rho2.dim}")
    s = singular_values(psd_sqrt(rho1.matrix) @ psd_sqrt(rho2.matrix))
    return float(min(1.0, max(0.0, np.sum(s))))


def fidelity_pure(phi1: PureState, phi2: PureState) -> float:
    """``|<phi1, phi2>|`` with the conjugation on the first argument."""
    if phi1.dim != phi2.dim:
        raise ValueError(f"dimension mismatch: {phi1.dim} vs {phi2.dim}")
    return float(min(1.0, abs(np.vdot(phi1.amplitudes, phi2.amplitudes))))


def equal_up_to_global_phase(phi1: PureState, phi2: PureState, tol: float = DEFAULT_TOL) -> bool:
    """Physical equality of pure states: ``|<phi1, phi2>| = 1`` within tol."""
    return phi1.dim == phi2.dim and abs(fidelity_pure(phi1, phi2) - 1.0) <= tol


def purify(channel: "MixedUnitaryChannel", phi: PureState) -> Purification:
    """Standard purification of a channel output.

    Builds ``|Psi> = sum_k sqrt(p_k) (U_k |phi>) (x) |k>`` over an ancilla of
    dimension N (the branch count). Tracing out the ancilla of ``|Psi><Psi|``
    reproduces the channel applied to ``|phi><phi|``.
    """
    if channel.dim != phi.dim:
        raise ValueError(f"dimension mismatch: channel {channel.dim} vs state {phi.dim}")
    n = len(channel.probs)
    v = np.zeros(phi.dim * n, dtype=complex)
    for k, (p, u) in enumerate(zip(channel.probs, channel.unitaries)):
        ancilla = np.zeros(n, dtype=complex)
        ancilla[k] = 1.0
        v += np.sqrt(p) * np.kron(u @ phi.amplitudes, ancilla)
    return Purification(PureState(v), system_dim=phi.dim, ancilla_dim=n)


def _partial_trace_matrix(m: np.ndarray, keep: str, dims: tuple[int, int]) -> np.ndarray:
    d, n = dims
    if m.shape != (d * n, d * n):
        raise ValueError(f"matrix shape {m.shape} does not factor as ({d}*{n})^2")
    t = m.reshape(d, n, d, n)
    if keep == "system":
        return np.trace(t, axis1=1, axis2=3)
    if keep == "ancilla":
        return np.trace(t, axis1=0, axis2=2)
    raise ValueError(f"keep must be 'system' or 'ancilla', got {keep!r}")


def partial_trace(rho: DensityOperator, keep: str, dims: tuple[int, int]) -> DensityOperator:
    """Reduced density operator on the kept tensor factor.

    Args:
        rho: density operator on a composite of dimension ``dims[0] * dims[1]``.
        keep: ``"system"`` (first factor) or ``"ancilla"`` (second factor).
        dims: ``(system_dim, ancilla_dim)``.
    """
    return DensityOperator(_partial_trace_matrix(rho.matrix, keep, dims))


def cross_operator(psi1: Purification, psi2: Purification) -> np.ndarray:
    """System-trace of the cross projector, ``Tr_H(|Psi2><Psi1|)``.

    For purifications of two channel outputs this is the N x N operator on
    the ancilla whose trace norm equals the fidelity of the two reduced
    states, independent of which purifications were chosen.
    """
    if (psi1.system_dim, psi1.ancilla_dim) != (psi2.system_dim, psi2.ancilla_dim):
        raise ValueError("purifications live on different composite spaces")
    outer = np.outer(psi2.vector.amplitudes, np.conj(psi1.vector.amplitudes))
    return _partial_trace_matrix(outer, "ancilla", (psi1.system_dim, psi1.ancilla_dim))

"""Bundled demonstration channels used across tests and the CLI.

Each constructor returns a fresh channel object; all three double as
regression fixtures because their structural properties (diagonal products,
pair preservation, non-block-diagonal operators) are known exactly.
"""

from __future__ import annotations

import numpy as np

from .channels import MixedUnitaryChannel


def rotated_phase_mix() -> MixedUnitaryChannel:
    """Qubit mix of two rotations whose branch products are diagonal.

    Weights (1/3, 2/3). Both branch operators are non-diagonal, yet
    ``K2* K1 = diag(1, -i)`` and ``K1* K2 = diag(1, i)``, so the channel
    keeps the standard basis distinguishable and is a unitary conjugate of
    a phase-mixing channel with relative phase pi/2.
    """
    k1 = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2)
    k2 = np.array([[1, -1], [1j, 1j]], dtype=complex) / np.sqrt(2)
    return MixedUnitaryChannel(np.array([1 / 3, 2 / 3]), (k1, k2))


def uniform_phase_triple() -> MixedUnitaryChannel:
    """Uniform qubit mix of identity, quarter-phase, and half-phase branches.

    All branch products are diagonal; the channel preserves the fidelity of
    every pair anchored on a basis state.
    """
    u1 = np.eye(2, dtype=complex)
    u2 = np.diag([1, 1j]).astype(complex)
    u3 = np.diag([1, -1]).astype(complex)
    return MixedUnitaryChannel(np.array([1 / 3, 1 / 3, 1 / 3]), (u1, u2, u3))


def two_qubit_pair_mix() -> MixedUnitaryChannel:
    """Two-qubit equal mix of the identity and one dense unitary.

    The second branch operator has no block-diagonal structure, yet its
    products with the identity have the symmetric off-diagonal zeros that
    keep exactly the first two standard basis states distinguishable; the
    third and fourth basis states are not protected.
    """
    s2 = np.sqrt(2)
    w = 0.5 * np.array(
        [
            [s2, 0, (1 + 1j) / s2, (1 - 1j) / s2],
            [0, s2, (1 - 1j) / s2, (1 + 1j) / s2],
            [1, 1, -1, -1],
            [1, -1, -1j, 1j],
        ],
        dtype=complex,
    )
    return MixedUnitaryChannel(
        np.array([0.5, 0.5]), (np.eye(4, dtype=complex), w)
    )

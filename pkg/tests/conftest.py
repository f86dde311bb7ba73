"""Shared random-instance generators for the test suite."""

import numpy as np

from quanprism.channels import MixedUnitaryChannel
from quanprism.states import DensityOperator, PureState


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(n: int, rng: np.random.Generator) -> PureState:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return PureState(v / np.linalg.norm(v))


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    rank = rank or n
    weights = rng.uniform(0.1, 1.0, rank)
    weights /= weights.sum()
    m = np.zeros((n, n), dtype=complex)
    for w in weights:
        v = random_state(n, rng).amplitudes
        m += w * np.outer(v, np.conj(v))
    return DensityOperator(m)


def random_mixed_unitary(
    dim: int,
    rng: np.random.Generator,
    branches: int | None = None,
    min_prob: float = 0.05,
) -> MixedUnitaryChannel:
    n = branches or int(rng.integers(2, 5))
    probs = rng.uniform(min_prob, 1.0, n)
    probs /= probs.sum()
    return MixedUnitaryChannel(probs, tuple(haar_unitary(dim, rng) for _ in range(n)))

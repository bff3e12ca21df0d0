"""Shared fixtures: seeded generators and random instance factories."""

from typing import Tuple

import numpy as np
import pytest

from orcalc.domains.numlin.models import HermitianOperator, Subspace
from orcalc.domains.numlin.services import make_subspace


class RandomInstances:
    """Random operators and subspaces with well separated nonzero spectra."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def unitary(self, n: int) -> np.ndarray:
        q, r = np.linalg.qr(self.rng.standard_normal((n, n)) + 1j * self.rng.standard_normal((n, n)))
        return q * (np.diag(r) / np.abs(np.diag(r)))

    def spectrum(self, size: int, rank: int, signed: bool = True) -> np.ndarray:
        values = np.zeros(size)
        values[:rank] = self.rng.uniform(0.5, 2.0, rank)
        if signed:
            values[:rank] *= self.rng.choice([-1.0, 1.0], rank)
        return self.rng.permutation(values)

    def hermitian(self, n: int) -> np.ndarray:
        x = self.rng.standard_normal((n, n)) + 1j * self.rng.standard_normal((n, n))
        return (x + x.conj().T) / 2.0

    def psd(self, n: int, rank: int) -> np.ndarray:
        q = self.unitary(n)
        return (q * self.spectrum(n, rank, signed=False)) @ q.conj().T

    def matrix(self, rows: int, cols: int, rank: int) -> np.ndarray:
        left = self.rng.standard_normal((rows, rank)) + 1j * self.rng.standard_normal((rows, rank))
        right = self.rng.standard_normal((rank, cols)) + 1j * self.rng.standard_normal((rank, cols))
        return left @ right

    def subspace(self, n: int, k: int) -> Subspace:
        return make_subspace(self.unitary(n)[:, :k], n)

    def complementary_pair(self, n: int) -> Tuple[Subspace, Subspace]:
        """M, N with M ∩ N = {0}, possibly with M ∔ N a proper subspace."""
        basis = self.rng.standard_normal((n, n)) + 1j * self.rng.standard_normal((n, n))
        m_dim = int(self.rng.integers(1, n))
        n_dim = int(self.rng.integers(0, n - m_dim + 1))
        m, _ = np.linalg.qr(basis[:, :m_dim])
        k, _ = np.linalg.qr(basis[:, m_dim:m_dim + n_dim])
        return make_subspace(m, n), make_subspace(k, n)

    def weakly_complementable(self, n: int, k: int) -> Tuple[HermitianOperator, Subspace]:
        """B = Q [[a, |a|^{1/2} g], [., c]] Q^H with S spanned by the first k columns of Q."""
        q = self.unitary(n)
        v = self.unitary(k)
        spectrum = self.spectrum(k, int(self.rng.integers(0, k + 1)))
        a = (v * spectrum) @ v.conj().T
        half = (v * np.sqrt(np.abs(spectrum))) @ v.conj().T
        g = self.rng.standard_normal((k, n - k)) + 1j * self.rng.standard_normal((k, n - k))
        c = self.hermitian(n - k)
        block = np.block([[a, half @ g], [(half @ g).conj().T, c]])
        return HermitianOperator(entries=q @ block @ q.conj().T), make_subspace(q[:, :k], n)

    def positive_instance(self, n: int, k: int) -> Tuple[HermitianOperator, Subspace]:
        return HermitianOperator(entries=self.psd(n, int(self.rng.integers(1, n + 1)))), self.subspace(n, k)

    def size(self, low: int = 2, high: int = 8) -> Tuple[int, int]:
        n = int(self.rng.integers(low, high + 1))
        return n, int(self.rng.integers(1, n))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def instances(rng) -> RandomInstances:
    return RandomInstances(rng)

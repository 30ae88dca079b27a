"""Shared construction helpers for the test suite."""

from __future__ import annotations

import numpy as np

from hrris import numerics
from hrris.channel import ChannelSet


def crandn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """Standard circular complex Gaussian array, unit variance per entry."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(crandn(rng, n, n))
    # Normalize column phases so the factorization is unique.
    return q * (np.diag(r) / np.abs(np.diag(r)))


def hpd_with_spectrum(rng: np.random.Generator, eigenvalues) -> np.ndarray:
    """Hermitian PD matrix with the given spectrum in a random eigenbasis."""
    eigs = np.asarray(eigenvalues, dtype=float)
    q = random_unitary(rng, eigs.size)
    return (q * eigs) @ q.conj().T


def random_hpd(rng: np.random.Generator, n: int, floor: float = 0.1) -> np.ndarray:
    b = crandn(rng, n, n)
    return b @ b.conj().T + floor * np.eye(n)


def random_channel_set(
    rng: np.random.Generator,
    n_tx: int = 4,
    n_rx: int = 2,
    n_eve: int = 2,
    n_surface: int = 8,
    eve_error: float = 0.0,
) -> ChannelSet:
    """ChannelSet with i.i.d. Gaussian entries, bypassing the geometric model."""
    surface_to_eve_est = crandn(rng, n_eve, n_surface)
    tx_to_eve_est = crandn(rng, n_eve, n_tx)
    return ChannelSet(
        tx_to_surface=crandn(rng, n_surface, n_tx),
        surface_to_rx=crandn(rng, n_rx, n_surface),
        tx_to_rx=crandn(rng, n_rx, n_tx),
        surface_to_eve_est=surface_to_eve_est,
        tx_to_eve_est=tx_to_eve_est,
        surface_to_eve_true=surface_to_eve_est + eve_error * crandn(rng, n_eve, n_surface),
        tx_to_eve_true=tx_to_eve_est + eve_error * crandn(rng, n_eve, n_tx),
    )


def leading_minors(m: np.ndarray) -> list[float]:
    """Determinants of the leading principal submatrices, real parts.

    All positive iff a Hermitian matrix is positive definite (equivalently,
    all LDL pivots positive), which makes this a PD oracle that avoids
    eigensolvers entirely.
    """
    return [numerics.determinant(m[: k + 1, : k + 1]).real for k in range(m.shape[0])]


def cofactor_determinant(m: np.ndarray) -> complex:
    """Determinant by recursive cofactor expansion along the first row.

    Exponential-time reference implementation, independent of any pivoting.
    """
    a = np.asarray(m, dtype=np.complex128)
    n = a.shape[0]
    if n == 1:
        return complex(a[0, 0])
    total = complex(0.0)
    for j in range(n):
        if a[0, j] == 0:
            continue
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += (-1) ** j * a[0, j] * cofactor_determinant(minor)
    return total

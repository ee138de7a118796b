"""Hermitian positive semidefinite inputs, their eigendecomposition, and
random test matrices with a prescribed spectrum."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceFailure,
    NegativeSpectrumEntry,
    NonFiniteEntry,
    NotHermitian,
    NotPositiveSemidefinite,
    NotSquare,
)

HERM_TOL = 1e-10
PSD_TOL = 1e-10


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SpectralDecomposition:
    """``unitary @ diag(spectrum) @ unitary^H`` with the spectrum sorted
    in descending order and clamped to be nonnegative."""

    unitary: np.ndarray
    spectrum: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "unitary", _readonly(np.asarray(self.unitary, dtype=complex)))
        object.__setattr__(self, "spectrum", _readonly(np.asarray(self.spectrum, dtype=float)))

    @property
    def m(self) -> int:
        return self.spectrum.shape[0]

    @property
    def lambda_max(self) -> float:
        return float(self.spectrum[0])

    @property
    def lambda_min(self) -> float:
        return float(self.spectrum[-1])

    @property
    def mean_lambda(self) -> float:
        return float(np.mean(self.spectrum))

    def reconstruct(self) -> np.ndarray:
        u = self.unitary
        return (u * self.spectrum) @ u.conj().T


@dataclass(frozen=True, eq=False)
class HpsmMatrix:
    """A validated Hermitian positive semidefinite matrix.

    Build instances with :func:`validate_hpsm`; the entries are stored
    unchanged and the decomposition computed during validation is kept so
    that :func:`spectral_decompose` is free afterwards.
    """

    entries: np.ndarray
    _decomposition: SpectralDecomposition = field(repr=False, compare=False)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, HpsmMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def _fix_phases(vectors):
    # first non-negligible component of each column made real positive
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        mags = np.abs(col)
        idx = int(np.argmax(mags > 1e-10 * mags.max()))
        out[:, k] = col * (abs(col[idx]) / col[idx])
    return out


def _decompose(a, psd_tol=PSD_TOL):
    herm = 0.5 * (a + a.conj().T)
    try:
        w, v = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigensolver did not converge: {exc}") from exc
    w = w[::-1]
    v = v[:, ::-1]
    lam_max = max(float(w[0]), 0.0)
    if w[-1] < -psd_tol * lam_max or (lam_max == 0.0 and w[-1] < 0.0):
        raise NotPositiveSemidefinite(
            f"psd check: eigenvalue {w[-1]:.6g} < -{psd_tol:g} * lambda_max ({lam_max:.6g})"
        )
    # below the numerical-rank tolerance an eigenvalue is indistinguishable from 0
    w = np.where(w <= lam_max * w.size * np.finfo(float).eps, 0.0, w)
    return SpectralDecomposition(_fix_phases(v), w)


def validate_hpsm(raw) -> HpsmMatrix:
    """Check that `raw` is a finite, square, Hermitian PSD matrix.

    Eigenvalues in ``[-PSD_TOL * lambda_max, 0)`` are clamped to zero in the
    stored spectrum, as are positive ones at or below the numerical-rank
    tolerance ``M * eps * lambda_max``; the entries themselves are kept as given, so validating
    an accepted matrix again returns identical entries.

    Raises
    ------
    NotSquare, NonFiniteEntry, NotHermitian, NotPositiveSemidefinite
    """
    if isinstance(raw, HpsmMatrix):
        raw = raw.entries
    a = np.array(raw, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NotSquare(f"square check: got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        i, j = np.argwhere(~np.isfinite(a))[0]
        raise NonFiniteEntry(f"finite check: entries[{i}][{j}] = {a[i, j]}")
    scale = np.abs(a).max()
    defect = np.abs(a - a.conj().T)
    if defect.max() > HERM_TOL * scale:
        i, j = np.unravel_index(np.argmax(defect), defect.shape)
        raise NotHermitian(
            f"hermitian check: entries[{i}][{j}] = {a[i, j]} vs conj(entries[{j}][{i}]) "
            f"= {np.conj(a[j, i])}, defect {defect[i, j]:.3g} > {HERM_TOL:g} * {scale:.3g}"
        )
    dec = _decompose(a)
    return HpsmMatrix(_readonly(a), dec)


def spectral_decompose(mat: HpsmMatrix) -> SpectralDecomposition:
    """Eigendecomposition ``mat = U diag(lambda) U^H``.

    Eigenvalues come out descending. Each eigenvector is rotated so its first
    non-negligible component is real and positive; inside a degenerate
    eigenspace the basis is whatever the (deterministic) LAPACK solver
    returns, which does not affect any permanent computed downstream.
    """
    if not isinstance(mat, HpsmMatrix):
        mat = validate_hpsm(mat)
    return mat._decomposition


def haar_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR factorisation of a complex Ginibre
    matrix, with the phases of ``diag(R)`` absorbed into ``Q``."""
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def gen_from_spectrum(spectrum, seed: int) -> HpsmMatrix:
    """Return ``U diag(spectrum) U^H`` for a Haar unitary drawn from `seed`."""
    lam = np.asarray(spectrum, dtype=float).ravel()
    if lam.size == 0:
        raise NotSquare("square check: empty spectrum")
    if not np.all(np.isfinite(lam)):
        raise NonFiniteEntry("finite check: spectrum has non-finite entries")
    if np.any(lam < 0):
        raise NegativeSpectrumEntry(f"spectrum check: min entry {lam.min():g} < 0")
    u = haar_unitary(lam.size, np.random.default_rng(seed))
    a = (u * lam) @ u.conj().T
    a = 0.5 * (a + a.conj().T)
    return validate_hpsm(a)


def gen_random_hpsm(m: int, lambda_max_target: float, seed: int) -> HpsmMatrix:
    """Random HPSM whose spectrum is uniform on [0, 1], rescaled so the top
    eigenvalue equals `lambda_max_target`."""
    if m < 1:
        raise NotSquare(f"dimension check: m = {m} < 1")
    lam = np.random.default_rng(seed).uniform(0.0, 1.0, m)
    lam = lam * (lambda_max_target / lam.max())
    lam[np.argmax(lam)] = lambda_max_target
    return gen_from_spectrum(lam, seed)

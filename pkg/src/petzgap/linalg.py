"""Hermitian spectral calculus and matrix norms.

Everything downstream funnels through `eigh` here, so the zero threshold and
ordering conventions are fixed in one place: eigenvalues descending, threshold
1e-12 * max(1, lambda_max).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidInput

HERMITIAN_RTOL = 1e-12


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {m.shape}")
    return m


def check_hermitian(a: np.ndarray) -> np.ndarray:
    m = as_matrix(a)
    scale = 1.0 + (np.abs(m).max() if m.size else 0.0)
    if np.abs(m - m.conj().T).max() > HERMITIAN_RTOL * scale:
        raise InvalidInput("matrix is not Hermitian to tolerance")
    return m


@dataclass(eq=False)
class SpectralDecomposition:
    """Eigenvalues (descending) and matching orthonormal eigenvectors.

    zero_threshold is the cutoff used for rank and pseudo-inverse decisions.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    zero_threshold: float = field(default=0.0)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def rank(self) -> int:
        return int(np.sum(np.abs(self.eigenvalues) > self.zero_threshold))


def eigh(a) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix, eigenvalues descending."""
    m = check_hermitian(a)
    w, v = np.linalg.eigh(m)
    w = np.ascontiguousarray(w[::-1])
    v = np.ascontiguousarray(v[:, ::-1])
    thr = 1e-12 * max(1.0, float(np.abs(w).max()) if w.size else 0.0)
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v, zero_threshold=thr)


def spectral_apply(a, g, pseudo: bool = False) -> np.ndarray:
    """g(A) for Hermitian A via the spectral theorem.

    pseudo=True maps eigenvalues inside the zero threshold to 0 without
    evaluating g there (pseudo-inverse style). A non-finite g value on a
    retained eigenvalue raises DomainError.
    """
    dec = a if isinstance(a, SpectralDecomposition) else eigh(a)
    vals = np.empty(dec.dim, dtype=complex)
    for i, lam in enumerate(dec.eigenvalues):
        if pseudo and abs(lam) <= dec.zero_threshold:
            vals[i] = 0.0
            continue
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            y = complex(g(float(lam.real) if np.isrealobj(dec.eigenvalues) else lam))
        if not np.isfinite(y):
            raise DomainError(f"function value not finite at eigenvalue {lam}")
        vals[i] = y
    v = dec.eigenvectors
    out = (v * vals) @ v.conj().T
    if np.abs(vals.imag).max(initial=0.0) == 0.0:
        out = (out + out.conj().T) / 2.0
    return out


def psd_power(a, p: float, pseudo: bool = True) -> np.ndarray:
    """A^p for PSD A. Negative eigenvalues within roundoff are clipped to 0.

    With pseudo=True, zero eigenvalues map to 0 for every p (so p<0 gives the
    pseudo-inverse power and p=0 gives the support projector).
    """
    dec = a if isinstance(a, SpectralDecomposition) else eigh(a)
    w = dec.eigenvalues.real
    vals = np.zeros(dec.dim)
    for i, lam in enumerate(w):
        if lam <= dec.zero_threshold:
            if not pseudo and p < 0:
                raise DomainError("negative power of a singular matrix")
            if not pseudo and p == 0:
                vals[i] = 1.0
            else:
                vals[i] = 0.0
        else:
            vals[i] = lam ** p
    v = dec.eigenvectors
    out = (v * vals) @ v.conj().T
    return (out + out.conj().T) / 2.0


def support_projector(a) -> np.ndarray:
    """Orthogonal projector onto the range of a Hermitian matrix."""
    dec = a if isinstance(a, SpectralDecomposition) else eigh(a)
    mask = np.abs(dec.eigenvalues) > dec.zero_threshold
    v = dec.eigenvectors[:, mask]
    out = v @ v.conj().T
    return (out + out.conj().T) / 2.0


def schatten_norm(a, p) -> float:
    """Schatten p-norm via singular values; p in [1, inf]."""
    m = as_matrix(a)
    if p != np.inf and p < 1:
        raise InvalidInput("Schatten norm requires p >= 1")
    s = np.linalg.svd(m, compute_uv=False)
    if p == np.inf:
        return float(s[0]) if s.size else 0.0
    return float(np.sum(s ** p) ** (1.0 / p))


def trace_norm(a) -> float:
    return schatten_norm(a, 1)


def hs_norm(a) -> float:
    return float(np.linalg.norm(as_matrix(a)))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr[A^* B], conjugate-linear in A."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise InvalidInput(f"shape mismatch {ma.shape} vs {mb.shape}")
    return complex(np.trace(ma.conj().T @ mb))


def matrix_to_json(a) -> dict:
    """Row-major {dim, re, im} encoding used by all on-disk matrices."""
    m = as_matrix(a)
    return {
        "dim": m.shape[0],
        "re": [[float(x) for x in row] for row in m.real],
        "im": [[float(x) for x in row] for row in m.imag],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad matrix JSON: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise InvalidInput("matrix JSON shape mismatch")
    return re + 1j * im

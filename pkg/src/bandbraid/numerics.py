"""Dense complex matrix kernel for fixed small dimensions (2, 4, 8).

Eigendecomposition goes through the characteristic polynomial
(Faddeev-LeVerrier) and Durand-Kerner root finding, then inverse iteration
for the eigenvectors. This gives analytic-grade accuracy at the tiny
dimensions used here without pulling in a general QR-algorithm eigensolver;
linear solves and norms are delegated to numpy.

Conventions:
  * eigenvalues are ordered by descending imaginary part (real part breaks
    ties, ascending) unless a previous decomposition is supplied, in which
    case eigenpairs are reordered to follow it by maximal eigenvector
    overlap (band continuity tracking);
  * right eigenvectors are unit columns, left eigenvectors are rows scaled
    to biorthonormality <L_i|R_j> = delta_ij;
  * qr_unitary fixes the gauge by making diag(R) real positive, which makes
    the factorization of a full-rank matrix unique and reruns bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimension, NonConvergence, NotHermitian, RankDeficient

_DK_MAX_ITER = 500
_TRACK_MIN_OVERLAP = 0.0  # eig() reorders unconditionally; callers gate on overlap


def as_matrix(m) -> np.ndarray:
    """Validate and return a square, finite, complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidDimension(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidDimension("matrix has non-finite entries")
    return a


@dataclass
class EigenDecomposition:
    """Eigenvalues with unit right eigenvectors (columns) and optional
    biorthonormal left eigenvectors (rows)."""

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def residual(self, m: np.ndarray) -> float:
        r = m @ self.right - self.right * self.eigenvalues[None, :]
        return float(np.max(np.linalg.norm(r, axis=0)))


def char_poly(m: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients, highest power first."""
    a = as_matrix(m)
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    mk = np.array(a)
    for k in range(1, n + 1):
        ck = -np.trace(mk) / k
        coeffs[k] = ck
        if k < n:
            mk = a @ (mk + ck * np.eye(n))
    return coeffs


def _poly_eval(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z)
    for c in coeffs:
        out = out * z + c
    return out


def _poly_deriv(coeffs: np.ndarray) -> np.ndarray:
    n = len(coeffs) - 1
    return coeffs[:-1] * np.arange(n, 0, -1)


def poly_roots(coeffs: np.ndarray) -> np.ndarray:
    """All roots of a monic polynomial by Durand-Kerner, Newton-polished.

    Deterministic: the starting points are a fixed asymmetric ring scaled by
    the Cauchy bound.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    n = len(coeffs) - 1
    if n == 0:
        return np.array([], dtype=complex)
    if n == 1:
        return np.array([-coeffs[1] / coeffs[0]])
    coeffs = coeffs / coeffs[0]
    radius = 1.0 + float(np.max(np.abs(coeffs[1:])))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.7))
    tol = 1e-14 * max(1.0, radius)
    for _ in range(_DK_MAX_ITER):
        p = _poly_eval(coeffs, z)
        denom = np.ones(n, dtype=complex)
        for j in range(n):
            diff = z[j] - np.delete(z, j)
            small = np.abs(diff) < 1e-30
            diff[small] = 1e-30
            denom[j] = np.prod(diff)
        step = p / denom
        z = z - step
        if np.max(np.abs(step)) < tol:
            break
    else:
        resid = float(np.max(np.abs(_poly_eval(coeffs, z))))
        raise NonConvergence(
            f"Durand-Kerner did not converge in {_DK_MAX_ITER} iterations "
            f"(residual {resid:.3e})")
    dcoeffs = _poly_deriv(coeffs)
    for _ in range(3):
        dp = _poly_eval(dcoeffs, z)
        ok = np.abs(dp) > 1e-20
        z[ok] = z[ok] - _poly_eval(coeffs, z[ok]) / dp[ok]
    return _merge_root_clusters(z, radius)


def _merge_root_clusters(z: np.ndarray, scale: float) -> np.ndarray:
    # A p-fold root is recovered by DK as a ring of p points around the true
    # value with radius ~eps^(1/p); their mean restores full accuracy.
    tol = 1e-6 * max(1.0, scale)
    z = np.array(z)
    used = np.zeros(len(z), dtype=bool)
    for i in range(len(z)):
        if used[i]:
            continue
        cluster = [i]
        for j in range(i + 1, len(z)):
            if not used[j] and abs(z[j] - z[i]) < tol:
                cluster.append(j)
                used[j] = True
        if len(cluster) > 1:
            z[cluster] = np.mean(z[cluster])
    return z


def _inverse_iteration(m: np.ndarray, ev: complex, rng: np.random.Generator,
                       avoid: list[np.ndarray]) -> tuple[np.ndarray, complex]:
    n = m.shape[0]
    scale = max(1.0, float(np.linalg.norm(m, ord="fro")))
    shift = ev
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    for u in avoid:
        b = b - u * np.vdot(u, b)
    b = b / np.linalg.norm(b)
    v = b
    for attempt in range(6):
        a = m - (shift + attempt * 1e-12 * scale) * np.eye(n)
        try:
            v_new = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            continue
        nv = np.linalg.norm(v_new)
        if not np.isfinite(nv) or nv == 0:
            continue
        v = v_new / nv
        for u in avoid:
            v = v - u * np.vdot(u, v)
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            # random vector was (nearly) inside the deflated span, redraw
            b = rng.normal(size=n) + 1j * rng.normal(size=n)
            continue
        v = v / nv
        ev_new = complex(np.vdot(v, m @ v))
        resid = np.linalg.norm(m @ v - ev_new * v)
        if resid < 1e-12 * scale:
            return v, ev_new
        b = v
        shift = ev_new if abs(ev_new - ev) < 1e-3 * scale else shift
    return v, complex(np.vdot(v, m @ v))


def match_order(prev_vectors: np.ndarray, new_vectors: np.ndarray) -> np.ndarray:
    """Permutation p with new_vectors[:, p[i]] continuing prev_vectors[:, i].

    Greedy global-max assignment on |<prev_i|new_j>|; greedy selection
    guarantees a bijection.
    """
    overlaps = np.abs(prev_vectors.conj().T @ new_vectors)
    n = overlaps.shape[0]
    perm = np.full(n, -1)
    work = overlaps.copy()
    for _ in range(n):
        i, j = np.unravel_index(np.argmax(work), work.shape)
        perm[i] = j
        work[i, :] = -1.0
        work[:, j] = -1.0
    return perm


def eig(m, *, left: bool = False, prev: EigenDecomposition | None = None) -> EigenDecomposition:
    """Eigendecomposition via characteristic polynomial + inverse iteration.

    With ``prev`` given, eigenpairs are reordered to continue the previous
    decomposition (maximal-overlap assignment); otherwise ordering is by
    descending imaginary part, real part ascending on ties.
    """
    a = as_matrix(m)
    n = a.shape[0]
    scale = max(1.0, float(np.linalg.norm(a, ord="fro")))
    values = poly_roots(char_poly(a))

    rng = np.random.default_rng(0x5eed)
    vectors = np.zeros((n, n), dtype=complex)
    refined = np.zeros(n, dtype=complex)
    for i in range(n):
        # deflate against vectors already found for (numerically) equal roots
        avoid = [vectors[:, j] for j in range(i) if abs(values[j] - values[i]) < 1e-8 * scale]
        v, ev = _inverse_iteration(a, values[i], rng, avoid)
        vectors[:, i] = v
        refined[i] = ev if abs(ev - values[i]) < 1e-6 * scale else values[i]

    resid = np.max(np.linalg.norm(a @ vectors - vectors * refined[None, :], axis=0))
    if resid > 1e-8 * scale:
        raise NonConvergence(
            f"eigenpair residual {resid:.3e} exceeds 1e-8 * scale ({scale:.3e})")

    if prev is not None:
        order = match_order(prev.right, vectors)
    else:
        key = sorted(range(n), key=lambda i: (-refined[i].imag, refined[i].real))
        order = np.array(key)
    values = refined[order]
    vectors = vectors[:, order]

    lefts = None
    if left:
        lefts = np.zeros((n, n), dtype=complex)
        for i in range(n):
            avoid = [lefts[j, :].conj() for j in range(i)
                     if abs(values[j] - values[i]) < 1e-8 * scale]
            w, _ = _inverse_iteration(a.conj().T, np.conj(values[i]), rng, avoid)
            row = w.conj()
            norm = row @ vectors[:, i]
            if abs(norm) < 1e-14:
                raise NonConvergence(
                    f"left/right eigenvectors nearly orthogonal at eigenvalue {values[i]}")
            lefts[i, :] = row / norm
    return EigenDecomposition(values, vectors, lefts)


def expm_with_path(m, t: float) -> tuple[np.ndarray, str]:
    """exp(-i m t) and which evaluation path produced it.

    The spectral route V exp(-i E t) V^-1 is used while cond(V) <= 1e8;
    otherwise falls back to scaling-and-squaring on a Taylor core.
    """
    a = as_matrix(m)
    if t < 0:
        raise InvalidDimension("t must be >= 0")
    try:
        dec = eig(a)
        cond = np.linalg.cond(dec.right)
        if cond <= 1e8:
            inv = np.linalg.solve(dec.right, np.eye(a.shape[0], dtype=complex))
            out = (dec.right * np.exp(-1j * dec.eigenvalues * t)[None, :]) @ inv
            return out, "eig"
    except NonConvergence:
        pass
    return _expm_squaring(-1j * a * t), "squaring"


def expm(m, t: float) -> np.ndarray:
    """exp(-i m t); see expm_with_path for the path selection rule."""
    return expm_with_path(m, t)[0]


def _expm_squaring(b: np.ndarray) -> np.ndarray:
    n = b.shape[0]
    norm = float(np.linalg.norm(b, ord=1))
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    a = b / (2.0 ** squarings)
    out = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 60):
        term = term @ a / k
        out = out + term
        if np.linalg.norm(term, ord=1) < 1e-18 * max(1.0, np.linalg.norm(out, ord=1)):
            break
    for _ in range(squarings):
        out = out @ out
    return out


def qr_unitary(m) -> tuple[np.ndarray, np.ndarray]:
    """Householder QR with diag(R) real positive.

    Raises RankDeficient when a pivot column norm falls under 1e-12.
    """
    a = as_matrix(m).copy()
    n = a.shape[0]
    q = np.eye(n, dtype=complex)
    for j in range(n):
        x = a[j:, j]
        nx = float(np.linalg.norm(x))
        if nx < 1e-12:
            raise RankDeficient(f"pivot norm {nx:.3e} in column {j}")
        phase = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
        alpha = -phase * nx
        v = x.copy()
        v[0] -= alpha
        nv = float(np.linalg.norm(v))
        if nv > 1e-300:
            v = v / nv
            a[j:, j:] -= 2.0 * np.outer(v, v.conj() @ a[j:, j:])
            q[:, j:] -= 2.0 * np.outer(q[:, j:] @ v, v.conj())
    r = a
    d = np.diagonal(r).copy()
    phases = np.where(np.abs(d) > 1e-300, d / np.abs(d), 1.0)
    q = q * phases[None, :]
    r = np.triu(r * np.conj(phases)[:, None])
    return q, r


def hermitian_eigs(m) -> tuple[np.ndarray, np.ndarray]:
    """Full spectrum of a Hermitian matrix by cyclic complex Jacobi.

    Returns (values ascending, unitary eigenvector columns). Input is
    checked Hermitian to 1e-10 relative.
    """
    a = as_matrix(m)
    scale = max(1.0, float(np.linalg.norm(a, ord="fro")))
    if np.linalg.norm(a - a.conj().T, ord="fro") > 1e-10 * scale:
        raise NotHermitian("matrix is not Hermitian to 1e-10")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(60):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diagonal(a))) ** 2))
        if off <= 1e-14 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                phi = np.angle(apq)
                app = a[p, p].real
                aqq = a[q, q].real
                diff = app - aqq
                if abs(diff) < 1e-300:
                    theta = np.pi / 4
                else:
                    theta = 0.5 * np.arctan2(2.0 * abs(apq), diff)
                c = np.cos(theta)
                s = np.sin(theta)
                jp = np.eye(n, dtype=complex)
                jp[p, p] = c
                jp[p, q] = -s * np.exp(1j * phi)
                jp[q, p] = s * np.exp(-1j * phi)
                jp[q, q] = c
                a = jp.conj().T @ a @ jp
                v = v @ jp
    vals = np.real(np.diagonal(a))
    order = np.argsort(vals)
    return vals[order], v[:, order]


def hermitian_max_eig(m) -> float:
    """Largest eigenvalue of a Hermitian matrix (Jacobi spectrum maximum)."""
    vals, _ = hermitian_eigs(m)
    return float(vals[-1])


def hermitian_sqrt_psd(m, *, clamp: float = 1e-9) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in [-clamp, 0) are clamped to 0 (expected floating-point
    undershoot); anything below -clamp raises ValueError in the caller's
    terms, so the raw minimum is surfaced in the message.
    """
    vals, vecs = hermitian_eigs(m)
    if vals[0] < -clamp:
        raise ValueError(f"matrix not PSD within tolerance (min eigenvalue {vals[0]:.3e})")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)[None, :]) @ vecs.conj().T

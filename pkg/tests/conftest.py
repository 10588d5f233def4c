"""Shared fixtures and independent oracles for the test suite."""
from __future__ import annotations

import numpy as np
import pytest

from bandbraid import circuit, pipeline
from bandbraid.twister import KnotClass, TwisterSpec

# reference parameter points
POINT_HOPF_2B = (0.5338, 0.6)
POINT_UNKNOT_2B = (1.273, 0.6)
POINT_UNLINK_2B = (1.8889, 0.6)
POINT_SOLOMON = (-0.5, -0.4)
POINT_HOPF_CHAIN = (2.0, 1.1)

ANCHORS_4B = [
    (1.5, 1.0, KnotClass.HOPF_CHAIN),
    (1.5, 0.5, KnotClass.SOLOMON_KNOT),
    (1.5, -0.08, KnotClass.HOPF_LINK_PLUS_UNLINK),
    (1.5, -3.0, KnotClass.UNKNOT),
    (1.5, -0.18, KnotClass.UNKNOT_PLUS_UNLINK),
    (1.5, -1.0, KnotClass.DOUBLE_UNLINKS),
    (1.0, -1.5, KnotClass.HOPF_LINK),
    (1.5, -1.8, KnotClass.UNLINK),
]

EXACT = circuit.ShotConfig(mode="exact")


def jacobi_svd_singular_values(a: np.ndarray) -> np.ndarray:
    """One-sided Jacobi SVD: orthogonalize column pairs of a working copy
    until convergence; singular values are the final column norms.
    Independent of the package's Hermitian eigensolver."""
    u = np.array(a, dtype=complex)
    n = u.shape[1]
    for _ in range(60):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = np.real(np.vdot(u[:, p], u[:, p]))
                aqq = np.real(np.vdot(u[:, q], u[:, q]))
                apq = np.vdot(u[:, p], u[:, q])
                off = max(off, abs(apq))
                if abs(apq) < 1e-30:
                    continue
                # remove the phase, then a real rotation orthogonalizes
                v2 = np.exp(-1j * np.angle(apq)) * u[:, q]
                theta = 0.5 * np.arctan2(2 * abs(apq), aqq - app)
                c, s = np.cos(theta), np.sin(theta)
                u[:, p], u[:, q] = c * u[:, p] - s * v2, s * u[:, p] + c * v2
        if off < 1e-14 * max(1.0, float(np.linalg.norm(a)) ** 2):
            break
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


def random_diagonalizable(rng, dim: int, spread: float = 2.0):
    """(matrix, eigenvalues): well-separated spectrum, generic eigenvectors."""
    while True:
        vals = rng.normal(scale=spread, size=dim) + 1j * rng.normal(scale=spread, size=dim)
        gaps = [abs(a - b) for i, a in enumerate(vals) for b in vals[i + 1:]]
        if min(gaps) > 0.3:
            break
    v = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = v @ np.diag(vals) @ np.linalg.inv(v)
    return m, vals


def match_unordered(got, want) -> float:
    """Max distance after greedy set matching."""
    got = list(np.asarray(got, dtype=complex))
    worst = 0.0
    for w in np.asarray(want, dtype=complex):
        j = min(range(len(got)), key=lambda i: abs(got[i] - w))
        worst = max(worst, abs(got[j] - w))
        got.pop(j)
    return worst


def records_from_state(state: np.ndarray, n_bands: int, *, k: float = 0.0,
                       band: int = 0) -> list:
    """Exact postselected records for a pure system state (ancilla never
    fires), bypassing the embedding; used to test reconstruction alone."""
    state = np.asarray(state, dtype=complex)
    state = state / np.linalg.norm(state)
    n_sys = 1 if n_bands == 2 else 2
    records = []
    for setting in circuit.protocol_settings(n_bands):
        rot = np.eye(1, dtype=complex)
        for lab in circuit.setting_rotations(n_bands, setting):
            rot = np.kron(rot, circuit.rotation_gate(lab))
        out = rot @ state
        probs = np.abs(out) ** 2
        counts = {f"0{format(i, f'0{n_sys}b')}": float(p)
                  for i, p in enumerate(probs) if p > 0}
        records.append(circuit.MeasurementRecord(
            k=k, band=band, setting=setting, counts=counts, discarded_fraction=0.0))
    return records


@pytest.fixture(scope="session")
def hopf_run():
    """Exact-mode protocol result at the two-band Hopf-link point."""
    spec = TwisterSpec.concrete(2, *POINT_HOPF_2B)
    return pipeline.run_simulation(spec, cfg=EXACT)


@pytest.fixture(scope="session")
def solomon_run():
    """Exact-mode protocol result at the four-band Solomon's-knot point."""
    spec = TwisterSpec.concrete(4, *POINT_SOLOMON)
    return pipeline.run_simulation(spec, cfg=EXACT)


@pytest.fixture(scope="session")
def hopf_chain_run():
    spec = TwisterSpec.concrete(4, *POINT_HOPF_CHAIN)
    return pipeline.run_simulation(spec, cfg=EXACT)

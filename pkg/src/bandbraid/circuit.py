"""Hardware-protocol emulation: rotated non-unitary evolution, block
embedding, statevector measurement with ancilla postselection.

Qubit order is (ancilla, system...): the ancilla is the first (most
significant) bit of every bitstring. Postselecting the ancilla on |0>
recovers u(k) * U_H(k) acting on the system register:

    U (|0> (x) |s>) = |0> (x) u U_H |s>  +  |1> (x) C |s>,

with u^-2 the top eigenvalue of U_H^dag U_H and C = sqrt(I - u^2 U_H^dag U_H).
U is the Q factor of a Householder QR of the block matrix [[u U_H, I], [C, I]].

Measurement settings: each record corresponds to one circuit. For N = 2 the
setting is the Pauli label measured on the single system qubit ("x", "y",
"z"). For N = 4 a setting is "<family>:<alpha>" where family selects the
conditional observable (A / B sector of qubit 2, "-"-conditioned or
unconditioned qubit-2 Pauli) and alpha in {x, y, z} selects the basis
rotation, applied only to the qubit being read out:

    A:a, B:a   rotate qubit 3;  values P(000)-P(001), P(010)-P(011)
    mAB:a      rotate qubit 2;  value  P(001)-P(011)
    pmAB:a     rotate qubit 2;  value  P(000)+P(001)-P(010)-P(011)

That is 3 circuits per (k, band) for N = 2 and 12 for N = 4, matching the
reference counts of 600 and 4800 circuits per run at 100 k-points.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import (AllShotsDiscarded, InvalidDimension, ProjectionDegenerate,
                     PSDViolation, WeakSelectivity)
from .twister import TwisterSpec, build_hamiltonian

DEFAULT_SHOTS = 40000
DEFAULT_LAMBDA_SAMPLES = 720
OVERLAP_THRESHOLD = 0.99

# R^y(-pi/2) maps a sigma_z measurement to sigma_x, R^x(+pi/2) to sigma_y.
_SQ2 = 1.0 / np.sqrt(2.0)
ROTATIONS = {
    "x": np.array([[1, 1], [-1, 1]], dtype=complex) * _SQ2,
    "y": np.array([[1, -1j], [-1j, 1]], dtype=complex) * _SQ2,
    "z": np.eye(2, dtype=complex),
}

SETTINGS_2BAND = ("x", "y", "z")
SETTINGS_4BAND = tuple(f"{fam}:{a}" for fam in ("A", "B", "mAB", "pmAB") for a in "xyz")


@dataclass(frozen=True)
class ShotConfig:
    shots: int = DEFAULT_SHOTS
    seed: int = 0
    mode: str = "exact"

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise InvalidDimension(f"unknown mode {self.mode!r}")
        if self.mode == "sampled" and self.shots < 1:
            raise InvalidDimension("sampled mode needs shots >= 1")


@dataclass(frozen=True)
class EmbeddedUnitary:
    u_matrix: np.ndarray
    scale_u: float


@dataclass(frozen=True)
class MeasurementRecord:
    k: float
    band: int
    setting: str
    counts: dict
    discarded_fraction: float

    def probabilities(self) -> dict:
        total = sum(self.counts.values())
        if total <= 0:
            raise AllShotsDiscarded("record has no retained weight")
        return {b: c / total for b, c in self.counts.items()}


def rotation_gate(alpha: str) -> np.ndarray:
    try:
        return ROTATIONS[alpha]
    except KeyError:
        raise InvalidDimension(f"unknown rotation label {alpha!r}") from None


def nonunitary_evolution(h, t: float, lam: float = 0.0) -> np.ndarray:
    """exp(-i e^{i lam} H t): evolution under the phase-rotated Hamiltonian."""
    return numerics.expm(np.exp(1j * lam) * numerics.as_matrix(h), t)


def _evolved_state(dec: numerics.EigenDecomposition, coeffs: np.ndarray,
                   lam: float, t: float) -> np.ndarray:
    amp = np.exp(-1j * np.exp(1j * lam) * dec.eigenvalues * t) * coeffs
    psi = dec.right @ amp
    norm = np.linalg.norm(psi)
    if norm == 0 or not np.isfinite(norm):
        return np.zeros_like(psi)
    return psi / norm


def _sweep_overlaps(dec: numerics.EigenDecomposition, coeffs: np.ndarray,
                    target: np.ndarray, t: float, n_samples: int) -> tuple[np.ndarray, np.ndarray]:
    lams = 2 * np.pi * np.arange(n_samples) / n_samples
    # (n_samples, n) matrix of evolved coefficient vectors, one row per angle
    amps = np.exp(-1j * np.outer(np.exp(1j * lams), dec.eigenvalues) * t) * coeffs
    psis = amps @ dec.right.T
    norms = np.linalg.norm(psis, axis=1)
    good = np.isfinite(norms) & (norms > 0)
    overlaps = np.zeros(n_samples)
    overlaps[good] = np.abs(psis[good].conj() @ target) / norms[good]
    return lams, overlaps


def select_rotation_angle_for_target(h, target: np.ndarray, t: float,
                                     n_samples: int = DEFAULT_LAMBDA_SAMPLES,
                                     *, min_overlap: float = OVERLAP_THRESHOLD,
                                     dec: numerics.EigenDecomposition | None = None,
                                     ) -> tuple[float, float]:
    """(lambda_opt, best overlap) maximizing |<psi(lambda)|target>| on the
    sweep lambda = 2 pi s / n_samples; ties resolve to the smallest lambda."""
    if n_samples < 2:
        raise InvalidDimension("n_samples must be >= 2")
    a = numerics.as_matrix(h)
    if dec is None:
        dec = numerics.eig(a)
    e0 = np.zeros(a.shape[0], dtype=complex)
    e0[0] = 1.0
    coeffs = np.linalg.solve(dec.right, e0)
    lams, overlaps = _sweep_overlaps(dec, coeffs, target, t, n_samples)
    best = int(np.argmax(overlaps))
    if overlaps[best] < min_overlap:
        raise WeakSelectivity(
            f"best overlap {overlaps[best]:.4f} < {min_overlap} over {n_samples} "
            "angles; increase t or the sweep resolution")
    return float(lams[best]), float(overlaps[best])


def select_rotation_angle(spec: TwisterSpec, k: float, t: float, band: int,
                          n_samples: int = DEFAULT_LAMBDA_SAMPLES) -> float:
    """Optimal global phase rotation angle to prepare the given band at k.

    Bands are indexed in the default eig order (descending Im E).
    """
    if not 0 <= band < spec.n_bands:
        raise InvalidDimension("band index out of range")
    h = build_hamiltonian(spec, k)
    dec = numerics.eig(h)
    lam, _ = select_rotation_angle_for_target(h, dec.right[:, band], t, n_samples)
    return lam


def block_embed(u_h) -> EmbeddedUnitary:
    """Dilate a (non-unitary) operator into a unitary on one extra qubit."""
    a = numerics.as_matrix(u_h)
    n = a.shape[0]
    gram = a.conj().T @ a
    top = numerics.hermitian_max_eig(gram)
    if top <= 0:
        raise PSDViolation("U_H^dag U_H has no positive eigenvalue")
    scale_u = 1.0 / np.sqrt(top)
    try:
        c = numerics.hermitian_sqrt_psd(np.eye(n) - scale_u ** 2 * gram, clamp=1e-9)
    except ValueError as exc:
        raise PSDViolation(str(exc)) from None
    block = np.zeros((2 * n, 2 * n), dtype=complex)
    block[:n, :n] = scale_u * a
    block[:n, n:] = np.eye(n)
    block[n:, :n] = c
    block[n:, n:] = np.eye(n)
    q, _ = numerics.qr_unitary(block)
    return EmbeddedUnitary(u_matrix=q, scale_u=float(scale_u))


def apply_measurement_rotations(u: EmbeddedUnitary | np.ndarray, settings) -> np.ndarray:
    """(I (x) A_2 (x) ... (x) A_{M+1}) U with one rotation label per system qubit."""
    mat = u.u_matrix if isinstance(u, EmbeddedUnitary) else numerics.as_matrix(u)
    dim = mat.shape[0]
    n_sys = int(np.log2(dim)) - 1
    labels = list(settings)
    if len(labels) != n_sys:
        raise InvalidDimension(f"need {n_sys} rotation labels, got {len(labels)}")
    rot = np.eye(2, dtype=complex)
    for lab in labels:
        rot = np.kron(rot, rotation_gate(lab))
    return rot @ mat


def simulate_measurement(u_rot, cfg: ShotConfig, *, k: float = 0.0, band: int = 0,
                         setting: str = "z",
                         seed: int | np.random.SeedSequence | None = None) -> MeasurementRecord:
    """Measure U|0...0> in the computational basis and postselect ancilla 0.

    Exact mode records the renormalized retained probabilities; sampled mode
    draws cfg.shots multinomially (seeded) and postselects the counts.
    """
    mat = numerics.as_matrix(u_rot)
    dim = mat.shape[0]
    n_qubits = int(np.log2(dim))
    if 2 ** n_qubits != dim:
        raise InvalidDimension("unitary dimension is not a power of two")
    amps = mat[:, 0]
    probs = np.abs(amps) ** 2
    probs = probs / probs.sum()
    half = dim // 2
    retained = probs[:half]

    if cfg.mode == "exact":
        kept = retained.sum()
        if kept <= 1e-300:
            raise AllShotsDiscarded("postselection retained zero probability")
        counts = {format(i, f"0{n_qubits}b"): float(retained[i] / kept)
                  for i in range(half) if retained[i] > 0}
        discarded = float(1.0 - kept)
    else:
        rng = np.random.default_rng(cfg.seed if seed is None else seed)
        draw = rng.multinomial(cfg.shots, probs)
        kept = int(draw[:half].sum())
        if kept == 0:
            raise AllShotsDiscarded("all shots fell on ancilla 1")
        counts = {format(i, f"0{n_qubits}b"): int(draw[i])
                  for i in range(half) if draw[i] > 0}
        discarded = float((cfg.shots - kept) / cfg.shots)
    return MeasurementRecord(k=float(k), band=int(band), setting=setting,
                             counts=counts, discarded_fraction=discarded)


def setting_rotations(n_bands: int, setting: str) -> tuple[str, ...]:
    """Per-system-qubit rotation labels realizing a measurement setting."""
    if n_bands == 2:
        return (setting,)
    fam, alpha = setting.split(":")
    if fam in ("A", "B"):
        return ("z", alpha)     # read out qubit 3, condition on qubit 2
    return (alpha, "z")         # read out qubit 2 (mAB conditions on qubit 3)


def protocol_settings(n_bands: int) -> tuple[str, ...]:
    if n_bands == 2:
        return SETTINGS_2BAND
    if n_bands == 4:
        return SETTINGS_4BAND
    raise InvalidDimension("built-in observable sets exist for N = 2 and 4 only")


def record_seed(master: int, k_index: int, band: int, setting_index: int) -> np.random.SeedSequence:
    """Per-record seed, independent of job scheduling order."""
    return np.random.SeedSequence([master, k_index, band, setting_index])


@dataclass
class ProtocolRun:
    """All measurement records of one protocol execution plus the per-(k, band)
    rotation angles and the band-tracked target eigenvectors at both ends."""

    spec: TwisterSpec
    k_grid: np.ndarray
    t: float
    cfg: ShotConfig
    records: list = field(default_factory=list)
    lambdas: dict = field(default_factory=dict)           # (k_index, band) -> angle
    states_start: np.ndarray | None = None                # eig eigenvectors at k = 0
    states_end: np.ndarray | None = None                  # tracked eigenvectors at k = 2 pi

    def records_for(self, k_index: int, band: int) -> list:
        k = float(self.k_grid[k_index])
        return [r for r in self.records if r.band == band and r.k == k]


def _tracked_decompositions(spec: TwisterSpec, k_grid: np.ndarray):
    """Eigendecompositions along the grid with band-continuity ordering and
    the k = 0 bands labeled in braid-diagram order."""
    from .braidtrace import initial_band_order  # deferred, avoids cycle

    decs = []
    prev = None
    for k in k_grid:
        dec = numerics.eig(build_hamiltonian(spec, k), prev=prev)
        decs.append(dec)
        prev = dec
    lam0 = _theory_trajectory_values(spec, decs[0])
    order = initial_band_order(lam0)
    for i, dec in enumerate(decs):
        decs[i] = numerics.EigenDecomposition(
            dec.eigenvalues[order], dec.right[:, order], None)
    return decs


def _theory_trajectory_values(spec: TwisterSpec, dec: numerics.EigenDecomposition) -> np.ndarray:
    """Projected-trajectory values of exact eigenstates, used only to fix the
    k = 0 band labeling. For N = 2 the energies already play that role."""
    if spec.n_bands == 2:
        return dec.eigenvalues.copy()
    denom = dec.right[3, :]
    if np.any(np.abs(denom) < 1e-12):
        raise ProjectionDegenerate(
            "an eigenstate has (near-)zero final component at k = 0; "
            "the stereographic band labeling is undefined here")
    return dec.right[2, :] / denom


def _jobs_for_band(args):
    spec_dict, k_grid, t, cfg, band, lam_by_k, k_indices = args
    spec = TwisterSpec.from_dict(spec_dict)
    settings = protocol_settings(spec.n_bands)
    out = []
    for ki in k_indices:
        k = float(k_grid[ki])
        h = build_hamiltonian(spec, k)
        u_h = nonunitary_evolution(h, t, lam_by_k[ki])
        embedded = block_embed(u_h)
        for si, setting in enumerate(settings):
            u_rot = apply_measurement_rotations(
                embedded, setting_rotations(spec.n_bands, setting))
            seed = record_seed(cfg.seed, ki, band, si) if cfg.mode == "sampled" else None
            rec = simulate_measurement(u_rot, cfg, k=k, band=band,
                                       setting=setting, seed=seed)
            out.append(rec)
    return out


def run_protocol(spec: TwisterSpec, k_grid, t: float, cfg: ShotConfig,
                 *, n_samples: int = DEFAULT_LAMBDA_SAMPLES,
                 workers: int = 1) -> ProtocolRun:
    """Full measurement protocol over the k-grid.

    For every (k, band): pick the rotation angle by the classical sweep,
    evolve, embed, and measure one record per setting. Bands follow the
    continuity tracking from k = 0, where they are labeled in braid-diagram
    order. Record counts: 3 * N * len(k_grid) for N = 2 (600 at 100 points),
    12 * N_k * 4 for N = 4 (4800).
    """
    protocol_settings(spec.n_bands)  # validate N before any work
    k_grid = np.asarray(k_grid, dtype=float)
    decs = _tracked_decompositions(spec, k_grid)
    run = ProtocolRun(spec=spec, k_grid=k_grid, t=t, cfg=cfg)
    run.states_start = decs[0].right.copy()
    run.states_end = decs[-1].right.copy()

    lam_table: dict[int, dict[int, float]] = {band: {} for band in range(spec.n_bands)}
    for ki, k in enumerate(k_grid):
        h = build_hamiltonian(spec, k)
        for band in range(spec.n_bands):
            target = decs[ki].right[:, band]
            lam, _ = select_rotation_angle_for_target(h, target, t, n_samples,
                                                      dec=decs[ki])
            lam_table[band][ki] = lam
            run.lambdas[(ki, band)] = lam

    jobs = []
    for band in range(spec.n_bands):
        jobs.append((spec.to_dict(), k_grid, t, cfg, band, lam_table[band],
                     list(range(len(k_grid)))))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for recs in pool.map(_jobs_for_band, jobs):
                run.records.extend(recs)
    else:
        for job in jobs:
            run.records.extend(_jobs_for_band(job))
    run.records.sort(key=lambda r: (r.k, r.band, protocol_settings(spec.n_bands).index(r.setting)))
    return run


def save_records(path, records) -> None:
    """One JSON object per line: k, band, setting, counts, discarded_fraction."""
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps({
                "k": r.k, "band": r.band, "setting": r.setting,
                "counts": r.counts, "discarded_fraction": r.discarded_fraction,
            }) + "\n")


def load_records(path) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            out.append(MeasurementRecord(
                k=float(d["k"]), band=int(d["band"]), setting=str(d["setting"]),
                counts={str(b): c for b, c in d["counts"].items()},
                discarded_fraction=float(d["discarded_fraction"])))
    return out

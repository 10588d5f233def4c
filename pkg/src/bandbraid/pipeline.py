"""End-to-end orchestration: measure (or diagonalize), reconstruct, wind,
extract the braid word, and compute knot invariants.

Two trajectory sources are supported. ``protocol`` runs the full circuit
emulation (rotation-angle selection, block embedding, measurement,
postselection, Bloch reconstruction). ``spectrum`` bypasses the circuit and
uses exact tracked eigenstates; it is the reference route for parameter
points where no rotation angle reaches the selectivity threshold (the
hardware protocol cannot prepare those bands either).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import braidtrace, circuit, knots, reconstruct
from .errors import ClassificationError, ProtocolError
from .twister import KnotClass, TwisterSpec

DEFAULT_K_POINTS = 100
DEFAULT_T = 20.0


def k_grid(n_points: int = DEFAULT_K_POINTS) -> np.ndarray:
    """Closed uniform grid over [0, 2 pi] with n_points samples."""
    return np.linspace(0.0, 2 * np.pi, n_points)


@dataclass
class SimulationResult:
    spec: TwisterSpec
    k_grid: np.ndarray
    t: float
    cfg: circuit.ShotConfig
    source: str
    states: list                      # per band: list of ReconstructedState
    trajectories: braidtrace.TrajectorySeries
    trace: braidtrace.WindingTrace
    shifted: braidtrace.WindingTrace
    crossings: braidtrace.CrossingReport
    permutation: braidtrace.PermutationMatrix
    winding: np.ndarray
    braid_word: braidtrace.BraidWord | None
    braid_error: str | None
    jones: knots.LaurentPoly | None
    alexander: knots.LaurentPoly | None
    writhe: int | None
    knot_class: KnotClass | None
    records: list = field(default_factory=list)
    lambdas: dict = field(default_factory=dict)

    @property
    def winding_2band(self) -> float:
        return float(self.trace.final((0, 1))) if self.spec.n_bands == 2 else float("nan")


def reconstruct_run(run: circuit.ProtocolRun) -> list:
    """Per-band ReconstructedState series from a protocol run's records."""
    spec = run.spec
    exact = run.cfg.mode == "exact"
    out = []
    for band in range(spec.n_bands):
        series = []
        for ki in range(len(run.k_grid)):
            recs = run.records_for(ki, band)
            state = reconstruct.reconstruct_from_records(
                spec.n_bands, recs, band=band, k=float(run.k_grid[ki]), exact=exact)
            series.append(state)
        out.append(series)
    return out


def _trajectories(spec: TwisterSpec, states) -> braidtrace.TrajectorySeries:
    if spec.n_bands == 2:
        return braidtrace.lambda_2band(states[0], states[1])
    ks = np.array([s.k for s in states[0]])
    return braidtrace.trajectory_series_4band(states, ks)


def run_simulation(spec: TwisterSpec, *, k_points: int = DEFAULT_K_POINTS,
                   t: float = DEFAULT_T,
                   cfg: circuit.ShotConfig | None = None,
                   source: str = "protocol",
                   reference: float | None | str = "auto",
                   n_samples: int = circuit.DEFAULT_LAMBDA_SAMPLES,
                   workers: int = 1,
                   free_reduce: bool = False) -> SimulationResult:
    """Full chain at one parameter point.

    ``reference="auto"`` uses the pi/2 projection plane for N = 4 and each
    pair's own plane for N = 2, which is where the reference crossing levels
    (W~ = -1/4, resp. W in {1/4, 3/4}) live.
    """
    cfg = cfg or circuit.ShotConfig()
    grid = k_grid(k_points)
    if reference == "auto":
        reference = braidtrace.DEFAULT_REFERENCE if spec.n_bands == 4 else None

    records: list = []
    lambdas: dict = {}
    if source == "protocol":
        run = circuit.run_protocol(spec, grid, t, cfg, n_samples=n_samples,
                                   workers=workers)
        states = reconstruct_run(run)
        traj = _trajectories(spec, states)
        states0 = [s[0] for s in states]
        states1 = [s[-1] for s in states]
        records = run.records
        lambdas = run.lambdas
    elif source == "spectrum":
        traj, v0, v1 = braidtrace.spectrum_trajectories(spec, grid)
        states = []      # no measured series on this route
        states0 = v0
        states1 = v1
    else:
        raise ValueError(f"unknown source {source!r}")

    trace = braidtrace.winding_trace(traj)
    seam_tol = 1e-6 if cfg.mode == "exact" else 0.02
    shifted = braidtrace.phase_shift(trace, reference, seam_tol=seam_tol,
                                     normal_parity=1 if spec.n_bands == 4 else 0)
    perm = braidtrace.permutation_matrix(states0, states1)
    crossings = braidtrace.detect_crossings(shifted, perm)
    max_dev = 0.005 if cfg.mode == "exact" else 0.05
    winding = braidtrace.winding_matrix(trace, perm, max_deviation=max_dev)

    word = None
    word_err = None
    jones_poly = alex = None
    wr = None
    label = None
    default_ref = braidtrace.DEFAULT_REFERENCE if spec.n_bands == 4 else None
    try:
        # for the default plane the label order is the position order by
        # construction; a tilted plane can reorder the strands at k = 0
        positions = (None if reference == default_ref
                     else braidtrace.initial_positions(traj, reference))
        dk = float(grid[1] - grid[0])
        word = braidtrace.extract_braid_word(crossings.events, spec.n_bands,
                                             reduce=free_reduce,
                                             group_window=dk / 2,
                                             initial_positions=positions)
        jones_poly = knots.jones(word)
        alex = knots.alexander(word)
        wr = knots.writhe(word)
    except ProtocolError as exc:
        word_err = f"{type(exc).__name__}: {exc}"
    if word is not None:
        try:
            label = knots.classify_link(word, winding if spec.n_bands == 4 else None)
        except ClassificationError as exc:
            word_err = f"word-based classification failed: {exc}"
    if label is None:
        try:
            label = classify_winding_matrix(winding, spec.n_bands)
        except (ProtocolError, ClassificationError):
            pass

    return SimulationResult(
        spec=spec, k_grid=grid, t=t, cfg=cfg, source=source, states=states,
        trajectories=traj, trace=trace, shifted=shifted, crossings=crossings,
        permutation=perm, winding=winding, braid_word=word, braid_error=word_err,
        jones=jones_poly, alexander=alex, writhe=wr, knot_class=label,
        records=records, lambdas=lambdas)


def classify_winding_matrix(winding: np.ndarray, n_bands: int) -> KnotClass:
    """Match a topological winding matrix against the reference table
    (up to simultaneous band reversal)."""
    if n_bands == 2:
        value = abs(float(winding[0, 1]))
        for label, expect in braidtrace.WINDING_2BAND.items():
            if abs(value - expect) < 1e-9:
                return label
        raise ProtocolError(f"two-band winding {value} matches no class")
    for label, expect in braidtrace.WINDING_MATRICES.items():
        if np.array_equal(np.abs(winding), expect) or np.array_equal(np.abs(winding), expect[::-1, ::-1]):
            return label
    raise ProtocolError(f"winding matrix matches no class:\n{winding}")


def classify_by_winding(spec: TwisterSpec, *, k_points: int = 400) -> KnotClass:
    """Knot/link class from the winding matrix of the exact spectrum.

    The winding matrix distinguishes all classes realized by these models
    (the reference table), so no braid-word extraction is needed; this makes
    the classifier immune to projection-plane degeneracies.
    """
    grid = k_grid(k_points)
    traj, v0, v1 = braidtrace.spectrum_trajectories(spec, grid)
    trace = braidtrace.winding_trace(traj)
    perm = braidtrace.permutation_matrix(v0, v1)
    winding = braidtrace.winding_matrix(trace, perm)
    return classify_winding_matrix(winding, spec.n_bands)

"""From eigenstate trajectories to winding numbers, braid words, and the
global biorthogonal Berry phase.

Winding numbers accumulate the principal-branch phase increments of
Lambda_i - Lambda_j over the k-grid (guarded so no single step exceeds a
quarter turn). Crossings of the projected braid diagram sit at the levels
W = 1/4 + r/2. All pairs are referred to one projection plane by the phase
shift W~_ij = W_ij - (chi_ref - chi_ij(0))/(2 pi); a plane fixes those
offsets only up to the orientation of its normal, so they are normalized to
a single orientation parity (see phase_shift). For the four-band chi_ref =
pi/2 convention every trace then starts inside [-3/4, -1/4) and crossings
appear at W~ = -1/4.

Braid-diagram conventions (fixed once, used everywhere):
  * band labels at k = 0 sort by descending projection coordinate
    Re(e^{-i chi} Lambda_i(0)) = Im Lambda_i(0) for chi = pi/2, ties broken
    by descending Re Lambda_i(0) (depth);
  * a crossing of bands (i, j), i < j by initial label, at level r emits
    sigma_position^s with s = (-1)^r, negated when the pair sits in reversed
    positional order, and negated once more for N = 4 (the orientation
    parity of the four-band plane convention);
  * strands exactly tied at k = 0 are mid-crossing at the seam; that
    crossing is counted once, ordered at k = 2 pi when the pair is still
    unswapped just after k = 0 (and at k = 0 otherwise), with seam images
    in permuted pairs matched through the band permutation.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import numerics
from .errors import (InvalidDimension, NonAdjacentCrossing, NotAPermutation,
                     PoleHit, ProjectionDegenerate, SortingFailure, SpecialLine,
                     StepTooLarge, WindingQuantization)
from .reconstruct import expectations_from_state_2band
from .twister import KnotClass, TwisterSpec, build_hamiltonian

STEP_GUARD = 0.25          # max |Delta W| per grid step (a quarter turn)
LEVEL_ZERO_TOL = 1e-9
TANGENT_TOL = 1e-6
DEFAULT_REFERENCE = np.pi / 2


@dataclass(frozen=True)
class BraidWord:
    """Ordered Artin generators (index, sign), sign in {+1, -1}."""

    generators: tuple[tuple[int, int], ...]
    strand_count: int

    def __post_init__(self):
        for idx, sign in self.generators:
            if not 1 <= idx <= self.strand_count - 1:
                raise InvalidDimension(f"generator index {idx} out of range")
            if sign not in (1, -1):
                raise InvalidDimension("generator sign must be +-1")

    def __str__(self) -> str:
        if not self.generators:
            return "(empty)"
        return " ".join(f"s{i}" if s > 0 else f"s{i}^-1" for i, s in self.generators)

    @classmethod
    def parse(cls, text: str, strand_count: int) -> "BraidWord":
        """Parse words like "s1 s3 s2^-1"; "(empty)" or "" give the identity."""
        text = text.strip()
        gens = []
        if text and text != "(empty)":
            for tok in text.split():
                if not tok.startswith("s"):
                    raise InvalidDimension(f"bad braid token {tok!r}")
                if "^" in tok:
                    base, power = tok.split("^", 1)
                    sign = int(power)
                    if sign not in (1, -1):
                        raise InvalidDimension(f"bad braid power in {tok!r}")
                else:
                    base, sign = tok, 1
                gens.append((int(base[1:]), sign))
        return cls(generators=tuple(gens), strand_count=strand_count)

    def inverse(self) -> "BraidWord":
        return BraidWord(tuple((i, -s) for i, s in reversed(self.generators)),
                         self.strand_count)

    def permutation(self) -> list[int]:
        """positions[p] = strand label that ends at position p (labels 0-based)."""
        pos = list(range(self.strand_count))
        for idx, _ in self.generators:
            pos[idx - 1], pos[idx] = pos[idx], pos[idx - 1]
        return pos


def free_reduce(word: BraidWord) -> BraidWord:
    """Cancel adjacent sigma_i sigma_i^-1 pairs until none remain."""
    out: list[tuple[int, int]] = []
    for gen in word.generators:
        if out and out[-1][0] == gen[0] and out[-1][1] == -gen[1]:
            out.pop()
        else:
            out.append(gen)
    return BraidWord(tuple(out), word.strand_count)


@dataclass(frozen=True)
class TrajectorySeries:
    """Per-band complex trajectories Lambda_i(k) over a closed k-grid."""

    k_grid: np.ndarray
    lambdas: np.ndarray     # shape (len(k_grid), n_bands)

    def __post_init__(self):
        k = np.asarray(self.k_grid, dtype=float)
        if len(k) < 3 or np.any(np.diff(k) <= 0):
            raise InvalidDimension("k-grid must be strictly increasing")
        if abs(k[0]) > 1e-12 or abs(k[-1] - 2 * np.pi) > 1e-9:
            raise InvalidDimension("k-grid must run from 0 to 2 pi")
        lam = np.asarray(self.lambdas)
        if lam.shape[0] != len(k):
            raise InvalidDimension("trajectory length does not match the grid")
        d = np.abs(lam[:, :, None] - lam[:, None, :])
        d = d + np.eye(lam.shape[1])[None, :, :]
        if np.min(d) < 1e-10:
            raise ProjectionDegenerate(
                "two bands coincide on the grid (exceptional point upstream)")

    @property
    def n_bands(self) -> int:
        return self.lambdas.shape[1]


@dataclass
class WindingTrace:
    k_grid: np.ndarray
    pairs: list
    w: dict                  # (i, j) -> cumulative W_ij(k) array, W(0) = 0
    chi0: dict               # (i, j) -> arg(Lambda_i - Lambda_j)(0)
    d1: dict = field(default_factory=dict)        # difference vectors at k_1
    offsets: dict = field(default_factory=dict)   # set by phase_shift
    seam_side: dict = field(default_factory=dict)  # pair -> "start" | "end"

    def final(self, pair) -> float:
        return float(self.w[pair][-1])


@dataclass(frozen=True)
class Crossing:
    k: float
    pair: tuple[int, int]
    r: int
    level: float
    seam: bool = False       # merged periodic image, ordered at k = 2 pi


@dataclass(frozen=True)
class CrossingReport:
    events: tuple
    tangential: tuple = ()


@dataclass(frozen=True)
class PermutationMatrix:
    """mapping[j] = initial band index whose state dominates final band j."""

    n: int
    mapping: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.mapping) != list(range(self.n)):
            raise NotAPermutation(f"mapping {self.mapping} is not a bijection")

    @property
    def matrix(self) -> np.ndarray:
        p = np.zeros((self.n, self.n))
        for j, i in enumerate(self.mapping):
            p[i, j] = 1.0
        return p

    @property
    def order(self) -> int:
        count = 1
        m = self.matrix
        p = self.matrix
        while not np.array_equal(m, np.eye(self.n)):
            m = m @ p
            count += 1
            if count > 2 * self.n:
                raise NotAPermutation("permutation order overflow")
        return count


def initial_band_order(lam0) -> np.ndarray:
    """Band labels at k = 0: descending Im Lambda, ties by descending Re.

    Im values within 1e-9 (relative) are treated as tied so that the
    symmetric spectra of the twister models at k = 0 order deterministically.
    """
    lam0 = np.asarray(lam0, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(lam0))))
    keys = [(-round(float(v.imag) / scale, 9), -float(v.real)) for v in lam0]
    return np.array(sorted(range(len(lam0)), key=lambda i: keys[i]))


def initial_positions(traj: TrajectorySeries, reference: float | None) -> list[int]:
    """Band labels in strand-position order at k = 0 for a projection plane.

    For the default plane the coordinate order is the label order by
    construction (ties resolve to label order; the seam machinery owns
    mid-crossing pairs). A tilted plane can order the strands differently.
    """
    if reference is None:
        return list(range(traj.n_bands))
    c0 = np.real(np.exp(-1j * reference) * traj.lambdas[0])
    scale = max(1.0, float(np.max(np.abs(traj.lambdas[0]))))
    return sorted(range(traj.n_bands),
                  key=lambda b: (-round(float(c0[b]) / scale, 6), b))


# -- trajectory extraction -----------------------------------------------------

def lambda_2band(plus_series, minus_series) -> TrajectorySeries:
    """Stereographic trajectory Lambda(k) = p_+ p_- / 4 from both bands'
    Pauli expectations; the series holds (Lambda, -Lambda)."""
    if len(plus_series) != len(minus_series):
        raise InvalidDimension("band series lengths differ")
    ks, lams = [], []
    for sp, sm in zip(plus_series, minus_series):
        ks.append(sp.k)
        ex = [expectations_from_state_2band(s.amplitudes) for s in (sp, sm)]
        for sx, sy, sz in ex:
            if 1.0 - sz < 1e-9:
                raise PoleHit(f"<sigma_z> = {sz} at k = {sp.k}: projection pole")
        stereo = [(sx + 1j * sy) / (1.0 - sz) for sx, sy, sz in ex]
        conj_stereo = [(sx - 1j * sy) / (1.0 - sz) for sx, sy, sz in ex]
        p_plus = stereo[0] + stereo[1]
        p_minus = conj_stereo[0] - conj_stereo[1]
        lam = 0.25 * p_plus * p_minus
        lams.append([lam, -lam])
    return TrajectorySeries(k_grid=np.array(ks), lambdas=np.array(lams))


def lambda_4band(series) -> np.ndarray:
    """Per-band trajectory Lambda_i(k) = (X + iY)/Z for one band's series,
    built from the projector observables of the reconstructed state."""
    out = np.empty(len(series), dtype=complex)
    for n, s in enumerate(series):
        a = np.asarray(s.amplitudes, dtype=complex)
        if a.shape != (4,):
            raise InvalidDimension("four amplitudes expected")
        # (I - sz) x sx etc. reduce to the B-sector cross terms
        z10_11 = np.conj(a[2]) * a[3]
        x = 4.0 * z10_11.real
        y = -4.0 * z10_11.imag
        z = 4.0 * abs(a[3]) ** 2
        if abs(z) < 1e-9:
            raise ProjectionDegenerate(
                f"|Z| = {abs(z):.2e} at k = {s.k}, band {s.band}")
        out[n] = (x + 1j * y) / z
    return out


def trajectory_series_4band(band_series, k_grid) -> TrajectorySeries:
    """Assemble per-band Lambda arrays (band-indexed list) into one series."""
    lams = np.stack([lambda_4band(series) for series in band_series], axis=1)
    return TrajectorySeries(k_grid=np.asarray(k_grid, dtype=float), lambdas=lams)


def spectrum_trajectories(spec: TwisterSpec, k_grid) -> tuple[TrajectorySeries, np.ndarray, np.ndarray]:
    """Exact-eigenstate route: tracked energies as trajectories.

    Returns (series, eigenvectors at 0, tracked eigenvectors at 2 pi). Band
    labels follow the same k = 0 ordering convention as the protocol.
    """
    k_grid = np.asarray(k_grid, dtype=float)
    decs = []
    prev = None
    for k in k_grid:
        dec = numerics.eig(build_hamiltonian(spec, k), prev=prev)
        decs.append(dec)
        prev = dec
    order = initial_band_order(decs[0].eigenvalues)
    lams = np.stack([d.eigenvalues[order] for d in decs], axis=0)
    return (TrajectorySeries(k_grid=k_grid, lambdas=lams),
            decs[0].right[:, order], decs[-1].right[:, order])


# -- winding -------------------------------------------------------------------

def winding_trace(traj: TrajectorySeries) -> WindingTrace:
    """Cumulative pairwise windings with principal-branch per-step logs."""
    n = traj.n_bands
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    w, chi0, d1 = {}, {}, {}
    for (i, j) in pairs:
        d = traj.lambdas[:, i] - traj.lambdas[:, j]
        steps = np.angle(d[1:] / d[:-1]) / (2 * np.pi)
        worst = float(np.max(np.abs(steps)))
        if worst >= STEP_GUARD:
            raise StepTooLarge(
                f"pair ({i + 1},{j + 1}): step {worst:.3f} >= {STEP_GUARD}; "
                "refine the k-grid")
        w[(i, j)] = np.concatenate([[0.0], np.cumsum(steps)])
        chi0[(i, j)] = float(np.angle(d[0]))
        d1[(i, j)] = complex(d[1])
    return WindingTrace(k_grid=traj.k_grid, pairs=pairs, w=w, chi0=chi0, d1=d1)


def phase_shift(trace: WindingTrace, reference: float | None,
                *, seam_tol: float = 1e-6, normal_parity: int = 1) -> WindingTrace:
    """Refer all pairs to the projection plane at angle ``reference``.

    ``None`` keeps each pair's own plane (identity shift). A projection
    plane fixes offsets (reference - chi_ij(0)) only up to the orientation
    of its normal (a shift by pi); the crossing-to-generator sign rule
    requires one orientation convention across all pairs, set here by
    ``normal_parity`` (odd for the four-band convention whose sign flip the
    generator rule carries, even for two bands). Offsets are reduced into
    (-pi/2, 3 pi/2]; for the pi/2 plane of the four-band convention
    every trace then starts inside [-3/4, -1/4) and crossings appear at
    W~ = -1/4.

    A pair whose difference vector at k = 0 lies in the projection plane
    (within ``seam_tol``; raise it to the noise scale for sampled data) is
    mid-crossing at the seam: it starts exactly on a level, on the side
    fixed by the pair's order just after k = 0 (still unswapped -> the
    crossing lies ahead at k = 2 pi; already swapped -> it completed at
    k = 0).
    """
    if reference is None:
        return WindingTrace(trace.k_grid, list(trace.pairs), dict(trace.w),
                            dict(trace.chi0), d1=dict(trace.d1),
                            offsets={p: 0.0 for p in trace.pairs})
    shifted = {}
    offsets = {}
    seam_side = {}
    for pair in trace.pairs:
        off = (reference - trace.chi0[pair] + (normal_parity % 2) * np.pi) % (2 * np.pi)
        if off > 3 * np.pi / 2:
            off -= 2 * np.pi
        rem = (off - np.pi / 2) % np.pi
        if min(rem, np.pi - rem) <= seam_tol:
            # tied at the seam; resolve by the coordinate order at k_1
            coord = np.real(np.exp(-1j * reference) * trace.d1[pair])
            if coord > 0:        # label order intact: crossing at k = 2 pi
                off = 3 * np.pi / 2
                seam_side[pair] = "end"
            else:                # already swapped: crossing at k = 0
                off = np.pi / 2
                seam_side[pair] = "start"
        offsets[pair] = off / (2 * np.pi)
        shifted[pair] = trace.w[pair] - off / (2 * np.pi)
    return WindingTrace(trace.k_grid, list(trace.pairs), shifted,
                        dict(trace.chi0), d1=dict(trace.d1),
                        offsets=offsets, seam_side=seam_side)


def detect_crossings(shifted: WindingTrace,
                     permutation: PermutationMatrix | None = None) -> CrossingReport:
    """Crossing events where a shifted trace meets a level 1/4 + r/2.

    Near-level touches without a sign change are reported as tangential and
    not counted. Level hits at the two grid ends are periodic images of one
    seam crossing and are counted once, ordered last. Within one pair the
    kept event carries the k = 0 image's level; with the band permutation
    supplied, a seam crossing whose images live in different pairs
    ((a, b) at 2 pi continues (sigma(a), sigma(b)) at 0) is recognized and
    kept as the k = 2 pi image.
    """
    ks = shifted.k_grid
    dk = float(ks[1] - ks[0])
    two_pi = float(ks[-1])
    events: list[Crossing] = []
    tangential: list[Crossing] = []
    for pair in shifted.pairs:
        ws = shifted.w[pair]
        lo, hi = float(np.min(ws)), float(np.max(ws))
        r_lo = int(np.floor((lo - 0.25) * 2)) - 1
        r_hi = int(np.ceil((hi - 0.25) * 2)) + 1
        for r in range(r_lo, r_hi + 1):
            level = 0.25 + r / 2.0
            if level < lo - TANGENT_TOL or level > hi + TANGENT_TOL:
                continue
            f = ws - level
            m = 0
            while m < len(ks):
                if abs(f[m]) < LEVEL_ZERO_TOL:
                    events.append(Crossing(k=float(ks[m]), pair=pair, r=r, level=level))
                    m += 1
                    continue
                if m + 1 < len(ks) and f[m] * f[m + 1] < 0 and abs(f[m + 1]) >= LEVEL_ZERO_TOL:
                    kstar = ks[m] + dk * abs(f[m]) / (abs(f[m]) + abs(f[m + 1]))
                    events.append(Crossing(k=float(kstar), pair=pair, r=r, level=level))
                elif (0 < m < len(ks) - 1 and abs(f[m]) < TANGENT_TOL
                      and f[m - 1] * f[m + 1] > 0
                      and abs(f[m]) < min(abs(f[m - 1]), abs(f[m + 1]))):
                    tangential.append(Crossing(k=float(ks[m]), pair=pair, r=r, level=level))
                m += 1

    # A pair tied at the seam with its crossing ahead ("end" side) starts
    # exactly on a level; that k = 0 touch is the crossing's other periodic
    # image. Remove it here, and synthesize the k = 2 pi event when noise
    # leaves the trace just short of its end level.
    for pair, side in shifted.seam_side.items():
        if side != "end":
            continue
        ws = shifted.w[pair]
        events = [e for e in events
                  if not (e.pair == pair and e.k < 2 * dk
                          and abs(e.level - ws[0]) < TANGENT_TOL)]
        end_r = int(round((float(ws[-1]) - 0.25) * 2))
        end_level = 0.25 + end_r / 2.0
        has_end = any(e.pair == pair and e.k > two_pi - 2 * dk for e in events)
        if not has_end and abs(float(ws[-1]) - end_level) <= 0.02:
            events.append(Crossing(k=two_pi, pair=pair, r=end_r,
                                   level=end_level, seam=True))

    sigma = permutation.mapping if permutation is not None else None
    left = [e for e in events if e.k < 2 * dk]
    right = [e for e in events if e.k > two_pi - 2 * dk]
    drop: set[int] = set()
    rewrite: dict[int, Crossing] = {}
    for ev in right:
        if shifted.seam_side.get(ev.pair) == "start":
            # this pair's seam crossing is counted at k = 0; the k = 2 pi
            # image is the duplicate
            partners = [e for e in left if e.pair == ev.pair and id(e) not in drop]
            if partners:
                drop.add(id(ev))
            continue
        if sigma is not None:
            image = tuple(sorted((sigma[ev.pair[0]], sigma[ev.pair[1]])))
        else:
            image = ev.pair
        partners = [e for e in left
                    if e.pair in (image, ev.pair) and id(e) not in drop]
        if not partners:
            continue
        drop.add(id(partners[0]))
        rewrite[id(ev)] = replace(ev, k=two_pi, seam=True)
    merged = [rewrite.get(id(e), e) for e in events if id(e) not in drop]
    merged.sort(key=lambda e: e.k)
    return CrossingReport(events=tuple(merged), tangential=tuple(tangential))


def extract_braid_word(crossings, n_bands: int, *, reduce: bool = False,
                       group_window: float = 0.02,
                       initial_positions=None) -> BraidWord:
    """Walk the crossing list, tracking strand positions, and emit generators.

    At each crossing of bands (i, j) at level r the generator sign is
    (-1)^r, negated if the strands sit in reversed positional order, times
    the N = 4 sign flip of the generator rule. Crossings closer in k than
    ``group_window`` with pairwise disjoint strand pairs commute and are
    emitted lower position first (symmetric spectra produce exactly
    simultaneous crossings that measurement noise splits).

    ``initial_positions`` (band labels in position order at k = 0) defaults
    to label order; pass the dynamically resolved order when bands tie at
    k = 0.
    """
    events = sorted(crossings, key=lambda e: e.k)
    pos = list(initial_positions) if initial_positions is not None else list(range(n_bands))
    if sorted(pos) != list(range(n_bands)):
        raise InvalidDimension("initial_positions must be a permutation of the bands")
    gens: list[tuple[int, int]] = []
    flip4 = -1 if n_bands == 4 else 1
    idx = 0
    while idx < len(events):
        run = [events[idx]]
        while (idx + len(run) < len(events)
               and abs(events[idx + len(run)].k - events[idx].k) < group_window):
            run.append(events[idx + len(run)])
        disjoint = all(not (set(a.pair) & set(b.pair))
                       for x, a in enumerate(run) for b in run[x + 1:])
        if disjoint:
            run.sort(key=lambda e: min(pos.index(e.pair[0]), pos.index(e.pair[1])))
        for ev in run:
            i, j = ev.pair
            pi, pj = pos.index(i), pos.index(j)
            if abs(pi - pj) != 1:
                raise NonAdjacentCrossing(
                    f"bands ({i + 1},{j + 1}) cross at k = {ev.k:.4f} from "
                    f"positions {pi + 1},{pj + 1} (order {[b + 1 for b in pos]})")
            low = min(pi, pj)
            sign = -1 if (ev.r % 2) else 1
            if pos[low] != min(i, j):
                sign = -sign
            gens.append((low + 1, sign * flip4))
            pos[pi], pos[pj] = pos[pj], pos[pi]
        idx += len(run)
    word = BraidWord(tuple(gens), n_bands)
    return free_reduce(word) if reduce else word


# -- permutation and winding matrix ---------------------------------------------

def permutation_matrix(states_at_0, states_at_2pi) -> PermutationMatrix:
    """Dominant-overlap band pairing across one period.

    Accepts ReconstructedState lists or eigenvector column matrices.
    """
    v0 = _as_columns(states_at_0)
    v1 = _as_columns(states_at_2pi)
    if v0.shape != v1.shape:
        raise InvalidDimension("band counts differ between the two ends")
    overlaps = np.abs(v0.conj().T @ v1)
    mapping = tuple(int(np.argmax(overlaps[:, j])) for j in range(v0.shape[1]))
    if sorted(mapping) != list(range(v0.shape[1])):
        raise NotAPermutation(
            f"two final bands claim the same initial band: {mapping}")
    return PermutationMatrix(n=v0.shape[1], mapping=mapping)


def _as_columns(states) -> np.ndarray:
    if isinstance(states, np.ndarray):
        return states
    return np.stack([np.asarray(s.amplitudes, dtype=complex) for s in states], axis=1)


def winding_matrix(trace: WindingTrace, perm: PermutationMatrix,
                   *, max_deviation: float = 0.005) -> np.ndarray:
    """Topological winding matrix: period-average of the one-period windings
    conjugated by the band permutation, rounded to multiples of 1/(2n).

    The raw one-period entries are not individually quantized when bands
    permute; their fractional parts cancel in the average, which is where
    the quantization guard applies.
    """
    n_bands = perm.n
    n = perm.order
    raw = np.zeros((n_bands, n_bands))
    for (i, j) in trace.pairs:
        raw[i, j] = raw[j, i] = trace.final((i, j))
    p = perm.matrix
    acc = np.zeros_like(raw)
    pa = np.eye(n_bands)
    for _ in range(n):
        acc += pa.T @ raw @ pa
        pa = pa @ p
    acc /= n
    rounded = np.round(acc * 2 * n) / (2 * n)
    dev = float(np.max(np.abs(acc - rounded)))
    if dev > max_deviation:
        raise WindingQuantization(
            f"winding matrix off the 1/(2n) lattice by {dev:.4f} "
            f"(allowed {max_deviation})")
    rounded[np.abs(rounded) == 0.0] = 0.0   # normalize -0.0
    return rounded


WINDING_MATRICES: dict[KnotClass, np.ndarray] = {
    KnotClass.UNKNOT: np.array([[0, .25, .25, .25], [.25, 0, .25, .25],
                                [.25, .25, 0, .25], [.25, .25, .25, 0]]),
    KnotClass.HOPF_CHAIN: np.array([[0, .5, .5, 0], [.5, 0, .5, .5],
                                    [.5, .5, 0, .5], [0, .5, .5, 0]]),
    KnotClass.SOLOMON_KNOT: np.array([[0, .5, .5, .5], [.5, 0, .5, .5],
                                      [.5, .5, 0, .5], [.5, .5, .5, 0]]),
    KnotClass.HOPF_LINK_PLUS_UNLINK: np.array([[0, 0, 0, 0], [0, 0, 1, 0],
                                               [0, 1, 0, 0], [0, 0, 0, 0]]),
    KnotClass.UNKNOT_PLUS_UNLINK: np.array([[0, 0, 0, 0], [0, 0, .5, 0],
                                            [0, .5, 0, 0], [0, 0, 0, 0]]),
    KnotClass.DOUBLE_UNLINKS: np.zeros((4, 4)),
    KnotClass.HOPF_LINK: np.array([[0, 0, .5, .5], [0, 0, .5, .5],
                                   [.5, .5, 0, 0], [.5, .5, 0, 0]]),
    KnotClass.UNLINK: np.array([[0, .5, 0, 0], [.5, 0, 0, 0],
                                [0, 0, 0, .5], [0, 0, .5, 0]]),
}

WINDING_2BAND: dict[KnotClass, float] = {
    KnotClass.HOPF_LINK: 1.0,
    KnotClass.UNKNOT: 0.5,
    KnotClass.UNLINK: 0.0,
}


# -- global biorthogonal Berry phase -------------------------------------------

def count_band_swaps_2band(m0: float, m1: float) -> int:
    """nu_E: number of k in [0, 2 pi) where E_+^2 meets the negative real axis.

    Enumerated solutions: the pair k = +-arccos(-m1/2) whenever |m1| <= 2 and
    m1 + 1 + m0^2 > 0; k = 0 when (m1+1)^2 < m0^2; k = pi when 1 - m1^2 < m0^2.
    """
    if abs(m1 + 1) < 1e-12:
        raise SpecialLine("m1 = -1: spectrum is k-independent")
    count = 0
    if abs(m1) <= 2 and m1 + 1 + m0 ** 2 > 0:
        count += 2
    if (m1 + 1) ** 2 - m0 ** 2 < 0:
        count += 1
    if 1 - m1 ** 2 - m0 ** 2 < 0:
        count += 1
    return count


def global_biorthogonal_berry_phase(spec: TwisterSpec, k_grid) -> int:
    """gamma in {0, 1} (units of pi) from the biorthogonal product formula
    over continuity-sorted eigenstates, with the endpoint identified back to
    the k = 0 eigenvectors so band swaps contribute their branch-cut jumps."""
    if spec.n_bands != 2:
        raise InvalidDimension("the Berry-phase routine is defined for N = 2")
    k_grid = np.asarray(k_grid, dtype=float)
    decs = []
    prev = None
    for k in k_grid:
        dec = numerics.eig(build_hamiltonian(spec, k), left=True, prev=prev)
        if prev is not None:
            ov = np.abs(np.sum(np.conj(prev.right) * dec.right, axis=0))
            if np.min(ov) < 0.5:
                raise SortingFailure(
                    f"tracking overlap {np.min(ov):.3f} < 0.5 at k = {k:.4f}")
        decs.append(dec)
        prev = dec
    # identify the endpoint with the k = 0 frame (same vectors, permuted)
    perm = numerics.match_order(decs[-1].right, decs[0].right)
    end = numerics.EigenDecomposition(
        decs[0].eigenvalues[perm], decs[0].right[:, perm], decs[0].left[perm, :])
    decs[-1] = end

    total = 0.0
    for i in range(len(k_grid) - 1):
        for n in range(spec.n_bands):
            num = decs[i + 1].left[n, :] @ decs[i].right[:, n]
            den = decs[i].left[n, :] @ decs[i].right[:, n]
            total += float(np.angle(num / den))
    gamma = total / np.pi
    return int(round(gamma)) % 2

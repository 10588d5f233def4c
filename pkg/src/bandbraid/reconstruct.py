"""Bloch-angle eigenstate reconstruction from postselected measurement records.

Two-band states use the single-qubit Bloch angles

    theta = arccos<sigma_z>,   phi = atan2(<sigma_y>, <sigma_x>),
    |psi> = (cos(theta/2), sin(theta/2) e^{i phi}),

four-band states the six-angle hierarchical parametrization

    |psi> = [cos(thA/2) cos(thAB/2) e^{i(phA + phAB)},
             sin(thA/2) cos(thAB/2) e^{i phAB},
             cos(thB/2) sin(thAB/2) e^{i phB},
             sin(thB/2) sin(thAB/2)]

with the polar angles from conditional z-expectation ratios and the phases
from two-argument arctangents atan2(-<sigma_y>, <sigma_x>) of the matching
conditional pair (the one-argument arctangent is quadrant-blind). All states
are returned in the canonical gauge: last nonvanishing amplitude real and
positive. Degenerate phases (poles) and empty conditioning sectors are
flagged, not raised; the flagged angles do not affect the state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import MeasurementRecord
from .errors import IncompleteSettings, InvalidDimension

PHASE_TOL = 1e-12
SECTOR_TOL = 1e-10
CLAMP_SLACK = 1e-6


@dataclass(frozen=True)
class BlochAngles2:
    theta: float
    phi: float
    phi_degenerate: bool = False


@dataclass(frozen=True)
class BlochAngles4:
    theta_a: float
    theta_b: float
    theta_ab: float
    phi_a: float
    phi_b: float
    phi_ab: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ReconstructedState:
    amplitudes: np.ndarray
    band: int = 0
    k: float = 0.0
    flags: tuple[str, ...] = ()


def canonical_gauge(amplitudes) -> np.ndarray:
    """Rotate the global phase so the last nonvanishing amplitude is real
    positive. Idempotent."""
    a = np.asarray(amplitudes, dtype=complex)
    for i in range(len(a) - 1, -1, -1):
        if abs(a[i]) > 1e-14:
            out = a * np.exp(-1j * np.angle(a[i]))
            out[i] = abs(a[i])  # exact, so the map is idempotent bit-for-bit
            return out
    return np.array(a)


def _clamp(x: float, *, exact: bool = False) -> float:
    if exact and abs(x) > 1.0 + CLAMP_SLACK:
        raise InvalidDimension(f"expectation {x} overshoots [-1, 1] beyond tolerance")
    return float(min(1.0, max(-1.0, x)))


def _retained_probs(record: MeasurementRecord) -> dict:
    return record.probabilities()


def pauli_expectations_2band(records) -> tuple[float, float, float]:
    """(<sx>, <sy>, <sz>) from three records covering settings x, y, z.

    Each value is P(system bit 0) - P(system bit 1) over the retained,
    renormalized distribution of its setting.
    """
    by_setting = {}
    for r in records:
        by_setting[r.setting] = r
    missing = {"x", "y", "z"} - set(by_setting)
    if missing:
        raise IncompleteSettings(f"missing settings: {sorted(missing)}")
    if len({(r.k, r.band) for r in by_setting.values()}) != 1:
        raise IncompleteSettings("records mix different (k, band) points")
    out = []
    for alpha in "xyz":
        p = _retained_probs(by_setting[alpha])
        out.append(p.get("00", 0.0) - p.get("01", 0.0))
    return tuple(out)


def bloch_angles_2band(sx: float, sy: float, sz: float, *, exact: bool = False) -> BlochAngles2:
    theta = float(np.arccos(_clamp(sz, exact=exact)))
    if sx * sx + sy * sy < PHASE_TOL:
        return BlochAngles2(theta=theta, phi=0.0, phi_degenerate=True)
    return BlochAngles2(theta=theta, phi=float(np.arctan2(sy, sx)))


def reconstruct_2band(angles: BlochAngles2, *, band: int = 0, k: float = 0.0) -> ReconstructedState:
    amps = np.array([np.cos(angles.theta / 2),
                     np.sin(angles.theta / 2) * np.exp(1j * angles.phi)])
    flags = ("phi_degenerate",) if angles.phi_degenerate else ()
    return ReconstructedState(amplitudes=canonical_gauge(amps), band=band, k=k, flags=flags)


@dataclass(frozen=True)
class Conditional4:
    """Postselected conditional expectations of the four-band protocol.

    For family A/B: value[alpha] = P(000)-P(001) resp. P(010)-P(011) and
    weight = sector probability from the same record. Family mAB conditions
    qubit 3 on |1>; pmAB is the unconditioned qubit-2 Pauli.
    """

    a: dict
    b: dict
    mab: dict
    pmab: dict
    weight_a: float
    weight_b: float
    weight_mab: float
    flags: tuple[str, ...] = ()


_FAMILY_BITS = {
    "A": (("000", 1.0), ("001", -1.0)),
    "B": (("010", 1.0), ("011", -1.0)),
    "mAB": (("001", 1.0), ("011", -1.0)),
    "pmAB": (("000", 1.0), ("001", 1.0), ("010", -1.0), ("011", -1.0)),
}


def conditional_expectations_4band(records) -> Conditional4:
    """Extract the full conditional-expectation family from twelve records
    (family x alpha), normalizing each value by its own sector weight."""
    table = {}
    point = set()
    for r in records:
        table[r.setting] = r
        point.add((r.k, r.band))
    if len(point) > 1:
        raise IncompleteSettings("records mix different (k, band) points")
    needed = [f"{fam}:{a}" for fam in ("A", "B", "mAB", "pmAB") for a in "xyz"]
    missing = [s for s in needed if s not in table]
    # pmAB only requires the z record downstream; x/y are optional extras
    required = [s for s in missing if not s.startswith("pmAB:") or s == "pmAB:z"]
    if required:
        raise IncompleteSettings(f"missing settings: {required}")

    values: dict[str, dict[str, float]] = {}
    weights: dict[str, float] = {}
    flags: list[str] = []
    for fam in ("A", "B", "mAB", "pmAB"):
        values[fam] = {}
        for alpha in "xyz":
            key = f"{fam}:{alpha}"
            if key not in table:
                continue
            p = _retained_probs(table[key])
            raw = sum(sign * p.get(bits, 0.0) for bits, sign in _FAMILY_BITS[fam])
            if fam == "pmAB":
                values[fam][alpha] = raw
                continue
            w = sum(p.get(bits, 0.0) for bits, _ in _FAMILY_BITS[fam])
            if w < SECTOR_TOL:
                values[fam][alpha] = 0.0
                if f"empty_sector_{fam}" not in flags:
                    flags.append(f"empty_sector_{fam}")
            else:
                values[fam][alpha] = raw / w
            if alpha == "z":
                weights[fam] = w
    return Conditional4(a=values["A"], b=values["B"], mab=values["mAB"],
                        pmab=values["pmAB"], weight_a=weights.get("A", 0.0),
                        weight_b=weights.get("B", 0.0),
                        weight_mab=weights.get("mAB", 0.0),
                        flags=tuple(flags))


def _phase(x: float, y: float, flags: list, name: str) -> float:
    if x * x + y * y < PHASE_TOL:
        flags.append(f"phi_degenerate_{name}")
        return 0.0
    return float(np.arctan2(-y, x))


def bloch_angles_4band(cond: Conditional4, *, exact: bool = False) -> BlochAngles4:
    """Six Bloch angles from conditional expectations.

    Polar angles arccos the conditional z ratios (the A/B sector weights
    cancel in the ratio); azimuthal angles are atan2(-y, x) of the matching
    conditional pair.
    """
    flags = list(cond.flags)
    theta_a = float(np.arccos(_clamp(cond.a.get("z", 0.0), exact=exact)))
    theta_b = float(np.arccos(_clamp(cond.b.get("z", 0.0), exact=exact)))
    theta_ab = float(np.arccos(_clamp(cond.pmab.get("z", 0.0), exact=exact)))
    if "empty_sector_A" in flags:
        theta_a = 0.0
    if "empty_sector_B" in flags:
        theta_b = 0.0
    phi_a = _phase(cond.a.get("x", 0.0), cond.a.get("y", 0.0), flags, "a")
    phi_b = _phase(cond.b.get("x", 0.0), cond.b.get("y", 0.0), flags, "b")
    phi_ab = _phase(cond.mab.get("x", 0.0), cond.mab.get("y", 0.0), flags, "ab")
    return BlochAngles4(theta_a=theta_a, theta_b=theta_b, theta_ab=theta_ab,
                        phi_a=phi_a, phi_b=phi_b, phi_ab=phi_ab,
                        flags=tuple(flags))


def reconstruct_4band(angles: BlochAngles4, *, band: int = 0, k: float = 0.0) -> ReconstructedState:
    ca, sa = np.cos(angles.theta_a / 2), np.sin(angles.theta_a / 2)
    cb, sb = np.cos(angles.theta_b / 2), np.sin(angles.theta_b / 2)
    cab, sab = np.cos(angles.theta_ab / 2), np.sin(angles.theta_ab / 2)
    amps = np.array([
        ca * cab * np.exp(1j * (angles.phi_a + angles.phi_ab)),
        sa * cab * np.exp(1j * angles.phi_ab),
        cb * sab * np.exp(1j * angles.phi_b),
        sb * sab,
    ])
    return ReconstructedState(amplitudes=canonical_gauge(amps), band=band, k=k,
                              flags=angles.flags)


# -- expectation helpers (shared with trajectory extraction and tests) --------

def expectations_from_state_2band(amplitudes) -> tuple[float, float, float]:
    a = np.asarray(amplitudes, dtype=complex)
    z = np.conj(a[0]) * a[1]
    return (float(2 * z.real), float(2 * z.imag),
            float(abs(a[0]) ** 2 - abs(a[1]) ** 2))


def reconstruct_from_records(n_bands: int, records, *, band: int = 0,
                             k: float = 0.0, exact: bool = False) -> ReconstructedState:
    """records -> expectations -> angles -> state, for one (k, band)."""
    if n_bands == 2:
        sx, sy, sz = pauli_expectations_2band(records)
        return reconstruct_2band(bloch_angles_2band(sx, sy, sz, exact=exact),
                                 band=band, k=k)
    if n_bands == 4:
        cond = conditional_expectations_4band(records)
        return reconstruct_4band(bloch_angles_4band(cond, exact=exact), band=band, k=k)
    raise InvalidDimension("reconstruction protocols exist for N = 2 and 4 only")


def save_states(path, states) -> None:
    """Plain text: k, band, then re/im amplitude pairs."""
    with open(path, "w") as fh:
        for s in states:
            nums = []
            for a in s.amplitudes:
                nums.extend([a.real, a.imag])
            fh.write(" ".join([repr(float(s.k)), str(s.band)] + [repr(float(x)) for x in nums]) + "\n")


def load_states(path) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            k = float(parts[0])
            band = int(parts[1])
            vals = [float(x) for x in parts[2:]]
            amps = np.array([complex(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)])
            out.append(ReconstructedState(amplitudes=amps, band=band, k=k))
    return out

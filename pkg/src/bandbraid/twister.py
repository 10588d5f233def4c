"""Twister Hamiltonian family: construction, analytic spectra, phase regions.

The family is H(k) = c0 * Sigma + sum_v m_v * T_v(k) on N bands, where Sigma
is the traceless diagonal shift diag(1 - 2(p-1)/(N-1)) and T_v is the cyclic
lower shift with corner phase e^{i v k}. The two concrete models studied here
take c0 = i*m0 (real m0), V = 2 harmonics with m_2 = 1:

    N = 2:  [[i m0, e^{2ik} + m1 e^{ik}], [1 + m1, -i m0]]
    N = 4:  corner e^{2ik} + m1 e^{ik}, subdiagonal 1 + m1,
            diagonal i m0 * (1, 1/3, -1/3, -1)

Phase regions carry knot/link labels. Classification matches a query point's
boundary-function sign pattern against the reference anchor points; patterns
not realized by any anchor are resolved by the winding-matrix classifier on
the exact spectrum (computed once per pattern and cached).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegeneratePoint, InvalidDimension, OnBoundary

BOUNDARY_TOL = 1e-9


class KnotClass(Enum):
    UNKNOT = "unknot"
    UNLINK = "unlink"
    HOPF_LINK = "hopf_link"
    HOPF_CHAIN = "hopf_chain"
    SOLOMON_KNOT = "solomon_knot"
    HOPF_LINK_PLUS_UNLINK = "hopf_link_plus_unlink"
    UNKNOT_PLUS_UNLINK = "unknot_plus_unlink"
    DOUBLE_UNLINKS = "double_unlinks"


@dataclass(frozen=True)
class TwisterSpec:
    """An N-band model: shift coefficient and harmonic couplings m_1..m_V.

    ``shift`` multiplies Sigma directly; the concrete models use shift =
    i * m0 with real m0 (see :meth:`concrete`).
    """

    n_bands: int
    shift: complex
    harmonics: tuple[complex, ...]

    def __post_init__(self):
        if self.n_bands < 2:
            raise InvalidDimension("n_bands must be >= 2")
        if not self.harmonics:
            raise InvalidDimension("at least one harmonic is required")

    @classmethod
    def concrete(cls, n_bands: int, m0: float, m1: float) -> "TwisterSpec":
        """The reference two-parameter models: i*m0*Sigma + m1*T_1 + T_2."""
        return cls(n_bands=n_bands, shift=1j * m0, harmonics=(complex(m1), 1.0 + 0j))

    @property
    def m0(self) -> float:
        """Real m0 for a concrete model (shift = i*m0)."""
        return float(self.shift.imag)

    @property
    def m1(self) -> float:
        return float(self.harmonics[0].real)

    def is_concrete(self) -> bool:
        return (abs(self.shift.real) < 1e-14
                and len(self.harmonics) == 2
                and abs(self.harmonics[0].imag) < 1e-14
                and abs(self.harmonics[1] - 1.0) < 1e-14
                and self.n_bands in (2, 4))

    def to_dict(self) -> dict:
        return {
            "n_bands": self.n_bands,
            "shift": [self.shift.real, self.shift.imag],
            "harmonics": [[h.real, h.imag] for h in self.harmonics],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TwisterSpec":
        return cls(
            n_bands=int(d["n_bands"]),
            shift=complex(d["shift"][0], d["shift"][1]),
            harmonics=tuple(complex(h[0], h[1]) for h in d["harmonics"]),
        )


@dataclass(frozen=True)
class PhaseRegion:
    label: KnotClass
    boundary_values: tuple[float, ...]


@dataclass(frozen=True)
class TorusLinkType:
    components: int
    component_type: tuple[int, int]


def shift_matrix(n: int) -> np.ndarray:
    """Diagonal shift Sigma_pp = 1 - 2(p-1)/(N-1); Sigma^(2) = sigma_z."""
    if n < 2:
        raise InvalidDimension("shift matrix needs n >= 2")
    return np.diag([1.0 - 2.0 * p / (n - 1) for p in range(n)]).astype(complex)


def twister_matrix(n: int, v: int, k: float) -> np.ndarray:
    """Cyclic lower shift with corner entry e^{i v k}."""
    if n < 2:
        raise InvalidDimension("twister matrix needs n >= 2")
    if v < 1:
        raise InvalidDimension("harmonic index v must be >= 1")
    t = np.zeros((n, n), dtype=complex)
    for p in range(1, n):
        t[p, p - 1] = 1.0
    t[0, n - 1] = np.exp(1j * v * k)
    return t


def build_hamiltonian(spec: TwisterSpec, k: float) -> np.ndarray:
    h = spec.shift * shift_matrix(spec.n_bands)
    for v, m in enumerate(spec.harmonics, start=1):
        if m != 0:
            h = h + m * twister_matrix(spec.n_bands, v, k)
    return h


def analytic_spectrum_2band(m0: float, m1: float, k: float) -> tuple[complex, complex]:
    """E_± = ±sqrt(e^{2ik}(m1+1) + m1 e^{ik}(m1+1) - m0^2), principal branch."""
    e2 = np.exp(2j * k) * (m1 + 1) + m1 * np.exp(1j * k) * (m1 + 1) - m0 ** 2
    e = complex(np.sqrt(complex(e2)))
    return e, -e


def analytic_spectrum_4band(m0: float, m1: float, k: float) -> np.ndarray:
    """Four energies (a/3)*sqrt(-5 m0^2 + b*S(k)) for (a, b) in {+,-}^2,
    S(k) = sqrt(16 m0^4 + 81 e^{ik} (m1+1)^3 (m1 + e^{ik}))."""
    s = np.sqrt(complex(16 * m0 ** 4 + 81 * np.exp(1j * k) * (m1 + 1) ** 3 * (m1 + np.exp(1j * k))))
    out = []
    for a in (1, -1):
        for b in (1, -1):
            out.append(a / 3.0 * np.sqrt(complex(-5 * m0 ** 2 + b * s)))
    return np.array(out)


def pure_twister_eigenvalues(n: int, v: int, k: float) -> np.ndarray:
    """E_j = e^{i(vk + 2 pi j)/n}: the pure twister matrix is the companion
    matrix of E^n - e^{ivk}."""
    if n < 2 or v < 1:
        raise InvalidDimension("need n >= 2, v >= 1")
    j = np.arange(n)
    return np.exp(1j * (v * k + 2 * np.pi * j) / n)


def torus_link_components(v: int, n: int) -> TorusLinkType:
    if v < 1 or n < 1:
        raise InvalidDimension("need v, n >= 1")
    d = math.gcd(v, n)
    return TorusLinkType(components=d, component_type=(v // d, n // d))


def torus_embedding(n: int, v: int, j: int, k: float) -> tuple[float, float, float]:
    """Point of the j-th band trajectory on the standard torus
    (sqrt(x^2+y^2) - 2)^2 + z^2 = 1."""
    if not 0 <= j < n:
        raise InvalidDimension("band index j out of range")
    ang = (v * k + 2 * np.pi * j) / n
    rad = 2.0 + np.cos(ang)
    return (rad * np.cos(k), rad * np.sin(k), -np.sin(ang))


# -- phase regions -------------------------------------------------------------

def boundary_values_2band(m0: float, m1: float) -> tuple[float, float, float]:
    """F1 = (m1+1)^2 - m0^2, F2 = m1^2 - 1 + m0^2, F3 = 1 + m0^2 + m1.

    The F3 = 0 locus is a degeneracy boundary only for |m1| <= 2.
    """
    return ((m1 + 1) ** 2 - m0 ** 2, m1 ** 2 - 1 + m0 ** 2, 1 + m0 ** 2 + m1)


def boundary_values_4band(m0: float, m1: float) -> tuple[float, ...]:
    """Six boundary functions; F3 applies for |m1| <= 2 and G3 for
    -2 <= m1 <= -1 only."""
    u = m1 + 1
    return (
        16 * m0 ** 4 + 81 * u ** 4,
        16 * m0 ** 4 + 81 * u ** 3 * (1 - m1),
        16 * m0 ** 4 - 81 * u ** 3,
        m0 ** 4 - 9 * u ** 4,
        m0 ** 4 - 9 * u ** 3 * (1 - m1),
        m0 ** 4 + 9 * u ** 3,
    )


def _windows_2band(m1: float) -> tuple[bool, bool, bool]:
    return (True, True, abs(m1) <= 2)


def _windows_4band(m1: float) -> tuple[bool, ...]:
    return (True, True, abs(m1) <= 2, True, True, -2 <= m1 <= -1)


ANCHORS_2BAND = {
    (0.5338, 0.6): KnotClass.HOPF_LINK,
    (1.273, 0.6): KnotClass.UNKNOT,
    (1.8889, 0.6): KnotClass.UNLINK,
}

ANCHORS_4BAND = {
    (1.5, 1.0): KnotClass.HOPF_CHAIN,
    (1.5, 0.5): KnotClass.SOLOMON_KNOT,
    (1.5, -0.08): KnotClass.HOPF_LINK_PLUS_UNLINK,
    (1.5, -3.0): KnotClass.UNKNOT,
    (1.5, -0.18): KnotClass.UNKNOT_PLUS_UNLINK,
    (1.5, -1.0): KnotClass.DOUBLE_UNLINKS,
    (1.0, -1.5): KnotClass.HOPF_LINK,
    (1.5, -1.8): KnotClass.UNLINK,
}

_pattern_cache: dict[tuple, KnotClass] = {}


def _pattern(n_bands: int, m0: float, m1: float) -> tuple:
    # sign pattern plus window applicability flags for the clipped boundaries
    if n_bands == 2:
        vals = boundary_values_2band(m0, m1)
        extra: tuple = (abs(m1) <= 2,)
    else:
        vals = boundary_values_4band(m0, m1)
        extra = (abs(m1) <= 2, -2 <= m1 <= -1)
    return tuple(1 if v > 0 else -1 for v in vals) + extra


def _anchor_patterns(n_bands: int) -> dict[tuple, KnotClass]:
    anchors = ANCHORS_2BAND if n_bands == 2 else ANCHORS_4BAND
    out: dict[tuple, KnotClass] = {}
    for (m0, m1), label in anchors.items():
        out[_pattern(n_bands, m0, m1)] = label
    return out


def _check_boundaries(n_bands: int, m0: float, m1: float) -> tuple[float, ...]:
    if abs(m0) <= BOUNDARY_TOL and abs(m1 + 1) <= BOUNDARY_TOL:
        raise DegeneratePoint("(m0, m1) = (0, -1) is the all-boundary intersection")
    if n_bands == 2:
        vals = boundary_values_2band(m0, m1)
        windows = _windows_2band(m1)
    else:
        vals = boundary_values_4band(m0, m1)
        windows = _windows_4band(m1)
    for v, w in zip(vals, windows):
        if w and abs(v) <= BOUNDARY_TOL:
            raise OnBoundary(f"|boundary function| = {abs(v):.2e} at ({m0}, {m1})")
    return vals


def _classify(n_bands: int, m0: float, m1: float) -> PhaseRegion:
    vals = _check_boundaries(n_bands, m0, m1)
    pattern = _pattern(n_bands, m0, m1)
    label = _anchor_patterns(n_bands).get(pattern)
    if label is None:
        key = (n_bands,) + pattern
        label = _pattern_cache.get(key)
        if label is None:
            from . import pipeline  # deferred: pipeline depends on this module

            label = pipeline.classify_by_winding(
                TwisterSpec.concrete(n_bands, m0, m1))
            _pattern_cache[key] = label
    return PhaseRegion(label=label, boundary_values=tuple(float(v) for v in vals))


def phase_region_2band(m0: float, m1: float) -> PhaseRegion:
    """Knot/link class of the two-band model at (m0, m1).

    Refuses points within 1e-9 of a boundary (OnBoundary) and the special
    point (0, -1) (DegeneratePoint).
    """
    return _classify(2, m0, m1)


def phase_region_4band(m0: float, m1: float) -> PhaseRegion:
    """Knot/link class of the four-band model at (m0, m1); eight classes."""
    return _classify(4, m0, m1)

"""Two-dimensional loading density, loading-unloading potential and tensions.

The loading density is ``Psi(y1, y2) = F(psi1(y1), psi2(y2))`` with the
bilinear coupling ``F(a, b) = Phi1 a + Phi2 b - alpha a b``.  Given a history
``z`` the opening plane splits into four regions:

    R1  y1 >= z1, y2 >= z2   pure loading
    R2  y1 <  z1, y2 >= z2   unloading in direction 1
    R3  y1 >= z1, y2 <  z2   unloading in direction 2
    R4  y1 <  z1, y2 <  z2   pure unloading

In each region every quantity is evaluated at the anchor point
``p = (z1 if unloading in 1 else y1, z2 if unloading in 2 else y2)`` and the
unloading directions pick up the factors ``r = y/z`` and ``q = 1 - r**2``.
Writing the branches this way keeps all four cases in one expression; with
``q = 0`` and ``r = 1`` on loading directions it reduces to each branch
exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .laws1d import CohesiveLaw1D, NegativeOpening, _as_opening


class DegenerateHistory(ValueError):
    """An unloading branch was requested with a zero history component."""


class Region(enum.IntEnum):
    R1 = 1
    R2 = 2
    R3 = 3
    R4 = 4


# (unloading in direction 1, unloading in direction 2)
_FLAGS = {
    Region.R1: (False, False),
    Region.R2: (True, False),
    Region.R3: (False, True),
    Region.R4: (True, True),
}


class Mode(str, enum.Enum):
    POTENTIAL = "potential"
    NONPOTENTIAL = "nonpotential"


@dataclass(frozen=True)
class CouplingF:
    """``F(a, b) = phi1 a + phi2 b - alpha a b`` on ``[0, 1]^2``."""

    phi1: float
    phi2: float
    alpha: float

    def __post_init__(self):
        if min(self.phi1, self.phi2, self.alpha) < 0:
            raise ValueError("coupling energies must be nonnegative")

    def value(self, a, b):
        return self.phi1 * a + self.phi2 * b - self.alpha * a * b

    def d1(self, a, b):
        return self.phi1 - self.alpha * b

    def d2(self, a, b):
        return self.phi2 - self.alpha * a

    # the remaining partials of a bilinear F are constants
    def d11(self, a, b):
        return np.zeros_like(np.asarray(a, dtype=float) * b)

    d22 = d11
    d112 = d11
    d122 = d11

    def d12(self, a, b):
        return np.full_like(np.asarray(a, dtype=float) * b, -self.alpha)

    def admissible(self, mode: Mode) -> bool:
        if Mode(mode) is Mode.POTENTIAL:
            return self.alpha <= min(self.phi1, self.phi2)
        return self.alpha >= max(self.phi1, self.phi2)

    @property
    def vanishes_on_edges(self) -> bool:
        """``d1 F(., 1) = d2 F(1, .) = 0``, i.e. ``alpha == phi1 == phi2``."""
        return self.alpha == self.phi1 == self.phi2

    @property
    def uncoupled(self) -> bool:
        return self.alpha == 0


class PsiDerivatives(NamedTuple):
    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d11: np.ndarray
    d22: np.ndarray
    d12: np.ndarray
    d112: np.ndarray
    d122: np.ndarray

    @property
    def grad(self):
        return np.stack([self.d1, self.d2])


@dataclass(frozen=True)
class LoadingDensity:
    """``Psi(y1, y2) = F(psi1(y1), psi2(y2))``."""

    F: CouplingF
    psi1: CohesiveLaw1D
    psi2: CohesiveLaw1D

    @classmethod
    def ppr(cls, psi1: CohesiveLaw1D, psi2: CohesiveLaw1D, phi1: float, phi2: float) -> "LoadingDensity":
        """PPR coupling ``alpha = max(phi1, phi2)``."""
        return cls(CouplingF(phi1, phi2, max(phi1, phi2)), psi1, psi2)

    @property
    def openings(self) -> tuple[float, float]:
        return self.psi1.opening, self.psi2.opening

    @property
    def thresholds(self) -> tuple[float, float]:
        return self.psi1.concavity_threshold, self.psi2.concavity_threshold

    def evaluate(self, y1, y2) -> PsiDerivatives:
        p1, a1, b1 = self.psi1.evaluate(y1)
        p2, a2, b2 = self.psi2.evaluate(y2)
        F = self.F
        f1, f2 = F.d1(p1, p2), F.d2(p1, p2)
        f11, f22, f12 = F.d11(p1, p2), F.d22(p1, p2), F.d12(p1, p2)
        f112, f122 = F.d112(p1, p2), F.d122(p1, p2)
        return PsiDerivatives(
            value=F.value(p1, p2),
            d1=f1 * a1,
            d2=f2 * a2,
            d11=f1 * b1 + f11 * a1**2,
            d22=f2 * b2 + f22 * a2**2,
            d12=f12 * a1 * a2,
            d112=f12 * b1 * a2 + f112 * a1**2 * a2,
            d122=f12 * a1 * b2 + f122 * a1 * a2**2,
        )

    def __call__(self, y1, y2):
        return self.evaluate(y1, y2).value


def eval_psi(psi: LoadingDensity, y) -> PsiDerivatives:
    y = _as_opening(y)
    return psi.evaluate(y[0], y[1])


def _pair(v, name):
    v = _as_opening(v)
    if v.shape[:1] != (2,):
        raise ValueError(f"{name} must have leading dimension 2, got shape {v.shape}")
    return v


def classify_region(y, z):
    """Region index (1..4) of each opening; ties ``y_i == z_i`` count as loading."""
    y, z = _pair(y, "y"), _pair(z, "z")
    u1, u2 = y[0] < z[0], y[1] < z[1]
    out = np.where(u1, np.where(u2, 4, 2), np.where(u2, 3, 1))
    return Region(int(out)) if out.ndim == 0 else out


def _branch(y, z, flags):
    """Anchor point, ratio ``r`` and ``q = 1 - r^2`` for given unloading flags.

    ``flags`` is a pair of boolean arrays (or scalars) broadcastable to ``y[0]``.
    """
    y, z = np.broadcast_arrays(y, z)
    p, r, q = [], [], []
    for i in range(2):
        unl = np.broadcast_to(flags[i], y[i].shape)
        if np.any(unl & (z[i] <= 0)):
            raise DegenerateHistory(f"unloading branch in direction {i + 1} needs z{i + 1} > 0")
        zs = np.where(unl, z[i], 1.0)
        ri = np.where(unl, y[i] / zs, 1.0)
        p.append(np.where(unl, z[i], y[i]))
        r.append(ri)
        q.append(np.where(unl, 1.0 - ri**2, 0.0))
    return np.stack(p), np.stack(r), np.stack(q)


def _flags(y, z, region=None):
    if region is None:
        return y[0] < z[0], y[1] < z[1]
    return _FLAGS[Region(region)]


def _phi(psi, y, z, flags):
    p, _, q = _branch(y, z, flags)
    d = psi.evaluate(p[0], p[1])
    return (
        d.value
        - 0.5 * p[0] * d.d1 * q[0]
        - 0.5 * p[1] * d.d2 * q[1]
        + 0.25 * p[0] * p[1] * d.d12 * q[0] * q[1]
    )


def _grad_phi(psi, y, z, flags):
    p, r, q = _branch(y, z, flags)
    d = psi.evaluate(p[0], p[1])
    g1 = (d.d1 - 0.5 * p[1] * d.d12 * q[1]) * r[0]
    g2 = (d.d2 - 0.5 * p[0] * d.d12 * q[0]) * r[1]
    return np.stack([g1, g2])


def _dz_phi(psi, y, z, flags):
    p, _, q = _branch(y, z, flags)
    d = psi.evaluate(p[0], p[1])
    h1 = (0.5 * (d.d1 - p[0] * d.d11) - 0.25 * p[1] * (d.d12 - p[0] * d.d112) * q[1]) * q[0]
    h2 = (0.5 * (d.d2 - p[1] * d.d22) - 0.25 * p[0] * (d.d12 - p[1] * d.d122) * q[0]) * q[1]
    return np.stack([h1, h2])


def eval_phi(psi: LoadingDensity, y, z, region=None):
    """Loading-unloading energy density ``Phi(y, z)``.

    ``region`` forces a branch formula regardless of where ``y`` lies; this is
    only meant for continuity checks on region boundaries.
    """
    y, z = _pair(y, "y"), _pair(z, "z")
    return _phi(psi, y, z, _flags(y, z, region))


def grad_phi(psi: LoadingDensity, y, z, region=None):
    """``(d Phi/d y1, d Phi/d y2)`` stacked along the first axis."""
    y, z = _pair(y, "y"), _pair(z, "z")
    return _grad_phi(psi, y, z, _flags(y, z, region))


def dz_phi(psi: LoadingDensity, y, z, region=None):
    """``(d Phi/d z1, d Phi/d z2)``; zero in the loading directions."""
    y, z = _pair(y, "y"), _pair(z, "z")
    return _dz_phi(psi, y, z, _flags(y, z, region))


@dataclass(frozen=True)
class LoadingTension:
    """``S = max(grad Psi, 0)`` componentwise; ``clip=False`` keeps ``grad Psi``.

    The unclipped variant violates nonnegativity whenever a partial of ``Psi``
    turns negative and exists to build counterexamples.
    """

    psi: LoadingDensity
    clip: bool = True

    def __call__(self, y1, y2):
        d = self.psi.evaluate(y1, y2)
        s = np.stack([d.d1, d.d2])
        return np.maximum(s, 0.0) if self.clip else s

    @property
    def openings(self):
        return self.psi.openings

    @property
    def thresholds(self):
        return self.psi.thresholds


def eval_s(psi: LoadingDensity, y):
    y = _pair(y, "y")
    return LoadingTension(psi)(y[0], y[1])


def _tension(S, y, z, flags):
    p, r, _ = _branch(y, z, flags)
    return S(p[0], p[1]) * r


def eval_t(S: Callable, y, z, region=None):
    """Non-potential tension built from a loading tension ``S(y1, y2) -> (2, ...)``."""
    y, z = _pair(y, "y"), _pair(z, "z")
    return _tension(S, y, z, _flags(y, z, region))


class PotentialLaw:
    """Potential-based mixed-mode law: tractions are ``grad_y Phi``."""

    model = Mode.POTENTIAL

    def __init__(self, psi: LoadingDensity):
        self.psi = psi
        # inadmissible couplings are allowed: they reproduce the nonphysical
        # potential response the non-potential construction avoids
        self.nonphysical_coupling = not psi.F.admissible(Mode.POTENTIAL)

    def __repr__(self):
        return f"PotentialLaw({self.psi!r})"

    def __eq__(self, other):
        return isinstance(other, PotentialLaw) and other.psi == self.psi

    __hash__ = None

    @property
    def openings(self):
        return self.psi.openings

    @property
    def thresholds(self):
        return self.psi.thresholds

    def energy(self, y, z, region=None):
        return eval_phi(self.psi, y, z, region)

    def traction(self, y, z, region=None):
        return grad_phi(self.psi, y, z, region)

    def dz(self, y, z, region=None):
        return dz_phi(self.psi, y, z, region)


class TensionLaw:
    """Non potential-based law: tractions ``T(y, z)`` built from ``S``."""

    model = Mode.NONPOTENTIAL

    def __init__(self, S: LoadingTension):
        self.S = S

    @classmethod
    def from_density(cls, psi: LoadingDensity, clip: bool = True) -> "TensionLaw":
        return cls(LoadingTension(psi, clip))

    @property
    def psi(self):
        return getattr(self.S, "psi", None)

    def __repr__(self):
        return f"TensionLaw({self.S!r})"

    def __eq__(self, other):
        return isinstance(other, TensionLaw) and other.S == self.S

    __hash__ = None

    @property
    def openings(self):
        return self.S.openings

    @property
    def thresholds(self):
        return self.S.thresholds

    def traction(self, y, z, region=None):
        return eval_t(self.S, y, z, region)

    def energy(self, y, z, region=None):
        return None


MixedModeLaw = PotentialLaw | TensionLaw

__all__ = [
    "CouplingF",
    "DegenerateHistory",
    "LoadingDensity",
    "LoadingTension",
    "Mode",
    "MixedModeLaw",
    "NegativeOpening",
    "PotentialLaw",
    "PsiDerivatives",
    "Region",
    "TensionLaw",
    "classify_region",
    "dz_phi",
    "eval_phi",
    "eval_psi",
    "eval_s",
    "eval_t",
    "grad_phi",
]

"""One-dimensional cohesive densities.

Every law is normalised so that ``sup psi = 1``; the delamination energy
lives in the coupling function of :mod:`mixedcz.mixedmode`.  Evaluation is
vectorised over ``y`` and returns the triple ``(psi, dpsi, d2psi)``.  At kink
and junction points the derivatives are right-derivatives.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect


class NegativeOpening(ValueError):
    """Raised when a law is evaluated at a negative opening."""


class LambdaOutOfRange(ValueError):
    """Raised for a PPR slope indicator outside ``[0, 1/sqrt(alpha))``."""


class NoRoot(ValueError):
    """Raised when the elastic threshold of an intrinsic law cannot be bracketed."""


class ConcavityWarning(UserWarning):
    """PPR slope indicator above ``1/sqrt(2 alpha - 1)``.

    The density is still well defined but ``psi' - y psi''`` turns negative
    near the origin.
    """


def _as_opening(y):
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(np.isnan(y)):
        raise NegativeOpening(f"opening must be >= 0, got min {np.nanmin(y) if y.size else y}")
    return y


class CohesiveLaw1D:
    """Base class of the scalar densities.

    Subclasses implement :meth:`_evaluate` on a validated float array and
    expose ``opening`` (delamination opening, or an effective one for laws
    that saturate only asymptotically), ``concavity_threshold`` (below it the
    law may be convex, e.g. an initial elastic branch) and ``slope0``, the
    right-derivative at the origin.
    """

    kind: str = "abstract"

    def evaluate(self, y):
        y = _as_opening(y)
        psi, d1, d2 = self._evaluate(y)
        return psi, d1, d2

    def __call__(self, y):
        return self.evaluate(y)[0]

    def derivative(self, y):
        return self.evaluate(y)[1]

    def _evaluate(self, y):  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def opening(self) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def concavity_threshold(self) -> float:
        return 0.0

    @property
    def slope0(self) -> float:
        return float(self.evaluate(0.0)[1])


@dataclass(frozen=True)
class Exponential(CohesiveLaw1D):
    """``psi(y) = 1 - exp(-rho y)``; infinite delamination opening."""

    rho: float
    kind = "exponential"

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    def _evaluate(self, y):
        e = np.exp(-self.rho * y)
        return -np.expm1(-self.rho * y), self.rho * e, -self.rho**2 * e

    @property
    def opening(self) -> float:
        # psi is within 1e-9 of its supremum beyond this point
        return math.log(1e9) / self.rho


@dataclass(frozen=True)
class Cubic(CohesiveLaw1D):
    """Cubic law ``1 - (1 - y/delta)^3`` on ``[0, delta)``, 1 beyond."""

    delta: float
    kind = "cubic"

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    def _evaluate(self, y):
        d = self.delta
        om = np.where(y < d, 1.0 - y / d, 0.0)
        psi = 1.0 - om**3
        return psi, 3.0 * om**2 / d, -6.0 * om / d**2

    @property
    def opening(self) -> float:
        return self.delta


@dataclass(frozen=True)
class Intrinsic(CohesiveLaw1D):
    """Initial quadratic branch ``y^2 / (2 eps)`` glued to a concave base law.

    The junction ``zbar`` solves ``zbar = eps * base'(zbar)``; the result is
    rescaled so that its supremum is one.
    """

    base: CohesiveLaw1D
    eps: float
    zbar: float = field(init=False)
    scale: float = field(init=False)
    kind = "intrinsic"

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        zbar = _intrinsic_threshold(self.base, self.eps)
        psi_z = float(self.base(zbar))
        object.__setattr__(self, "zbar", zbar)
        object.__setattr__(self, "scale", 1.0 / (1.0 - psi_z + zbar**2 / (2.0 * self.eps)))

    def _evaluate(self, y):
        eps, zb, c = self.eps, self.zbar, self.scale
        bpsi, bd1, bd2 = self.base._evaluate(y)
        psi_z = float(self.base(zb))
        quad = y < zb
        psi = np.where(quad, y**2 / (2.0 * eps), bpsi - psi_z + zb**2 / (2.0 * eps))
        d1 = np.where(quad, y / eps, bd1)
        d2 = np.where(quad, 1.0 / eps, bd2)
        return c * psi, c * d1, c * d2

    @property
    def opening(self) -> float:
        return self.base.opening

    @property
    def concavity_threshold(self) -> float:
        return self.zbar


def _intrinsic_threshold(base: CohesiveLaw1D, eps: float) -> float:
    grid = np.linspace(0.0, 10.0 * base.opening, 4001)
    _, d1, d2 = base.evaluate(grid)
    if np.max(d2) > 1e-9 * max(1.0, float(np.max(np.abs(d2)))):
        raise NoRoot(f"{base.kind} base law is not concave; threshold is not unique")
    lip = float(d1[0])
    if not lip > 0:
        raise NoRoot("base law has zero slope at the origin; z = eps psi'(z) has no positive root")

    def h(z):
        return z - eps * float(base.derivative(z))

    hi = eps * lip
    if h(hi) == 0.0:
        return hi
    return bisect(h, 0.0, hi, xtol=1e-12 * max(eps, 1.0), rtol=1e-15, maxiter=500)


def make_intrinsic(base: CohesiveLaw1D, eps: float) -> Intrinsic:
    return Intrinsic(base, eps)


def ppr_parameters(alpha: float, sigma: float, lam: float, energy: float) -> tuple[float, float]:
    """Exponent ``m`` and delamination opening ``delta`` of a PPR law.

    ``lam == 0`` returns the extrinsic limit ``(0, energy * alpha / sigma)``.

    Raises
    ------
    LambdaOutOfRange
        if ``lam`` is negative or ``lam >= 1/sqrt(alpha)``.
    """
    if not alpha > 1:
        raise ValueError("PPR shape index alpha must exceed 1")
    if not (sigma > 0 and energy > 0):
        raise ValueError("PPR strength and energy must be positive")
    if lam < 0 or alpha * lam**2 >= 1.0:
        raise LambdaOutOfRange(f"lambda={lam} outside [0, 1/sqrt(alpha)={1 / math.sqrt(alpha):.6g})")
    if lam == 0:
        return 0.0, energy * alpha / sigma
    if lam > 1.0 / math.sqrt(2.0 * alpha - 1.0):
        warnings.warn(
            f"lambda={lam} > 1/sqrt(2 alpha - 1); psi' - y psi'' is negative near 0",
            ConcavityWarning,
            stacklevel=2,
        )
    m = alpha * (alpha - 1.0) * lam**2 / (1.0 - alpha * lam**2)
    k = alpha / m
    delta = (energy / sigma) * alpha * lam * (1.0 - lam) ** (alpha - 1.0) * (1.0 + k) * (1.0 + lam * k) ** (m - 1.0)
    return m, delta


@dataclass(frozen=True)
class PprIntrinsic(CohesiveLaw1D):
    """Normalised one-dimensional PPR density with an initial elastic branch."""

    alpha: float
    sigma: float
    lam: float
    energy: float
    m: float = field(init=False)
    delta: float = field(init=False)
    kind = "ppr_intrinsic"

    def __post_init__(self):
        if self.lam <= 0:
            raise LambdaOutOfRange("intrinsic PPR needs lambda > 0; use PprExtrinsic for the limit")
        m, delta = ppr_parameters(self.alpha, self.sigma, self.lam, self.energy)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "delta", delta)

    def _evaluate(self, y):
        a, m, d = self.alpha, self.m, self.delta
        k = a / m
        x = y / d
        inside = x < 1.0
        om = np.where(inside, 1.0 - x, 0.0)
        xi = np.where(inside, x, 0.0)
        b = 1.0 + k * xi
        # log form keeps psi accurate (and nonnegative) near the origin
        with np.errstate(divide="ignore"):
            s = a * np.log(om) + m * np.log1p(k * xi)
        psi = np.where(inside, np.maximum(-np.expm1(s), 0.0), 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            d1 = (a / d) * (1.0 + k) * xi * om ** (a - 1.0) * b ** (m - 1.0)
            d2 = (a / d**2) * (1.0 + k) * om ** (a - 2.0) * b ** (m - 2.0) * (1.0 - k * (a + m - 1.0) * xi**2)
        return psi, np.where(inside, d1, 0.0), np.where(inside, d2, 0.0)

    @property
    def opening(self) -> float:
        return self.delta

    @property
    def concavity_threshold(self) -> float:
        # inflection point of psi, at y/delta = lambda
        return self.delta * self.lam


@dataclass(frozen=True)
class PprExtrinsic(CohesiveLaw1D):
    """The ``lam -> 0`` limit of :class:`PprIntrinsic`: ``1 - ((1 - y/dbar)^+)^alpha``."""

    alpha: float
    sigma: float
    energy: float
    delta: float = field(init=False)
    kind = "ppr_extrinsic"

    def __post_init__(self):
        _, delta = ppr_parameters(self.alpha, self.sigma, 0.0, self.energy)
        object.__setattr__(self, "delta", delta)

    def _evaluate(self, y):
        a, d = self.alpha, self.delta
        inside = y < d
        om = np.where(inside, 1.0 - y / d, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            d1 = (a / d) * om ** (a - 1.0)
            d2 = -(a * (a - 1.0) / d**2) * om ** (a - 2.0)
        return 1.0 - om**a, np.where(inside, d1, 0.0), np.where(inside, d2, 0.0)

    @property
    def opening(self) -> float:
        return self.delta


def eval_law(law: CohesiveLaw1D, y):
    """Return ``(psi, psi', psi'')`` of ``law`` at ``y``."""
    return law.evaluate(y)

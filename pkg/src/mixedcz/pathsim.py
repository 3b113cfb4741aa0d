"""Pointwise loading/unloading paths through a mixed-mode law.

Openings follow ``y_i(t) = |a_i sin(b_i t)|``; the history is the running
componentwise maximum.  The four reference cases share the PPR parameters
``alpha = 2, sigma = 2, lambda = 0.2`` in both directions.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .laws1d import PprIntrinsic
from .mixedmode import LoadingDensity, PotentialLaw, TensionLaw

COLUMNS = ("t", "y1", "y2", "z1", "z2", "T1", "T2", "phi")

# case -> (a1, a2, b1, b2, Phi1, Phi2)
CASES = {
    1: (1.0, 1.0, 0.2, 0.2, 2.0, 2.0),
    2: (1.0, 1.0, 0.2, 0.3, 2.0, 2.0),
    3: (1.0, 3.0, 0.2, 0.3, 6.0, 2.0),
    4: (1.0, 0.5, 0.125, 0.4, 2.0, 2.0),
}
PPR_SHAPE = 2.0
PPR_STRENGTH = 2.0
PPR_SLOPE = 0.2


@dataclass(frozen=True)
class LoadingPath:
    a1: float
    a2: float
    b1: float
    b2: float
    t: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) <= 0):
            raise ValueError("time samples must be a strictly increasing 1-D array")
        object.__setattr__(self, "t", t)

    @classmethod
    def periods(cls, a1, a2, b1, b2, samples=2000, humps=2.5):
        """Uniform grid covering ``humps`` half-periods of the slower direction."""
        t_end = humps * math.pi / min(b1, b2)
        return cls(a1, a2, b1, b2, np.linspace(0.0, t_end, samples))

    def openings(self):
        return np.stack([np.abs(self.a1 * np.sin(self.b1 * self.t)), np.abs(self.a2 * np.sin(self.b2 * self.t))])


@dataclass
class PathTrace:
    t: np.ndarray
    y: np.ndarray  # (2, n)
    z: np.ndarray  # (2, n) history after the update at each sample
    z_prev: np.ndarray  # (2, n) history the law was evaluated with
    traction: np.ndarray  # (2, n)
    energy: np.ndarray | None
    model: str

    def __len__(self):
        return self.t.size

    def rows(self):
        phi = self.energy if self.energy is not None else [None] * len(self)
        for k in range(len(self)):
            yield (self.t[k], *self.y[:, k], *self.z[:, k], *self.traction[:, k], phi[k])

    def to_csv(self, fh=None) -> str | None:
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in self.rows():
            w.writerow(["" if v is None else repr(float(v)) for v in row])
        return None if fh is not None else out.getvalue()


def simulate_path(law, path: LoadingPath, z0=(0.0, 0.0)) -> PathTrace:
    """Drive ``law`` along ``path``.

    Tractions at sample ``k`` use the history accumulated before ``k``; the
    recorded ``z`` includes the update with ``y(t_k)``.
    """
    z0 = np.asarray(z0, dtype=float).reshape(2, 1)
    if np.any(z0 < 0):
        raise ValueError("initial history must be nonnegative")
    y = path.openings()
    z_post = np.maximum.accumulate(np.maximum(y, z0), axis=1)
    z_prev = np.concatenate([z0, z_post[:, :-1]], axis=1)
    traction = law.traction(y, z_prev)
    energy = law.energy(y, z_post)
    return PathTrace(path.t, y, z_post, z_prev, traction, energy, law.model.value)


def case_density(n: int) -> LoadingDensity:
    *_, phi1, phi2 = CASES[n]
    psi1 = PprIntrinsic(PPR_SHAPE, PPR_STRENGTH, PPR_SLOPE, phi1)
    psi2 = PprIntrinsic(PPR_SHAPE, PPR_STRENGTH, PPR_SLOPE, phi2)
    return LoadingDensity.ppr(psi1, psi2, phi1, phi2)


def case_path(n: int, samples: int = 2000) -> LoadingPath:
    a1, a2, b1, b2, *_ = CASES[n]
    return LoadingPath.periods(a1, a2, b1, b2, samples=samples)


def run_case(n: int, samples: int = 2000) -> tuple[PathTrace, PathTrace]:
    """Potential and non-potential traces of reference case ``n`` (1..4)."""
    if n not in CASES:
        raise ValueError(f"case must be one of {sorted(CASES)}")
    psi = case_density(n)
    path = case_path(n, samples)
    return simulate_path(PotentialLaw(psi), path), simulate_path(TensionLaw.from_density(psi), path)


def first_unloading(trace: PathTrace) -> int:
    """Index of the first sample with some ``y_i`` below its history (len if none)."""
    hit = np.any(trace.y < trace.z_prev, axis=0)
    return int(np.argmax(hit)) if hit.any() else len(trace)


def _runs(mask):
    idx = np.flatnonzero(np.diff(np.concatenate([[0], mask.astype(np.int8), [0]])))
    return [slice(a, b) for a, b in zip(idx[::2], idx[1::2])]


def unloading_zone_runs(trace: PathTrace, directions=(0, 1), min_len=3):
    """Maximal runs of samples lying in the unloading zone of every listed direction."""
    mask = np.all([trace.y[i] < trace.z_prev[i] for i in directions], axis=0)
    return [s for s in _runs(mask) if s.stop - s.start >= min_len]


def decreasing_runs(trace: PathTrace, direction: int, min_len=3):
    """Runs of strictly decreasing ``y_direction``, including the sample they start from."""
    dec = np.diff(trace.y[direction]) < 0
    out = []
    for s in _runs(dec):
        if s.stop - s.start + 1 >= min_len:
            out.append(slice(s.start, s.stop + 1))
    return out


def origin_line_residual(y, T):
    """Max deviation of ``(y, T)`` from its least-squares line through the origin."""
    slope = float(np.dot(y, T) / np.dot(y, y))
    return float(np.max(np.abs(T - slope * y)))


def chord_residual(y, T):
    """Max deviation of ``(y, T)`` from the chord joining its end points."""
    y0, y1, T0, T1 = y[0], y[-1], T[0], T[-1]
    chord = T0 + (T1 - T0) * (y - y0) / (y1 - y0)
    return float(np.max(np.abs(T - chord)))


def frozen_sweep(law, direction: int, values, other: float, z):
    """Tractions along ``y_direction = values`` with the other opening held at ``other``."""
    values = np.asarray(values, dtype=float)
    y = np.empty((2, values.size))
    y[direction] = values
    y[1 - direction] = other
    zz = np.repeat(np.asarray(z, dtype=float).reshape(2, 1), values.size, axis=1)
    return law.traction(y, zz)

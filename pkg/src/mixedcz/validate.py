"""Sampling checkers for the structural hypotheses on cohesive laws.

Each checker evaluates a hypothesis pointwise on a deterministic grid and
returns :class:`CheckReport` objects.  A report carries the worst violation
found and where it occurred; a failing report always has a witness point.

Tolerances: exact-structure claims (linearity, replacement identity) use
``1e-12``, sign and smoothness claims ``1e-9``, both relative to
``max(1, peak)`` where ``peak`` is the largest traction on the grid.  Decay
at infinity is tested against ``1e-6 * peak`` at ten times the opening.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .laws1d import CohesiveLaw1D
from .mixedmode import (
    LoadingDensity,
    PotentialLaw,
    Region,
    TensionLaw,
)

TOL_EXACT = 1e-12
TOL_SIGN = 1e-9
TOL_DECAY = 1e-6
TOL_CONT = 1e-10
SEED = 42


class IncompatibleLaws(ValueError):
    pass


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NA = "n/a"


@dataclass(frozen=True)
class CheckReport:
    hypothesis: str
    status: Status
    worst: float
    tolerance: float
    location: tuple | None
    grid: str
    note: str = ""

    @property
    def margin(self) -> float:
        return self.tolerance - self.worst

    @property
    def failed(self) -> bool:
        return self.status is Status.FAIL

    def as_row(self) -> dict:
        loc = "" if self.location is None else " ".join(repr(float(v)) for v in self.location)
        return {
            "hypothesis": self.hypothesis,
            "status": self.status.value,
            "worst": repr(float(self.worst)),
            "tolerance": repr(float(self.tolerance)),
            "location": loc,
            "grid": self.grid,
            "note": self.note,
        }


def _report(hid, violation, points, tol, grid, note=""):
    """Fail iff ``max(violation) > tol``; NaN counts as an infinite violation."""
    v = np.asarray(violation, dtype=float).ravel()
    if v.size == 0:
        return CheckReport(hid, Status.NA, 0.0, tol, None, grid, note or "no applicable sample")
    v = np.where(np.isnan(v), np.inf, v)
    k = int(np.argmax(v))
    pts = np.asarray(points, dtype=float).reshape(-1, v.size) if points is not None else None
    loc = tuple(float(c) for c in pts[:, k]) if pts is not None else None
    status = Status.FAIL if v[k] > tol else Status.PASS
    return CheckReport(hid, status, float(v[k]), float(tol), loc, grid, note)


# ---------------------------------------------------------------- grids


@dataclass(frozen=True)
class Grid:
    """Sample points ``y``, ``z`` (shape ``(2, N)``) plus far-field probes."""

    y: np.ndarray
    z: np.ndarray
    far_y: np.ndarray
    far_z: np.ndarray
    spec: str
    openings: tuple = field(default=(1.0, 1.0))


def _axis(op, n_lin, n_log, top):
    lin = np.linspace(0.0, top * op, n_lin)
    log = op * np.logspace(-3, np.log10(top), n_log)
    return np.unique(np.concatenate([lin, log]))


def standard_grid(openings, n_lin=13, n_log=8, n_z=10, n_random=10_000, seed=SEED) -> Grid:
    """Tensor grid in ``(y1, y2, z1, z2)`` plus seeded uniform random points.

    ``y`` axes mix linear spacing on ``[0, 2 op]`` and log spacing up to
    ``10 op``; ``z`` axes cover ``{0} u [0.01 op, 10 op]``.  Random points
    are uniform in ``[0, 2 op]^4``.  Far-field probes put one opening at
    ``10 op`` with the other components on the tensor axes.
    """
    op = np.asarray(openings, dtype=float)
    ya = [np.unique(np.concatenate([_axis(o, n_lin, n_log, 2.0), [10.0 * o]])) for o in op]
    za = [np.unique(np.concatenate([[0.0], o * np.geomspace(0.01, 10.0, n_z - 1)])) for o in op]
    Y1, Y2, Z1, Z2 = np.meshgrid(ya[0], ya[1], za[0], za[1], indexing="ij")
    rng = np.random.default_rng(seed)
    R = rng.uniform(0.0, 2.0, size=(4, n_random)) * np.concatenate([op, op])[:, None]
    y = np.concatenate([np.stack([Y1.ravel(), Y2.ravel()]), R[:2]], axis=1)
    z = np.concatenate([np.stack([Z1.ravel(), Z2.ravel()]), R[2:]], axis=1)

    far_y, far_z = [], []
    for i in range(2):
        F1, F2, G1, G2 = np.meshgrid(ya[1 - i], [0.0], za[0], za[1], indexing="ij")
        fy = np.empty((2, F1.size))
        fy[i] = 10.0 * op[i]
        fy[1 - i] = F1.ravel()
        far_y.append(fy)
        far_z.append(np.stack([G1.ravel(), G2.ravel()]))
    spec = (
        f"tensor {len(ya[0])}x{len(ya[1])}x{len(za[0])}x{len(za[1])} + {n_random} random "
        f"(seed {seed}); openings {op[0]:.6g},{op[1]:.6g}"
    )
    return Grid(y, z, np.concatenate(far_y, axis=1), np.concatenate(far_z, axis=1), spec, tuple(op))


def grid_1d(law: CohesiveLaw1D, n=1200, top=10.0):
    op = law.opening
    pts = np.unique(np.concatenate([np.linspace(0.0, top * op, n), op * np.logspace(-4, np.log10(top), n // 4)]))
    return pts, f"1d: {pts.size} points on [0, {top:g} x {op:.6g}]"


# ---------------------------------------------------------------- 1-D laws


def check_psi1d(law: CohesiveLaw1D, grid=None) -> list[CheckReport]:
    y, spec = grid if grid is not None else grid_1d(law)
    psi, d1, d2 = law.evaluate(y)
    scale = max(1.0, float(np.max(np.abs(d1))), float(np.max(np.abs(y * d2))))
    tol = TOL_SIGN * scale
    reps = [
        _report("psi-nonneg", -psi, y, TOL_SIGN, spec),
        _report("psi-monotone", -d1, y, tol, spec),
        _report("psi-bounded", psi - 1.0, y, TOL_SIGN, spec, "sup psi = 1"),
        _report("psi-a", -(d1 - y * d2), y, tol, spec, "psi' - y psi'' >= 0"),
    ]
    f = y * d1
    if not np.all(np.isfinite(f)):
        reps.append(_report("psi-b", np.where(np.isfinite(f), 0.0, np.inf), y, tol, spec))
    else:
        # sup y psi' must be attained inside the grid: the tail decays
        tail = y >= 0.8 * y[-1]
        inc = np.diff(f[tail])
        reps.append(_report("psi-b", inc, y[tail][1:], tol, spec, f"sup y psi' = {np.max(f):.6g}"))
    thr = law.concavity_threshold
    conc = y >= thr
    reps.append(_report("psi-concave", d2[conc], y[conc], tol, spec, f"on [{thr:.6g}, inf)"))
    return reps


# ---------------------------------------------------------------- loading density


def _peak(psi: LoadingDensity, grid: Grid):
    d = psi.evaluate(grid.y[0], grid.y[1])
    return max(1.0, float(np.max(np.abs(d.grad))))


def check_loading_density(psi: LoadingDensity, grid: Grid | None = None) -> list[CheckReport]:
    grid = grid or standard_grid(psi.openings)
    y = np.concatenate([grid.y, grid.far_y], axis=1)
    d = psi.evaluate(y[0], y[1])
    peak = max(1.0, float(np.max(np.abs(d.grad))))
    tol = TOL_SIGN * peak
    s = grid.spec
    reps = []

    origin = psi.evaluate(0.0, 0.0).value
    reps.append(_report("Psi1", [abs(float(origin))], [[0.0], [0.0]], TOL_EXACT, s, "Psi(0,0) = 0"))

    fields = np.stack([d.value, d.d1, d.d2, d.d11, d.d22, d.d12])
    bad = np.where(np.all(np.isfinite(fields), axis=0), 0.0, np.inf)
    reps.append(_report("Psi2", bad, y, 0.0, s, f"max |Psi| = {np.max(np.abs(d.value)):.6g}"))

    v3 = np.max(
        np.stack(
            [
                np.maximum(y[0] * d.d11, 0.0) - d.d1,
                np.maximum(y[1] * d.d22, 0.0) - d.d2,
                d.d12 - np.minimum(y[0] * d.d112, 0.0),
                d.d12 - np.minimum(y[1] * d.d122, 0.0),
            ]
        ),
        axis=0,
    )
    reps.append(_report("Psi3", v3, y, tol, s))

    reps.append(_psi4(psi, y, d, s))

    fy = grid.far_y
    fd = psi.evaluate(fy[0], fy[1])
    vfar = np.max(np.abs(np.stack([fd.d1, fd.d2, fd.d12])), axis=0)
    reps.append(_report("Psi5", vfar, fy, TOL_DECAY * peak, s, "grad Psi, d12 Psi at 10x opening"))

    thr = psi.thresholds
    v6 = []
    pts = []
    for i, (dii, diij) in enumerate(((d.d11, d.d112), (d.d22, d.d122))):
        on = y[i] >= thr[i]
        j = 1 - i
        v6.append((2.0 * dii - np.minimum(y[j] * diij, 0.0))[on])
        pts.append(y[:, on])
    reps.append(_report("Psi6", np.concatenate(v6), np.concatenate(pts, axis=1), tol, s, f"y_i >= {thr}"))
    return reps


def _psi4(psi, y, d, spec):
    # bound max|d12 F| (sup psi2' sup y psi1' + sup psi1' sup y psi2') from 1-D grids
    sups = []
    for law in (psi.psi1, psi.psi2):
        g, _ = grid_1d(law)
        _, g1, _ = law.evaluate(g)
        sups.append((float(np.max(g1)), float(np.max(g * g1))))
    a = np.linspace(0.0, 1.0, 11)
    A, B = np.meshgrid(a, a)
    f12 = float(np.max(np.abs(psi.F.d12(A, B))))
    bound = f12 * (sups[1][0] * sups[0][1] + sups[0][0] * sups[1][1])
    val = (y[0] + y[1]) * np.abs(d.d12)
    return _report("Psi4", val - bound, y, TOL_SIGN * max(1.0, bound), spec, f"bound {bound:.6g}")


# ---------------------------------------------------------------- potential


def _boundary_points(grid: Grid, direction: int):
    """Grid points moved onto the boundary ``y_dir = z_dir`` (where ``z_dir > 0``)."""
    keep = grid.z[direction] > 0
    y = grid.y[:, keep].copy()
    z = grid.z[:, keep]
    y[direction] = z[direction]
    return y, z


def _region(u1, u2):
    return Region(1 + int(u1) + 2 * int(u2))


def _continuity(fn, grid, scale):
    """Largest disagreement of the two branch formulas meeting on ``y_i = z_i``."""
    worst, where = [], []
    for i in range(2):
        y, z = _boundary_points(grid, i)
        j = 1 - i
        for unl_j in (False, True):
            sel = (y[j] < z[j]) if unl_j else (y[j] >= z[j])
            if not sel.any():
                continue
            ys, zs = y[:, sel], z[:, sel]
            flags = [False, False]
            flags[j] = unl_j
            load = _region(*flags)
            flags[i] = True
            unload = _region(*flags)
            fa = np.asarray(fn(ys, zs, load))
            fb = np.asarray(fn(ys, zs, unload))
            diff = np.abs(fa - fb).reshape(-1, ys.shape[1]).max(axis=0)
            worst.append(diff / scale)
            where.append(np.concatenate([ys, zs]))
    return np.concatenate(worst), np.concatenate(where, axis=1)


def check_constructed_potential(law: PotentialLaw, grid: Grid | None = None) -> list[CheckReport]:
    psi = law.psi
    grid = grid or standard_grid(psi.openings)
    y, z = grid.y, grid.z
    s = grid.spec
    pts = np.concatenate([y, z])
    peak = _peak(psi, grid)
    tol = TOL_SIGN * peak
    op = np.asarray(grid.openings)
    reps = []

    phi = law.energy(y, z)
    g = law.traction(y, z)
    gz = law.dz(y, z)

    reps.append(_report("Phi1", [abs(float(law.energy([0.0, 0.0], [0.0, 0.0])))], np.zeros((4, 1)), TOL_EXACT, s))

    cont, cpts = _continuity(law.energy, grid, max(1.0, float(np.max(np.abs(phi)))))
    finite = np.where(np.isfinite(phi), 0.0, np.inf)
    reps.append(
        _report(
            "Phi2",
            np.concatenate([cont, finite]),
            np.concatenate([cpts, pts], axis=1),
            TOL_CONT,
            s,
            f"bounded (max |Phi| = {np.max(np.abs(phi)):.6g}) and continuous across regions",
        )
    )

    # Lipschitz in y uniformly in z: |d_yi Phi| <= |d_i Psi| + z_j |d12 Psi| at anchors
    anchors = np.maximum(y, z)
    d = psi.evaluate(anchors[0], anchors[1])
    bound = max(float(np.max(np.abs(d.d1) + anchors[1] * np.abs(d.d12))), float(np.max(np.abs(d.d2) + anchors[0] * np.abs(d.d12))))
    reps.append(_report("Phi3", np.max(np.abs(g), axis=0) - bound, pts, tol, s, f"bound {bound:.6g}"))

    zr = np.maximum(y, z)
    rep = np.abs(phi - law.energy(y, zr))
    reps.append(_report("Phi4", rep, pts, TOL_EXACT * max(1.0, float(np.max(np.abs(phi)))), s))

    reps.append(_report("Phi5", np.max(-gz, axis=0), pts, tol, s, "z -> Phi nondecreasing"))
    reps.append(_report("Phi6", np.max(-g, axis=0), pts, tol, s, "y_l -> Phi nondecreasing"))
    reps.append(_phi7(law, y, z, op, s, tol))
    reps.append(_cross_monotone("Phi8", law.traction, y, z, op, s, tol))

    fg = law.traction(grid.far_y, grid.far_z)
    reps.append(
        _report(
            "Phi9",
            np.max(np.abs(fg), axis=0),
            np.concatenate([grid.far_y, grid.far_z]),
            TOL_DECAY * peak,
            s,
            "grad_y Phi at 10x opening",
        )
    )
    return reps


def _phi7(law, y, z, op, spec, tol):
    """Quadratic convex in the unloading zone, concave in the loading zone."""
    v, where = [], []
    thr = law.thresholds
    for l in range(2):
        # unloading: four equispaced samples in [0, z_l): equal, nonnegative second differences
        on = z[l] > 0
        yy, zz = y[:, on], z[:, on]
        vals = []
        for c in (0.1, 0.35, 0.6, 0.85):
            yc = yy.copy()
            yc[l] = c * zz[l]
            vals.append(law.energy(yc, zz))
        sd1 = vals[0] - 2 * vals[1] + vals[2]
        sd2 = vals[1] - 2 * vals[2] + vals[3]
        v.append(np.maximum(np.abs(sd1 - sd2), -sd1))
        where.append(np.concatenate([yy, zz]))
        # loading: three samples beyond max(z_l, threshold)
        h = 1e-3 * op[l]
        start = np.maximum(y[l], np.maximum(z[l], thr[l]))
        vals = []
        for c in range(3):
            yc = y.copy()
            yc[l] = start + c * h
            vals.append(law.energy(yc, z))
        v.append(vals[0] - 2 * vals[1] + vals[2])
        where.append(np.concatenate([y, z]))
    return _report("Phi7", np.concatenate(v), np.concatenate(where, axis=1), tol, spec, f"loading thresholds {thr}")


def _cross_monotone(hid, traction, y, z, op, spec, tol):
    """``y_j -> traction_l`` nonincreasing for ``l != j`` (forward differences)."""
    base = traction(y, z)
    v = []
    for j in range(2):
        yj = y.copy()
        yj[j] = y[j] + 1e-3 * op[j]
        step = traction(yj, z)
        l = 1 - j
        v.append(step[l] - base[l])
    return _report(hid, np.concatenate(v), np.concatenate([np.concatenate([y, z])] * 2, axis=1), tol, spec)


# ---------------------------------------------------------------- tensions


def check_tension(law: TensionLaw, grid: Grid | None = None) -> list[CheckReport]:
    S = law.S
    grid = grid or standard_grid(law.openings)
    y, z = grid.y, grid.z
    s = grid.spec
    pts = np.concatenate([y, z])
    op = np.asarray(grid.openings)
    thr = law.thresholds
    reps = []

    Sy = S(y[0], y[1])
    peak = max(1.0, float(np.max(np.abs(Sy))))
    tol = TOL_SIGN * peak

    # S1: finite, and small perturbations produce small changes
    h = 1e-7 * op
    jump = np.max(np.abs(S(y[0] + h[0], y[1] + h[1]) - Sy), axis=0)
    lip = np.max(np.abs(S(y[0] + 1e-4 * op[0], y[1] + 1e-4 * op[1]) - Sy)) / 1e-4
    bad = np.where(np.all(np.isfinite(Sy), axis=0), jump, np.inf)
    reps.append(_report("S1", bad, y, max(10 * lip * 1e-7, TOL_CONT * peak), s, f"max |S| = {np.max(np.abs(Sy)):.6g}"))

    fy = grid.far_y
    Sf = S(fy[0], fy[1])
    v2 = np.concatenate([np.max(-Sy, axis=0), np.max(np.abs(Sf), axis=0) - TOL_DECAY * peak + tol])
    reps.append(_report("S2", v2, np.concatenate([y, fy], axis=1), tol, s, "S >= 0 and S -> 0 at 10x opening"))

    v3, w3 = [], []
    for j in range(2):
        yj = y.copy()
        yj[j] = y[j] + 1e-3 * op[j]
        diff = S(yj[0], yj[1]) - Sy
        for i in range(2):
            sel = np.ones(y.shape[1], bool) if i != j else y[i] >= thr[i]
            v3.append(diff[i][sel])
            w3.append(y[:, sel])
    reps.append(_report("S3", np.concatenate(v3), np.concatenate(w3, axis=1), tol, s, f"thresholds {thr}"))

    T = law.traction(y, z)
    cont, cpts = _continuity(law.traction, grid, peak)
    finite = np.where(np.all(np.isfinite(T), axis=0), 0.0, np.inf)
    reps.append(_report("T1", np.concatenate([cont, finite]), np.concatenate([cpts, pts], axis=1), TOL_CONT, s))

    rep = np.max(np.abs(T - law.traction(y, np.maximum(y, z))), axis=0)
    reps.append(_report("T2", rep, pts, TOL_EXACT * peak, s))

    reps.append(_report("T3", np.max(-T, axis=0), pts, tol, s))
    reps.append(_t4(law, y, z, op, thr, s, peak))
    reps.append(_cross_monotone("T5", law.traction, y, z, op, s, tol))

    Tf = law.traction(grid.far_y, grid.far_z)
    reps.append(
        _report("T6", np.max(np.abs(Tf), axis=0), np.concatenate([grid.far_y, grid.far_z]), TOL_DECAY * peak, s)
    )
    return reps


def _t4(law, y, z, op, thr, spec, peak):
    """Linear and nondecreasing on ``[0, z_l]``, nonincreasing beyond ``max(z_l, thr_l)``."""
    v, where = [], []
    for l in range(2):
        on = z[l] > 0
        yy, zz = y[:, on], z[:, on]
        vals = []
        for c in (0.0, 0.5, 1.0):
            yc = yy.copy()
            yc[l] = c * zz[l]
            vals.append(law.traction(yc, zz)[l])
        v.append(np.abs(vals[0] - 2 * vals[1] + vals[2]) / (TOL_EXACT * peak) * (TOL_SIGN * peak))
        v.append(vals[0] - vals[1])
        where += [np.concatenate([yy, zz])] * 2
        h = 1e-3 * op[l]
        start = np.maximum(y[l], np.maximum(z[l], thr[l]))
        yc = y.copy()
        yc[l] = start
        t0 = law.traction(yc, z)[l]
        yc[l] = start + h
        v.append(law.traction(yc, z)[l] - t0)
        where.append(np.concatenate([y, z]))
    return _report("T4", np.concatenate(v), np.concatenate(where, axis=1), TOL_SIGN * peak, spec, f"thresholds {thr}")


# ---------------------------------------------------------------- gradient structure


def check_gradient_consistency(tlaw: TensionLaw, plaw: PotentialLaw, grid: Grid | None = None) -> CheckReport:
    """Does ``T`` coincide with ``grad_y Phi``?  Pass means yes, to ``1e-10``."""
    if tlaw.psi is None or tlaw.psi != plaw.psi:
        raise IncompatibleLaws("tension and potential laws are built from different loading densities")
    psi = plaw.psi
    grid = grid or standard_grid(psi.openings)
    y, z = grid.y, grid.z
    anchors = np.maximum(y, z)
    d = psi.evaluate(anchors[0], anchors[1])
    if np.any(d.grad < 0):
        return CheckReport("T=gradPhi", Status.NA, 0.0, TOL_CONT, None, grid.spec, "clipping active: S != grad Psi")
    gap = np.max(np.abs(tlaw.traction(y, z) - plaw.traction(y, z)), axis=0)
    peak = _peak(psi, grid)
    return _report("T=gradPhi", gap, np.concatenate([y, z]), TOL_CONT, grid.spec, f"peak stress {peak:.6g}")


def run_all(law, grid: Grid | None = None) -> list[CheckReport]:
    """Every applicable checker for a potential or tension law, merged by id."""
    psi = law.psi
    grid = grid or standard_grid(law.openings)
    reps = []
    if psi is not None:
        for i, l1 in enumerate((psi.psi1, psi.psi2), 1):
            reps += [
                CheckReport(f"{r.hypothesis}[{i}]", r.status, r.worst, r.tolerance, r.location, r.grid, r.note)
                for r in check_psi1d(l1)
            ]
    if isinstance(law, PotentialLaw):
        reps += check_loading_density(psi, grid)
        reps += check_constructed_potential(law, grid)
    else:
        reps += check_tension(law, grid)
    return reps

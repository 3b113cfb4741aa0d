"""Two elastic laminates glued by a mixed-mode cohesive interface.

Both layers occupy the same rectangle and share a P1 triangulation; their
relative slip ``delta = u1 - u2`` enters the cohesive law through
``g(delta) = (|delta_1|, |delta_2|)``.  Elastic terms are integrated exactly,
cohesive terms with one barycentric point per triangle, where the history
``gamma`` lives.

Two time-discrete schemes are provided.  The energetic scheme minimises the
total energy at each step with the previous history frozen; the equilibrium
scheme solves the discrete weak form by damped Picard iteration.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

from .mixedmode import PotentialLaw

EDGES = ("left", "right", "bottom", "top")
LEDGER_COLUMNS = ("t", "E", "K", "F", "W", "balance", "max_gamma1", "max_gamma2", "max_abs_delta")


class SingularOperator(ValueError):
    pass


class BoundaryMismatch(ValueError):
    pass


class NonConvergence(RuntimeError):
    def __init__(self, msg, state=None, residual=math.nan):
        super().__init__(msg)
        self.state = state
        self.residual = residual


class FixedPointStall(NonConvergence):
    pass


class Scheme(str, enum.Enum):
    ENERGETIC = "energetic"
    EQUILIBRIUM = "equilibrium"


# ---------------------------------------------------------------- mesh and materials


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray  # (N, 2)
    triangles: np.ndarray  # (M, 3), counter-clockwise
    extent: tuple  # (x0, x1, y0, y1)

    @classmethod
    def rectangle(cls, nx: int, ny: int, extent=(0.0, 4.0, 0.0, 1.0)):
        """Structured mesh, each cell split along its rising diagonal."""
        if nx < 1 or ny < 1:
            raise ValueError("mesh needs at least one cell in each direction")
        x0, x1, y0, y1 = map(float, extent)
        if not (x1 > x0 and y1 > y0):
            raise ValueError("degenerate rectangle")
        xs, ys = np.linspace(x0, x1, nx + 1), np.linspace(y0, y1, ny + 1)
        X, Y = np.meshgrid(xs, ys, indexing="xy")
        nodes = np.column_stack([X.ravel(), Y.ravel()])
        tris = []
        for j in range(ny):
            for i in range(nx):
                a = j * (nx + 1) + i
                b, c, d = a + 1, a + nx + 2, a + nx + 1
                tris += [(a, b, c), (a, c, d)]
        return cls(nodes, np.array(tris, dtype=np.int64), (x0, x1, y0, y1))

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_elements(self):
        return len(self.triangles)

    @property
    def diameter(self):
        x0, x1, y0, y1 = self.extent
        return math.hypot(x1 - x0, y1 - y0)

    def areas(self):
        p = self.nodes[self.triangles]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def edge_nodes(self, edges):
        x0, x1, y0, y1 = self.extent
        x, y = self.nodes[:, 0], self.nodes[:, 1]
        tol = 1e-12 * self.diameter
        sel = np.zeros(self.n_nodes, bool)
        for e in edges:
            if e not in EDGES:
                raise ValueError(f"unknown edge {e!r}; choose from {EDGES}")
            sel |= np.abs({"left": x - x0, "right": x - x1, "bottom": y - y0, "top": y - y1}[e]) <= tol
        return np.flatnonzero(sel)


@dataclass(frozen=True)
class Lame:
    lam: float
    mu: float

    def __post_init__(self):
        if not (self.mu > 0 and self.lam >= 0):
            raise ValueError("isotropic layer needs mu > 0 and lambda >= 0")

    def matrix(self):
        """Plane-strain Voigt matrix acting on ``(e11, e22, 2 e12)``."""
        l, m = self.lam, self.mu
        return np.array([[l + 2 * m, l, 0.0], [l, l + 2 * m, 0.0], [0.0, 0.0, m]])


def _gradients(mesh: Mesh):
    """Constant shape-function gradients, shape ``(M, 3, 2)``."""
    p = mesh.nodes[mesh.triangles]
    J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)  # columns are edge vectors
    Jinv = np.linalg.inv(J)
    ref = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    return np.einsum("ka,mab->mkb", ref, Jinv)


def element_stiffness(mesh: Mesh, mat: Lame):
    """``(M, 6, 6)`` element matrices, dof order ``(x0, y0, x1, y1, x2, y2)``."""
    G = _gradients(mesh)
    B = np.zeros((mesh.n_elements, 3, 6))
    B[:, 0, 0::2] = G[:, :, 0]
    B[:, 1, 1::2] = G[:, :, 1]
    B[:, 2, 0::2] = G[:, :, 1]
    B[:, 2, 1::2] = G[:, :, 0]
    return mesh.areas()[:, None, None] * np.einsum("mai,ab,mbj->mij", B, mat.matrix(), B)


def stiffness_matrix(mesh: Mesh, mat: Lame):
    """Dense global stiffness of one layer, ``(2N, 2N)``."""
    Ke = element_stiffness(mesh, mat)
    dofs = np.stack([2 * mesh.triangles, 2 * mesh.triangles + 1], axis=2).reshape(-1, 6)
    K = np.zeros((2 * mesh.n_nodes, 2 * mesh.n_nodes))
    for e in range(mesh.n_elements):
        K[np.ix_(dofs[e], dofs[e])] += Ke[e]
    return K


# ---------------------------------------------------------------- loading program


@dataclass(frozen=True)
class DisplacementProgram:
    """Affine boundary field ``c(t) + G(t) x``, piecewise linear in time.

    ``values[k] = (c1, c2, G11, G12, G21, G22)`` at knot ``times[k]``.
    """

    times: tuple
    values: tuple

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float).reshape(len(t), 6)
        if t.size < 1 or np.any(np.diff(t) <= 0):
            raise ValueError("program knots must be strictly increasing")
        object.__setattr__(self, "times", tuple(t))
        object.__setattr__(self, "values", tuple(map(tuple, v)))

    @property
    def t0(self):
        return self.times[0]

    @property
    def t_end(self):
        return self.times[-1]

    def coefficients(self, t):
        v = np.asarray(self.values)
        return np.array([np.interp(t, self.times, v[:, j]) for j in range(6)])

    def field(self, t, nodes):
        c = self.coefficients(t)
        G = c[2:].reshape(2, 2)
        return c[:2] + nodes @ G.T

    @classmethod
    def stretch(cls, amount=1.0, t_end=1.0):
        """Monotone uniaxial stretch ``G11: 0 -> amount``."""
        return cls((0.0, t_end), ((0, 0, 0, 0, 0, 0), (0, 0, amount, 0, 0, 0)))


# ---------------------------------------------------------------- problem and state


@dataclass(frozen=True)
class LaminateProblem:
    mesh: Mesh
    layer1: Lame
    layer2: Lame
    dirichlet: tuple
    program: DisplacementProgram
    law: object
    tau: float
    scheme: Scheme = Scheme.ENERGETIC
    tol_min: float = 1e-8
    tol_fp: float = 1e-8
    max_iter: int = 5000
    max_picard: int = 200
    theta: float = 0.5
    eps_reg: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "dirichlet", tuple(self.dirichlet))
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    @property
    def smoothing(self):
        return self.eps_reg if self.eps_reg is not None else 1e-8 * self.mesh.diameter

    def times(self):
        span = self.program.t_end - self.program.t0
        n = span / self.tau
        steps = int(round(n))
        if abs(n - steps) > 1e-9 * max(1.0, n):
            raise ValueError(f"tau={self.tau} does not divide the program duration {span}")
        return self.program.t0 + self.tau * np.arange(steps + 1)


@dataclass(frozen=True)
class QuasistaticState:
    t: float
    u1: np.ndarray  # (N, 2)
    u2: np.ndarray
    gamma: np.ndarray  # (M, 2)
    E: float = math.nan
    K: float = math.nan
    W: float = 0.0
    balance: float = math.nan
    converged: bool = True
    residual: float = 0.0
    iterations: int = 0

    @property
    def F(self):
        return self.E + self.K

    def ledger_row(self, delta):
        return (
            self.t,
            self.E,
            self.K,
            self.F,
            self.W,
            self.balance,
            float(np.max(self.gamma[:, 0])),
            float(np.max(self.gamma[:, 1])),
            float(np.max(np.abs(delta))) if delta.size else 0.0,
        )


@dataclass
class Assembled:
    """Stiffness blocks, Dirichlet split and the cohesive quadrature."""

    problem: LaminateProblem
    A1: np.ndarray
    A2: np.ndarray
    fixed_nodes: np.ndarray
    free: np.ndarray  # free dof indices into the stacked (4N,) vector
    fixed: np.ndarray
    chol: np.ndarray = field(repr=False)  # lower factor of the free block
    areas: np.ndarray = field(repr=False)

    @property
    def mesh(self):
        return self.problem.mesh

    def stack(self, u1, u2):
        return np.concatenate([np.asarray(u1).ravel(), np.asarray(u2).ravel()])

    def split(self, U):
        n = self.mesh.n_nodes
        return U[: 2 * n].reshape(n, 2), U[2 * n :].reshape(n, 2)

    def apply(self, U):
        h = U.size // 2
        return np.concatenate([self.A1 @ U[:h], self.A2 @ U[h:]])

    def lift(self, t):
        lt = self.problem.program.field(t, self.mesh.nodes)
        return self.stack(lt, lt)

    def slip(self, U):
        """Quadrature-point slip ``delta = u1 - u2`` at triangle barycentres, ``(M, 2)``."""
        u1, u2 = self.split(U)
        d = u1 - u2
        return d[self.mesh.triangles].mean(axis=1)

    def cohesive_load(self, coef):
        """Nodal forces of ``sum_e area_e coef_e . delta_e`` as a ``(4N,)`` vector."""
        n = self.mesh.n_nodes
        w = (self.areas / 3.0)[:, None] * coef
        f = np.zeros((n, 2))
        for k in range(3):
            np.add.at(f, self.mesh.triangles[:, k], w)
        return np.concatenate([f.ravel(), -f.ravel()])


def assemble(problem: LaminateProblem) -> Assembled:
    mesh = problem.mesh
    if not problem.dirichlet:
        raise SingularOperator("no Dirichlet edge: the elastic operator is singular")
    A1 = stiffness_matrix(mesh, problem.layer1)
    A2 = stiffness_matrix(mesh, problem.layer2)
    fixed_nodes = mesh.edge_nodes(problem.dirichlet)
    n = mesh.n_nodes
    layer_dofs = np.concatenate([2 * fixed_nodes, 2 * fixed_nodes + 1])
    fixed = np.sort(np.concatenate([layer_dofs, layer_dofs + 2 * n]))
    free = np.setdiff1d(np.arange(4 * n), fixed)
    A = np.zeros((4 * n, 4 * n))
    A[: 2 * n, : 2 * n] = A1
    A[2 * n :, 2 * n :] = A2
    try:
        L = cholesky(A[np.ix_(free, free)], lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularOperator("constrained stiffness is not positive definite") from exc
    return Assembled(problem, A1, A2, fixed_nodes, free, fixed, L, mesh.areas())


# ---------------------------------------------------------------- energies


def cohesive_energy(asm: Assembled, U, gamma):
    """``sum_e |e| Phi(g(delta_e), gamma_e)``, or NaN for a law without energy."""
    law = asm.problem.law
    y = np.abs(asm.slip(U)).T
    K = law.energy(y, gamma.T)
    if K is None:
        return math.nan
    return float(np.dot(asm.areas, K))


def total_energy(asm: Assembled, state: QuasistaticState, t=None):
    """``(E, K, F)`` of ``state``; cohesive energy is unsmoothed."""
    t = state.t if t is None else t
    U = asm.stack(state.u1, state.u2)
    target = asm.lift(t)
    scale = max(1.0, float(np.max(np.abs(target))))
    if np.max(np.abs(U[asm.fixed] - target[asm.fixed]), initial=0.0) > 1e-10 * scale:
        raise BoundaryMismatch(f"displacement violates the Dirichlet program at t={t}")
    E = 0.5 * float(U @ asm.apply(U))
    K = cohesive_energy(asm, U, state.gamma)
    return E, K, E + K


class _Objective:
    """Total energy on the Dirichlet set in whitened coordinates ``x = L^T v_free``."""

    def __init__(self, asm: Assembled, base, gamma):
        self.asm = asm
        self.base = base
        self.gamma_T = gamma.T
        self.eps = asm.problem.smoothing
        self.law = asm.problem.law

    def full(self, x):
        U = self.base.copy()
        U[self.asm.free] += solve_triangular(self.asm.chol, x, lower=True, trans="T")
        return U

    def value_grad_U(self, U):
        asm = self.asm
        AU = asm.apply(U)
        d = asm.slip(U)
        r = np.sqrt(d**2 + self.eps**2)
        y = (r - self.eps).T
        phi = self.law.energy(y, self.gamma_T)
        dphi = self.law.traction(y, self.gamma_T).T
        F = 0.5 * float(U @ AU) + float(np.dot(asm.areas, phi))
        g = AU + asm.cohesive_load(dphi * d / r)
        return F, g

    def __call__(self, x):
        F, g = self.value_grad_U(self.full(x))
        return F, solve_triangular(self.asm.chol, g[self.asm.free], lower=True)

    def residual(self, U):
        _, g = self.value_grad_U(U)
        return float(np.linalg.norm(solve_triangular(self.asm.chol, g[self.asm.free], lower=True)))


def _minimize_from(obj: _Objective, U0, tol, max_iter):
    obj.base = U0.copy()
    x = np.zeros(obj.asm.free.size)
    used = 0
    r = obj.residual(obj.base)
    if r > tol:
        res = minimize(
            obj,
            x,
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": max_iter, "gtol": 0.1 * tol, "ftol": 0.0, "maxcor": 20},
        )
        used = int(res.nit)
        if float(np.linalg.norm(res.jac)) < r:
            x = res.x
    # Near the minimiser energy decrements drop below the rounding noise of F
    # and the line search stalls; whitened gradient steps accepted on a
    # decreasing dual residual finish the job.
    _, g = obj(x)
    r = float(np.linalg.norm(g))
    step = 1.0
    while r > tol and used < max_iter and step > 1e-6:
        xn = x - step * g
        _, gn = obj(xn)
        rn = float(np.linalg.norm(gn))
        used += 1
        if rn < r:
            x, g, r = xn, gn, rn
        else:
            step *= 0.5
    return obj.full(x), r, used


def energetic_step(asm: Assembled, prev: QuasistaticState, t: float) -> QuasistaticState:
    """Minimise ``F(t, ., gamma_prev)`` over the Dirichlet set, then update the history.

    Starts from the pure lift ``l(t)`` and from ``u_prev + l(t) - l(t_prev)``;
    the lower unsmoothed energy wins, and a start is kept if minimisation
    fails to improve on it, so ``F`` never exceeds its value at the starts.
    """
    p = asm.problem
    if not isinstance(p.law, PotentialLaw):
        raise TypeError("the energetic scheme needs a potential-based law")
    lift = asm.lift(t)
    Uprev = asm.stack(prev.u1, prev.u2)
    starts = [lift, Uprev + lift - asm.lift(prev.t)]
    obj = _Objective(asm, lift, prev.gamma)
    best = None
    total_it = 0
    for U0 in starts:
        U0 = U0.copy()
        U0[asm.fixed] = lift[asm.fixed]
        F0 = _exact_F(asm, U0, prev.gamma)
        U, res, it = _minimize_from(obj, U0, p.tol_min, p.max_iter)
        total_it += it
        F = _exact_F(asm, U, prev.gamma)
        if not F <= F0:
            U, F, res = U0, F0, obj.residual(U0)
        if best is None or F < best[1]:
            best = (U, F, res)
    U, _, res = best
    return _finish(asm, prev, t, U, res <= p.tol_min, res, total_it)


def _exact_F(asm, U, gamma):
    E = 0.5 * float(U @ asm.apply(U))
    return E + cohesive_energy(asm, U, gamma)


def _finish(asm, prev, t, U, converged, residual, iterations):
    u1, u2 = asm.split(U)
    gamma = np.maximum(prev.gamma, np.abs(asm.slip(U)))
    st = QuasistaticState(t, u1.copy(), u2.copy(), gamma, converged=bool(converged), residual=residual, iterations=iterations)
    E, K, _ = total_energy(asm, st)
    return replace(st, E=E, K=K)


def _picard_map(asm: Assembled, gamma, t):
    """``s -> `` elastic response to the cohesive force of ``s``, with the lift of ``t``."""
    law = asm.problem.law
    lift = asm.lift(t)
    gT = gamma.T
    rhs_lift = -asm.apply(lift)[asm.free]
    chol = (asm.chol, True)

    def G(s):
        d = asm.slip(s)
        T = law.traction(np.abs(d).T, gT).T
        f = asm.cohesive_load(T * np.sign(d))
        out = lift.copy()
        out[asm.free] += cho_solve(chol, rhs_lift - f[asm.free])
        return out

    return G, lift


def _relative_gap(asm, gs, s):
    num = energy_norm(asm, gs - s)
    den = energy_norm(asm, gs)
    return num / den if den > 0 else num


def equilibrium_residual(asm: Assembled, gamma, U, t):
    """Relative energy-norm fixed-point residual ``|G(U) - U|_A / |G(U)|_A``."""
    G, _ = _picard_map(asm, gamma, t)
    return _relative_gap(asm, G(U), U)


def equilibrium_step(asm: Assembled, prev: QuasistaticState, t: float) -> QuasistaticState:
    """Damped Picard iteration on the discrete weak form.

    Each sweep solves elasticity with the cohesive force of the current
    iterate, ``eta = sign(delta)`` with ``sign(0) = 0``.  The undamped image
    is accepted as soon as it is itself a fixed point to ``tol_fp``;
    otherwise the iterate moves by ``theta`` towards it, and ``theta`` is
    halved whenever the residual grows.  Raises :class:`FixedPointStall`
    after ``max_picard`` sweeps.
    """
    p = asm.problem
    G, lift = _picard_map(asm, prev.gamma, t)
    s = asm.stack(prev.u1, prev.u2) + lift - asm.lift(prev.t)
    s[asm.fixed] = lift[asm.fixed]
    theta = p.theta
    gs = G(s)
    res = _relative_gap(asm, gs, s)
    res_prev = math.inf
    for it in range(1, p.max_picard + 1):
        if res <= p.tol_fp:
            return _finish(asm, prev, t, s, True, res, it)
        g2 = G(gs)
        trial = _relative_gap(asm, g2, gs)
        if trial <= p.tol_fp:
            return _finish(asm, prev, t, gs, True, trial, it)
        if res > res_prev:
            theta *= 0.5
        res_prev = res
        s = (1.0 - theta) * s + theta * gs
        s[asm.fixed] = lift[asm.fixed]
        gs = G(s)
        res = _relative_gap(asm, gs, s)
    st = _finish(asm, prev, t, s, False, res, p.max_picard)
    raise FixedPointStall(f"Picard stalled at t={t}: residual {res:.3e} after {p.max_picard} sweeps", st, res)


# ---------------------------------------------------------------- evolution


@dataclass
class Trajectory:
    asm: Assembled
    states: list

    @property
    def converged(self):
        return all(s.converged for s in self.states)

    @property
    def max_balance(self):
        vals = [s.balance for s in self.states if not math.isnan(s.balance)]
        return max(vals) if vals else math.nan

    def to_csv(self, fh=None):
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(LEDGER_COLUMNS)
        for s in self.states:
            row = s.ledger_row(self.asm.slip(self.asm.stack(s.u1, s.u2)))
            w.writerow(["" if math.isnan(v) else repr(float(v)) for v in row])
        return None if fh is not None else out.getvalue()

    def fields_csv(self, k=-1, fh=None):
        """Nodal displacements of state ``k`` (default: last)."""
        s = self.states[k]
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("node", "x", "y", "u1x", "u1y", "u2x", "u2y"))
        for i, (x, y) in enumerate(self.asm.mesh.nodes):
            w.writerow([i, *(repr(float(v)) for v in (x, y, *s.u1[i], *s.u2[i]))])
        return None if fh is not None else out.getvalue()


def initial_state(asm: Assembled, gamma0=None):
    p = asm.problem
    m = p.mesh.n_elements
    g = np.zeros((m, 2)) if gamma0 is None else np.broadcast_to(np.asarray(gamma0, float), (m, 2)).copy()
    if np.any(g < 0):
        raise ValueError("initial history must be nonnegative")
    lt = p.program.field(p.program.t0, p.mesh.nodes)
    # pseudo-state at t0 carrying the lift and the initial history
    return QuasistaticState(p.program.t0, lt.copy(), lt.copy(), g, E=0.0, K=0.0)


def run_evolution(problem: LaminateProblem, scheme=None, gamma0=None, strict=False) -> Trajectory:
    """Time-stepping from ``t0`` to the end of the program.

    Step 0 solves the scheme's problem at ``t0``.  Work is accumulated by the
    trapezoidal rule; for the energetic scheme each state records the
    balance residual ``|F(t^k) - F(t^0) - W(t^k)|``.  With ``strict`` any
    unconverged energetic step raises :class:`NonConvergence`.
    """
    scheme = Scheme(scheme or problem.scheme)
    asm = assemble(problem)
    step = energetic_step if scheme is Scheme.ENERGETIC else equilibrium_step
    prev = initial_state(asm, gamma0)
    states = []
    for t in problem.times():
        st = step(asm, prev, float(t))
        if strict and not st.converged:
            raise NonConvergence(f"minimisation stalled at t={t}: residual {st.residual:.3e}", st, st.residual)
        if states:
            dl = asm.lift(t) - asm.lift(prev.t)
            Uprev = asm.stack(prev.u1, prev.u2)
            U = asm.stack(st.u1, st.u2)
            W = prev.W + 0.5 * float((asm.apply(Uprev) + asm.apply(U)) @ dl)
        else:
            W = 0.0
        bal = abs(st.F - states[0].F - W) if states else 0.0
        if scheme is not Scheme.ENERGETIC:
            bal = math.nan
        st = replace(st, W=W, balance=bal)
        states.append(st)
        prev = st
    return Trajectory(asm, states)


def energy_inequality_gaps(traj: Trajectory):
    """Per step ``F^k - F^(k-1) - [A u^(k-1) . dl + |dl|_A^2 / 2]``; nonpositive when it holds."""
    asm = traj.asm
    out = []
    for a, b in zip(traj.states, traj.states[1:]):
        dl = asm.lift(b.t) - asm.lift(a.t)
        Ua = asm.stack(a.u1, a.u2)
        bound = float(asm.apply(Ua) @ dl) + 0.5 * float(dl @ asm.apply(dl))
        out.append(b.F - a.F - bound)
    return np.array(out)


def energy_norm(asm: Assembled, U):
    return math.sqrt(max(float(U @ asm.apply(U)), 0.0))

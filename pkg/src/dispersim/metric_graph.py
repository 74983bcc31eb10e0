"""Continuum solvers: step-coefficient line, star graphs, and delta-perturbed line.

All evolutions use Crank-Nicolson on a uniform grid,

    (W - i dt/2 K) u^{n+1} = (W + i dt/2 K) u^n,

where K is a real symmetric stiffness matrix and W a positive diagonal
weight.  The step is the Cayley transform of the W-self-adjoint generator
W^{-1}K, hence exactly unitary in the weighted norm ||u||^2 = h sum w |u|^2
up to linear-solve rounding; conservation is measured, not assumed.

Spatial operators:
  * line with step coefficient sigma: conservative flux form with sigma
    sampled at cell midpoints,
        [(sigma_{k+1/2}(u_{k+1}-u_k) - sigma_{k-1/2}(u_k-u_{k-1})] / h^2;
  * delta potentials: diagonal -alpha_j/h correction at the nearest node;
  * star vertex (Kirchhoff / delta): one shared vertex unknown with lumped
    weight N/2, coupled to each edge head; this reproduces the free line
    exactly when N = 2;
  * star vertex (delta'): one endpoint unknown per edge (weight 1/2 each),
    all pairs coupled through -1/(beta h), the discrete form of the
    value-sum/common-derivative condition (beta = 0 is rejected).

Vertex identities are enforced through the symmetric scheme itself, so
continuity is exact by construction, while derivative-sum residuals
(measured with one-sided second-order stencils and reported in the trace)
vanish at the consistency order O(h^2) of the discretization.

Truncated domain ends are Dirichlet walls; every run measures the relative
mass sitting in the outer buffer cells and reports it as contamination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import NumericalError

#: minimum distance (length units) from datum support to a Dirichlet wall,
#: on top of the sqrt(sigma t)-scaled allowance
FIXED_EDGE_BUFFER = 8.0

#: bound-state search threshold: eigenvalues below -ENERGY_FLOOR count
ENERGY_FLOOR = 1e-8


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class SampledState:
    """Complex samples on the uniform grid x0 + h*(0..n-1); Dirichlet walls sit one cell outside."""

    x0: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128).copy()
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("sampled state needs a nonempty 1-D value array")
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.values.size)

    def norm(self) -> float:
        return math.sqrt(self.h) * float(np.linalg.norm(self.values))


def grid_inner(a: SampledState, b: SampledState) -> complex:
    if a.n != b.n or a.h != b.h:
        raise ValueError("grid mismatch in inner product")
    return complex(a.h * np.vdot(a.values, b.values))


@dataclass(frozen=True)
class StepCoefficient:
    """Piecewise-constant diffusion coefficient: values[i] on (breakpoints[i-1], breakpoints[i])."""

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(bp) + 1:
            raise ValueError("need one more coefficient value than breakpoints")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(v <= 0 for v in vals):
            raise ValueError("coefficient values must be positive")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: float = 1.0) -> "StepCoefficient":
        return cls((), (value,))

    def at(self, x) -> np.ndarray:
        idx = np.searchsorted(np.asarray(self.breakpoints), np.asarray(x, dtype=float), side="right")
        return np.asarray(self.values)[idx]

    @property
    def max_value(self) -> float:
        return max(self.values)


@dataclass(frozen=True)
class Kirchhoff:
    pass


@dataclass(frozen=True)
class Delta:
    strength: float


@dataclass(frozen=True)
class DeltaPrime:
    strength: float

    def __post_init__(self):
        if self.strength == 0.0:
            raise ValueError("delta' with zero strength degenerates; use Kirchhoff/Delta instead")


VertexCondition = Kirchhoff | Delta | DeltaPrime


@dataclass(frozen=True)
class StarGraphSpec:
    edge_count: int
    edge_length: float
    vertex_condition: VertexCondition = field(default_factory=Kirchhoff)

    def __post_init__(self):
        if self.edge_count < 2:
            raise ValueError("a star needs at least 2 edges")
        if self.edge_length <= 0:
            raise ValueError("edge length must be positive")

    def interior_count(self, h: float) -> int:
        """Interior nodes per edge at spacing h (far wall at the truncated end)."""
        m = int(round(self.edge_length / h)) - 1
        if m < 3:
            raise ValueError("edge too short for the requested spacing")
        return m

    def edge_x(self, h: float) -> np.ndarray:
        return h * np.arange(1, self.interior_count(h) + 1)


@dataclass(frozen=True)
class DeltaPotentialSpec:
    """Point interactions alpha_j delta(x - x_j) on the line."""

    strengths: tuple[float, ...]
    positions: tuple[float, ...]

    def __post_init__(self):
        s = tuple(float(v) for v in self.strengths)
        p = tuple(float(v) for v in self.positions)
        if len(s) != len(p):
            raise ValueError("strengths and positions must pair up")
        if any(b <= a for a, b in zip(p, p[1:])):
            raise ValueError("positions must be strictly increasing")
        object.__setattr__(self, "strengths", s)
        object.__setattr__(self, "positions", p)

    @classmethod
    def single(cls, strength: float, position: float = 0.0) -> "DeltaPotentialSpec":
        return cls((strength,), (position,))

    @classmethod
    def empty(cls) -> "DeltaPotentialSpec":
        return cls((), ())


@dataclass(frozen=True)
class BoundState:
    """Negative-energy eigenpair of the grid Hamiltonian, normalized on its grid."""

    energy: float
    x0: float
    h: float
    profile: np.ndarray

    def __post_init__(self):
        prof = np.asarray(self.profile, dtype=float).copy()
        prof.setflags(write=False)
        object.__setattr__(self, "profile", prof)

    def as_state(self) -> SampledState:
        return SampledState(self.x0, self.h, self.profile.astype(np.complex128))


@dataclass
class EvolutionTrace:
    """Sup-norm history of a Crank-Nicolson run plus conservation diagnostics."""

    times: np.ndarray
    sup_norms: np.ndarray
    mass_drift: float
    contamination: float
    vertex_residual: float | None
    final: SampledState | None = None
    final_edges: list[np.ndarray] | None = None
    final_vertex: complex | None = None


# ---------------------------------------------------------------------------
# Crank-Nicolson engine


def _snap_sample_indices(t: float, dt: float, sample_times) -> tuple[int, float, np.ndarray]:
    if t < 0:
        raise ValueError("evolution time must be nonnegative")
    if dt <= 0:
        raise ValueError("time step must be positive")
    if t == 0.0:
        return 0, dt, np.array([0], dtype=int)
    steps = max(1, int(math.ceil(t / dt - 1e-12)))
    dt_eff = t / steps
    if sample_times is None:
        idx = np.array([steps], dtype=int)
    else:
        st = np.asarray(sample_times, dtype=float)
        if np.any(st < 0) or np.any(st > t + 1e-12):
            raise ValueError("sample times must lie in [0, t]")
        idx = np.unique(np.clip(np.round(st / dt_eff).astype(int), 0, steps))
    return steps, dt_eff, idx


def _cn_run(
    stiffness: scipy.sparse.spmatrix,
    weights: np.ndarray,
    h: float,
    u0: np.ndarray,
    t: float,
    dt: float,
    sample_times,
    residual_fn=None,
    buffer_mask: np.ndarray | None = None,
):
    """March u' : (W - i dt/2 K) u' = (W + i dt/2 K) u, recording requested samples."""
    steps, dt_eff, sample_idx = _snap_sample_indices(t, dt, sample_times)
    u = np.asarray(u0, dtype=np.complex128).copy()
    mass0 = math.sqrt(h) * float(np.sqrt(np.sum(weights * np.abs(u) ** 2)))

    w_mat = scipy.sparse.diags(weights)
    lam = 0.5 * dt_eff
    a_mat = (w_mat - 1j * lam * stiffness).tocsc()
    b_mat = (w_mat + 1j * lam * stiffness).tocsr()
    try:
        solver = scipy.sparse.linalg.splu(a_mat)
    except Exception as exc:
        raise NumericalError(f"Crank-Nicolson factorization failed: {exc}") from exc

    rec_times, rec_sups = [], []
    drift = 0.0
    contamination = 0.0
    residual = 0.0 if residual_fn is not None else None

    def record(step: int):
        nonlocal drift, contamination, residual
        rec_times.append(step * dt_eff if steps > 0 else 0.0)
        rec_sups.append(float(np.max(np.abs(u))))
        mass = math.sqrt(h) * float(np.sqrt(np.sum(weights * np.abs(u) ** 2)))
        drift = max(drift, abs(mass - mass0))
        if buffer_mask is not None and mass > 0:
            edge = math.sqrt(h) * float(np.sqrt(np.sum(weights[buffer_mask] * np.abs(u[buffer_mask]) ** 2)))
            contamination = max(contamination, edge / mass)
        if residual_fn is not None:
            residual = max(residual, float(residual_fn(u)))

    wanted = set(int(i) for i in sample_idx)
    if 0 in wanted:
        record(0)
    for step in range(1, steps + 1):
        u = solver.solve(b_mat @ u)
        if step in wanted:
            record(step)

    return (
        np.asarray(rec_times),
        np.asarray(rec_sups),
        drift,
        contamination,
        residual,
        u,
    )


def _check_edge_buffer(values: np.ndarray, h: float, sigma_max: float, t: float, label: str):
    """Reject data whose support sits closer to a wall than the spreading allowance."""
    mag = np.abs(values)
    peak = float(mag.max())
    if peak == 0.0:
        raise ValueError(f"{label}: datum is identically zero")
    supp = np.nonzero(mag > 1e-13 * peak)[0]
    required = 24.0 * math.sqrt(sigma_max) * math.sqrt(abs(t)) + FIXED_EDGE_BUFFER
    left = supp[0] * h
    right = (values.size - 1 - supp[-1]) * h
    if min(left, right) < required:
        raise ValueError(
            f"{label}: datum support is {min(left, right):.1f} from a wall; "
            f"need at least {required:.1f} for |t| = {abs(t)}"
        )


def _buffer_mask(n: int, h: float) -> np.ndarray:
    cells = max(4, int(round(FIXED_EDGE_BUFFER / h)))
    mask = np.zeros(n, dtype=bool)
    mask[:cells] = True
    mask[-cells:] = True
    return mask


# ---------------------------------------------------------------------------
# line solvers


def _line_stiffness(sigma: StepCoefficient, x: np.ndarray, h: float) -> scipy.sparse.spmatrix:
    mid_right = sigma.at(x + 0.5 * h)
    mid_left = sigma.at(x - 0.5 * h)
    diag = -(mid_left + mid_right) / h**2
    off = mid_right[:-1] / h**2
    return scipy.sparse.diags([off, diag, off], [-1, 0, 1])


def evolve_stepline(
    sigma: StepCoefficient,
    phi: SampledState,
    t: float,
    dt: float,
    sample_times=None,
) -> EvolutionTrace:
    """i u_t + (sigma u_x)_x = 0 on a truncated line with Dirichlet walls."""
    if dt > phi.h:
        raise ValueError(f"dt = {dt} exceeds h = {phi.h}; refusing an accuracy-hostile step")
    _check_edge_buffer(phi.values, phi.h, sigma.max_value, t, "stepline")
    stiffness = _line_stiffness(sigma, phi.x, phi.h)
    weights = np.ones(phi.n)
    times, sups, drift, contamination, _, final = _cn_run(
        stiffness, weights, phi.h, phi.values, t, dt, sample_times,
        buffer_mask=_buffer_mask(phi.n, phi.h),
    )
    return EvolutionTrace(
        times=times,
        sup_norms=sups,
        mass_drift=drift,
        contamination=contamination,
        vertex_residual=None,
        final=SampledState(phi.x0, phi.h, final),
    )


def evolve_delta_line(
    spec: DeltaPotentialSpec,
    phi: SampledState,
    t: float,
    dt: float,
    sample_times=None,
) -> EvolutionTrace:
    """Free line plus point interactions: i u_t + u_xx - sum alpha_j delta(x-x_j) u = 0."""
    if dt > phi.h:
        raise ValueError(f"dt = {dt} exceeds h = {phi.h}; refusing an accuracy-hostile step")
    _check_edge_buffer(phi.values, phi.h, 1.0, t, "delta line")
    h = phi.h
    diag = np.full(phi.n, -2.0 / h**2)
    off = np.full(phi.n - 1, 1.0 / h**2)
    for alpha, pos in zip(spec.strengths, spec.positions):
        k = int(round((pos - phi.x0) / h))
        if not (0 <= k < phi.n):
            raise ValueError(f"delta position {pos} falls outside the grid")
        diag[k] -= alpha / h
    stiffness = scipy.sparse.diags([off, diag, off], [-1, 0, 1])
    weights = np.ones(phi.n)
    times, sups, drift, contamination, _, final = _cn_run(
        stiffness, weights, h, phi.values, t, dt, sample_times,
        buffer_mask=_buffer_mask(phi.n, h),
    )
    return EvolutionTrace(
        times=times,
        sup_norms=sups,
        mass_drift=drift,
        contamination=contamination,
        vertex_residual=None,
        final=SampledState(phi.x0, h, final),
    )


# ---------------------------------------------------------------------------
# star graphs


def _star_system_shared_vertex(spec: StarGraphSpec, h: float, alpha: float, m: int):
    """Stiffness/weights for Kirchhoff (alpha = 0) or delta coupling: layout [v, edge0(1..m), edge1, ...]."""
    n_edges = spec.edge_count
    size = 1 + n_edges * m
    rows, cols, vals = [], [], []
    inv_h2 = 1.0 / h**2

    def add(i, j, v):
        rows.append(i)
        cols.append(j)
        vals.append(v)

    add(0, 0, -n_edges * inv_h2 - alpha / h)
    for e in range(n_edges):
        base = 1 + e * m
        add(0, base, inv_h2)
        add(base, 0, inv_h2)
        for k in range(m):
            add(base + k, base + k, -2.0 * inv_h2)
            if k + 1 < m:
                add(base + k, base + k + 1, inv_h2)
                add(base + k + 1, base + k, inv_h2)
    stiffness = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()
    weights = np.ones(size)
    weights[0] = 0.5 * n_edges
    return stiffness, weights


def _star_system_delta_prime(spec: StarGraphSpec, h: float, beta: float, m: int):
    """Stiffness/weights for delta' coupling: layout [edge0(0..m), edge1(0..m), ...]."""
    n_edges = spec.edge_count
    per = m + 1
    size = n_edges * per
    rows, cols, vals = [], [], []
    inv_h2 = 1.0 / h**2

    def add(i, j, v):
        rows.append(i)
        cols.append(j)
        vals.append(v)

    for e in range(n_edges):
        base = e * per
        add(base, base, -inv_h2)
        for k in range(1, per):
            add(base + k, base + k, -2.0 * inv_h2)
        for k in range(per - 1):
            add(base + k, base + k + 1, inv_h2)
            add(base + k + 1, base + k, inv_h2)
    for e1 in range(n_edges):
        for e2 in range(n_edges):
            add(e1 * per, e2 * per, -1.0 / (beta * h))
    stiffness = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()
    weights = np.ones(size)
    weights[:: per] = 0.5
    return stiffness, weights


def _one_sided_derivative(u0, u1, u2, h: float):
    return (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * h)


def evolve_star(
    spec: StarGraphSpec,
    phi_edges,
    t: float,
    dt: float,
    sample_times=None,
) -> EvolutionTrace:
    """Schrodinger evolution on a star of half-lines truncated to length edge_length.

    phi_edges: one complex array per edge, sampled on spec.edge_x(h); the grid
    spacing is inferred from the array length.  The vertex datum starts at 0.
    """
    n_edges = spec.edge_count
    if len(phi_edges) != n_edges:
        raise ValueError(f"expected {n_edges} edge data arrays, got {len(phi_edges)}")
    arrays = [np.asarray(a, dtype=np.complex128) for a in phi_edges]
    m = arrays[0].size
    if any(a.size != m for a in arrays):
        raise ValueError("all edges must carry the same number of samples")
    h = spec.edge_length / (m + 1)
    if dt > h:
        raise ValueError(f"dt = {dt} exceeds h = {h}; refusing an accuracy-hostile step")
    stacked_for_buffer = np.concatenate([[0.0], np.abs(np.concatenate(arrays))])
    # far-wall allowance on every edge; vertex side needs no buffer
    for e, arr in enumerate(arrays):
        mag = np.abs(arr)
        if mag.max() > 0:
            supp_hi = int(np.nonzero(mag > 1e-13 * mag.max())[0][-1])
            right = (m - 1 - supp_hi) * h
            required = 24.0 * math.sqrt(abs(t)) + FIXED_EDGE_BUFFER
            if right < required:
                raise ValueError(
                    f"star edge {e}: datum support is {right:.1f} from the truncated end; "
                    f"need at least {required:.1f} for |t| = {abs(t)}"
                )
    if not np.any(np.abs(np.concatenate(arrays)) > 0):
        raise ValueError("star datum is identically zero")

    vc = spec.vertex_condition
    if isinstance(vc, (Kirchhoff, Delta)):
        alpha = vc.strength if isinstance(vc, Delta) else 0.0
        stiffness, weights = _star_system_shared_vertex(spec, h, alpha, m)
        u0 = np.concatenate([[0.0 + 0.0j], *arrays])

        def residual_fn(u):
            derivs = [
                _one_sided_derivative(u[0], u[1 + e * m], u[1 + e * m + 1], h)
                for e in range(n_edges)
            ]
            return abs(sum(derivs) - alpha * u[0])

        buffer_mask = np.zeros(u0.size, dtype=bool)
        cells = max(4, int(round(FIXED_EDGE_BUFFER / h)))
        for e in range(n_edges):
            buffer_mask[1 + e * m + m - cells : 1 + (e + 1) * m] = True
    else:
        beta = vc.strength
        stiffness, weights = _star_system_delta_prime(spec, h, beta, m)
        u0 = np.concatenate([np.concatenate([[0.0 + 0.0j], a]) for a in arrays])
        per = m + 1

        def residual_fn(u):
            derivs = np.array(
                [
                    _one_sided_derivative(u[e * per], u[e * per + 1], u[e * per + 2], h)
                    for e in range(n_edges)
                ]
            )
            mean_d = derivs.mean()
            value_sum = sum(u[e * per] for e in range(n_edges))
            return max(float(np.max(np.abs(derivs - mean_d))), abs(value_sum - beta * mean_d))

        buffer_mask = np.zeros(u0.size, dtype=bool)
        cells = max(4, int(round(FIXED_EDGE_BUFFER / h)))
        for e in range(n_edges):
            buffer_mask[e * per + per - cells : (e + 1) * per] = True

    times, sups, drift, contamination, residual, final = _cn_run(
        stiffness, weights, h, u0, t, dt, sample_times, residual_fn, buffer_mask
    )

    if isinstance(vc, (Kirchhoff, Delta)):
        final_vertex = complex(final[0])
        final_edges = [final[1 + e * m : 1 + (e + 1) * m] for e in range(n_edges)]
    else:
        per = m + 1
        final_vertex = complex(final[0])  # edge 0 endpoint value
        final_edges = [final[e * per + 1 : (e + 1) * per] for e in range(n_edges)]
    return EvolutionTrace(
        times=times,
        sup_norms=sups,
        mass_drift=drift,
        contamination=contamination,
        vertex_residual=residual,
        final_edges=final_edges,
        final_vertex=final_vertex,
    )


# ---------------------------------------------------------------------------
# bound states and spectral projection


def bound_states(spec: DeltaPotentialSpec, x0: float, h: float, n: int) -> list[BoundState]:
    """All negative-energy eigenpairs of -d^2/dx^2 + sum alpha_j delta(x - x_j) on the grid."""
    if n < 8:
        raise ValueError("grid too small for a bound-state search")
    x_end = x0 + h * (n - 1)
    for pos in spec.positions:
        if not (x0 + 5 * h <= pos <= x_end - 5 * h):
            raise ValueError(f"delta position {pos} too close to the grid boundary")
    diag = np.full(n, 2.0 / h**2)
    for alpha, pos in zip(spec.strengths, spec.positions):
        k = int(round((pos - x0) / h))
        diag[k] += alpha / h
    off = np.full(n - 1, -1.0 / h**2)
    lower = float(diag.min() - 2.0 / h**2 - 1.0)
    try:
        w, v = scipy.linalg.eigh_tridiagonal(
            diag, off, select="v", select_range=(lower, -ENERGY_FLOOR)
        )
    except Exception as exc:
        raise NumericalError(f"bound-state eigensolve failed: {exc}") from exc
    out = []
    for i in range(w.size):
        prof = v[:, i] / (math.sqrt(h) * float(np.linalg.norm(v[:, i])))
        if prof[np.argmax(np.abs(prof))] < 0:
            prof = -prof
        out.append(BoundState(float(w[i]), x0, h, prof))
    return out


def project_continuous(phi: SampledState, states: list[BoundState]) -> SampledState:
    """Remove the bound-state components: phi - sum <b, phi> b in the grid inner product."""
    if not states:
        return phi
    profiles = []
    for b in states:
        if b.profile.size != phi.n or b.h != phi.h:
            raise ValueError("bound state lives on a different grid than the datum")
        profiles.append(b.profile)
    for i in range(len(profiles)):
        for j in range(i + 1, len(profiles)):
            overlap = abs(phi.h * float(np.dot(profiles[i], profiles[j])))
            if overlap > 1e-8:
                raise ValueError(f"bound states {i} and {j} are not orthogonal ({overlap:.2e})")
    out = phi.values.copy()
    for prof in profiles:
        out -= (phi.h * np.vdot(prof, out)) * prof
    return SampledState(phi.x0, phi.h, out)


def single_delta_bound_energy(alpha: float) -> float | None:
    """Continuum secular equation for one delta: kappa = -alpha/2 > 0, E = -alpha^2/4."""
    if alpha >= 0:
        return None
    return -(alpha**2) / 4.0


# ---------------------------------------------------------------------------
# general (A, B) vertex couplings


@dataclass(frozen=True)
class VertexCoupling:
    """General vertex condition A u(v) + B u'(v) = 0 at a degree-d vertex."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise ValueError("A and B must be square matrices of the same degree")
        a = a.copy()
        b = b.copy()
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def degree(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True)
class CouplingCheck:
    valid: bool
    rank: int
    rank_ok: bool
    product_defect: float
    product_ok: bool
    message: str

    def __bool__(self) -> bool:
        return self.valid


def validate_coupling(vc: VertexCoupling) -> CouplingCheck:
    """Self-adjointness test: [A B] has maximal rank d and A B^T is symmetric."""
    d = vc.degree
    block = np.hstack([vc.a, vc.b])
    scale = float(np.linalg.norm(block))
    if scale == 0.0:
        return CouplingCheck(False, 0, False, 0.0, True, f"rank deficient: [A B] has rank 0; need full rank {d}")
    _, r, _ = scipy.linalg.qr(block, pivoting=True, mode="economic")
    rank = int(np.sum(np.abs(np.diag(r)) > 1e-10 * scale))
    rank_ok = rank == d
    prod = vc.a @ vc.b.T
    defect = float(np.max(np.abs(prod - prod.T)))
    norm_a = float(np.linalg.norm(vc.a))
    norm_b = float(np.linalg.norm(vc.b))
    product_ok = defect <= 1e-10 * (1.0 + norm_a * norm_b)
    if rank_ok and product_ok:
        msg = "valid self-adjoint coupling"
    elif not rank_ok:
        msg = f"rank deficient: [A B] has rank {rank}; need full rank {d}"
    else:
        msg = f"non-symmetric product: max |A B^T - B A^T| = {defect:.3e}"
    return CouplingCheck(rank_ok and product_ok, rank, rank_ok, defect, product_ok, msg)


def kirchhoff_coupling(degree: int) -> VertexCoupling:
    """Value continuity plus vanishing derivative sum."""
    a = np.zeros((degree, degree))
    for i in range(degree - 1):
        a[i, i] = 1.0
        a[i, i + 1] = -1.0
    b = np.zeros((degree, degree))
    b[degree - 1, :] = 1.0
    return VertexCoupling(a, b)


def delta_vertex_coupling(degree: int, alpha: float) -> VertexCoupling:
    """Value continuity plus derivative sum = alpha * common value."""
    vc = kirchhoff_coupling(degree)
    a = vc.a.copy()
    a[degree - 1, 0] = -alpha
    return VertexCoupling(a, vc.b)


def dirichlet_coupling(degree: int) -> VertexCoupling:
    return VertexCoupling(np.eye(degree), np.zeros((degree, degree)))


def neumann_coupling(degree: int) -> VertexCoupling:
    return VertexCoupling(np.zeros((degree, degree)), np.eye(degree))

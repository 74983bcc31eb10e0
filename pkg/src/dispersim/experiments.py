"""Experiment runners behind the CLI subcommands.

Each runner turns a flat config into CSV rows plus manifest entries.
Any diagnostic that crosses its declared threshold is appended to the
flags list, which the manifest records verbatim.  Parallel fan-out over
independent parameter points preserves input order, so output bytes do
not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import decay, evolution, kernel, metric_graph
from .config import Config, fmt17, read_csv
from .errors import ConfigError
from .lattice import CoupledLatticeSpec, LatticeState, lp_norm

MASS_TOL_MULTIPLIER = 1e-10
MASS_TOL_EIG = 1e-9
MASS_TOL_CN = 1e-10
CONTAMINATION_TOL = 1e-8
BOUNDARY_TOL = 1e-10


@dataclass
class RunResult:
    schema: str
    columns: list[str]
    rows: list[tuple]
    info: dict[str, str] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    schema_tokens: dict[str, str] = field(default_factory=dict)


def _map_ordered(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# datum builders


def lattice_gaussian(center: int, width: float) -> LatticeState:
    """Discrete Gaussian exp(-(j-c)^2 / (4 w^2)) truncated at ~1e-18."""
    span = int(math.ceil(width * 13.0)) + 1
    j = np.arange(center - span, center + span + 1)
    return LatticeState(center - span, np.exp(-((j - center) ** 2) / (4.0 * width**2)))


def gaussian_profile(x: np.ndarray, center: float, width: float, carrier: float = 0.0) -> np.ndarray:
    """Continuum Gaussian exp(-(x-c)^2/(2 s^2)) with optional plane-wave carrier."""
    env = np.exp(-((np.asarray(x) - center) ** 2) / (2.0 * width**2))
    if carrier:
        return env * np.exp(1j * carrier * np.asarray(x))
    return env.astype(np.complex128)


def _lattice_datum(cfg: Config, default_site: int = 0) -> LatticeState:
    kind = cfg.get_choice("datum", ("delta", "gaussian"), default="delta")
    if kind == "delta":
        return LatticeState.delta(cfg.get_int("site", default_site))
    center = cfg.get_int("center", default_site)
    width = cfg.get_float("width", 2.0)
    if width <= 0:
        raise ConfigError("gaussian width must be positive", source=cfg.source, key="width")
    return lattice_gaussian(center, width)


def _grid_datum(cfg: Config, x: np.ndarray) -> np.ndarray:
    center = cfg.get_float("center", required=True)
    width = cfg.get_float("width", required=True)
    if width <= 0:
        raise ConfigError("gaussian width must be positive", source=cfg.source, key="width")
    carrier = cfg.get_float("carrier", 0.0)
    return gaussian_profile(x, center, width, carrier)


def _uniform_grid(cfg: Config) -> tuple[float, float, int]:
    x_min = cfg.get_float("x_min", required=True)
    x_max = cfg.get_float("x_max", required=True)
    h = cfg.get_float("h", required=True)
    if h <= 0 or x_max <= x_min:
        raise ConfigError("need x_min < x_max and h > 0", source=cfg.source, key="h")
    n = int(round((x_max - x_min) / h)) + 1
    return x_min, h, n


# ---------------------------------------------------------------------------
# experiment runners


def run_kernel(cfg: Config, threads: int) -> RunResult:
    t_grid = cfg.get_time_grid()
    j_values = cfg.get_ints("j_values", required=True)
    method = cfg.get_choice("method", ("bessel", "quadrature"), default="bessel")
    tol = cfg.get_float("tol", 1e-10)
    pairs = [(float(t), int(j)) for t in t_grid for j in j_values]

    def one(pair):
        t, j = pair
        if method == "bessel":
            val = kernel.kernel_bessel(t, j)
        else:
            val = kernel.kernel_quadrature(t, j, tol)
        return (t, j, val.real, val.imag)

    rows = _map_ordered(one, pairs, threads)
    return RunResult(
        schema="dispersim.kernel.v1",
        columns=["t", "j", "re", "im"],
        rows=rows,
        info={"method": method, "tol": fmt17(tol)},
    )


def run_line(cfg: Config, threads: int) -> RunResult:
    phi = _lattice_datum(cfg)
    t_grid = cfg.get_time_grid()
    flags: list[str] = []

    def one(t):
        res = evolution.evolve_line(phi, float(t))
        return res

    results = _map_ordered(one, t_grid, threads)
    rows = []
    for t, res in zip(t_grid, results):
        rows.append((float(t), lp_norm(res.state, np.inf), lp_norm(res.state, 2),
                     res.mass_drift, res.contamination))
        if res.mass_drift > MASS_TOL_MULTIPLIER:
            flags.append(f"mass_drift {res.mass_drift:.3e} above {MASS_TOL_MULTIPLIER} at t={t}")
        if res.contamination > CONTAMINATION_TOL:
            flags.append(f"contamination {res.contamination:.3e} above {CONTAMINATION_TOL} at t={t}")
    return RunResult(
        schema="dispersim.decay.v1",
        columns=["t", "sup_norm", "l2_norm", "mass_drift", "contamination"],
        rows=rows,
        info={"datum_l1": fmt17(lp_norm(phi, 1))},
        flags=flags,
        schema_tokens={"theory_slope": fmt17(-1.0 / 3.0)},
    )


def run_halfline(cfg: Config, threads: int) -> RunResult:
    bc = evolution.BoundaryCondition(cfg.get_choice("bc", ("dirichlet", "neumann"), default="dirichlet"))
    phi = _lattice_datum(cfg, default_site=1)
    if phi.offset < 1:
        raise ConfigError("half-line datum must be supported on j >= 1", source=cfg.source, key="datum")
    t_grid = cfg.get_time_grid()
    flags: list[str] = []

    results = _map_ordered(lambda t: evolution.evolve_halfline(phi, float(t), bc), t_grid, threads)
    rows = []
    for t, res in zip(t_grid, results):
        rows.append((float(t), lp_norm(res.state, np.inf), lp_norm(res.state, 2),
                     res.mass_drift, res.boundary_residual))
        if res.mass_drift > MASS_TOL_MULTIPLIER:
            flags.append(f"mass_drift {res.mass_drift:.3e} above {MASS_TOL_MULTIPLIER} at t={t}")
        if res.boundary_residual > BOUNDARY_TOL:
            flags.append(f"boundary_residual {res.boundary_residual:.3e} above {BOUNDARY_TOL} at t={t}")
    return RunResult(
        schema="dispersim.decay.v1",
        columns=["t", "sup_norm", "l2_norm", "mass_drift", "boundary_residual"],
        rows=rows,
        info={"bc": bc.value},
        flags=flags,
        schema_tokens={"theory_slope": fmt17(-1.0 / 3.0)},
    )


def run_coupled(cfg: Config, threads: int) -> RunResult:
    spec = CoupledLatticeSpec(
        b1=cfg.get_float("b1", required=True),
        b2=cfg.get_float("b2", required=True),
        truncation=cfg.get_int("truncation", required=True),
    )
    phi = _lattice_datum(cfg, default_site=-3)
    t_grid = cfg.get_time_grid()
    flags: list[str] = []
    rows = []
    for t in t_grid:  # sequential: the cached eigendecomposition dominates anyway
        res = evolution.evolve_coupled(spec, phi, float(t))
        rows.append((float(t), lp_norm(res.state, np.inf), lp_norm(res.state, 2), res.mass_drift))
        if res.mass_drift > MASS_TOL_EIG:
            flags.append(f"mass_drift {res.mass_drift:.3e} above {MASS_TOL_EIG} at t={t}")
        if res.contamination > CONTAMINATION_TOL:
            flags.append(f"contamination {res.contamination:.3e} above {CONTAMINATION_TOL} at t={t}")
    return RunResult(
        schema="dispersim.decay.v1",
        columns=["t", "sup_norm", "l2_norm", "mass_drift"],
        rows=rows,
        info={"b1": fmt17(spec.b1), "b2": fmt17(spec.b2), "truncation": str(spec.truncation)},
        flags=flags,
        schema_tokens={"theory_slope": fmt17(-1.0 / 3.0)},
    )


def _cn_decay_rows(trace: metric_graph.EvolutionTrace, flags: list[str]) -> list[tuple]:
    if trace.mass_drift > MASS_TOL_CN:
        flags.append(f"mass_drift {trace.mass_drift:.3e} above {MASS_TOL_CN}")
    if trace.contamination > CONTAMINATION_TOL:
        flags.append(f"contamination {trace.contamination:.3e} above {CONTAMINATION_TOL}")
    return [(float(t), float(s)) for t, s in zip(trace.times, trace.sup_norms)]


def run_stepline(cfg: Config, threads: int) -> RunResult:
    sigma = metric_graph.StepCoefficient(
        tuple(cfg.get_floats("sigma_breakpoints", default=[])),
        tuple(cfg.get_floats("sigma_values", default=[1.0])),
    )
    x0, h, n = _uniform_grid(cfg)
    dt = cfg.get_float("dt", required=True)
    x = x0 + h * np.arange(n)
    phi = metric_graph.SampledState(x0, h, _grid_datum(cfg, x))
    t_grid = cfg.get_time_grid()
    trace = metric_graph.evolve_stepline(sigma, phi, float(t_grid[-1]), dt, sample_times=t_grid)
    flags: list[str] = []
    rows = _cn_decay_rows(trace, flags)
    return RunResult(
        schema="dispersim.decay.v1",
        columns=["t", "sup_norm"],
        rows=rows,
        info={
            "mass_drift": fmt17(trace.mass_drift),
            "contamination": fmt17(trace.contamination),
            "grid_points": str(n),
        },
        flags=flags,
        schema_tokens={"theory_slope": fmt17(-0.5)},
    )


def run_star(cfg: Config, threads: int) -> RunResult:
    coupling = cfg.get_choice("coupling", ("kirchhoff", "delta", "delta-prime"), default="kirchhoff")
    if coupling == "kirchhoff":
        condition = metric_graph.Kirchhoff()
    elif coupling == "delta":
        condition = metric_graph.Delta(cfg.get_float("strength", required=True))
    else:
        condition = metric_graph.DeltaPrime(cfg.get_float("strength", required=True))
    spec = metric_graph.StarGraphSpec(
        edge_count=cfg.get_int("edges", required=True),
        edge_length=cfg.get_float("edge_length", required=True),
        vertex_condition=condition,
    )
    h = cfg.get_float("h", required=True)
    dt = cfg.get_float("dt", required=True)
    x = spec.edge_x(h)
    datum = _grid_datum(cfg, x)
    edges = [datum] + [np.zeros_like(datum) for _ in range(spec.edge_count - 1)]
    t_grid = cfg.get_time_grid()
    trace = metric_graph.evolve_star(spec, edges, float(t_grid[-1]), dt, sample_times=t_grid)
    flags: list[str] = []
    rows = _cn_decay_rows(trace, flags)
    return RunResult(
        schema="dispersim.decay.v1",
        columns=["t", "sup_norm"],
        rows=rows,
        info={
            "mass_drift": fmt17(trace.mass_drift),
            "contamination": fmt17(trace.contamination),
            "vertex_residual": fmt17(trace.vertex_residual),
            "coupling": coupling,
        },
        flags=flags,
        schema_tokens={"theory_slope": fmt17(-0.5)},
    )


def run_delta_line(cfg: Config, threads: int) -> RunResult:
    spec = metric_graph.DeltaPotentialSpec(
        tuple(cfg.get_floats("strengths", default=[])),
        tuple(cfg.get_floats("positions", default=[])),
    )
    x0, h, n = _uniform_grid(cfg)
    dt = cfg.get_float("dt", required=True)
    x = x0 + h * np.arange(n)
    values = _grid_datum(cfg, x)
    phi = metric_graph.SampledState(x0, h, values)
    info: dict[str, str] = {}
    if cfg.get_bool("project", False):
        states = metric_graph.bound_states(spec, x0, h, n)
        info["bound_state_count"] = str(len(states))
        for i, b in enumerate(states):
            info[f"bound_state_energy.{i}"] = fmt17(b.energy)
        phi = metric_graph.project_continuous(phi, states)
    t_grid = cfg.get_time_grid()
    trace = metric_graph.evolve_delta_line(spec, phi, float(t_grid[-1]), dt, sample_times=t_grid)
    flags: list[str] = []
    rows = _cn_decay_rows(trace, flags)
    info.update(mass_drift=fmt17(trace.mass_drift), contamination=fmt17(trace.contamination))
    return RunResult(
        schema="dispersim.decay.v1",
        columns=["t", "sup_norm"],
        rows=rows,
        info=info,
        flags=flags,
        schema_tokens={"theory_slope": fmt17(-0.5)},
    )


def run_torus(cfg: Config, threads: int) -> RunResult:
    cutoff = cfg.get_int("cutoff", required=True)
    coeff_raw = cfg.get_str("coefficients", "ones")
    if coeff_raw == "ones":
        data = decay.TorusData.ones(cutoff)
    else:
        data = decay.TorusData(cutoff, np.array(cfg.get_floats("coefficients", required=True)))
    oversample = cfg.get_int("oversample", 8)
    t_grid = cfg.get_time_grid()
    sups = _map_ordered(lambda t: decay.torus_supnorm(data, float(t), oversample), t_grid, threads)
    l1 = decay.torus_l1_norm(data)
    rows = [(float(t), sup, math.sqrt(abs(t)) * sup / l1) for t, sup in zip(t_grid, sups)]
    return RunResult(
        schema="dispersim.torus.v1",
        columns=["t", "sup_norm", "scaled"],
        rows=rows,
        info={"l1_norm": fmt17(l1), "cutoff": str(cutoff), "oversample": str(oversample)},
    )


def run_alphap(cfg: Config, threads: int) -> RunResult:
    p_raw = cfg.get_str("p", required=True)
    p = math.inf if p_raw in ("inf", "infinity") else float(p_raw)
    t_grid = cfg.get_time_grid()
    norms = _map_ordered(lambda t: decay.kernel_lp_norm(float(t), p), t_grid, threads)
    window = None
    if cfg.has("fit_t_min") or cfg.has("fit_t_max"):
        window = (cfg.get_float("fit_t_min", float(t_grid[0])),
                  cfg.get_float("fit_t_max", float(t_grid[-1])))
    fit = decay.fit_decay(t_grid, norms, window, theoretical=-decay.alpha_p_theory(p))
    rows = [(float(t), float(n)) for t, n in zip(t_grid, norms)]
    return RunResult(
        schema="dispersim.decay.v1",
        columns=["t", "norm"],
        rows=rows,
        info={
            "p": p_raw,
            "slope": fmt17(fit.slope),
            "intercept": fmt17(fit.intercept),
            "r_squared": fmt17(fit.r_squared),
            "theoretical_slope": fmt17(fit.theoretical),
        },
        schema_tokens={"theory_slope": fmt17(fit.theoretical)},
    )


def run_fit(cfg: Config, threads: int) -> RunResult:
    csv_in = cfg.get_str("csv_in", required=True)
    _, tokens, columns, raw_rows = read_csv(csv_in)
    if len(columns) < 2 or columns[0] != "t":
        raise ConfigError("fit input needs a 't' first column and a norm second column",
                          source=csv_in)
    times = np.array([float(r[0]) for r in raw_rows])
    norms = np.array([float(r[1]) for r in raw_rows])
    window = None
    if cfg.has("fit_t_min") or cfg.has("fit_t_max"):
        window = (cfg.get_float("fit_t_min", float(times[0])),
                  cfg.get_float("fit_t_max", float(times[-1])))
    theoretical = cfg.get_float("theoretical", None)
    if theoretical is None and "theory_slope" in tokens:
        theoretical = float(tokens["theory_slope"])
    fit = decay.fit_decay(times, norms, window, theoretical=theoretical)
    rows = [(fit.slope, fit.intercept, fit.r_squared, fit.window[0], fit.window[1])]
    info = {"norm_column": columns[1]}
    if fit.theoretical is not None:
        info["theoretical_slope"] = fmt17(fit.theoretical)
    return RunResult(
        schema="dispersim.fit.v1",
        columns=["slope", "intercept", "r_squared", "t_min", "t_max"],
        rows=rows,
        info=info,
    )


def run_vdc(cfg: Config, threads: int) -> RunResult:
    grid_size = cfg.get_int("grid_size", 1_000_000)
    margin = kernel.phase_vdc_margin(grid_size)
    return RunResult(
        schema="dispersim.vdc.v1",
        columns=["grid_size", "margin"],
        rows=[(grid_size, margin)],
    )


def run_oscint(cfg: Config, threads: int) -> RunResult:
    a_values = cfg.get_floats("a_values", required=True)
    y_values = cfg.get_floats("y_values", required=True)
    z_values = cfg.get_floats("z_values", required=True)
    t_grid = cfg.get_time_grid()
    tol = cfg.get_float("tol", 1e-9)
    combos = [(float(t), y, z, a) for t in t_grid for a in a_values for y in y_values for z in z_values]

    def one(combo):
        t, y, z, a = combo
        val = kernel.coupled_oscillatory_integral(t, y, z, a, tol)
        scaled = abs(val) * (1.0 + abs(t)) ** (1.0 / 3.0)
        return (t, y, z, a, val.real, val.imag, abs(val), scaled)

    rows = _map_ordered(one, combos, threads)
    info = {"tol": fmt17(tol)}
    for a in a_values:
        c_a = max(r[7] for r in rows if r[3] == a)
        info[f"scaled_max.a={fmt17(a)}"] = fmt17(c_a)
    return RunResult(
        schema="dispersim.oscint.v1",
        columns=["t", "y", "z", "a", "re", "im", "abs", "scaled"],
        rows=rows,
        info=info,
    )


def run_coupling_check(cfg: Config, threads: int) -> RunResult:
    kind = cfg.get_choice("kind", ("kirchhoff", "dirichlet", "neumann", "delta", "matrix"),
                          default="matrix")
    if kind == "matrix":
        a = cfg.get_matrix("a_matrix", required=True)
        b = cfg.get_matrix("b_matrix", required=True)
        vc = metric_graph.VertexCoupling(a, b)
    else:
        degree = cfg.get_int("degree", required=True)
        if kind == "kirchhoff":
            vc = metric_graph.kirchhoff_coupling(degree)
        elif kind == "dirichlet":
            vc = metric_graph.dirichlet_coupling(degree)
        elif kind == "neumann":
            vc = metric_graph.neumann_coupling(degree)
        else:
            vc = metric_graph.delta_vertex_coupling(degree, cfg.get_float("strength", required=True))
    check = metric_graph.validate_coupling(vc)
    rows = [(kind, vc.degree, check.rank, check.rank_ok, check.product_defect,
             check.product_ok, check.valid, check.message)]
    return RunResult(
        schema="dispersim.coupling.v1",
        columns=["kind", "degree", "rank", "rank_ok", "product_defect",
                 "product_ok", "valid", "diagnostic"],
        rows=rows,
        info={"verdict": "valid" if check.valid else "invalid"},
    )


EXPERIMENTS = {
    "kernel": run_kernel,
    "line": run_line,
    "halfline": run_halfline,
    "coupled": run_coupled,
    "stepline": run_stepline,
    "star": run_star,
    "delta-line": run_delta_line,
    "torus": run_torus,
    "alphap": run_alphap,
    "fit": run_fit,
    "vdc": run_vdc,
    "oscint": run_oscint,
    "coupling-check": run_coupling_check,
}

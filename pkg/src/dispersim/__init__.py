"""dispersim: desk-scale dispersive-decay experiments for discrete and metric-graph Schrodinger evolutions."""

__version__ = "0.1.0"

from .decay import (
    DecayFit,
    ExponentTable,
    TorusData,
    alpha_p_empirical,
    alpha_p_theory,
    fit_decay,
    kernel_lp_norm,
    torus_l1_norm,
    torus_supnorm,
)
from .errors import (
    AccuracyError,
    ConfigError,
    DispersimError,
    NumericalError,
    ResourceLimitError,
)
from .evolution import (
    BoundaryCondition,
    EvolutionResult,
    evolve_coupled,
    evolve_halfline,
    evolve_line,
)
from .kernel import (
    coupled_oscillatory_integral,
    kernel_abs_row,
    kernel_bessel,
    kernel_quadrature,
    phase_vdc_margin,
    psi,
    psi_d1,
    psi_d2,
    psi_d3,
)
from .lattice import (
    CoupledLatticeSpec,
    LatticeState,
    SymmetricOperator,
    build_coupled_operator,
    discrete_laplacian,
    lp_norm,
)
from .metric_graph import (
    BoundState,
    CouplingCheck,
    Delta,
    DeltaPotentialSpec,
    DeltaPrime,
    EvolutionTrace,
    Kirchhoff,
    SampledState,
    StarGraphSpec,
    StepCoefficient,
    VertexCoupling,
    bound_states,
    delta_vertex_coupling,
    dirichlet_coupling,
    evolve_delta_line,
    evolve_star,
    evolve_stepline,
    kirchhoff_coupling,
    neumann_coupling,
    project_continuous,
    single_delta_bound_energy,
    validate_coupling,
)

__all__ = [name for name in dir() if not name.startswith("_")]

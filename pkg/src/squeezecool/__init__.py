"""Ground-state cooling of a mechanical resonator by intracavity squeezing.

Linearized cavity-optomechanics toolkit: force spectra and cooling rates,
stability, exact Gaussian moment dynamics, cooling limits and optimal
operating points for sideband cooling (SB), squeezed driving (SD) and
intracavity squeezing (IS), the three-mode chi^(2) reduction, and output
squeezing spectra.
"""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    IS,
    SB,
    ReducedParams,
    Scheme,
    SchemeConfig,
    StabilityVerdict,
    UnstableSystemError,
    build_diffusion,
    build_drift,
    g_max,
    stability,
)
from .noise import (  # noqa: E402
    SpectrumSeries,
    WeakCouplingReport,
    chi,
    force_spectrum,
    general_force_spectrum,
    net_cooling_rate,
    optimal_eps,
    weak_coupling_report,
)
from .moments import (  # noqa: E402
    MomentState,
    Trajectory,
    evolve,
    moment_rhs,
    phonon_number,
    steady_state,
)
from .limits import (  # noqa: E402
    CoolingReport,
    OptimalPoint,
    analytic_limit,
    ground_state_boundary,
    numeric_boundary,
    numeric_optimum,
    optimal_point,
    scheme_min,
    solve_x_star,
)
from .threemode import (  # noqa: E402
    ClassicalSteadyState,
    EffectiveModel,
    ThreeModeParams,
    classical_steady_state,
    effective_model,
    reduce,
)
from .output import (  # noqa: E402
    QuadratureSpectrum,
    TransferCoefficients,
    output_quadrature_spectrum,
    transfer,
)

"""Spectral laboratory for norm growth in fractionally dissipative flow.

The package evolves mean-zero periodic velocity fields under the
incompressible flow with dissipation (-Laplace)^alpha, alpha >= 1, builds
the lacunary plane-wave initial data whose quadratic interactions feed a
single low frequency, evaluates the closed-form first iterate of the mild
solution, and measures negative-index Besov norms two independent ways.
"""

from .besov import BesovIndex, besov_norm_heat, besov_norm_lp, lp_block
from .closed_forms import (
    Ensemble,
    EnsembleTerm,
    duhamel_kernel,
    ensemble_besov,
    ensemble_linf,
    ensemble_to_field,
    first_iterate,
    pair_interaction,
)
from .config import ExperimentConfig, load_config
from .construction import (
    InflationConfig,
    PlaneWave,
    build_u0,
    predicted_bounds,
    validate_parameters,
    wave_vectors,
)
from .kernel import BACKEND as KERNEL_BACKEND
from .lattice import Lattice, SpectralField
from .solver import (
    BlowUpError,
    TimeGrid,
    Trajectory,
    bilinear_duhamel,
    decompose,
    mild_solve,
)
from .spectral import (
    FractionalParams,
    convect,
    heat_semigroup,
    leray_project,
    linf_norm,
    transform_forward,
    transform_inverse,
)

__version__ = "0.1.0"

"""Hierarchical pinning on diamond lattices: annealed and quenched free
energies, walk probabilities, good-diamond certificates and a brute-force
lattice oracle."""

__version__ = "0.1.0"

from .annealed import (
    Phase,
    annealed_free_energy,
    annealed_partial,
    annealed_step,
    build_epsilon_sequence,
    fit_power_law,
    fit_singularity,
    singularity_constant,
)
from .certificate import (
    Certificate,
    choose_k,
    estimate_p_good,
    estimate_variance_rk,
    lower_bound,
    search_certificate,
)
from .errors import (
    ArityError,
    BracketError,
    DomainError,
    InvalidLawError,
    NotConvergedError,
    PinningError,
    ResourceError,
)
from .lattice import build_lattice, enumerate_escape_probability, enumerate_partition
from .model import (
    FairSigns,
    FiniteDiscrete,
    ModelParams,
    Regime,
    StandardGaussian,
    combine_children,
    log_m,
    sample_initial,
)
from .population import (
    critical_point_scan,
    init_population,
    population_step,
    quenched_free_energy,
    replicated_free_energy,
)
from .walks import build_q_table, p_kn, path_count

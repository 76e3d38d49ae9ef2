"""Multivariate Poisson approximation via size-biased couplings.

Exact lattice distances, the generic coupling machinery and its bounds, and
full engines for two applications: joint subgraph counts in G(n, p) and the
multivariate hypergeometric urn.
"""

from .errors import InvariantError, ModelError, ParameterError, ResourceError
from .lattice import (
    LatticeDistribution,
    TruncatedPoissonProduct,
    delta,
    empirical_distribution,
    poisson_product_truncated,
    transport_plan,
    tv_distance,
    wasserstein_1d_oracle,
    wasserstein_distance,
)
from .sizebias import (
    BoundReport,
    CouplingRun,
    ExhaustiveIndicatorModel,
    bound_dd,
    bound_i1,
    bound_t1,
    bound_univariate_tv,
    construct_coupling,
    independent_bernoulli_model,
    index_distribution,
    mc_bound_terms,
    verify_size_biased_exact,
)
from .patterns import (
    PatternGraph,
    automorphism_count,
    cycle_graph,
    complete_graph,
    density_and_balance,
    enumerate_copies,
    gamma_eta,
    overlap_table,
    parse_pattern,
    parse_pattern_list,
    path_graph,
    shared_edge_stats,
    single_edge,
    star_graph,
)
from .ermoments import (
    GraphEnsembleSpec,
    MomentSet,
    bound_t4,
    corollary_t5_bracket,
    exact_cov,
    expected_count,
    lr_exponents,
    moments,
    t5b_report,
    variance_upper_c4a,
)
from .ersim import (
    SampledGraph,
    count_copies,
    count_copies_joint,
    graph_coupling,
    mc_coupling_terms,
    mc_empirical_distance,
    rate_sweep,
    sample_gnp,
)
from . import hypergeom

__all__ = [name for name in dir() if not name.startswith("_")]

"""Classical and quantum PageRank on directed graphs, with photonic-lattice models."""

from .classical import ConvergenceTrace, continuous_evolve, power_iterate, ranking, stationary
from .graph import (
    GoogleMatrix,
    WebGraph,
    google_from_graph,
    google_matrix,
    hyperlink_matrix,
    parse_edge_list,
    patch_dangling,
)
from .lattice import propagator, spread_exponent, tight_binding
from .quantum import (
    HamiltonianSource,
    Liouvillian,
    apply_generator,
    build_liouvillian,
    initial_state,
    integrate,
    quantum_pagerank,
    steady_state_by_integration,
)
from .spectral import matrix_exponential, spectrum, steady_state_by_kernel, vectorize

__version__ = "0.1.0"

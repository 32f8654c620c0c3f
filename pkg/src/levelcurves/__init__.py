"""Critical level-curve configurations of complex polynomial tracts.

Compute the configuration of critical level curves of a polynomial on its
unit sublevel region, decide conformal equivalence of tracts by canonical
configuration equality, enumerate all configurations carrying a generic
critical-value vector, and realize a given configuration by a polynomial.
"""

from .configuration import (
    CanonicalCode,
    Configuration,
    GraphMember,
    PointMember,
    canonical_code,
    config_from_json,
    config_to_json,
    critical_values_of,
    equals,
    find_single_edge_face,
    prec_order,
    scatter_perturb,
    validate,
)
from .enumeration import count_generic, enumerate_generic, riordan_sum
from .extraction import extract_configuration
from .polynomials import (
    ComplexPoly,
    CriticalSpectrum,
    atypicality_degree,
    critical_spectrum,
    derivative,
    eval_poly,
    from_critical_points,
    roots,
    solve_theta_fiber,
    theta,
)
from .realization import RealizationError, equivalent, realize
from .tracer import (
    EmbeddedLevelGraph,
    Tract,
    TracingError,
    critical_level_curves,
    local_edge_directions,
    trace_gradient_line,
    trace_level_component,
    winding_number,
)

__version__ = "0.1.0"

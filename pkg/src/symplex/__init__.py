"""Index theory of symplectic paths: splitting numbers, Maslov-type indices and iteration formulas."""

from .angles import UnitAnglePoint
from .core import (
    SymmetryDescriptor,
    SymplecticMatrix,
    build_symmetry,
    diamond,
    generalized_eigenspace,
    nullity,
    rotation,
    standard_J,
    unit_spectrum,
)
from .ellipsoid import EllipsoidSpec, end_to_end_verification, orbit_index, orbits, p_symmetry_check
from .errors import (
    AmbiguousSpectrumError,
    DegenerateFormError,
    NonRegularCrossingError,
    NotSymplecticError,
    RankAmbiguityError,
    SymplexError,
    UnsupportedInputError,
)
from .index import (
    CrossingRecord,
    IndexRecord,
    convex_count_index,
    crossing_form,
    graph_index,
    maslov_type_index,
    mean_index,
    mu_graph_index,
)
from .iteration import bott_check, bott_sweep, iterate, iterate_sym
from .jump import (
    JumpTuple,
    bound_consistency,
    cijt_search,
    index_profile,
    multiplicity_bound,
    n1_inequality,
)
from .krein import krein_numbers, splitting_numbers
from .paths import ConstantGenerator, PiecewiseGenerator, RotationProduct, Sampled, SymplecticPath, path_from_json

__version__ = "0.1.0"

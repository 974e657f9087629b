"""possim: valid statistical inference with possibility contours.

The pipeline: pick a possibility contour compatible with the auxiliary
distribution of a data-generating association (maximum specificity when the
density is unimodal, triangular for the uniform), push it through the
association at the observed data, and read off posterior possibility and
necessity of assertions, plausibility regions, and tests.  Companion modules
verify the calibration guarantees by simulation and the equivalence with
nested random sets.
"""
from .association import (
    Association,
    PlausibilityRegion,
    PosteriorContour,
    TestDecision,
    hypothesis_test,
    plausibility_region,
    posterior_contour,
    posterior_necessity,
    posterior_possibility,
)
from .contours import (
    AlphaCut,
    AuxiliaryDistribution,
    DiscreteCredalInstance,
    DominanceReport,
    PossibilityContour,
    alpha_cut,
    build_max_specificity,
    build_ranked,
    build_triangular,
    credal_membership,
    dkw_band,
    dominance_check,
    eval_possibility,
    necessity_of,
    tabulate,
)
from .errors import (
    ArgumentError,
    ConfigurationError,
    DataError,
    DegenerateDataError,
    DomainError,
    NumericError,
    PossimError,
    SchemaError,
    UnsupportedShapeError,
)
from .spaces import FiniteSet, Interval, IntervalUnion, Points, TAIL_HORIZON

__version__ = "0.1.0"

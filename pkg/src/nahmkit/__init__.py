"""nahmkit: exact filtered-Higgs singularity calculus on the dual torus and
the algebraic Nahm transforms of that data.

Everything is exact: the coefficient field is a cyclotomic rational
function field fixed per session, series are precision-tracked, and every
certificate either holds or raises.
"""

from .errors import (
    FieldExtensionRequired,
    InputError,
    NahmkitError,
    NotAdmissible,
    PrecisionExhausted,
    VerdictFailure,
)
from .field import FieldContext, Scalar
from .series import DEFAULT_PRECISION, TruncatedLaurent, series_arith
from .lmatrix import LaurentMatrix, newton_polygon, smith_normal_form
from .filtered import (
    FilteredLattice,
    degree_contribution,
    descent,
    dual_filtered,
    grading,
    pullback_covering,
    pushforward_covering,
    tensor_filtered,
)
from .torus import EndoPair, TorusPoint, g_equiv, torus_reduce
from .higgs import (
    ElementaryBlock,
    HiggsGerm,
    admissibility_check,
    endo_germ_wrap,
    goodness_decomposition,
    realize,
    slope_check,
    slope_decomposition,
    type_decomposition,
)
from .localnahm import (
    LocalComplexLattices,
    build_local_complex,
    local_nahm_0_inf,
    local_nahm_inf_0,
)
from .elliptic import (
    AdmissibleHiggsData,
    FilteredBundleData,
    SingularPoint,
    a0_check,
    a1a2_check,
    a3_check,
    dual_data,
    global_parabolic_degree,
    good_check,
    stability_check,
)
from .transform import (
    NahmReport,
    invariants,
    nahm_backward,
    nahm_forward,
    roundtrip_report,
)
from .oracle import degree_crosscheck, truncated_cokernel
from .examples import generate_examples

__version__ = "0.1.0"

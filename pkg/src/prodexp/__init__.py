"""Product codes over GF(2^m): expansion, robust and agreement testability."""

from .codes import (
    CyclicCode,
    DistanceBound,
    LinearCode,
    bounded_distance_decode,
    cyclic_contains,
    delta_to_code,
    dual_code,
    full_code,
    min_distance,
    nearest_codeword,
    repetition,
    rs_primitive,
)
from .expansion import (
    Decomposition,
    ExpansionCertificate,
    certify_upper_bound,
    counterexample_word,
    line_disjoint_support,
    min_decomposition,
    rho_exact,
    rho_upper_sampled,
    verify_certificate,
)
from .gf_poly import (
    GF2m,
    MultiPoly,
    dft_evaluate,
    field_make,
    multipoly,
    poly_from_univariate,
    poly_mul_mod_ideal,
    star_transform,
)
from .tensor import (
    CodeFamily,
    Flat,
    TensorWord,
    enumerate_flats,
    line_weight,
    nearest_in_direction,
    product_contains,
    restrict,
    sum_contains,
)
from .testability import (
    CheckReport,
    FlatTest,
    TestReport,
    check_composition,
    check_hyperplane_bound,
    check_pair_proximity,
    check_robust_agreement,
    derived_constants,
    line_test,
    rho_a_exact,
    rho_r_exact,
    rho_r_sampled_upper,
    test_expectation,
)

__version__ = "0.1.0"

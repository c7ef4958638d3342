__version__ = "0.1.1"

from .support import (
    STABILITY,
    configure,
    get_settings,
    override_settings,
    MixdiscError,
    InputError,
    ParameterError,
    DomainError,
    ResourceLimitError,
    ConvergenceError,
    InstanceFileError,
)
from .matrices import (
    ComplexMatrix,
    SymmetricMatrix,
    MatrixTuple,
    operator_norm,
    determinant,
    principal_submatrix,
    outer_product,
)
from .exact import (
    mixed_discriminant_exact,
    permanent,
    padded_mixed_discriminant,
    minor_power_sum_exact,
)
from .taylor import (
    DerivativeSequence,
    ApproxResult,
    degree_for_accuracy,
    log_derivatives,
    taylor_log_at_one,
)
from .approx import (
    PolydiscInstance,
    check_domain,
    approx_log_mixed_discriminant,
    approx_log_mixed_discriminant_pd,
    verify_zero_free_polydisc,
)
from .doubly_stochastic import (
    is_doubly_stochastic,
    scale_to_doubly_stochastic,
    approx_log_mixed_disc_ds,
    approx_log_contracted,
    verify_zero_free_ds,
)
from .charpoly import (
    Poly,
    mixed_char_poly_coeffs,
    star_product,
    exp_partial_sum,
    mss_root_check,
    ds_stability_polynomial,
)
from .minors import (
    phi_derivatives,
    phi_polynomial,
    approx_log_minor_power_sum,
    gram_from_rank2,
    rank2_tuple,
    verify_zero_free_minors,
)
from .generators import (
    gen_symmetric_bounded,
    gen_symmetric_tuple,
    gen_points,
    gen_ds_tuple,
    gen_pd_tuple,
    gen_bounded_matrix,
    gen_psd_decomposition,
    gen_rank2_vectors,
)

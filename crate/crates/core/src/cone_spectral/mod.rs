//! Homogeneous harmonic forms on the cone over `SO(3)`: link spectra,
//! critical rates, log terms, index jumps, polynomial oracles on `R^4` and
//! exponent bookkeeping for weighted torsion bounds. All rate arithmetic is
//! exact.

mod cone;
mod poly;
mod rates;
mod spectrum;
mod surd;

pub use cone::{
    block_kernel_dim, block_kernel_vector, block_log_kernel_dim, block_matrix, cone_laplacian_apply, critical_rates,
    index_change, kernel_dimension, log_kernel_check, rate_dimensions, required_ceiling, HomogeneousRate,
    KernelDimension, LinkBlock, RateCase, RateInterval,
};
pub use poly::{
    constant_two_forms, harmonic_oracle_r4, harmonic_residual_r4, order_minus_four_forms, order_minus_two_forms,
    s3_eigen_check, s3_function_spectrum_check, so4_orbit_span, z1_power, Exponents, FunctionSpectrumCheck, Poly4,
    R4OneForm, R4TwoForm, RhoTerm, SphereEigenCheck, PAIRS,
};
pub use rates::{
    best_transition, jk_rate_bound, kappa_feasibility, max_epsilon, naive_torsion_table, refined_torsion_table,
    torsion_exponent, Affine, Feasibility, RadialBound, RateBound, RatePiece, TExponent,
};
pub use spectrum::{FormKind, LinkEigen, LinkSpectrum, Parity};
pub use surd::{q, qi, quadratic_roots, Rational, Surd};

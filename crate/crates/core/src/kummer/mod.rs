//! The generalised Kummer construction on `T^7 / Gamma`: the group and its
//! singular set, the glued closed structures `phi^t` on each chart of the
//! resolution, their torsion and its decay in `t`, and the approximate kernel.

mod gluing;
mod group;
mod kernel;
mod torsion;

pub use gluing::{lift_to_kummer, GluedForms, GluingChart, TorsionPoint, COMPONENTS, ZETA};
pub use group::{
    fixed_point_tori, gamma_elements, generate, invariant_form_count, relabelled_phi0, singular_components,
    torus_phi0, FixedLocus, FixedPointCount, FixedTorus, GroupElement, SingularComponent, SingularSet,
    TorusIsometry, KUMMER_LABELLING,
};
pub use kernel::{orbifold_b2, ApproximateKernel, KernelDescriptor, KernelSummary};
pub use torsion::{
    ale_difference, annulus_samples, decay_from_rows, positivity_threshold, product_metric_defect, torsion_decay_fit,
    torsion_row, torsion_table, TorsionDecay, TorsionRow,
};

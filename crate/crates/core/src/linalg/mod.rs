//! Exact linear algebra: bit-packed F₂ matrices and integer Smith normal form.

mod f2;
mod smith;

pub use f2::{f2_kernel_basis, f2_rank, normalize_f2, MatF2, SparseMatF2};
pub use smith::{
    cokernel_group, smith_normal_form, smith_normal_form_with_budget, AbelianGroup, MatZ,
    SmithForm, DEFAULT_PRECISION_BITS,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("intermediate entry needs {bits} bits, over the {budget}-bit budget")]
    OverflowGuard { bits: u64, budget: u64 },
    #[error("rows of unequal length")]
    Ragged,
    #[error("invariant factor does not fit in 64 bits")]
    FactorOverflow,
}

//! Operator algebra on composite Hilbert spaces: two-level atoms and one
//! truncated bosonic mode, with dense complex matrices throughout.

mod density;
mod layout;
mod operator;

pub use density::{
    dissipator, dissipator_matrix, hermitian_eigenvalues, hermitian_sqrt, partial_trace,
    partial_trace_matrix, DensityMatrix, DensityTolerances,
};
pub use layout::SpaceLayout;
pub use operator::{
    annihilator, collective_j, excitation_number, j_x, j_z, sigma_lower, tensor, Ket, Operator,
};

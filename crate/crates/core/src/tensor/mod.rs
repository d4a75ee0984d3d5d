//! Algebra of 3×3 matrices and fourth-order tensors for the translation method.
//!
//! Matrices are identified with 9-vectors by stacking columns:
//! `(1,1)→1, (2,1)→2, (3,1)→3, (1,2)→4, …, (3,3)→9`. Fourth-order tensors are
//! 9×9 matrices in that basis, or in the block ordering produced by
//! [`Tensor4::permute_basis`], in which the translated conductivity tensors
//! split into one 3×3 block and three 2×2 blocks.

mod average;
mod matrix3;
mod tensor4;
mod translation;

pub use average::{
    block_limit_form, limit_tensor, limit_tensor_with, two_phase_inverse_average, LimitTensor, PhaseAverage, LIMIT_SCHEDULE,
};
pub(crate) use average::check_conductivities;
pub use matrix3::Matrix3;
pub use tensor4::{mat_to_vec, vec_index, vec_to_mat, Basis, PermuteDirection, Tensor4, BLOCK_ORDER};
pub use translation::{
    assemble_lc, assemble_lc_prime, levi_civita, projections, projector_tensors, t_prime_form, translation_t,
    translation_t_prime, translation_t_prime_tensor, translation_t_tensor, Positivity, Projections,
};

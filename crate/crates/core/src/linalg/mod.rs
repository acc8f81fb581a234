//! Dense symmetric linear algebra and matrix norms.

mod eigen;
mod mat;
mod norms;

pub use eigen::{eigh, psd_project, EigenDecomposition};
pub use mat::{Mat, SymmetricMatrix};
pub use norms::{
    cut_norm_exact, cut_norm_lower, frobenius_sq, l1_entrywise, linf_entrywise,
    CUT_NORM_EXACT_MAX_DIM,
};

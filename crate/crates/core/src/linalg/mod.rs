//! Exact dense linear algebra over `Z` and `Q`.

pub mod group;
pub mod hermite;
pub mod json;
pub mod lattice;
pub mod matrix;
pub mod ring;
pub mod smith;

pub use group::{hom_cokernel, hom_kernel, FgAbGroup, Presentation, Standardized};
pub use hermite::{echelon, Echelon, EchelonBasis};
pub use lattice::{
    cokernel, image_basis, image_lattice, inverse, kernel_basis, kernel_lattice, same_lattice,
    saturate, solve_linear, solve_matrix, solve_particular, Solution,
};
pub use matrix::{IntMat, Matrix, RatMat};
pub use ring::{Int, Rat, Ring, RingKind};
pub use smith::{smith_normal_form, SmithDecomposition};

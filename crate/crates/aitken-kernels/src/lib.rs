//! Matrix-valued positive definite kernels built from bounded completely
//! monotone functions, together with the numerical machinery to verify the
//! claimed properties (positive definiteness, strictness, integral
//! identities) on finite point sets.
//!
//! The crate is organised in layers:
//!
//! * [`linalg`] — dense symmetric matrix arithmetic, a cyclic Jacobi
//!   eigensolver, Cholesky, Schur/Hadamard products and negative-type tests.
//! * [`scalar_cm`] — a catalog of bounded completely monotone functions with
//!   their representing measures, plus numerical complete-monotonicity checks
//!   and the Matérn scale-mixture integral.
//! * [`families`] — building blocks for the kernel constructions: matrix
//!   field families `G`, vector field families `H`, scalar kernels of
//!   negative type and scale-mixture specifications, each with a sampling
//!   validity checker.
//! * [`builders`] — the kernel constructions themselves, one per theorem.
//! * [`verify`] — oracles for the Aitken integral identity, block Gram
//!   assembly/classification and the Schur-chain proof skeleton.
//! * [`cli`] — batch front-end: kernel specs in, Gram files and verification
//!   reports out.
//!
//! The long-form guide lives in the `book/` directory of the repository; its
//! code snippets are compiled and run as doc-tests through the `book-tests`
//! crate.

pub mod builders;
pub mod cli;
pub mod families;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod scalar_cm;
pub mod special;
pub mod verify;

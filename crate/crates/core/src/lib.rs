//! Pointwise Spin(7) algebra on flat R^8, irreducible form-space decompositions,
//! the torsion tensor, and the harmonic (isometric) flow dPhi/dt = Div T ⋄ Phi
//! on periodic reduced-dimension lattices, together with the verification
//! catalogue for every contraction identity and monotone quantity the solver
//! relies on.
//!
//! Layout follows the subsystems:
//! - [`algebra`]: the Cayley form, Hodge star, contraction identities
//! - [`spaces`]: Ω², Ω³, Ω⁴ decompositions, diamond operator, Λ_Φ machinery
//! - [`torsion`]: torsion extraction/reconstruction and flat-background residuals
//! - [`lattice`]: periodic lattice fields of isometric structures
//! - [`flow`]: time integration and monitored quantities
//! - [`verify`]: the identity catalogue driven by the CLI and the test suite

pub mod algebra;
pub mod error;
pub mod flow;
pub mod lattice;
pub mod spaces;
pub mod torsion;
pub mod verify;

pub use algebra::{
    contraction_identity_residuals, hodge_star_4, nabla_contraction_residuals, standard_phi,
    FourForm, Frame, GradientSlices, IdentityResiduals, NablaResiduals, ThreeForm, TwoForm,
};
pub use error::CoreError;
pub use spaces::{
    decompose_four_form, decompose_three_form, diamond, inverse_diamond_on_7, lambda_phi,
    project_two_form, triple_contract, Endomorphism, FourFormSplit, TwoFormPart,
};
pub use torsion::{
    bianchi_residual, gradient_from_torsion, ricci_residual, scalar_curvature_residual,
    torsion_from_gradient, TorsionGradient, TorsionTensor,
};

/// 8x8 real matrix, the workhorse for frames, rotations and two-forms.
pub type Matrix8 = nalgebra::SMatrix<f64, 8, 8>;
/// Vector in R^8.
pub type Vector8 = nalgebra::SVector<f64, 8>;
/// Fiber coordinate against the fixed orthonormal Ω²₇ basis.
pub type Fiber7 = [f64; 7];

//! Exact computations with representations of the loop-Virasoro algebra
//! Vir ⊗ B: intermediate-series modules, truncated Verma modules and their
//! irreducible quotients, tensor modules, and replayable probes of their
//! irreducibility and isomorphism criteria.
//!
//! Everything is generic over an exact [`Field`]; the aliases at the crate
//! root fix the ground field to the Gaussian rationals.

pub mod analysis;
pub mod coeff_algebra;
pub mod error;
pub mod field;
pub mod linalg;
pub mod loop_vir;
pub mod modules_int;
pub mod notation;
pub mod run;
pub mod scalar;
pub mod tensor_mod;
pub mod verma;

pub use analysis::{ProbeCertificate, ProbeStatus, XCase};
pub use coeff_algebra::{AlgebraB, BElem, CharacterPsi};
pub use error::{Error, Result};
pub use field::Field;
pub use loop_vir::{BasisGen, GenKind, Generator, LieElement, LoopVir, UeaElement, UeaWord};
pub use modules_int::{is_irreducible_int, IndexSet, IntModule, IntParams, IntVector, PsiSource};
pub use scalar::{normalize_alpha, GaussianRational};
pub use tensor_mod::{GenerationReport, TensorModule, TensorTerm, TensorVector};
pub use verma::{pbw_basis, FunctionalPhi, PbwMonomial, PbwVector, VermaModule, VphiVector};

/// The ground field Q(i).
pub type Scalar = GaussianRational;
pub type Algebra = AlgebraB<Scalar>;
pub type Elem = BElem<Scalar>;
pub type Psi = CharacterPsi<Scalar>;
pub type Lie = LieElement<Scalar>;
pub type Vir = LoopVir<Scalar>;
pub type Uea = UeaElement<Scalar>;
pub type Phi = FunctionalPhi<Scalar>;
pub type Verma = VermaModule<Scalar>;
pub type IntMod = IntModule<Scalar>;
pub type Tensor = TensorModule<Scalar>;

//! Multiparameter quantized Weyl algebras at roots of unity: normal-form
//! arithmetic, the center, discriminants, the induced Poisson structure and
//! automorphism/isomorphism checks.

pub mod autos;
pub mod center;
pub mod cyclotomic;
pub mod discriminant;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod params;
pub mod poisson;
pub mod polyring;
pub mod suite;
pub mod weyl;

pub use cyclotomic::{CycElem, RootOfUnity};
pub use error::{Error, Result};
pub use params::{ExpVec, Frac, Gen, Mode, RawParams, WeylParams};
pub use polyring::{bareiss_determinant, is_associate, Associate, MPoly, PolyMatrix, VarTable};
pub use weyl::{GeneratorImages, PbwKey, WeylAlgebra, WeylElem};
pub use autos::{AutShape, AutSpec};
pub use center::CenterPoly;
pub use discriminant::{BasisConvention, DiscriminantReport, Formula};
pub use poisson::PoissonContext;

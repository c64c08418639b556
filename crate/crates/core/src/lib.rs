//! Point counting on hyperelliptic Dickson curves `Y^2 = D_n(X) + t` over
//! finite fields, using the real-multiplication endomorphism to shrink the
//! torsion systems that a Schoof-style algorithm has to solve.

pub mod algebra;
pub mod division;
pub mod endo;
pub mod error;
pub mod jacobian;
pub mod kernel;
pub mod oracle;
pub mod par;
pub mod rmorder;
pub mod schoof;

pub use error::{Error, Result};

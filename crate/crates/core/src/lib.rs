//! Numerical toolkit for the arithmetic-geometric scaling of regular
//! continued fractions.
//!
//! The crate computes, for the Gauss system,
//!
//! * exact continued-fraction arithmetic (convergents, cylinder diameters,
//!   digit expansion) and the overflow-free `ln q_n` recursion ([`cf`]),
//! * certified special constants: zeta values, the Khintchin constant, and
//!   the almost-sure scaling exponent `alpha_0` ([`special`]),
//! * the pressure function `P(t, beta)` by direct partition-sum enumeration
//!   and by analytic bounds ([`pressure`]), and fast through the leading
//!   eigenvalue of the weighted transfer operator ([`operator`]),
//! * the free energy `t(beta)`, the multifractal spectrum `f(alpha)`, and
//!   restricted dimensions `dim I_q` with their boundary asymptotics
//!   ([`thermo`]),
//! * a one-shot verification suite over all of the above ([`verify`]).

pub mod cf;
pub mod error;
pub mod operator;
pub mod pressure;
pub mod special;
pub mod thermo;
pub mod verify;

pub use error::{Error, Result};

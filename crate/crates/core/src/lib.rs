//! Exact computations around nilspace cocycles on F_2^n: dyadic polynomials,
//! Host-Kra cube spaces, coboundary decisions and the pseudo-quintic phase
//! on X_{5,r} together with its Gowers-norm and equidistribution experiments.

pub mod bits;
pub mod coboundary;
pub mod cocycle;
pub mod cube;
pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod gowers;
pub mod linsolve;
pub mod poly;
pub mod potential;
pub mod rho;
pub mod x5;
pub mod skew;
pub mod table;
pub mod z4poly;

pub use dyadic::{binom2, e_phase, DyadicTorus, Z4};
pub use error::{Error, Result};
pub use poly::PolyRep;
pub use table::{FuncTable, Phase};

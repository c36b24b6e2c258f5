//! Exact algebra, valuation theory and a first-order formula toolkit for
//! emitting and checking field-theoretic axioms.

pub mod algebra;
pub mod error;
pub mod divisorsets;
pub mod fol;
pub mod katocheck;
pub mod milnor;
pub mod quadform;
pub mod recipe;
pub mod valuation;

pub use algebra::{Elem, Field, Poly};
pub use error::{Error, Result};

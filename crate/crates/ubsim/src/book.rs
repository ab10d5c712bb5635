//! The guide chapters under `book/src` are compiled as doctests of this
//! crate, keeping every code snippet in the book in sync with the API.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/demand.md")]
pub mod demand {}
#[doc = include_str!("../../../book/src/radio.md")]
pub mod radio {}
#[doc = include_str!("../../../book/src/supply.md")]
pub mod supply {}
#[doc = include_str!("../../../book/src/cost.md")]
pub mod cost {}
#[doc = include_str!("../../../book/src/assessment.md")]
pub mod assessment {}

pub mod curves;
pub mod error;
pub mod io;
pub mod jy;
pub mod lattice;
pub mod market;
pub mod math;
pub mod mc;
pub mod piecewise;
pub mod pricers;
pub mod rational_kernel;
pub mod shortrate;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/rates.md")]
    mod rates {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/jarrow-yildirim.md")]
    mod jarrow_yildirim {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    mod lattices {}
    #[doc = include_str!("../../../book/src/rational-kernel.md")]
    mod rational_kernel {}
    #[doc = include_str!("../../../book/src/structural.md")]
    mod structural {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

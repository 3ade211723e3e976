#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod cz;
pub mod error;
pub mod farey;
pub mod geodesic;
pub mod intersection;
pub mod open_book;
pub mod oracle;
pub mod star;
pub mod surd;

pub use cz::{OrbitKind, OrbitSpec};
pub use error::{Error, Result};
pub use farey::{enumerate_coprime_in_interval, Fraction, Interval, IntervalKind};
pub use surd::Surd;

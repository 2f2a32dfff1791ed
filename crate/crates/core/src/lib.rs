//! Partitioned complementary sequences for low-PAPR OFDM.

pub mod channel;
pub mod codec;
pub mod construct;
pub mod enumerate;
pub mod error;
pub mod perm;
pub mod seq;
pub mod sim;

pub use error::{Error, Result};

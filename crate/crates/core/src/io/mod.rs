pub mod formats;
pub mod report;

pub use formats::{parse, InputFormat, Instance, ParseError};

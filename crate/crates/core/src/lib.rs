pub mod algebra;
pub mod automata;
pub mod cost;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod grammar;
pub mod oracle;
pub mod softdecomp;
pub mod softedit;
pub mod symbol;

pub use cost::Cost;
pub use error::{Error, Result};
pub use symbol::{Symbol, Word};

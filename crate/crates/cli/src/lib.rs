//! Library side of the `microar` command: scene script compilation, remix
//! edit scripts, SVG previews and the repository client.

pub mod client;
pub mod error;
pub mod render;
pub mod script;

pub use error::{CliError, ErrorKind, Location};

//! Micro AR: a canonical, content-addressed package format for multi-scene
//! AR stories, plus the layout, remix and asset machinery around it.

pub mod canonical;
pub mod catalog;
pub mod container;
pub mod corpus;
pub mod layout;
pub mod model;
pub mod package;
pub mod remix;
pub mod synth;

pub use model::*;
pub use package::{decode, encode, story_id, PackageError};

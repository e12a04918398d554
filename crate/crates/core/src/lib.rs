//! Dynamic epistemic logics of truthful, lying and bluffing announcements.
//!
//! The crate covers the static language of belief over Kripke models, the
//! model transformations behind public and agent announcements, action
//! models with product update, plausibility models with conditional belief,
//! reduction to the static language, bounded validity checking, and the
//! consecutive numbers riddle as a worked scenario.

pub mod action;
pub mod bisim;
pub mod bitset;
pub mod compiled;
pub mod enumerate;
pub mod error;
pub mod families;
pub mod kripke;
pub mod normalform;
pub mod plausibility;
pub mod riddle;
pub mod syntax;
pub mod update;

pub use error::{ModelError, ParseError};
pub use kripke::{KripkeModel, ModelClass, PointedModel};
pub use syntax::{parse, Agent, Announcement, Atom, Formula, Signature};

//! Scene-file front end for the `ntoda` bracket engine.
//!
//! A scene names a category, its objects and morphisms, and a list of tasks.
//! Running it yields a JSON [`report::Report`] whose only run-dependent
//! field is task timing.

pub mod app;
pub mod build;
pub mod error;
pub mod report;
pub mod scene;
pub mod suite;
pub mod tasks;

pub use app::{main_with_args, run_scene, run_scene_value};
pub use error::{CliError, Result};

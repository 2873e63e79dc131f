//! Three-task classification of short multilingual messages: aggression
//! (OAG / CAG / NAG), gender bias (GEN / NGEN) and communal bias
//! (COM / NCOM).
//!
//! Two systems are provided. S2 is a cosine K-nearest-neighbor classifier
//! over chi-square selected term frequencies ([`knn`]). S1 stacks six base
//! learners through out-of-fold predictions into a logistic regression
//! ([`stacking`], [`learners`]). [`system`] wraps either one per task and
//! [`eval`] scores the results.
//!
//! ```no_run
//! use tritask::corpus::load_dataset;
//! use tritask::system::{System, SystemModel, SystemSpec};
//!
//! let train = load_dataset("train.tsv", true)?.corpus;
//! let dev = load_dataset("dev.tsv", true)?.corpus;
//! let model = SystemModel::train(&SystemSpec::new(System::S2), &train)?;
//! let report = tritask::eval::make_report(&model.predict(&dev)?, &dev)?;
//! println!("{report}");
//! # Ok::<(), tritask::Error>(())
//! ```

pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod knn;
pub mod learners;
pub mod persist;
pub mod stacking;
pub mod synth;
pub mod system;
pub mod text;
pub mod vsm;

pub use error::{Error, Result};

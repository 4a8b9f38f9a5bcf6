//! Orlicz-space approximation toolkit.
//!
//! Gauge (Luxemburg) norms and Young conjugates over finite-support measures,
//! explicit ReLU constructions (gadgets, narrow register networks, the
//! clip-and-localize transform), shallow and functional-input fitters, and a
//! checker for the distributionally robust bound
//!
//! ```text
//! sup_nu ||f - eta||_{L1(nu)} <= 2 N_phi(f - eta) * sup_nu N_psi(d nu / d mu)
//! ```
//!
//! over finite families of measures sharing a dominating measure.
//!
//! ```
//! use orlicz_uat::{young::YoungFunction, measure::DiscreteMeasure, orlicz};
//!
//! let phi = YoungFunction::power(2.0, 1.0).unwrap();
//! let mu = DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).unwrap();
//! let f = orlicz::FunctionTable::from_scalars(vec![1.0, 3.0]).unwrap();
//! let n = orlicz::gauge_norm(&phi, &mu, &f, &orlicz::GaugeOptions::default()).unwrap();
//! assert!((n.value - 5f64.sqrt()).abs() < 1e-9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod domain;
pub mod emit;
pub mod error;
pub mod fit;
pub mod measure;
pub mod net;
pub mod orlicz;
pub mod robust;
pub mod selftest;
pub mod young;

pub use domain::AxisBox;
pub use error::{Error, Result};

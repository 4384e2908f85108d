//! Derivative-free global optimization with the parameter-optimal state
//! transition algorithm (POSTA) and its Nelder-Mead and
//! quadratic-interpolation hybrids.
//!
//! ```
//! use staopt::{make, run, BenchmarkId, RunLimits, Variant, VariantConfig};
//!
//! let f = make(BenchmarkId::F6, 2).unwrap();
//! let cfg = VariantConfig::new(Variant::NMQI_POSTA, 7);
//! let record = run(&f, &cfg, &RunLimits::new(5_000)).unwrap();
//! assert!(record.final_best.fitness < 1e-8);
//! ```

pub mod algorithms;
pub mod benchmarks;
pub mod error;
pub mod harness;
pub mod history;
pub mod objective;
pub mod operators;
pub mod posta;
pub mod qi;
pub mod rng;
pub mod simplex;
pub mod space;

pub use algorithms::{run, RunLimits, RunRecord, TerminationCause, TracePoint, Variant, VariantConfig};
pub use benchmarks::{make, make_by_name, BenchmarkId, BenchmarkSpec, Modality};
pub use error::{Error, Halt, Result};
pub use objective::{EvalCounter, Evaluator, ObjectiveFunction};
pub use rng::RngStream;
pub use space::{clamp, Bounds, Point, Solution};

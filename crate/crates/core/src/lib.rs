//! Fuzzy cognitive maps for planning the social and economic development of
//! municipalities.
//!
//! The numeric core is generic over [`Scalar`] (`f64` or `f32`). The aliases
//! at the crate root fix the scalar to `f64`, which is what the file formats,
//! the CLI and the HTTP service use; `*F32` aliases exist for the
//! single-precision variants.
//!
//! ```
//! use sedmap_core::{fixtures, dynamics::*};
//!
//! let map: sedmap_core::CognitiveMap = fixtures::chain();
//! let schedule = ImpulseSchedule::initial(ImpulseVector(vec![1.0, 0.0]));
//! let tr = simulate(&map, &StateVector::zeros(2), &schedule, 2, false).unwrap();
//! assert_eq!(tr.final_state().0, vec![1.0, 0.5]);
//! ```

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod knowledge;
pub mod map;
pub mod matrix;
pub mod report;
pub mod scalar;
pub mod scenario;

pub use error::{Error, Result};
pub use map::{build_map, decompose_factor, validate_map, Factor, FactorId, FactorKind, MapMetadata, ValidationReport};
pub use scalar::Scalar;

pub type CognitiveMap = map::CognitiveMap<f64>;
pub type WeightedEdge = map::WeightedEdge<f64>;
pub type Matrix = matrix::Matrix<f64>;
pub type StateVector = dynamics::StateVector<f64>;
pub type ImpulseVector = dynamics::ImpulseVector<f64>;
pub type ImpulseSchedule = dynamics::ImpulseSchedule<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type ClosurePair = analysis::ClosurePair<f64>;
pub type InfluenceReport = analysis::InfluenceReport<f64>;
pub type StabilityReport = analysis::StabilityReport<f64>;
pub type StabilizationPlan = analysis::StabilizationPlan<f64>;
pub type Scenario = scenario::Scenario<f64>;
pub type TargetSpec = scenario::TargetSpec<f64>;
pub type ScenarioResult = scenario::ScenarioResult<f64>;
pub type Inversion = scenario::Inversion<f64>;

pub type CognitiveMapF32 = map::CognitiveMap<f32>;
pub type StateVectorF32 = dynamics::StateVector<f32>;
pub type ImpulseVectorF32 = dynamics::ImpulseVector<f32>;
pub type TrajectoryF32 = dynamics::Trajectory<f32>;
pub type ScenarioF32 = scenario::Scenario<f32>;

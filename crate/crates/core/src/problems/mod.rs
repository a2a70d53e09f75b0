//! Problem specifications, the standard instances built on them, random
//! test data, recovery metrics and the dual problem.

pub mod dual;
pub mod generator;
pub mod metrics;
pub mod presets;
pub mod spec;

pub use dual::{
    dual_feasibility, dual_feasible, dual_objective, project_to_feasible, scale_to_feasible, DualFeasibility, DualPoint,
};
pub use generator::{
    generate_instance, load_instance, planted_completion, planted_sparse, save_instance, GroundTruth,
    InstanceMeta, InstanceParams, NoiseModel, PlantedCompletion, PlantedSparse,
};
pub use metrics::{compute_metrics, decomposition_metrics, estimate_rank, MetricsRow};
pub use spec::{ConstraintBlock, ProblemSpec, SlackLayout};

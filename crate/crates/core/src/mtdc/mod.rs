//! Three-terminal MTDC interaction model: DC couplings, converter blocks,
//! self- and en-stabilizing coefficients, the stability index, uncertainty
//! radii, path-ball certificates, parameter sweeps and boundary search.

mod blocks;
mod coefficients;
mod config;
mod deps;
mod index;
mod network;
pub mod powerflow;
mod sweep;
mod system;

pub use blocks::{build_all, build_blocks, Blocks};
pub use coefficients::{
    build_coefficients, condition, en_coefficients, numerical_degree, self_coefficient, CoefficientSet, MODEL_CANCEL_TOL,
    PATHS,
};
pub use config::{benchmark, load_config, parse_config, SystemConfig, BENCHMARK_3T};
pub use deps::{check_partition, dependency, dependency_table, Dependency};
pub use index::{
    loop_oracle, path_partition, radius_by_norm, report, stability_index, theorem2_verdict, uncertain_sum,
    uncertainty_radius, IndexResult, PathSet, RadiusResult, StabilityReport, ROUTE_TOL,
};
pub use network::{build_dc_couplings, TfMatrix};
pub use sweep::{
    find_boundary, sweep_parameter, Boundary, BoundaryOutcome, StableSide, SweepRow, SweepTable, DEFAULT_DELTA,
};
pub use system::{
    parse_assignment, BaseValues, BlockModel, BlockOverride, Cable, ControllerGains, Fe12Reading, GainKey,
    ModelOptions, MtdcSystem, OperatingPoint, ParamPath, VscParams,
};

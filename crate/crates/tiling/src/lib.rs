//! Tile systems, exhaustive bounded and periodic tiling search, and the
//! compilation of bounded square instances into periodic ones via the
//! countdown gadget and border frame.

pub mod counter;
pub mod error;
pub mod format;
pub mod reduce;
pub mod solve;
pub mod system;

pub use counter::{
    build_counter_system, choose_counter_params, display_token, figure_layout, padded_layout,
    CounterParams, CounterSystem,
};
pub use error::TilingError;
pub use format::{
    grid_from_json, grid_to_json, parse_grid, parse_system, serialize_grid, serialize_system,
    system_from_json, system_to_json, GridJson, SystemJson,
};
pub use reduce::{
    add_border, embed_reduction, project_interior, reduce_binary_to_periodic, to_power_of_two,
    BorderedSystem, CornerConstraint, PeriodicInstance,
};
pub use solve::{solve_bounded, solve_periodic, solve_pinned, SolveOutcome};
pub use system::{
    product_system, validate_tiling, violations, TileSystem, TilingGrid, Violation,
};

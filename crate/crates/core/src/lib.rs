//! Coverage planning for two-layer hexagonal cellular networks.
//!
//! The crate covers lattice geometry, block-shadowed propagation, polynomial
//! interference bounds, the analytic outage model with small-cell counts, a
//! seeded Monte Carlo simulator and PPP / site-set baselines.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod baselines;
pub mod error;
pub mod format;
pub mod interference;
pub mod lattice;
pub mod propagation;
pub mod quadrature;
pub mod simulator;

pub use analytic::{
    delta1, delta2, delta3, delta_mc, full_report, full_report_with, rop_point, rop_reuse7,
    sc_count, sir_bound, snr_threshold_db, solve_r_opt, BoundReport, NetworkParams,
    OutageReport, Reuse, SirLognormal, ThresholdRadius,
};
pub use baselines::{
    hex_site_set, load_site_set, parse_site_set, perturb_site_set, ppp_generate, ppp_outage, project, sc_count_for_area, siteset_outage,
    BaselineFading, BaselineOptions, BaselineResult, SiteSet, Window,
};
pub use error::{Error, Result};
pub use interference::{
    avg_norm_interference, denormalize, eval_bound, fit_bounds, fit_bounds_with, Bound,
    PolyBounds,
};
pub use lattice::{
    fold_to_wedge, hex_tiling, interferer_positions, region_of, HexTiling, LatticeLayout,
    Point, Region, RegionPartition, Tile,
};
pub use propagation::{
    channel_power, pathloss_db, sample_field, LinkSample, PropagationParams, ShadowingField,
};
pub use simulator::{
    ergodic_rate_map, outage_map, place_scs, residual_outage, simulate, summarize, sweep, CoverageMap,
    FadingModel, PlacementPlan, PlacementRule, RealizationResult, ScMode, Scenario, SimConfig, SweepRow,
};

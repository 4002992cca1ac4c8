//! Correlated equilibria of normal-form games and their two extensive-form
//! refinements.

mod ce;
mod efce;

pub use ce::{
    ce_constraint_violation, conditional_values, find_ce, find_ce_capped, player_objective, verify_ce,
    welfare_objective, CorrelatingDevice, DEFAULT_CELL_CAP, DEFAULT_EPS, LP_FEASIBILITY_TOL,
};
pub use efce::{
    verify_efce, verify_efce_capped, verify_ir_efce, verify_ir_efce_capped, StrategyDevice, DEFAULT_INFO_STATE_CAP,
};

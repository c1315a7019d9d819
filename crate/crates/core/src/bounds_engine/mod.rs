//! Constants, closed-form a priori bounds, regularity criteria and an
//! independent ODE oracle for the enstrophy `y(t) = ‖u(t)‖₁²`.

mod comparison;
mod criteria;
mod curves;
mod ledger;
mod oracle;

pub use comparison::{interval_comparison, ComparisonRow, ComparisonTable, COMPARISON_CSV_HEADER};
pub use criteria::{
    arctan_bound_free, arctan_bound_steady, arctan_bound_timedep, evaluate_criterion, CriterionInput,
    CriterionKind, CriterionReport, ForcingData,
};
pub use curves::{
    classical_bound_forced, classical_bound_free, classical_curve_forced, classical_curve_free,
    classical_horizon_forced, classical_horizon_free, BoundCurve, BoundKind,
};
pub use ledger::{default_holder_product, ConstantLedger, LedgerEntry};
pub use oracle::{ode_comparison_oracle, OracleModel, OracleRun};

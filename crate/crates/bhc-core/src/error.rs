use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("band-unrepresentable: band [{lo}, {hi}] exceeds the grid Nyquist limit {nyquist}")]
    BandUnrepresentable { lo: f64, hi: f64, nyquist: f64 },
    #[error("budget-exceeded: {requested} samples requested, budget is {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },
    #[error("grid-mismatch: operands live on different grids")]
    GridMismatch,
    #[error("empty-grid: {0}")]
    EmptyGrid(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

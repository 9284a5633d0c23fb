//! Kernels: planar `K`, axisymmetric `G`, the special functions `I1`/`I2`.

pub mod green;
pub mod quadrature;
pub mod special;

pub use green::{
    difference_ratio, eval_g, eval_g_minus_k, eval_g_minus_k_with, eval_g_oracle,
    eval_g_oracle_regularized, eval_g_with, eval_k, eval_k_regularized, OracleValue, RingKernel,
};
pub use special::{
    AdaptiveQuadrature, ChebyshevTable, SpecialEvaluator, SpecialPair, SplitEvaluator,
};

/// `eval_special` with the default (split) evaluator.
pub fn eval_special(a: f64) -> crate::error::Result<SpecialPair> {
    SplitEvaluator.eval(a)
}

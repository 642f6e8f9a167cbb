//! Generalized degrees-of-freedom analysis for K-user interference channels
//! with coarse channel knowledge.
//!
//! The crate evaluates beamforming/power configurations, synthesizes
//! zero-forcing receivers, runs the ZEST joint signal-space and power-level
//! iteration, composes TIM-TIN decomposition schemes and provides the
//! finite-SNR baselines used for comparison.

pub mod baselines;
pub mod catalog;
pub mod channel;
pub mod decomposition;
pub mod error;
pub mod gdof;
pub mod linalg;
pub mod scheme;
pub mod tin;
pub mod zest;

pub use channel::{
    classify_links, gen_cyclic_random, gen_neighboring, gen_neighboring_with, ChannelDoc, ChannelSpec, LinkClass,
    NeighborLayout, QuantizationScheme,
};
pub use error::{Error, Result};
pub use gdof::{
    dominant_exponent_sum, finite_snr_rates, gdof_of_config, stream_gdof, user_gdof, zfsc_receivers, DominantSum,
    ExponentSet, GdofTuple,
};
pub use linalg::{CVector, INDICATOR_TOL, SPAN_TOL};
pub use scheme::{lexicographic_order, reverse_lexicographic_order, RxConfig, StreamId, TxConfig, TxStream};
pub use zest::{
    dual_power_update, effective_strengths, multi_init_best, run_zest, run_zest_from, select_best, zest_init, zest_iterate,
    Direction, EffectiveStrengthMatrix, GdofTrace, MultiInitResult, TraceRow, ZestRun, ZestState,
};
pub use decomposition::{
    achieved_tuple, compose, factor_bound, neighboring_achievability, neighboring_sym_gdof, tim_solution_for,
    verify_scheme, ComposedScheme, Decomposition, DecompositionDoc, FactorReport, NeighboringScheme, TimSolution,
    TimTopology,
};
pub use tin::{tin_feasible, tin_gdof, tin_optimality_check, tin_symmetric_gdof, TinFeasibility, TinSolution};
pub use baselines::{
    full_power_rates, igpc, max_sinr, sapc, tdma_rates, Algorithm, BaselineResult, IgpcResult, MaxSinrResult,
    SapcResult,
};

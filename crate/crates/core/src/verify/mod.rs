//! Monte Carlo validation of the closed forms: estimators, goodness-of-fit statistics,
//! level-crossing analysis and the figure-reproduction suite.

pub mod crossing;
pub mod report;
pub mod stats;
pub mod suite;

pub use crossing::{crossing_analysis, CrossingSummary, Sojourn};
pub use report::{Direction, Statistic, VerificationReport};
pub use stats::{
    batch_means, binomial_z, complex_autocorrelation, empirical_autocov, empirical_cdf, empirical_pdf, ks_test,
    kolmogorov_survival, l1_histogram_distance, l1_histogram_distance_on, Autocovariance, Histogram, KsResult,
    L1Comparison,
};
pub use suite::{euler_pair, figure_suite, pathwise_drift, CrossingScenario, EulerPair, FigureCurve, JobFailure, SuiteConfig, SuiteOutcome, JOBS};

//! Reference distributions used by the hypothesis tests.

mod continuous;
mod exact;
pub mod special;

pub use continuous::{
    chi_square_cdf, chi_square_pdf, chi_square_quantile, chi_square_sf, f_cdf, f_pdf, f_quantile,
    f_sf, std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf, std_normal_upper,
    student_t_cdf, student_t_pdf, student_t_quantile, student_t_sf, student_t_upper,
};
pub use exact::{
    exact_t_pmf, exact_t_pmf_with_cap, exact_u_pmf, exact_u_pmf_with_cap, t_critical, u_critical,
    ExactRankPmf, RankStatistic, DEFAULT_T_CAP, DEFAULT_U_CAP,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("probability {0} is outside the open interval (0, 1)")]
    Probability(f64),
    #[error("degrees of freedom must be positive and finite, got {0}")]
    DegreesOfFreedom(f64),
    #[error("argument {0} is outside the support")]
    Argument(f64),
    #[error("sample size must be at least 1, got {0}")]
    SampleSize(usize),
    #[error("exact distribution size {size} exceeds the cap {cap}")]
    CapExceeded { size: usize, cap: usize },
}

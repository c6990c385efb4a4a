//! Scalar special functions: Mittag-Leffler, Wright, incomplete gamma and beta.

mod gamma;
mod incomplete;
mod mittag_leffler;
mod wright;

pub(crate) use gamma::CompensatedSum;
pub use gamma::{gamma, ln_abs_rgamma, ln_gamma, rgamma, sin_pi};
pub use incomplete::{incomplete_beta, upper_incomplete_gamma};
pub use mittag_leffler::{mittag_leffler, mittag_leffler2, SERIES_LIMIT};
pub use wright::{
    m_wright, wright, wright_safe_limit, wright_series, WrightEval, CANCELLATION_BUDGET,
};

//! Special-function kernel.

mod gamma;
mod hypergeom;
mod laplace;
mod lauricella;
pub mod quad;

pub use gamma::{beta, gamma, gaussian_q, ln_gamma, ln_gamma_ratio, reg_gamma_p, reg_gamma_q};
pub use hypergeom::{gauss_2f1, kummer_1f1};
pub use laplace::{bromwich_cdf, DEFAULT_INVERSION_TOL};
pub use lauricella::{lauricella_fd, phi2_series, SeriesConfig, PHI2_SERIES_WINDOW};
pub use quad::{Estimate, QuadMethod, QuadratureConfig};

//! Special-function kernel: log-Gamma machinery, the regularized Gauss
//! series in extended precision, and Ferrers functions `P_ν^m` with three
//! interchangeable evaluation backends (series / quadrature / shooting).

mod gamma;
mod hyper;
mod integral;
mod legendre;
mod ode;

pub use gamma::{digamma, gamma_ratio_g, log_gamma};
pub use hyper::{olver_f, SeriesControl};
pub use legendre::{
    legendre_p, legendre_p_at0, legendre_p_at0_log, legendre_p_dx, legendre_p_with_dx,
    LegendreArgs,
};

pub(crate) use gamma::{ln_g, ln_g_deriv};
pub(crate) use integral::integral_eval;

#[cfg(test)]
pub(crate) use gamma::log_gamma_signed;

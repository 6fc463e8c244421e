//! Polynomials, truncated power series and the hypergeometric coefficients.

mod bivariate;
mod hypergeom;
mod poly;
mod truncated;

pub use bivariate::{BivariateRing, BivariateSeries};
pub use hypergeom::{
    apply_pf_operator, derivative_ratio_eval, hyperg_coeff, is_annihilated, series_over_q, truncated_f, HypergeomSpec,
    ResidueTable,
};
pub use poly::{Poly, PolyRing};
pub use truncated::{SeriesRing, TruncatedSeries};

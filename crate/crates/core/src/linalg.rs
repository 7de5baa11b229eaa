use crate::C;
use nalgebra::{DMatrix, DVector};

/// Minimum-norm least-squares solution via SVD, truncating singular values
/// below `rcond * sigma_max`.
pub(crate) fn least_squares(a: DMatrix<C>, b: &DVector<C>, rcond: f64) -> DVector<C> {
    let svd = a.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = (rcond * smax).max(f64::MIN_POSITIVE);
    svd.solve(b, eps).expect("both factors computed")
}

use alloc::vec::Vec;

use super::{CsrMatrix, LinearOperator};
use crate::error::{check_len, Error, Result};
use crate::vecops::norm2;

/// Norms removed by [`column_unit_scale`], kept so solutions can be mapped back.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub column_norms_before: Vec<f64>,
    pub rhs_norm_before: f64,
}

impl ScalingReport {
    /// Maps a solution of the scaled problem back to the original variables:
    /// `x[j] = x_scaled[j] / column_norms_before[j] · rhs_norm_before`.
    pub fn unscale(&self, x_scaled: &[f64]) -> Vec<f64> {
        x_scaled
            .iter()
            .zip(&self.column_norms_before)
            .map(|(x, c)| x / c * self.rhs_norm_before)
            .collect()
    }
}

/// Scales every column of `a`, and `b`, to unit 2-norm.
///
/// A zero column or a zero `b` is an error; the caller decides whether to drop
/// the column or skip the problem.
pub fn column_unit_scale(a: &CsrMatrix, b: &[f64]) -> Result<(CsrMatrix, Vec<f64>, ScalingReport)> {
    check_len(a.nrows(), b.len())?;
    let norms = a.column_norms();
    if let Some(column) = norms.iter().position(|&c| c == 0.0) {
        return Err(Error::ZeroColumn { column });
    }
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Err(Error::ZeroRhs);
    }

    let mut scaled = a.clone();
    let cols: Vec<usize> = scaled.col_indices().to_vec();
    for (v, j) in scaled.values_mut().iter_mut().zip(cols) {
        *v /= norms[j];
    }
    let b_scaled = b.iter().map(|v| v / bnorm).collect();
    Ok((
        scaled,
        b_scaled,
        ScalingReport { column_norms_before: norms, rhs_norm_before: bnorm },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 4.0 * f64::EPSILON;

    #[test]
    fn diagonal_example() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 2.0), (1, 1, 4.0)]).unwrap();
        let (s, b, rep) = column_unit_scale(&a, &[3.0, 4.0]).unwrap();
        assert_eq!(s.get(0, 0), 1.0);
        assert_eq!(s.get(1, 1), 1.0);
        assert!((b[0] - 0.6).abs() <= TOL && (b[1] - 0.8).abs() <= TOL);
        assert_eq!(rep.column_norms_before, [2.0, 4.0]);
        assert_eq!(rep.rhs_norm_before, 5.0);
    }

    #[test]
    fn zero_column_and_zero_rhs_are_errors() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 2.0)]).unwrap();
        assert_eq!(column_unit_scale(&a, &[1.0, 1.0]), Err(Error::ZeroColumn { column: 1 }));
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 2.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(column_unit_scale(&a, &[0.0, 0.0]), Err(Error::ZeroRhs));
        assert!(column_unit_scale(&a, &[1.0]).is_err());
    }

    #[test]
    fn unscale_recovers_original_solution() {
        // A = diag(2, 4), b = (3, 4): x = (1.5, 1). Scaled: A_s = I, b_s = (0.6, 0.8).
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 2.0), (1, 1, 4.0)]).unwrap();
        let (s, bs, rep) = column_unit_scale(&a, &[3.0, 4.0]).unwrap();
        let xs = bs.clone();
        assert_eq!(s.apply(&xs).unwrap(), bs);
        let x = rep.unscale(&xs);
        assert!((x[0] - 1.5).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }
}

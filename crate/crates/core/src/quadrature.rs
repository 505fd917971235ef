//! Line integrals of 1-forms `xi_i = sum_j M_ij(t) dt_j` along polylines.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Gauss points per sub-segment.
pub const GAUSS_POINTS: usize = 8;
/// Sub-segments per polyline edge.
pub const SUBSEGMENTS: usize = 16;

/// Integrate the vector of 1-forms `xi = M(t) dt` along the straight segment
/// from `a` to `b`, returning `(integral of xi_1, .., integral of xi_m)`.
pub fn segment_integral<F>(field: &F, a: &[f64], b: &[f64]) -> DVector<f64>
where
    F: Fn(&[f64]) -> DMatrix<f64> + ?Sized,
{
    let rule = GaussLegendre::new(NonZeroUsize::new(GAUSS_POINTS).expect("nonzero"));
    let d = a.len();
    let dir = DVector::from_iterator(d, b.iter().zip(a).map(|(b, a)| b - a));
    let rows = field(a).nrows();
    let mut total = DVector::zeros(rows);
    for k in 0..SUBSEGMENTS {
        let s0 = k as f64 / SUBSEGMENTS as f64;
        let s1 = (k + 1) as f64 / SUBSEGMENTS as f64;
        for i in 0..rows {
            total[i] += rule.integrate(s0, s1, |s| {
                let p: Vec<f64> = (0..d).map(|c| a[c] + s * dir[c]).collect();
                (field(&p).row(i) * &dir)[0]
            });
        }
    }
    total
}

/// Integrate along a polyline through `points`.
pub fn polyline_integral<F>(field: &F, points: &[Vec<f64>]) -> Result<DVector<f64>>
where
    F: Fn(&[f64]) -> DMatrix<f64> + ?Sized,
{
    if points.len() < 2 {
        return Err(Error::Input("polyline needs at least two points".into()));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Dimension("polyline points of mixed dimension".into()));
    }
    let mut total = segment_integral(field, &points[0], &points[1]);
    for w in points[1..].windows(2) {
        total += segment_integral(field, &w[0], &w[1]);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_form_integrates_to_potential_difference() {
        // xi = d(t1^2 t2) = 2 t1 t2 dt1 + t1^2 dt2
        let f = |t: &[f64]| DMatrix::from_row_slice(1, 2, &[2.0 * t[0] * t[1], t[0] * t[0]]);
        let v = polyline_integral(&f, &[vec![0.0, 0.0], vec![1.0, 0.5], vec![2.0, 3.0]]).unwrap();
        assert!((v[0] - 12.0).abs() < 1e-12);
    }
}

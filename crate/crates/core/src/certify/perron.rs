//! Perron-Frobenius eigenvalue with a certified Collatz-Wielandt bracket.

use serde::Serialize;

use super::matrix::IncidenceMatrix;
use crate::error::{Error, Result};
use crate::scalar::FloatScalar;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dilatation<F> {
    pub lambda: F,
    /// Certified: `lower <= λ <= upper`.
    pub lower: F,
    pub upper: F,
    /// Positive eigenvector of the transpose, normalised to unit sum.
    pub widths: Vec<F>,
    pub iterations: usize,
}

impl<F: FloatScalar> Dilatation<F> {
    pub fn width(&self) -> F {
        self.upper - self.lower
    }

    /// The certified intervals are disjoint and `self` lies below `other`.
    pub fn certainly_below(&self, other: &Dilatation<F>) -> bool {
        self.upper < other.lower
    }
}

fn mat_vec<F: FloatScalar>(m: &[Vec<u64>], v: &[F], transpose: bool) -> Vec<F> {
    let n = v.len();
    (0..n)
        .map(|i| {
            (0..n).fold(F::zero(), |acc, j| {
                let a = if transpose { m[j][i] } else { m[i][j] };
                if a == 0 {
                    acc
                } else {
                    acc + F::from_u64(a).unwrap() * v[j]
                }
            })
        })
        .collect()
}

fn normalize<F: FloatScalar>(v: &mut [F]) {
    let s = v.iter().fold(F::zero(), |a, &x| a + x);
    for x in v.iter_mut() {
        *x = *x / s;
    }
}

/// Power iteration until the ratio spread `max(Mv/v) - min(Mv/v)` is below `tol`.
fn iterate<F: FloatScalar>(
    m: &[Vec<u64>],
    transpose: bool,
    tol: F,
    max_iters: usize,
) -> Result<(Vec<F>, usize)> {
    let n = m.len();
    let mut v = vec![F::one() / F::from_usize(n).unwrap(); n];
    for it in 1..=max_iters {
        let w = mat_vec(m, &v, transpose);
        let mut lo = F::infinity();
        let mut hi = F::zero();
        for (a, b) in w.iter().zip(&v) {
            let r = *a / *b;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        // Also catches NaN.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(lo > F::zero()) {
            return Err(Error::NoConvergence { iterations: it });
        }
        let mut next = w;
        normalize(&mut next);
        v = next;
        if hi - lo < tol {
            return Ok((v, it));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iters,
    })
}

/// Exact min and max of `(Mv)_i / v_i` as fractions, for `v` scaled to integers.
fn exact_ratios<F: FloatScalar>(m: &[Vec<u64>], v: &[F]) -> Option<((u128, u128), (u128, u128))> {
    let max = v.iter().fold(F::zero(), |a, &x| a.max(x));
    let scale = F::from_f64(2f64.powi(50)).unwrap() / max;
    let vi: Vec<u128> = v
        .iter()
        .map(|&x| (x * scale).round().to_u128().unwrap_or(0).max(1))
        .collect();
    let mut lo: Option<(u128, u128)> = None;
    let mut hi: Option<(u128, u128)> = None;
    for (i, row) in m.iter().enumerate() {
        let num: u128 = row.iter().zip(&vi).map(|(&a, &x)| u128::from(a) * x).sum();
        let r = (num, vi[i]);
        // a/b < c/d  <=>  a*d < c*b, checked to avoid overflow
        let less = |p: (u128, u128), q: (u128, u128)| -> Option<bool> {
            Some(p.0.checked_mul(q.1)? < q.0.checked_mul(p.1)?)
        };
        lo = Some(match lo {
            None => r,
            Some(cur) => {
                if less(r, cur)? {
                    r
                } else {
                    cur
                }
            }
        });
        hi = Some(match hi {
            None => r,
            Some(cur) => {
                if less(cur, r)? {
                    r
                } else {
                    cur
                }
            }
        });
    }
    Some((lo?, hi?))
}

/// Rounds `num/den` to `F`, moving one step down (or up) unless exact.
fn outward<F: FloatScalar>(num: u128, den: u128, down: bool) -> F {
    let exact = den != 0 && num.is_multiple_of(den) && num / den < (1u128 << 53);
    let x = F::from_f64(num as f64 / den as f64).unwrap();
    if exact && F::from_f64((num / den) as f64).unwrap() == x {
        return x;
    }
    let step = x.abs() * F::epsilon() * F::from_f64(4.0).unwrap() + F::min_positive_value();
    if down {
        x - step
    } else {
        x + step
    }
}

/// Leading eigenvalue of a primitive matrix, certified to within `tol`.
pub fn dilatation<F: FloatScalar>(m: &IncidenceMatrix, tol: F) -> Result<Dilatation<F>> {
    dilatation_with(m, tol, DEFAULT_MAX_ITERS)
}

pub fn dilatation_with<F: FloatScalar>(
    m: &IncidenceMatrix,
    tol: F,
    max_iters: usize,
) -> Result<Dilatation<F>> {
    if !m.is_square() || m.dim() == 0 {
        return Err(Error::NotASelfMap {
            source_name: "rows".into(),
            target: "columns".into(),
        });
    }
    // Iterate a bit below tol so that the certified bracket also fits.
    let inner = tol / F::from_f64(8.0).unwrap();
    let (v, it1) = iterate(&m.entries, false, inner, max_iters)?;
    let ((ln, ld), (hn, hd)) =
        exact_ratios(&m.entries, &v).ok_or(Error::NoConvergence { iterations: it1 })?;
    let lower: F = outward(ln, ld, true);
    let upper: F = outward(hn, hd, false);
    if upper - lower >= tol {
        return Err(Error::NoConvergence { iterations: it1 });
    }
    let w = mat_vec(&m.entries, &v, false);
    let s_w = w.iter().fold(F::zero(), |a, &x| a + x);
    let s_v = v.iter().fold(F::zero(), |a, &x| a + x);
    let lambda = (s_w / s_v).max(lower).min(upper);
    let (widths, it2) = iterate(&m.entries, true, inner, max_iters)?;
    Ok(Dilatation {
        lambda,
        lower,
        upper,
        widths,
        iterations: it1.max(it2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::EdgeLabel;

    fn labels(n: usize) -> Vec<EdgeLabel> {
        (0..n).map(|i| EdgeLabel::new(&format!("e{i}"))).collect()
    }

    #[test]
    fn one_by_one_is_exact() {
        let m = IncidenceMatrix::from_rows(labels(1), vec![vec![3]]);
        let d = dilatation::<f64>(&m, 1e-10).unwrap();
        assert_eq!(d.lambda, 3.0);
        assert_eq!(d.lower, 3.0);
        assert_eq!(d.upper, 3.0);
        assert_eq!(d.widths, vec![1.0]);
    }

    #[test]
    fn golden_mean() {
        let m = IncidenceMatrix::from_rows(labels(2), vec![vec![1, 1], vec![1, 0]]);
        let d = dilatation::<f64>(&m, 1e-12).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(d.lower <= phi && phi <= d.upper, "{d:?}");
        assert!(d.width() < 1e-12);
        let s: f64 = d.widths.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let m = IncidenceMatrix::from_rows(labels(2), vec![vec![2, 1], vec![1, 1]]);
        let d = dilatation::<f32>(&m, 1e-4).unwrap();
        let exact = (3.0 + 5f32.sqrt()) / 2.0;
        assert!(d.lower <= exact && exact <= d.upper);
    }

    #[test]
    fn jordan_block_does_not_converge() {
        // Ratios approach 1 only like 1/k.
        let m = IncidenceMatrix::from_rows(labels(2), vec![vec![1, 2], vec![0, 1]]);
        assert!(matches!(
            dilatation_with::<f64>(&m, 1e-10, 50),
            Err(Error::NoConvergence { .. })
        ));
    }
}

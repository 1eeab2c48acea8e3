//! Exact feasibility of `{x : Ax = b, x ≥ 0}` by Phase-I simplex over
//! rationals with Bland's rule (which cannot cycle).

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// A non-negative solution of `Ax = b`, or `None` when there is none.
pub(crate) fn feasible_point(a: &[Vec<i64>], b: &[BigRational], nvars: usize) -> Option<Vec<BigRational>> {
    let m = a.len();
    let width = nvars + m + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let sign = |v: BigRational| if flip { -v } else { v };
        let mut r = vec![BigRational::zero(); width];
        for (j, &x) in row.iter().enumerate() {
            r[j] = sign(BigRational::from_integer(x.into()));
        }
        r[nvars + i] = BigRational::from_integer(1.into());
        r[rhs] = sign(bi.clone());
        t.push(r);
    }
    let mut basis: Vec<usize> = (nvars..nvars + m).collect();

    // Reduced costs of the Phase-I objective (sum of artificials); the last
    // entry is minus the current objective value.
    let mut obj = vec![BigRational::zero(); width];
    for r in &t {
        for j in 0..nvars {
            obj[j] -= &r[j];
        }
        obj[rhs] -= &r[rhs];
    }

    while let Some(enter) = (0..nvars + m).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][rhs] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase I is bounded below by zero, so some row always limits.
        let (row, _) = leave.expect("phase one is bounded");
        let pivot = t[row][enter].clone();
        for x in t[row].iter_mut() {
            *x /= &pivot;
        }
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != row && !r[enter].is_zero() {
                let f = r[enter].clone();
                for (x, p) in r.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        let f = obj[enter].clone();
        for (x, p) in obj.iter_mut().zip(&pivot_row) {
            *x -= &f * p;
        }
        basis[row] = enter;
    }

    if !obj[rhs].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); nvars];
    for (i, &j) in basis.iter().enumerate() {
        if j < nvars {
            x[j] = t[i][rhs].clone();
        }
    }
    Some(x)
}

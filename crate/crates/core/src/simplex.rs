//! Phase-one simplex for `A x = b, x >= 0` feasibility.
//!
//! Dense tableau with Bland's rule, so it terminates on degenerate problems
//! and is exact when run on rationals. Intended for desk-sized problems (a
//! few hundred variables at most).

use crate::scalar::Scalar;

/// Returns a feasible point of `A x = b, x >= 0`, or `None` if there is none.
pub fn find_feasible<S: Scalar>(a: &[Vec<S>], b: &[S], eps: f64) -> Option<Vec<S>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    debug_assert_eq!(b.len(), m);
    if m == 0 {
        return Some(vec![S::zero(); n]);
    }
    // columns: n originals, m artificials, then rhs
    let width = n + m + 1;
    let mut tab: Vec<Vec<S>> = Vec::with_capacity(m + 1);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        let mut r: Vec<S> = Vec::with_capacity(width);
        for v in row {
            r.push(if flip { -v.clone() } else { v.clone() });
        }
        for j in 0..m {
            r.push(if i == j { S::one() } else { S::zero() });
        }
        r.push(if flip { -rhs.clone() } else { rhs.clone() });
        tab.push(r);
    }
    // objective row: reduced costs of minimising the sum of artificials
    let mut obj = vec![S::zero(); width];
    for r in &tab {
        for j in 0..n {
            obj[j] = obj[j].clone() - r[j].clone();
        }
        obj[width - 1] = obj[width - 1].clone() - r[width - 1].clone();
    }
    tab.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    let zero = S::zero();
    loop {
        let obj = &tab[m];
        // Bland: lowest index with negative reduced cost
        let entering = (0..n + m).find(|&j| obj[j].cmp_eps(&zero, eps).is_lt());
        let Some(col) = entering else { break };
        let mut leave: Option<(usize, S)> = None;
        for (i, row) in tab.iter().take(m).enumerate() {
            if row[col].cmp_eps(&zero, eps).is_gt() {
                let ratio = row[width - 1].clone() / row[col].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => match ratio.cmp_eps(lr, eps) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => basis[i] < basis[*li],
                        std::cmp::Ordering::Greater => false,
                    },
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row_idx, _)) = leave else {
            // unbounded direction cannot occur for a phase-one objective bounded below by 0
            break;
        };
        pivot(&mut tab, row_idx, col);
        basis[row_idx] = col;
    }

    let infeasibility = -tab[m][width - 1].clone();
    if !infeasibility.close(&zero, eps.max(if S::EXACT { 0.0 } else { 1e-9 })) {
        return None;
    }
    let mut x = vec![S::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            let v = tab[i][width - 1].clone();
            x[var] = if v.is_negative() { S::zero() } else { v };
        }
    }
    Some(x)
}

fn pivot<S: Scalar>(tab: &mut [Vec<S>], row: usize, col: usize) {
    let p = tab[row][col].clone();
    for v in tab[row].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let pivot_row = tab[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let f = r[col].clone();
        for (v, pv) in r.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    #[test]
    fn solves_small_transport_problem() {
        // x1 + x2 = 1, x1 - x2 = 0
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        let b = vec![int(1), int(0)];
        let x = find_feasible::<Rational>(&a, &b, 0.0).unwrap();
        assert_eq!(x, vec![crate::scalar::rat(1, 2), crate::scalar::rat(1, 2)]);
    }

    #[test]
    fn detects_infeasibility() {
        // x1 + x2 = 1, x1 + x2 = 2
        let a = vec![vec![int(1), int(1)], vec![int(1), int(1)]];
        let b = vec![int(1), int(2)];
        assert!(find_feasible::<Rational>(&a, &b, 0.0).is_none());
        // x1 = -1 with x1 >= 0
        assert!(find_feasible::<Rational>(&[vec![int(1)]], &[int(-1)], 0.0).is_none());
    }

    #[test]
    fn tolerates_redundant_rows() {
        let a = vec![vec![int(1), int(1)], vec![int(2), int(2)], vec![int(1), int(0)]];
        let b = vec![int(1), int(2), int(0)];
        let x = find_feasible::<Rational>(&a, &b, 0.0).unwrap();
        assert_eq!(x, vec![int(0), int(1)]);
    }
}

//! Piecewise polynomials with rational coefficients and breakpoints, used for
//! utility functions `u` and distortion weights `g`. Integrals are taken in
//! closed form so evaluation stays exact on rational inputs.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::scalar::{format_rational, Rational, Value};

/// Polynomial `c0 + c1 x + c2 x^2 + …` with trailing zero coefficients trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Value) -> Value {
        let mut acc = Value::from_i64(0);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&Value::Exact(c.clone()));
        }
        acc
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![Rational::zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(c / Rational::from_integer((k as i64 + 1).into()));
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
                .collect(),
        )
    }

    /// Writes the polynomial using `var` as the variable name.
    pub fn render(&self, var: &str) -> String {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = match (k, mag == Rational::from_integer(1.into())) {
                (0, _) => format_rational(&mag),
                (1, true) => var.to_string(),
                (_, true) => format!("{var}^{k}"),
                (1, false) => format!("{}*{var}", format_rational(&mag)),
                (_, false) => format!("{}*{var}^{k}", format_rational(&mag)),
            };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Piece `k` applies on `[b_k, b_{k+1})` with `b_0 = -inf`, `b_last = +inf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piecewise {
    breakpoints: Vec<Rational>,
    pieces: Vec<Poly>,
}

impl Piecewise {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Poly>) -> Result<Self, String> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(format!("{} pieces need {} breakpoints", pieces.len(), pieces.len().saturating_sub(1)));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err("breakpoints must be strictly increasing".into());
        }
        Ok(Piecewise { breakpoints, pieces })
    }

    pub fn single(p: Poly) -> Self {
        Piecewise { breakpoints: vec![], pieces: vec![p] }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    fn piece_index(&self, x: &Value) -> usize {
        self.breakpoints
            .iter()
            .take_while(|b| Value::Exact((*b).clone()).cmp_eps(x, 0.0) != Ordering::Greater)
            .count()
    }

    pub fn eval(&self, x: &Value) -> Value {
        self.pieces[self.piece_index(x)].eval(x)
    }

    /// `∫_a^b f(t) dt` for `a <= b`, piece by piece.
    pub fn integral(&self, a: &Value, b: &Value) -> Value {
        let mut total = Value::from_i64(0);
        let mut lo = a.clone();
        let first = self.piece_index(a);
        for k in first..self.pieces.len() {
            let hi = match self.breakpoints.get(k) {
                Some(bp) if Value::Exact(bp.clone()).cmp_eps(b, 0.0) == Ordering::Less => Value::Exact(bp.clone()),
                _ => b.clone(),
            };
            let anti = self.pieces[k].antiderivative();
            total = total.add(&anti.eval(&hi).sub(&anti.eval(&lo)));
            if hi == *b {
                break;
            }
            lo = hi;
        }
        total
    }

    /// Checks that the function is increasing on `[lo, hi]`: nonnegative
    /// derivative at `samples` grid points of each piece and no downward jump
    /// at breakpoints inside the interval.
    pub fn is_increasing_on(&self, lo: &Rational, hi: &Rational, samples: usize) -> bool {
        let n = samples.max(2) as i64;
        let step = (hi - lo) / Rational::from_integer(n.into());
        for i in 0..=n {
            let t = lo + &step * Rational::from_integer(i.into());
            let k = self.piece_index(&Value::Exact(t.clone()));
            if self.pieces[k].derivative().eval(&Value::Exact(t)).to_f64() < 0.0 {
                return false;
            }
        }
        for (k, bp) in self.breakpoints.iter().enumerate() {
            if bp > lo && bp < hi {
                let x = Value::Exact(bp.clone());
                if self.pieces[k + 1].eval(&x).cmp_eps(&self.pieces[k].eval(&x), 0.0) == Ordering::Less {
                    return false;
                }
            }
        }
        true
    }

    pub fn render(&self, var: &str) -> String {
        let mut out = self.pieces[0].render(var);
        for (bp, p) in self.breakpoints.iter().zip(&self.pieces[1..]) {
            out.push_str(&format!(" | {} | {}", format_rational(bp), p.render(var)));
        }
        out
    }
}

impl fmt::Display for Piecewise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn integrates_linear_weight() {
        let g = Piecewise::single(Poly::new(vec![int(0), int(2)]));
        let v = g.integral(&Value::Exact(rat(1, 2)), &Value::Exact(int(1)));
        assert_eq!(v, Value::Exact(rat(3, 4)));
    }

    #[test]
    fn integrates_across_breakpoints() {
        // g = 0 below 1/2, 1 above
        let g = Piecewise::new(vec![rat(1, 2)], vec![Poly::constant(int(0)), Poly::constant(int(1))]).unwrap();
        assert_eq!(g.integral(&Value::Exact(int(0)), &Value::Exact(int(1))), Value::Exact(rat(1, 2)));
        assert_eq!(g.integral(&Value::Exact(rat(1, 4)), &Value::Exact(rat(3, 4))), Value::Exact(rat(1, 4)));
        assert_eq!(g.eval(&Value::Exact(rat(1, 2))), Value::Exact(int(1)));
        assert!(g.is_increasing_on(&int(0), &int(1), 16));
        let dec = Piecewise::single(Poly::new(vec![int(1), int(-1)]));
        assert!(!dec.is_increasing_on(&int(0), &int(1), 16));
    }

    #[test]
    fn renders_canonically() {
        let p = Poly::new(vec![int(1), int(-1), rat(1, 2), int(0)]);
        assert_eq!(p.render("x"), "1 - x + 1/2*x^2");
        assert_eq!(Poly::new(vec![int(0), int(2)]).render("t"), "2*t");
        assert_eq!(Poly::new(vec![]).render("x"), "0");
        assert_eq!(Poly::new(vec![int(0), int(-1)]).render("x"), "-x");
    }
}

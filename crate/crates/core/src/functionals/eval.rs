use num_traits::{ToPrimitive, Zero};

use super::{EvalError, Functional};
use crate::dist::DiscreteDist;
use crate::scalar::{Scalar, Value};

fn fail(node: &Functional, reason: impl ToString) -> EvalError {
    EvalError { node: node.label(), reason: reason.to_string() }
}

/// Evaluates `f` on the law `d`. Exact-mode inputs give exact values unless
/// an irrational step (exponentials, fractional powers) intervenes.
pub fn evaluate<S: Scalar>(f: &Functional, d: &DiscreteDist<S>) -> Result<Value, EvalError> {
    use Functional::*;
    Ok(match f {
        Mean => d.mean().to_value(),
        Var => d.variance().to_value(),
        EssSup => d.max().to_value(),
        EssInf => d.min().to_value(),
        Quantile(t) => d.quantile(&S::from_rational(t)).map_err(|e| fail(f, e))?.to_value(),
        StopLoss(k) => d.stop_loss(&S::from_rational(k)).to_value(),
        ExpMoment(a) => {
            if a.is_zero() {
                Value::from_i64(1)
            } else {
                let a = ToPrimitive::to_f64(a).ok_or_else(|| fail(f, "exponent out of range"))?;
                Value::Approx(d.exp_moment(a).map_err(|e| fail(f, e))?)
            }
        }
        Eu(u) => d
            .atoms()
            .iter()
            .fold(Value::from_i64(0), |acc, a| acc.add(&a.prob.to_value().mul(&u.eval(&a.value.to_value())))),
        Dual(g) => d.quantile_steps().into_iter().fold(Value::from_i64(0), |acc, (lo, hi, v)| {
            acc.add(&v.to_value().mul(&g.integral(&lo.to_value(), &hi.to_value())))
        }),
        Const(c) => Value::Exact(c.clone()),
        Neg(a) => evaluate(a, d)?.neg(),
        Abs(a) => evaluate(a, d)?.abs(),
        Pow(a, e) => evaluate(a, d)?.pow(e).map_err(|err| fail(f, err))?,
        Sum(a, b) => evaluate(a, d)?.add(&evaluate(b, d)?),
        Product(a, b) => evaluate(a, d)?.mul(&evaluate(b, d)?),
        Quotient(a, b) => evaluate(a, d)?.div(&evaluate(b, d)?).map_err(|err| fail(f, err))?,
    })
}

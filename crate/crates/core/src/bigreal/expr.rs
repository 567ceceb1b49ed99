//! Constant expressions that can be re-evaluated at any precision.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::{CertifiedReal, Constant, Dyadic, PrecisionPolicy, RealError};

/// Handle to a real defined by an expression tree over named constants and
/// integers. Cheap to clone; children are shared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Constant),
    Int(BigInt),
    /// `num / den`, exact.
    Ratio(BigInt, BigInt),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    PowInt(Arc<Expr>, i64),
    Log(Arc<Expr>),
    Sqrt(Arc<Expr>),
}

impl Expr {
    pub fn constant(c: Constant) -> Expr {
        Expr::Const(c)
    }

    pub fn int(v: impl Into<BigInt>) -> Expr {
        Expr::Int(v.into())
    }

    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Expr {
        Expr::Ratio(num.into(), den.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Expr) -> Expr {
        Expr::Add(Arc::new(self), Arc::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Expr) -> Expr {
        Expr::Sub(Arc::new(self), Arc::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Expr) -> Expr {
        Expr::Mul(Arc::new(self), Arc::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, other: Expr) -> Expr {
        Expr::Div(Arc::new(self), Arc::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Expr {
        Expr::Neg(Arc::new(self))
    }

    pub fn pow_int(self, n: i64) -> Expr {
        Expr::PowInt(Arc::new(self), n)
    }

    pub fn ln(self) -> Expr {
        Expr::Log(Arc::new(self))
    }

    pub fn sqrt(self) -> Expr {
        Expr::Sqrt(Arc::new(self))
    }

    /// `log 2 / log(1 + sqrt 2)`.
    pub fn gamma() -> Expr {
        Expr::Const(Constant::Log2).div(Expr::Const(Constant::LogAlpha))
    }

    /// Evaluates the tree with every node at `bits` working precision.
    pub fn eval(&self, bits: u32) -> Result<CertifiedReal, RealError> {
        if bits < 16 {
            return Err(RealError::PrecisionTooLow(bits));
        }
        // children get a few guard bits so cancellation at the root is rarer
        let child = bits + 8;
        Ok(match self {
            Expr::Const(c) => CertifiedReal::constant(*c, bits)?,
            Expr::Int(v) => CertifiedReal::from_int(v.clone(), bits),
            Expr::Ratio(n, d) => {
                if d == &BigInt::from(0) {
                    return Err(RealError::DivisionByZero);
                }
                CertifiedReal::from_rational(
                    &num_rational::BigRational::new(n.clone(), d.clone()),
                    bits,
                )
            }
            Expr::Add(a, b) => a.eval(child)?.add(&b.eval(child)?),
            Expr::Sub(a, b) => a.eval(child)?.sub(&b.eval(child)?),
            Expr::Mul(a, b) => a.eval(child)?.mul(&b.eval(child)?),
            Expr::Div(a, b) => a.eval(child)?.div(&b.eval(child)?)?,
            Expr::Neg(a) => a.eval(bits)?.neg(),
            Expr::PowInt(a, n) => {
                let extra = 64 - (n.unsigned_abs().max(1)).leading_zeros();
                a.eval(child + extra)?.pow_int(*n)?
            }
            Expr::Log(a) => a.eval(child)?.ln()?,
            Expr::Sqrt(a) => a.eval(child)?.sqrt()?,
        }
        .with_bits(bits))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Ratio(n, d) => write!(f, "({n}/{d})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::PowInt(a, n) => write!(f, "{a}^{n}"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

/// Re-evaluates `expr` along the policy's precision levels until the radius
/// is at most `target_radius`.
pub fn refine(
    expr: &Expr,
    target_radius: &Dyadic,
    policy: &PrecisionPolicy,
) -> Result<CertifiedReal, RealError> {
    policy.validate()?;
    if !target_radius.is_positive() {
        return Err(RealError::InvalidPolicy(
            "target radius must be positive".into(),
        ));
    }
    let mut last = None;
    for bits in policy.levels() {
        let v = expr.eval(bits)?;
        if v.radius() <= target_radius {
            return Ok(v);
        }
        last = Some(v);
    }
    let last = last.expect("policy has at least one level");
    Err(RealError::PrecisionExhausted {
        bits: last.precision_bits(),
        radius: last.radius().to_string(),
        target: target_radius.to_string(),
    })
}

//! Scalar abstraction shared by plain floats and tape variables.
//!
//! Environments, the soft product layer and policies are written once
//! against [`Real`]. Running them with `f64` gives fast gradient-free
//! evaluation; running them with [`crate::diff::Var`] records every
//! operation for reverse-mode differentiation.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Beyond this magnitude the logistic function returns exactly 0 or 1.
pub const SIGMOID_SATURATION: f64 = 36.0;

/// Floating point base types a tape can be built over: `f32` or `f64`.
pub trait FloatBase: Float + FromPrimitive + Debug + Default + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in base float")
    }
}

impl FloatBase for f32 {}
impl FloatBase for f64 {}

/// Logistic function with hard saturation, plus its derivative.
pub fn sigmoid_with_slope<F: FloatBase>(x: F) -> (F, F) {
    let sat = F::lit(SIGMOID_SATURATION);
    if x > sat {
        (F::one(), F::zero())
    } else if x < -sat {
        (F::zero(), F::zero())
    } else {
        let s = F::one() / (F::one() + (-x).exp());
        (s, s * (F::one() - s))
    }
}

/// Differentiable scalar.
///
/// Subgradient conventions at kinks: `relu'(0) = 0`, `min`/`max` route the
/// gradient to the first argument on ties, `clamp` has zero gradient
/// strictly outside its bounds.
pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type Base: FloatBase;

    /// A constant carrying no gradient.
    fn cst(x: f64) -> Self;
    fn from_base(x: Self::Base) -> Self;
    fn base(self) -> Self::Base;

    fn value(self) -> f64 {
        self.base().to_f64().unwrap_or(f64::NAN)
    }

    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn tanh(self) -> Self;
    fn sigmoid(self) -> Self;
    fn relu(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn min(self, other: Self) -> Self;
    fn max(self, other: Self) -> Self;
    fn clamp(self, lo: f64, hi: f64) -> Self;

    fn square(self) -> Self {
        self * self
    }

    fn sum(xs: &[Self]) -> Self {
        xs.iter().copied().fold(Self::cst(0.0), |acc, x| acc + x)
    }

    /// Inner product; callers guarantee equal lengths.
    fn dot(a: &[Self], b: &[Self]) -> Self {
        a.iter()
            .zip(b)
            .fold(Self::cst(0.0), |acc, (&x, &y)| acc + x * y)
    }

    fn softmax(xs: &[Self]) -> Vec<Self> {
        let peak = xs
            .iter()
            .map(|x| x.value())
            .fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<Self> = xs.iter().map(|&x| (x - Self::cst(peak)).exp()).collect();
        let total = Self::sum(&exps);
        exps.into_iter().map(|e| e / total).collect()
    }
}

macro_rules! impl_real_for_float {
    ($f:ty) => {
        impl Real for $f {
            type Base = $f;

            fn cst(x: f64) -> Self {
                x as $f
            }
            fn from_base(x: $f) -> Self {
                x
            }
            fn base(self) -> $f {
                self
            }
            fn value(self) -> f64 {
                self as f64
            }
            fn exp(self) -> Self {
                <$f>::exp(self)
            }
            fn ln(self) -> Self {
                <$f>::ln(self)
            }
            fn tanh(self) -> Self {
                <$f>::tanh(self)
            }
            fn sigmoid(self) -> Self {
                sigmoid_with_slope(self).0
            }
            fn relu(self) -> Self {
                if self > 0.0 {
                    self
                } else {
                    0.0
                }
            }
            fn sin(self) -> Self {
                <$f>::sin(self)
            }
            fn cos(self) -> Self {
                <$f>::cos(self)
            }
            fn sqrt(self) -> Self {
                <$f>::sqrt(self)
            }
            fn min(self, other: Self) -> Self {
                if self <= other {
                    self
                } else {
                    other
                }
            }
            fn max(self, other: Self) -> Self {
                if self >= other {
                    self
                } else {
                    other
                }
            }
            fn clamp(self, lo: f64, hi: f64) -> Self {
                let (lo, hi) = (lo as $f, hi as $f);
                if self < lo {
                    lo
                } else if self > hi {
                    hi
                } else {
                    self
                }
            }
        }
    };
}

impl_real_for_float!(f32);
impl_real_for_float!(f64);

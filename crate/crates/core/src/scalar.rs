//! Scalar abstractions.
//!
//! Boundary dynamics only needs an ordered field: it works over exact
//! rationals by default and over `f64` for quick inspection. The Perron
//! iteration needs a float type.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Ordered field used for piecewise-affine boundary maps.
pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display {
    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits in scalar")
    }

    fn of_i64(n: i64) -> Self {
        <Self as FromPrimitive>::from_i64(n).expect("i64 fits in scalar")
    }

    /// Whether the value is an integer. Used to flag periodic points that
    /// sit on a junction between two letters.
    fn is_integral(&self) -> bool;
}

impl Scalar for f64 {
    fn is_integral(&self) -> bool {
        self.fract() == 0.0
    }
}

impl Scalar for f32 {
    fn is_integral(&self) -> bool {
        self.fract() == 0.0
    }
}

impl Scalar for num_rational::BigRational {
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl Scalar for num_rational::Ratio<i64> {
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

/// Floating point type for eigenvalue estimates: `f32` or `f64`.
pub trait FloatScalar: Float + FromPrimitive + Debug + Display + Send + Sync {}
impl FloatScalar for f32 {}
impl FloatScalar for f64 {}

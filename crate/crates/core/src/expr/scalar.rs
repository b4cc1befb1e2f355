//! Number types the expression evaluator is generic over: plain `f64`,
//! first-order [`Dual`] numbers and second-order [`Dual2`] numbers.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    fn value(self) -> f64;
    fn powc(self, exponent: f64) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// `order`-th derivative of the flat function `phi`.
    fn phi(self, order: u32) -> Self;
}

pub(crate) fn pow_const(x: f64, c: f64) -> f64 {
    if c.fract() == 0.0 && c.abs() <= 64.0 {
        x.powi(c as i32)
    } else {
        x.powf(c)
    }
}

const CACHED_ORDERS: usize = 12;

/// Coefficients of the polynomials `p_k` with `phi^(k)(x) = p_k(1/x) exp(-1/x)`
/// for `x > 0`, indexed by degree. `p_0 = 1`, `p_{k+1}(u) = u^2 (p_k(u) - p_k'(u))`.
fn phi_polynomial(order: u32) -> Vec<f64> {
    let mut p = vec![1.0];
    for _ in 0..order {
        let mut next = vec![0.0; p.len() + 2];
        for (j, &c) in p.iter().enumerate() {
            next[j + 2] += c;
            if j > 0 {
                next[j + 1] -= j as f64 * c;
            }
        }
        p = next;
    }
    p
}

fn cached_polynomial(order: u32) -> Option<&'static [f64]> {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| (0..CACHED_ORDERS as u32).map(phi_polynomial).collect());
    table.get(order as usize).map(Vec::as_slice)
}

/// `phi(x) = exp(-1/x)` for `x > 0` and `0` for `x <= 0`, and its derivatives.
///
/// Every derivative vanishes identically on `x <= 0`, including at `x = 0`.
/// Higher derivatives are summed term by term in log space so that
/// `u^j exp(-u)` never forms `inf * 0` when `x` is tiny.
pub fn phi_derivative(order: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if order == 0 {
        return (-1.0 / x).exp();
    }
    let u = 1.0 / x;
    let ln_u = u.ln();
    let owned;
    let coeffs = match cached_polynomial(order) {
        Some(c) => c,
        None => {
            owned = phi_polynomial(order);
            &owned
        }
    };
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| c * (j as f64 * ln_u - u).exp())
        .sum()
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(self) -> f64 {
        self
    }
    fn powc(self, exponent: f64) -> Self {
        pow_const(self, exponent)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn phi(self, order: u32) -> Self {
        phi_derivative(order, self)
    }
}

/// First-order forward-mode dual number `value + deriv·ε`, `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub value: f64,
    pub deriv: f64,
}

impl Dual {
    pub fn new(value: f64, deriv: f64) -> Self {
        Self { value, deriv }
    }

    /// A seeded independent variable.
    pub fn variable(value: f64) -> Self {
        Self { value, deriv: 1.0 }
    }

    fn chain(self, value: f64, slope: f64) -> Self {
        Self {
            value,
            deriv: slope * self.deriv,
        }
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.value * rhs.value,
            self.deriv * rhs.value + self.value * rhs.deriv,
        )
    }
}

impl Div for Dual {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.value / rhs.value;
        Self::new(q, (self.deriv - q * rhs.deriv) / rhs.value)
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.deriv)
    }
}

impl Scalar for Dual {
    fn constant(c: f64) -> Self {
        Self::new(c, 0.0)
    }
    fn value(self) -> f64 {
        self.value
    }
    fn powc(self, exponent: f64) -> Self {
        let slope = if exponent == 0.0 {
            0.0
        } else {
            exponent * pow_const(self.value, exponent - 1.0)
        };
        self.chain(pow_const(self.value, exponent), slope)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.value.ln(), 1.0 / self.value)
    }
    fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
    fn phi(self, order: u32) -> Self {
        self.chain(
            phi_derivative(order, self.value),
            phi_derivative(order + 1, self.value),
        )
    }
}

/// Second-order dual number carrying the value and the first and second
/// derivatives along one seeded direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual2 {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

impl Dual2 {
    pub fn new(value: f64, first: f64, second: f64) -> Self {
        Self {
            value,
            first,
            second,
        }
    }

    pub fn variable(value: f64) -> Self {
        Self::new(value, 1.0, 0.0)
    }

    /// Applies a scalar function with known value, slope and curvature.
    fn chain(self, value: f64, slope: f64, curvature: f64) -> Self {
        Self::new(
            value,
            slope * self.first,
            curvature * self.first * self.first + slope * self.second,
        )
    }
}

impl Add for Dual2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.value + rhs.value,
            self.first + rhs.first,
            self.second + rhs.second,
        )
    }
}

impl Sub for Dual2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.value - rhs.value,
            self.first - rhs.first,
            self.second - rhs.second,
        )
    }
}

impl Mul for Dual2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.value * rhs.value,
            self.first * rhs.value + self.value * rhs.first,
            self.second * rhs.value + 2.0 * self.first * rhs.first + self.value * rhs.second,
        )
    }
}

impl Div for Dual2 {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.value / rhs.value;
        let q1 = (self.first - q * rhs.first) / rhs.value;
        let q2 = (self.second - 2.0 * q1 * rhs.first - q * rhs.second) / rhs.value;
        Self::new(q, q1, q2)
    }
}

impl Neg for Dual2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.first, -self.second)
    }
}

impl Scalar for Dual2 {
    fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0)
    }
    fn value(self) -> f64 {
        self.value
    }
    fn powc(self, c: f64) -> Self {
        let x = self.value;
        let slope = if c == 0.0 {
            0.0
        } else {
            c * pow_const(x, c - 1.0)
        };
        let curvature = if c == 0.0 || c == 1.0 {
            0.0
        } else {
            c * (c - 1.0) * pow_const(x, c - 2.0)
        };
        self.chain(pow_const(x, c), slope, curvature)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.value;
        self.chain(self.value.ln(), r, -r * r)
    }
    fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn phi(self, order: u32) -> Self {
        self.chain(
            phi_derivative(order, self.value),
            phi_derivative(order + 1, self.value),
            phi_derivative(order + 2, self.value),
        )
    }
}

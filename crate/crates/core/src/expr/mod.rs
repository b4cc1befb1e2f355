//! Scalar expressions over named variables.
//!
//! An [`Expression`] is parsed from infix text, evaluated exactly or with
//! dual numbers, and differentiated symbolically. The flat function
//! `phi(x) = exp(-1/x)` (zero for `x <= 0`) is a builtin, together with its
//! derivatives `phi'`, `phi''`, ...

mod diff;
mod parse;
mod scalar;

use std::fmt;
use std::ops;

use crate::error::{DomainError, Error, Result};

pub use scalar::{phi_derivative, Dual, Dual2, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    /// `Phi(k)` is the k-th derivative of `phi`.
    Phi(u32),
}

impl Func {
    pub(crate) fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => {
                let primes = name.strip_prefix("phi")?;
                primes
                    .chars()
                    .all(|c| c == '\'')
                    .then_some(Func::Phi(primes.len() as u32))
            }
        }
    }

    fn name(self) -> String {
        match self {
            Func::Exp => "exp".into(),
            Func::Ln => "ln".into(),
            Func::Sin => "sin".into(),
            Func::Cos => "cos".into(),
            Func::Phi(k) => format!("phi{}", "'".repeat(k as usize)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    /// Index into the owning expression's variable list.
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    /// Power with a constant exponent.
    Pow(Box<Node>, f64),
    Call(Func, Box<Node>),
}

impl Node {
    fn visit_vars(&self, seen: &mut [bool]) {
        match self {
            Node::Const(_) => {}
            Node::Var(i) => seen[*i] = true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.visit_vars(seen),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.visit_vars(seen);
                b.visit_vars(seen);
            }
        }
    }

    fn remap(&self, map: &[usize]) -> Node {
        let bx = |n: &Node| Box::new(n.remap(map));
        match self {
            Node::Const(c) => Node::Const(*c),
            Node::Var(i) => Node::Var(map[*i]),
            Node::Neg(a) => Node::Neg(bx(a)),
            Node::Add(a, b) => Node::Add(bx(a), bx(b)),
            Node::Sub(a, b) => Node::Sub(bx(a), bx(b)),
            Node::Mul(a, b) => Node::Mul(bx(a), bx(b)),
            Node::Div(a, b) => Node::Div(bx(a), bx(b)),
            Node::Pow(a, c) => Node::Pow(bx(a), *c),
            Node::Call(f, a) => Node::Call(*f, bx(a)),
        }
    }

    fn eval<S: Scalar>(&self, vars: &[S]) -> Result<S, DomainError> {
        Ok(match self {
            Node::Const(c) => S::constant(*c),
            Node::Var(i) => vars[*i],
            Node::Neg(a) => -a.eval(vars)?,
            Node::Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Node::Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Node::Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Node::Div(a, b) => {
                let num = a.eval(vars)?;
                let den = b.eval(vars)?;
                if den.value() == 0.0 {
                    return Err(DomainError::DivisionByZero);
                }
                num / den
            }
            Node::Pow(a, c) => {
                let base = a.eval(vars)?;
                let v = base.value();
                if v < 0.0 && c.fract() != 0.0 {
                    return Err(DomainError::NegativeBase {
                        base: v,
                        exponent: *c,
                    });
                }
                if v == 0.0 && *c < 0.0 {
                    return Err(DomainError::DivisionByZero);
                }
                base.powc(*c)
            }
            Node::Call(f, a) => {
                let x = a.eval(vars)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x.value() <= 0.0 {
                            return Err(DomainError::LogNonPositive(x.value()));
                        }
                        x.ln()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Phi(k) => x.phi(*k),
                }
            }
        })
    }

    fn size(&self) -> usize {
        match self {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => 1 + a.size(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

/// A parsed scalar function of an ordered list of declared variables.
///
/// Immutable once built; evaluation is pure.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    vars: Vec<String>,
    used: Vec<bool>,
}

impl Expression {
    /// Parses `source`; every identifier that is not a function call must be
    /// one of `allowed_vars`, which become the declared variables in order.
    pub fn parse(source: &str, allowed_vars: &[&str]) -> Result<Self> {
        let root = parse::parse(source, allowed_vars)?;
        Ok(Self::from_node(
            root,
            allowed_vars.iter().map(|s| s.to_string()).collect(),
        ))
    }

    pub fn from_node(root: Node, vars: Vec<String>) -> Self {
        let mut used = vec![false; vars.len()];
        root.visit_vars(&mut used);
        Self { root, vars, used }
    }

    pub fn constant(c: f64, vars: &[&str]) -> Self {
        Self::from_node(Node::Const(c), vars.iter().map(|s| s.to_string()).collect())
    }

    pub fn variable(name: &str, vars: &[&str]) -> Result<Self> {
        let i = vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::UnknownVariable {
                name: name.into(),
                position: 0,
            })?;
        Ok(Self::from_node(
            Node::Var(i),
            vars.iter().map(|s| s.to_string()).collect(),
        ))
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Declared variables, in positional order.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Declared variables that actually occur in the expression.
    pub fn free_vars(&self) -> Vec<&str> {
        self.vars
            .iter()
            .zip(&self.used)
            .filter(|(_, u)| **u)
            .map(|(v, _)| v.as_str())
            .collect()
    }

    pub fn depends_on(&self, var: &str) -> bool {
        self.var_index(var).is_some_and(|i| self.used[i])
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.root, Node::Const(c) if c == 0.0)
    }

    pub fn node_count(&self) -> usize {
        self.root.size()
    }

    pub fn var_index(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    /// Re-declares the expression over `vars`, which must contain every free variable.
    pub fn with_vars(&self, vars: &[&str]) -> Result<Expression> {
        let mut map = vec![usize::MAX; self.vars.len()];
        for (i, name) in self.vars.iter().enumerate() {
            match vars.iter().position(|v| v == name) {
                Some(j) => map[i] = j,
                None if self.used[i] => {
                    return Err(Error::UnknownVariable {
                        name: name.clone(),
                        position: 0,
                    })
                }
                None => {}
            }
        }
        Ok(Self::from_node(
            self.root.remap(&map),
            vars.iter().map(|s| s.to_string()).collect(),
        ))
    }

    /// Positional evaluation over any [`Scalar`]; `values` follows [`Self::vars`].
    pub fn eval_at<S: Scalar>(&self, values: &[S]) -> Result<S> {
        if values.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: values.len(),
            });
        }
        let out = self.root.eval(values)?;
        if !out.value().is_finite() {
            return Err(DomainError::NonFinite {
                value: out.value(),
                at: values.iter().map(|v| v.value()).collect(),
            }
            .into());
        }
        Ok(out)
    }

    fn bind<S: Scalar>(&self, bindings: &[(&str, S)]) -> Result<Vec<S>> {
        self.vars
            .iter()
            .zip(&self.used)
            .map(
                |(name, used)| match bindings.iter().find(|(n, _)| n == name) {
                    Some((_, v)) => Ok(*v),
                    None if *used => Err(Error::Unbound(name.clone())),
                    None => Ok(S::constant(0.0)),
                },
            )
            .collect()
    }

    /// Evaluates with named bindings; every free variable must be bound.
    pub fn eval(&self, bindings: &[(&str, f64)]) -> Result<f64> {
        let values = self.bind(bindings)?;
        self.eval_at(&values)
    }

    pub fn eval_dual(&self, bindings: &[(&str, Dual)]) -> Result<Dual> {
        let values = self.bind(bindings)?;
        self.eval_at(&values)
    }

    /// Value and full gradient at a positional point, one dual pass per variable.
    pub fn gradient_at(&self, point: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut seeded: Vec<Dual> = point.iter().map(|&v| Dual::new(v, 0.0)).collect();
        let mut grad = vec![0.0; point.len()];
        let mut value = None;
        for i in 0..point.len() {
            if !self.used[i] {
                continue;
            }
            seeded[i].deriv = 1.0;
            let d = self.eval_at(&seeded)?;
            seeded[i].deriv = 0.0;
            grad[i] = d.deriv;
            value = Some(d.value);
        }
        let value = match value {
            Some(v) => v,
            None => self.eval_at(point)?,
        };
        Ok((value, grad))
    }

    /// Partial derivative along one coordinate at a positional point.
    pub fn partial_at(&self, var: usize, point: &[f64]) -> Result<f64> {
        let seeded: Vec<Dual> = point
            .iter()
            .enumerate()
            .map(|(i, &v)| Dual::new(v, if i == var { 1.0 } else { 0.0 }))
            .collect();
        Ok(self.eval_at(&seeded)?.deriv)
    }

    /// Symbolic partial derivative with respect to a declared variable.
    pub fn differentiate(&self, var: &str) -> Result<Expression> {
        let i = self.var_index(var).ok_or_else(|| Error::UnknownVariable {
            name: var.into(),
            position: 0,
        })?;
        Ok(Self::from_node(
            diff::derivative(&self.root, i),
            self.vars.clone(),
        ))
    }

    /// Combines two expressions, declaring the union of their variables.
    fn combine(self, rhs: Expression, op: fn(Box<Node>, Box<Node>) -> Node) -> Expression {
        let mut vars = self.vars.clone();
        for v in &rhs.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        let map: Vec<usize> = rhs
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).unwrap())
            .collect();
        let rhs_root = rhs.root.remap(&map);
        Self::from_node(op(Box::new(self.root), Box::new(rhs_root)), vars)
    }

    pub fn powc(self, exponent: f64) -> Expression {
        let vars = self.vars;
        Self::from_node(Node::Pow(Box::new(self.root), exponent), vars)
    }

    pub fn call(self, func: Func) -> Expression {
        let vars = self.vars;
        Self::from_node(Node::Call(func, Box::new(self.root)), vars)
    }
}

impl ops::Add for Expression {
    type Output = Expression;
    fn add(self, rhs: Expression) -> Expression {
        self.combine(rhs, Node::Add)
    }
}

impl ops::Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        self.combine(rhs, Node::Sub)
    }
}

impl ops::Mul for Expression {
    type Output = Expression;
    fn mul(self, rhs: Expression) -> Expression {
        self.combine(rhs, Node::Mul)
    }
}

impl ops::Div for Expression {
    type Output = Expression;
    fn div(self, rhs: Expression) -> Expression {
        self.combine(rhs, Node::Div)
    }
}

impl ops::Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        let vars = self.vars;
        Self::from_node(Node::Neg(Box::new(self.root)), vars)
    }
}

struct Printer<'a> {
    node: &'a Node,
    vars: &'a [String],
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |node| Printer {
            node,
            vars: self.vars,
        };
        match self.node {
            Node::Const(c) if c.is_sign_negative() => write!(f, "(-{:?})", -c),
            Node::Const(c) => write!(f, "{c:?}"),
            Node::Var(i) => write!(f, "{}", self.vars[*i]),
            Node::Neg(a) => write!(f, "(-{})", sub(a)),
            Node::Add(a, b) => write!(f, "({} + {})", sub(a), sub(b)),
            Node::Sub(a, b) => write!(f, "({} - {})", sub(a), sub(b)),
            Node::Mul(a, b) => write!(f, "({} * {})", sub(a), sub(b)),
            Node::Div(a, b) => write!(f, "({} / {})", sub(a), sub(b)),
            Node::Pow(a, c) => write!(f, "({})^{:?}", sub(a), c),
            Node::Call(func, a) => write!(f, "{}({})", func.name(), sub(a)),
        }
    }
}

/// Prints fully parenthesized infix that parses back to an equivalent tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            Printer {
                node: &self.root,
                vars: &self.vars
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn parse_collects_free_vars() {
        let e = Expression::parse("x^2 + y^2", &["x", "y"]).unwrap();
        assert_eq!(e.free_vars(), vec!["x", "y"]);
        assert_eq!(e.eval(&[("x", 1.0), ("y", 2.0)]).unwrap(), 5.0);
    }

    #[test]
    fn exp_of_negative_reciprocal() {
        let e = Expression::parse("exp(-1/x)", &["x"]).unwrap();
        assert!(close(
            e.eval(&[("x", 1.0)]).unwrap(),
            0.36787944117144233,
            1e-15
        ));
    }

    #[test]
    fn unknown_variable_is_rejected() {
        let err = Expression::parse("x + q", &["x"]).unwrap_err();
        assert_eq!(
            err,
            Error::UnknownVariable {
                name: "q".into(),
                position: 4
            }
        );
    }

    #[test]
    fn mechanics_generator_value() {
        let e = Expression::parse("t^2*y - y^3/3", &["t", "y"]).unwrap();
        assert!(close(
            e.eval(&[("t", 1.0), ("y", 1.0)]).unwrap(),
            2.0 / 3.0,
            1e-15
        ));
    }

    #[test]
    fn phi_builtin_is_zero_on_the_left() {
        let e = Expression::parse("phi(x)", &["x"]).unwrap();
        assert_eq!(e.eval(&[("x", -0.3)]).unwrap(), 0.0);
        assert_eq!(e.eval(&[("x", 0.0)]).unwrap(), 0.0);
    }

    #[test]
    fn unbound_and_domain_errors_are_distinct() {
        let e = Expression::parse("ln(x) + 1/y", &["x", "y"]).unwrap();
        assert_eq!(e.eval(&[("x", 1.0)]), Err(Error::Unbound("y".into())));
        assert_eq!(
            e.eval(&[("x", -1.0), ("y", 1.0)]),
            Err(Error::Domain(DomainError::LogNonPositive(-1.0)))
        );
        assert_eq!(
            e.eval(&[("x", 1.0), ("y", 0.0)]),
            Err(Error::Domain(DomainError::DivisionByZero))
        );
        let big = Expression::parse("exp(x)", &["x"]).unwrap();
        assert!(matches!(
            big.eval(&[("x", 1000.0)]),
            Err(Error::Domain(DomainError::NonFinite { .. }))
        ));
    }

    #[test]
    fn dual_evaluation_examples() {
        let sq = Expression::parse("x^2", &["x"]).unwrap();
        let d = sq.eval_dual(&[("x", Dual::variable(3.0))]).unwrap();
        assert_eq!((d.value, d.deriv), (9.0, 6.0));

        let phi = Expression::parse("phi(x)", &["x"]).unwrap();
        let d = phi.eval_dual(&[("x", Dual::variable(-1.0))]).unwrap();
        assert_eq!((d.value, d.deriv), (0.0, 0.0));
    }

    #[test]
    fn phi_dual_matches_central_difference() {
        let phi = Expression::parse("phi(x)", &["x"]).unwrap();
        let d = phi.eval_dual(&[("x", Dual::variable(0.5))]).unwrap();
        let step = 1e-6;
        let fd = ((-1.0 / (0.5 + step)).exp() - (-1.0 / (0.5 - step)).exp()) / (2.0 * step);
        assert!(close(d.value, (-2.0f64).exp(), 1e-16));
        assert!(close(d.deriv, 4.0 * (-2.0f64).exp(), 1e-15));
        assert!(close(d.deriv, fd, 1e-6));
    }

    #[test]
    fn symbolic_derivative_examples() {
        let e = Expression::parse("t^2*y - y^3/3", &["t", "y"]).unwrap();
        let dy = e.differentiate("y").unwrap();
        let expect = Expression::parse("t^2 - y^2", &["t", "y"]).unwrap();
        for &(t, y) in &[(0.3, -1.2), (1.0, 1.0), (-2.0, 0.5)] {
            let b = [("t", t), ("y", y)];
            assert!(close(dy.eval(&b).unwrap(), expect.eval(&b).unwrap(), 1e-14));
        }

        let f = Expression::parse("t^2 + (3/2)*t^2*x^2", &["t", "x"]).unwrap();
        let ft = f.differentiate("t").unwrap();
        let expect = Expression::parse("2*t + 3*x^2*t", &["t", "x"]).unwrap();
        for &(t, x) in &[(0.7, -0.4), (1.5, 2.0)] {
            let b = [("t", t), ("x", x)];
            assert!(close(ft.eval(&b).unwrap(), expect.eval(&b).unwrap(), 1e-13));
            let d = f
                .eval_dual(&[("t", Dual::variable(t)), ("x", Dual::new(x, 0.0))])
                .unwrap();
            assert!(close(ft.eval(&b).unwrap(), d.deriv, 1e-13));
        }

        let phi = Expression::parse("phi(x)", &["x"]).unwrap();
        let dphi = phi.differentiate("x").unwrap();
        for x in [-1.0, -1e-9, 0.0] {
            assert_eq!(dphi.eval(&[("x", x)]).unwrap(), 0.0);
        }
    }

    #[test]
    fn printing_round_trips() {
        let src = "-x^2 * sin(y) / (1 + phi''(x)) - ln(2.5e-3 + y^2)^-1.5";
        let e = Expression::parse(src, &["x", "y"]).unwrap();
        let back = Expression::parse(&e.to_string(), &["x", "y"]).unwrap();
        assert_eq!(e, back);
    }

    #[test]
    fn with_vars_reorders_and_checks() {
        let e = Expression::parse("x - t", &["t", "x"]).unwrap();
        let r = e.with_vars(&["x", "y", "t"]).unwrap();
        assert_eq!(r.eval_at(&[5.0, 0.0, 2.0]).unwrap(), 3.0);
        assert!(e.with_vars(&["x"]).is_err());
    }

    #[test]
    fn combining_unions_variables() {
        let a = Expression::parse("x", &["x"]).unwrap();
        let b = Expression::parse("y*2", &["y"]).unwrap();
        let c = a - b;
        assert_eq!(c.vars(), &["x".to_string(), "y".to_string()]);
        assert_eq!(c.eval(&[("x", 1.0), ("y", 3.0)]).unwrap(), -5.0);
    }
}

//! Symbolic differentiation with light constant folding (no simplifier).

use super::{Func, Node};

fn is_const(n: &Node, v: f64) -> bool {
    matches!(n, Node::Const(c) if *c == v)
}

fn neg(a: Node) -> Node {
    match a {
        Node::Const(c) => Node::Const(-c),
        Node::Neg(inner) => *inner,
        a => Node::Neg(Box::new(a)),
    }
}

fn add(a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(x), Node::Const(y)) => Node::Const(x + y),
        (a, b) if is_const(&a, 0.0) => b,
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) => Node::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(x), Node::Const(y)) => Node::Const(x - y),
        (a, b) if is_const(&b, 0.0) => a,
        (a, b) if is_const(&a, 0.0) => neg(b),
        (a, b) => Node::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(x), Node::Const(y)) => Node::Const(x * y),
        (a, b) if is_const(&a, 0.0) || is_const(&b, 0.0) => Node::Const(0.0),
        (a, b) if is_const(&a, 1.0) => b,
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) => Node::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Node, b: Node) -> Node {
    match (a, b) {
        (a, _) if is_const(&a, 0.0) => Node::Const(0.0),
        (a, b) if is_const(&b, 1.0) => a,
        (a, b) => Node::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Node, c: f64) -> Node {
    if c == 1.0 {
        a
    } else if c == 0.0 {
        Node::Const(1.0)
    } else {
        Node::Pow(Box::new(a), c)
    }
}

pub(super) fn derivative(node: &Node, var: usize) -> Node {
    let d = |n: &Node| derivative(n, var);
    match node {
        Node::Const(_) => Node::Const(0.0),
        Node::Var(i) => Node::Const(if *i == var { 1.0 } else { 0.0 }),
        Node::Neg(a) => neg(d(a)),
        Node::Add(a, b) => add(d(a), d(b)),
        Node::Sub(a, b) => sub(d(a), d(b)),
        Node::Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
        Node::Div(a, b) => {
            let da = d(a);
            let db = d(b);
            if is_const(&db, 0.0) {
                div(da, (**b).clone())
            } else {
                div(
                    sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    pow((**b).clone(), 2.0),
                )
            }
        }
        Node::Pow(a, c) => mul(mul(Node::Const(*c), pow((**a).clone(), c - 1.0)), d(a)),
        Node::Call(f, a) => {
            let inner = d(a);
            if is_const(&inner, 0.0) {
                return Node::Const(0.0);
            }
            let arg = || Box::new((**a).clone());
            let outer = match f {
                Func::Exp => Node::Call(Func::Exp, arg()),
                Func::Ln => return div(inner, (**a).clone()),
                Func::Sin => Node::Call(Func::Cos, arg()),
                Func::Cos => neg(Node::Call(Func::Sin, arg())),
                Func::Phi(k) => Node::Call(Func::Phi(k + 1), arg()),
            };
            mul(outer, inner)
        }
    }
}

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use super::jet::{Jet3, Scalar};
use super::parser::{self, ParseError};

/// Elementary functions accepted by the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Exp,
    Tanh,
    Sqrt,
    Log,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Atan,
        Func::Exp,
        Func::Tanh,
        Func::Sqrt,
        Func::Log,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Exp => "exp",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Expression tree node over a single free variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    pub fn constant(c: f64) -> Node {
        Node::Const(c)
    }

    pub fn var() -> Node {
        Node::Var
    }

    pub fn call(self, f: Func) -> Node {
        Node::Call(f, Box::new(self))
    }

    pub fn sin(self) -> Node {
        self.call(Func::Sin)
    }
    pub fn cos(self) -> Node {
        self.call(Func::Cos)
    }
    pub fn tan(self) -> Node {
        self.call(Func::Tan)
    }
    pub fn atan(self) -> Node {
        self.call(Func::Atan)
    }
    pub fn exp(self) -> Node {
        self.call(Func::Exp)
    }
    pub fn tanh(self) -> Node {
        self.call(Func::Tanh)
    }
    pub fn sqrt(self) -> Node {
        self.call(Func::Sqrt)
    }
    pub fn log(self) -> Node {
        self.call(Func::Log)
    }

    pub fn pow(self, exponent: Node) -> Node {
        Node::Binary(BinOp::Pow, Box::new(self), Box::new(exponent))
    }

    /// True when the subtree does not reference the variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Node::Const(_) => true,
            Node::Var => false,
            Node::Neg(a) | Node::Call(_, a) => a.is_constant(),
            Node::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Node::Const(_) | Node::Var => 1,
            Node::Neg(a) | Node::Call(_, a) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Renders the subtree with the given variable name. The output parses
    /// back to an equivalent tree.
    pub fn render(&self, var: &str) -> String {
        let mut s = String::new();
        self.write_to(&mut s, var);
        s
    }

    fn write_to(&self, out: &mut String, var: &str) {
        match self {
            Node::Const(c) => {
                if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) {
                    out.push_str(&format!("({c:?})"));
                } else {
                    out.push_str(&format!("{c:?}"));
                }
            }
            Node::Var => out.push_str(var),
            Node::Neg(a) => {
                out.push_str("(-");
                a.write_to(out, var);
                out.push(')');
            }
            Node::Binary(op, a, b) => {
                out.push('(');
                a.write_to(out, var);
                out.push_str(op.symbol());
                b.write_to(out, var);
                out.push(')');
            }
            Node::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write_to(out, var);
                out.push(')');
            }
        }
    }

    pub(crate) fn eval<T: Scalar>(&self, x: T, var: &str) -> Result<T, EvalError> {
        match self {
            Node::Const(c) => Ok(T::from_f64(*c)),
            Node::Var => Ok(x),
            Node::Neg(a) => Ok(-a.eval(x, var)?),
            Node::Binary(op, a, b) => {
                let lhs = a.eval(x, var)?;
                match op {
                    BinOp::Add => Ok(lhs + b.eval(x, var)?),
                    BinOp::Sub => Ok(lhs - b.eval(x, var)?),
                    BinOp::Mul => Ok(lhs * b.eval(x, var)?),
                    BinOp::Div => {
                        let rhs = b.eval(x, var)?;
                        if rhs.value() == 0.0 {
                            return Err(self.domain_error("division by zero", rhs.value(), var));
                        }
                        Ok(lhs / rhs)
                    }
                    BinOp::Pow => self.eval_pow(lhs, b, x, var),
                }
            }
            Node::Call(f, a) => {
                let arg = a.eval(x, var)?;
                let v = arg.value();
                Ok(match f {
                    Func::Sin => arg.sin(),
                    Func::Cos => arg.cos(),
                    Func::Tan => arg.tan(),
                    Func::Atan => arg.atan(),
                    Func::Exp => arg.exp(),
                    Func::Tanh => arg.tanh(),
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(self.domain_error("sqrt of a negative number", v, var));
                        }
                        arg.sqrt()
                    }
                    Func::Log => {
                        if v <= 0.0 {
                            return Err(self.domain_error("log of a non-positive number", v, var));
                        }
                        arg.ln()
                    }
                })
            }
        }
    }

    fn eval_pow<T: Scalar>(
        &self,
        base: T,
        exponent: &Node,
        x: T,
        var: &str,
    ) -> Result<T, EvalError> {
        let b = base.value();
        if exponent.is_constant() {
            let p = exponent.eval(0.0_f64, var)?;
            if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                if p < 0.0 && b == 0.0 {
                    return Err(self.domain_error("zero raised to a negative power", b, var));
                }
                return Ok(base.powi(p as i32));
            }
            if b <= 0.0 {
                return Err(self.domain_error("non-integer power of a non-positive base", b, var));
            }
            return Ok(base.powf(p));
        }
        // Variable exponent: b^e = exp(e ln b).
        if b <= 0.0 {
            return Err(self.domain_error("variable power of a non-positive base", b, var));
        }
        let e = exponent.eval(x, var)?;
        Ok((e * base.ln()).exp())
    }

    fn domain_error(&self, reason: &'static str, value: f64, var: &str) -> EvalError {
        EvalError::Domain {
            reason,
            value,
            node: self.render(var),
        }
    }
}

impl Add for Node {
    type Output = Node;
    fn add(self, o: Node) -> Node {
        Node::Binary(BinOp::Add, Box::new(self), Box::new(o))
    }
}

impl Sub for Node {
    type Output = Node;
    fn sub(self, o: Node) -> Node {
        Node::Binary(BinOp::Sub, Box::new(self), Box::new(o))
    }
}

impl Mul for Node {
    type Output = Node;
    fn mul(self, o: Node) -> Node {
        Node::Binary(BinOp::Mul, Box::new(self), Box::new(o))
    }
}

impl Div for Node {
    type Output = Node;
    fn div(self, o: Node) -> Node {
        Node::Binary(BinOp::Div, Box::new(self), Box::new(o))
    }
}

impl Neg for Node {
    type Output = Node;
    fn neg(self) -> Node {
        Node::Neg(Box::new(self))
    }
}

impl From<f64> for Node {
    fn from(c: f64) -> Node {
        Node::Const(c)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in `{node}`: {reason} (value {value})")]
    Domain {
        reason: &'static str,
        value: f64,
        node: String,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchwarzianError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("first derivative {derivative:e} at t = {t} is below the floor {floor:e}")]
    ZeroFirstDerivative { t: f64, derivative: f64, floor: f64 },
}

/// Default floor on |θ̇| before dividing by it in the Schwarzian.
pub const DEFAULT_DERIVATIVE_FLOOR: f64 = 1e-12;

/// A parsed (or programmatically built) function of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseExpr {
    root: Node,
    variable: String,
    source: Option<String>,
}

impl PhaseExpr {
    pub fn parse(text: &str, variable: &str) -> Result<Self, ParseError> {
        let root = parser::parse(text, variable)?;
        Ok(Self {
            root,
            variable: variable.to_string(),
            source: Some(text.to_string()),
        })
    }

    pub fn from_node(root: Node, variable: &str) -> Self {
        Self {
            root,
            variable: variable.to_string(),
            source: None,
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    /// Text form: the original source when parsed, otherwise a rendering
    /// of the tree that parses back to the same function.
    pub fn to_text(&self) -> String {
        match &self.source {
            Some(s) => s.clone(),
            None => self.root.render(&self.variable),
        }
    }

    pub fn eval_scalar<T: Scalar>(&self, x: T) -> Result<T, EvalError> {
        self.root.eval(x, &self.variable)
    }

    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        self.eval_scalar(t)
    }

    pub fn eval_jet(&self, t: f64) -> Result<Jet3, EvalError> {
        self.eval_scalar(Jet3::variable(t))
    }

    pub fn schwarzian(&self, t: f64) -> Result<f64, SchwarzianError> {
        self.schwarzian_with_floor(t, DEFAULT_DERIVATIVE_FLOOR)
    }

    pub fn schwarzian_with_floor(&self, t: f64, floor: f64) -> Result<f64, SchwarzianError> {
        let j = self.eval_jet(t)?;
        if j.v1.abs() < floor {
            return Err(SchwarzianError::ZeroFirstDerivative {
                t,
                derivative: j.v1,
                floor,
            });
        }
        Ok(schwarzian_of_jet(&j))
    }
}

impl fmt::Display for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// {θ; t} = θ⃛/θ̇ − (3/2)(θ̈/θ̇)², with no floor check.
#[inline]
pub fn schwarzian_of_jet(j: &Jet3) -> f64 {
    let r = j.v2 / j.v1;
    j.v3 / j.v1 - 1.5 * r * r
}

pub fn parse(text: &str, variable: &str) -> Result<PhaseExpr, ParseError> {
    PhaseExpr::parse(text, variable)
}

pub fn eval_jet(expr: &PhaseExpr, t: f64) -> Result<Jet3, EvalError> {
    expr.eval_jet(t)
}

pub fn schwarzian(expr: &PhaseExpr, t: f64) -> Result<f64, SchwarzianError> {
    expr.schwarzian(t)
}

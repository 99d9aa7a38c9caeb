//! User-supplied scalar expressions: parsing, printing and evaluation over
//! plain or automatically differentiated scalars.

mod ast;
mod parser;
mod scalar;

use std::collections::BTreeMap;

use thiserror::Error;

pub use ast::{BinaryOp, Expr, UnaryOp};
pub use parser::parse;
pub use scalar::{Dual, HyperDual, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function '{name}' at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unbound variable '{0}'")]
    UnboundVariable(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Variable bindings for one evaluation. All values share `dim` active
/// coordinates.
#[derive(Debug, Clone)]
pub struct Bindings<S> {
    dim: usize,
    values: BTreeMap<String, S>,
}

impl<S: Scalar> Bindings<S> {
    pub fn new(dim: usize) -> Self {
        Bindings {
            dim,
            values: BTreeMap::new(),
        }
    }

    pub fn bind(&mut self, name: impl Into<String>, value: S) -> &mut Self {
        debug_assert!(value.dim() == self.dim || value.dim() == 0);
        self.values.insert(name.into(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&S> {
        self.values.get(name)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl Bindings<f64> {
    pub fn plain(names: &[String], point: &[f64]) -> Self {
        let mut b = Bindings::new(0);
        for (name, &v) in names.iter().zip(point) {
            b.bind(name.clone(), v);
        }
        b
    }
}

impl Bindings<HyperDual> {
    /// Seeds every name as an active coordinate, in order.
    pub fn seeded(names: &[String], point: &[f64]) -> Self {
        let d = names.len();
        let mut b = Bindings::new(d);
        for (k, (name, &v)) in names.iter().zip(point).enumerate() {
            b.bind(name.clone(), HyperDual::variable(v, k, d));
        }
        b
    }
}

impl Bindings<Dual<HyperDual>> {
    /// Seeds both derivative layers on the same coordinates, so evaluation
    /// yields derivatives up to third order.
    pub fn seeded_third_order(names: &[String], point: &[f64]) -> Self {
        let d = names.len();
        let mut b = Bindings::new(d);
        for (k, (name, &v)) in names.iter().zip(point).enumerate() {
            let mut eps = vec![HyperDual::constant(0.0, d); d];
            eps[k] = HyperDual::constant(1.0, d);
            b.bind(name.clone(), Dual::new(HyperDual::variable(v, k, d), eps));
        }
        b
    }
}

impl Expr {
    /// Evaluates the tree. Domain violations (log or sqrt of a negative,
    /// division by zero, non-integer power of a non-positive base) are errors.
    pub fn eval<S: Scalar>(&self, env: &Bindings<S>) -> Result<S, ExprError> {
        let dim = env.dim();
        match self {
            Expr::Const(v) => Ok(S::constant(*v, dim)),
            Expr::Var(name) => env
                .get(name)
                .cloned()
                .ok_or_else(|| ExprError::UnboundVariable(name.clone())),
            Expr::Unary(op, arg) => {
                let a = arg.eval(env)?;
                let x = a.value();
                Ok(match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Tan => a.tan(),
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Log => {
                        if !(x > 0.0) {
                            return Err(ExprError::Domain(format!("log of non-positive value {x}")));
                        }
                        a.ln()
                    }
                    UnaryOp::Sinh => a.sinh(),
                    UnaryOp::Cosh => a.cosh(),
                    UnaryOp::Tanh => a.tanh(),
                    UnaryOp::Sqrt => {
                        if x < 0.0 {
                            return Err(ExprError::Domain(format!("sqrt of negative value {x}")));
                        }
                        a.sqrt()
                    }
                })
            }
            Expr::Binary(op, lhs, rhs) => {
                if *op == BinaryOp::Pow {
                    return self.eval_pow(lhs, rhs, env);
                }
                let a = lhs.eval(env)?;
                let b = rhs.eval(env)?;
                Ok(match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b.value() == 0.0 {
                            return Err(ExprError::Domain("division by zero".into()));
                        }
                        a / b
                    }
                    BinaryOp::Pow => unreachable!(),
                })
            }
        }
    }

    fn eval_pow<S: Scalar>(&self, base: &Expr, exponent: &Expr, env: &Bindings<S>) -> Result<S, ExprError> {
        let a = base.eval(env)?;
        let x = a.value();
        if exponent.is_constant() {
            let p = exponent.eval(&Bindings::<f64>::new(0))?;
            if p.fract() == 0.0 && p.abs() <= f64::from(i32::MAX) {
                if p < 0.0 && x == 0.0 {
                    return Err(ExprError::Domain("negative power of zero".into()));
                }
                return Ok(a.powi(p as i32));
            }
            if !(x > 0.0) {
                return Err(ExprError::Domain(format!(
                    "non-integer power {p} of non-positive base {x}"
                )));
            }
            return Ok((a.ln().scale(p)).exp());
        }
        if !(x > 0.0) {
            return Err(ExprError::Domain(format!(
                "variable power of non-positive base {x}"
            )));
        }
        let b = exponent.eval(env)?;
        Ok((b * a.ln()).exp())
    }

    /// Plain evaluation at a point given coordinate names and values.
    pub fn eval_at(&self, names: &[String], point: &[f64]) -> Result<f64, ExprError> {
        self.eval(&Bindings::plain(names, point))
    }
}

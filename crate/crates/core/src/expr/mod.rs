//! Arithmetic expression trees over chart coordinates.
//!
//! Expressions are parsed from a small DSL (see [`parse`]) and evaluated
//! either on plain `f64` values or on [`Jet`]s, which yields all partial
//! derivatives up to the jet order in one pass.

mod jet;
mod parser;

use std::fmt;

pub use jet::{Jet, DIVISION_FLOOR, MAX_ORDER, MAX_VARS};
pub use parser::parse;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Parsed expression. Variables refer to positions in the chart's
/// coordinate list.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var {
        index: usize,
        name: String,
    },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a real constant exponent.
    Pow(Box<Expr>, f64),
    Func(Func, Box<Expr>),
}

impl Expr {
    /// The value of the expression if it references no variables.
    pub fn constant_value(&self) -> Option<f64> {
        if self.has_variables() {
            None
        } else {
            self.eval(&[]).ok()
        }
    }

    pub fn has_variables(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var { .. } => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.has_variables(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.has_variables() || b.has_variables(),
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_variable(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var { index, .. } => Some(*index),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.max_variable(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.max_variable().max(b.max_variable()),
        }
    }

    /// Plain floating-point evaluation.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var { index, name } => *point.get(*index).ok_or_else(|| Error::UndeclaredVariable(name.clone()))?,
            Expr::Neg(a) => -a.eval(point)?,
            Expr::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Expr::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Expr::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Expr::Div(a, b) => {
                let den = b.eval(point)?;
                if !(den.abs() >= DIVISION_FLOOR) {
                    return Err(Error::Domain { node: self.to_string(), detail: format!("divisor {den:e}") });
                }
                a.eval(point)? / den
            }
            Expr::Pow(a, e) => {
                let base = a.eval(point)?;
                if e.fract() == 0.0 && e.abs() <= 64.0 {
                    if *e < 0.0 && !(base.abs() >= DIVISION_FLOOR) {
                        return Err(Error::Domain { node: self.to_string(), detail: format!("zero base {base}") });
                    }
                    base.powi(*e as i32)
                } else {
                    if base < 0.0 || (base == 0.0 && *e < 0.0) || base.is_nan() {
                        return Err(Error::Domain { node: self.to_string(), detail: format!("fractional power of {base}") });
                    }
                    base.powf(*e)
                }
            }
            Expr::Func(f, a) => {
                let v = a.eval(point)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log => {
                        if !(v > 0.0) {
                            return Err(Error::Domain { node: self.to_string(), detail: format!("log of {v}") });
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if !(v >= 0.0) {
                            return Err(Error::Domain { node: self.to_string(), detail: format!("sqrt of {v}") });
                        }
                        v.sqrt()
                    }
                }
            }
        })
    }

    /// Evaluates the expression with each variable bound to a jet. The jets
    /// may be seeded coordinates or arbitrary inner functions, which makes
    /// this a composition.
    pub fn eval_jets(&self, vars: &[Jet]) -> Result<Jet> {
        let template = vars.first().ok_or_else(|| Error::Invalid("no variable jets supplied".into()))?;
        self.eval_jets_with(vars, template)
    }

    fn eval_jets_with(&self, vars: &[Jet], template: &Jet) -> Result<Jet> {
        let located = |r: Result<Jet>| {
            r.map_err(|e| match e {
                Error::Domain { detail, .. } => Error::Domain { node: self.to_string(), detail },
                other => other,
            })
        };
        Ok(match self {
            Expr::Const(c) => template.constant_like(*c),
            Expr::Var { index, name } => vars.get(*index).cloned().ok_or_else(|| Error::UndeclaredVariable(name.clone()))?,
            Expr::Neg(a) => -a.eval_jets_with(vars, template)?,
            Expr::Add(a, b) => a.eval_jets_with(vars, template)? + b.eval_jets_with(vars, template)?,
            Expr::Sub(a, b) => a.eval_jets_with(vars, template)? - b.eval_jets_with(vars, template)?,
            Expr::Mul(a, b) => {
                let (x, y) = (a.eval_jets_with(vars, template)?, b.eval_jets_with(vars, template)?);
                &x * &y
            }
            Expr::Div(a, b) => {
                let den = located(b.eval_jets_with(vars, template)?.recip())?;
                a.eval_jets_with(vars, template)? * den
            }
            Expr::Pow(a, e) => located(a.eval_jets_with(vars, template)?.powf(*e))?,
            Expr::Func(f, a) => {
                let v = a.eval_jets_with(vars, template)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log => located(v.ln())?,
                    Func::Sqrt => located(v.sqrt())?,
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var { .. } | Expr::Func(..) => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, child: &Expr, min: u8) -> fmt::Result {
        if child.precedence() < min {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

/// Taylor jet of `expr` around `base`, truncated at `order`.
pub fn eval_jet(expr: &Expr, base: &[f64], order: usize) -> Result<Jet> {
    if base.is_empty() {
        return Ok(Jet::constant(expr.eval(&[])?, 0, order));
    }
    expr.eval_jets(&Jet::seed(base, order))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var { name, .. } => write!(f, "{name}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                self.fmt_child(f, a, 3)
            }
            Expr::Add(a, b) => {
                self.fmt_child(f, a, 1)?;
                write!(f, " + ")?;
                self.fmt_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                self.fmt_child(f, a, 1)?;
                write!(f, " - ")?;
                self.fmt_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                self.fmt_child(f, a, 2)?;
                write!(f, "*")?;
                self.fmt_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                // `x^2/3` would re-parse with a fractional exponent
                let min = if matches!(**a, Expr::Pow(..)) { 5 } else { 2 };
                self.fmt_child(f, a, min)?;
                write!(f, "/")?;
                self.fmt_child(f, b, 3)
            }
            Expr::Pow(a, e) => {
                self.fmt_child(f, a, 5)?;
                write!(f, "^{e}")
            }
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

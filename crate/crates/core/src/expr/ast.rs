use std::fmt;

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Built-in functions of one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Floor,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "floor" => Func::Floor,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Floor => "floor",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Abs => x.abs(),
            Func::Floor => x.floor(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

/// Expression tree over the single variable `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var,
    Const(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Number(v) => *v,
            Expr::Var => t,
            Expr::Const(c) => c.value(),
            Expr::Neg(inner) => -inner.eval(t)?,
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval(t)?;
                let b = rhs.eval(t)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero { t });
                        }
                        a / b
                    }
                }
            }
            Expr::Call(f, arg) => f.apply(arg.eval(t)?),
        })
    }

    /// True when the tree never reads `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Var => false,
            Expr::Number(_) | Expr::Const(_) => true,
            Expr::Neg(inner) | Expr::Call(_, inner) => inner.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Coefficients `(slope, intercept)` when the expression is affine in `t`
    /// by construction (no `t` under a function call or in a divisor).
    pub fn affine_form(&self) -> Option<(f64, f64)> {
        match self {
            Expr::Var => Some((1.0, 0.0)),
            _ if self.is_constant() => self.eval(0.0).ok().map(|c| (0.0, c)),
            Expr::Neg(inner) => inner.affine_form().map(|(a, b)| (-a, -b)),
            Expr::Binary(op, lhs, rhs) => {
                let (a1, b1) = lhs.affine_form()?;
                let (a2, b2) = rhs.affine_form()?;
                match op {
                    BinOp::Add => Some((a1 + a2, b1 + b2)),
                    BinOp::Sub => Some((a1 - a2, b1 - b2)),
                    BinOp::Mul if a1 == 0.0 => Some((b1 * a2, b1 * b2)),
                    BinOp::Mul if a2 == 0.0 => Some((a1 * b2, b1 * b2)),
                    BinOp::Div if a2 == 0.0 && b2 != 0.0 => Some((a1 / b2, b1 / b2)),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

/// Fully parenthesised output, so that printing and re-parsing reproduces
/// the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    // literals are non-negative; a negative number only comes from
                    // a hand-built tree
                    write!(f, "(-{:?})", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::Var => f.write_str("t"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(inner) => write!(f, "(-{inner})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

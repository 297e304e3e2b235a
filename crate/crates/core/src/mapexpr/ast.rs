use std::collections::BTreeSet;
use std::fmt;

use crate::numerics::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    SinPi,
    Sin,
    Cos,
    Gamma,
    Floor,
    Abs,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::SinPi, Func::Sin, Func::Cos, Func::Gamma, Func::Floor, Func::Abs];

    pub fn name(self) -> &'static str {
        match self {
            Func::SinPi => "sinpi",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Gamma => "gamma",
            Func::Floor => "floor",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// The iteration variable `x`.
    Var,
    /// Non-negative decimal literal.
    Num(Real),
    Param(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power with a literal exponent.
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
    Cond(Box<Pred>, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Pred {
    IsInt(Expr),
    Lt(Expr, Expr),
    Eq(Expr, Expr),
}

impl Expr {
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var | Expr::Num(_) => {}
            Expr::Param(name) => {
                out.insert(name.clone());
            }
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.collect_params(out),
            Expr::Bin(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Expr::Cond(p, t, e) => {
                match &**p {
                    Pred::IsInt(a) => a.collect_params(out),
                    Pred::Lt(a, b) | Pred::Eq(a, b) => {
                        a.collect_params(out);
                        b.collect_params(out);
                    }
                }
                t.collect_params(out);
                e.collect_params(out);
            }
        }
    }

    /// Binding strength used by the printer: 0 conditional, 1 sum, 2 product,
    /// 3 unary minus, 4 power, 5 atom.
    fn level(&self) -> u8 {
        match self {
            Expr::Cond(..) => 0,
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Var | Expr::Num(_) | Expr::Param(_) | Expr::Call(..) => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Var => f.write_str("x"),
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Param(name) => f.write_str(name),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write_at(f, 3)
            }
            Expr::Bin(op, a, b) => {
                let (sym, lhs, rhs) = match op {
                    BinOp::Add => (" + ", 1, 2),
                    BinOp::Sub => (" - ", 1, 2),
                    BinOp::Mul => (" * ", 2, 3),
                    BinOp::Div => (" / ", 2, 3),
                };
                a.write_at(f, lhs)?;
                f.write_str(sym)?;
                b.write_at(f, rhs)
            }
            Expr::Pow(e, n) => {
                e.write_at(f, 5)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, e) => {
                write!(f, "{}(", func.name())?;
                e.write_at(f, 0)?;
                f.write_str(")")
            }
            Expr::Cond(p, t, e) => {
                match &**p {
                    Pred::IsInt(a) => {
                        f.write_str("isint(")?;
                        a.write_at(f, 0)?;
                        f.write_str(")")?;
                    }
                    Pred::Lt(a, b) | Pred::Eq(a, b) => {
                        a.write_at(f, 1)?;
                        f.write_str(if matches!(**p, Pred::Lt(..)) { " < " } else { " = " })?;
                        b.write_at(f, 1)?;
                    }
                }
                f.write_str(" ? ")?;
                t.write_at(f, 0)?;
                f.write_str(" : ")?;
                e.write_at(f, 0)
            }
        }
    }
}

/// Canonical text form; parsing it yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

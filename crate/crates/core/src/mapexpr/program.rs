use std::collections::BTreeMap;

use crate::numerics::{cos_r, gamma, sin_pi, sin_r, NumericError, Precision, Real};

use super::ast::{BinOp, Expr, Func, Pred};
use super::{EvalError, MapError};

#[derive(Clone, Debug, PartialEq)]
pub enum Instr {
    LoadX,
    LoadConst(usize),
    LoadParam(usize),
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Powi(i32),
    Call(Func),
    /// Pops one value; sets the flag when it is an integer at the output precision.
    IsInt,
    Lt,
    Eq,
    JumpIfNot(usize),
    Jump(usize),
}

/// Linear stack-machine form of an expression.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalProgram {
    pub code: Vec<Instr>,
    pub consts: Vec<Real>,
    pub params: Vec<String>,
}

pub fn compile(expr: &Expr) -> EvalProgram {
    let params: Vec<String> = expr.params().into_iter().collect();
    let mut prog = EvalProgram { code: Vec::new(), consts: Vec::new(), params };
    emit(expr, &mut prog);
    prog
}

fn emit(expr: &Expr, prog: &mut EvalProgram) {
    match expr {
        Expr::Var => prog.code.push(Instr::LoadX),
        Expr::Num(v) => {
            prog.consts.push(v.clone());
            prog.code.push(Instr::LoadConst(prog.consts.len() - 1));
        }
        Expr::Param(name) => {
            let idx = prog.params.iter().position(|p| p == name).expect("params collected from the tree");
            prog.code.push(Instr::LoadParam(idx));
        }
        Expr::Neg(e) => {
            emit(e, prog);
            prog.code.push(Instr::Neg);
        }
        Expr::Bin(op, a, b) => {
            emit(a, prog);
            emit(b, prog);
            prog.code.push(match op {
                BinOp::Add => Instr::Add,
                BinOp::Sub => Instr::Sub,
                BinOp::Mul => Instr::Mul,
                BinOp::Div => Instr::Div,
            });
        }
        Expr::Pow(e, n) => {
            emit(e, prog);
            prog.code.push(Instr::Powi(*n));
        }
        Expr::Call(f, e) => {
            emit(e, prog);
            prog.code.push(Instr::Call(*f));
        }
        Expr::Cond(p, t, e) => {
            match &**p {
                Pred::IsInt(a) => {
                    emit(a, prog);
                    prog.code.push(Instr::IsInt);
                }
                Pred::Lt(a, b) => {
                    emit(a, prog);
                    emit(b, prog);
                    prog.code.push(Instr::Lt);
                }
                Pred::Eq(a, b) => {
                    emit(a, prog);
                    emit(b, prog);
                    prog.code.push(Instr::Eq);
                }
            }
            let jump_else = prog.code.len();
            prog.code.push(Instr::JumpIfNot(0));
            emit(t, prog);
            let jump_end = prog.code.len();
            prog.code.push(Instr::Jump(0));
            let else_at = prog.code.len();
            emit(e, prog);
            let end = prog.code.len();
            prog.code[jump_else] = Instr::JumpIfNot(else_at);
            prog.code[jump_end] = Instr::Jump(end);
        }
    }
}

/// Numeric context shared by both evaluators: `digits` is the output precision
/// D (used by `isint`), `work` the precision every operation runs at.
#[derive(Clone, Copy, Debug)]
pub struct EvalContext {
    pub digits: Precision,
    pub work: Precision,
}

impl EvalContext {
    pub fn new(digits: Precision) -> Self {
        EvalContext { digits, work: digits.guarded() }
    }
}

fn checked(v: Real) -> Result<Real, EvalError> {
    if v.in_range() {
        Ok(v)
    } else {
        Err(EvalError::Numeric(NumericError::Overflow))
    }
}

fn apply_func(f: Func, v: &Real) -> Result<Real, EvalError> {
    checked(match f {
        Func::SinPi => sin_pi(v),
        Func::Sin => sin_r(v)?,
        Func::Cos => cos_r(v)?,
        Func::Gamma => gamma(v)?,
        Func::Floor => v.floor(),
        Func::Abs => v.abs(),
    })
}

fn apply_bin(op: BinOp, a: &Real, b: &Real) -> Result<Real, EvalError> {
    checked(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => a.checked_div(b).ok_or(EvalError::Numeric(NumericError::DivisionByZero))?,
    })
}

fn apply_pow(a: &Real, n: i32) -> Result<Real, EvalError> {
    checked(a.powi(n).ok_or(EvalError::Numeric(NumericError::DivisionByZero))?)
}

fn is_int(v: &Real, ctx: &EvalContext) -> bool {
    v.with_precision(ctx.digits).is_integer()
}

/// Tree-walking reference evaluator. It performs the same operations in the
/// same order as [`BoundProgram::eval`].
pub fn eval_ast(
    expr: &Expr,
    x: &Real,
    params: &BTreeMap<String, Real>,
    ctx: &EvalContext,
) -> Result<Real, EvalError> {
    match expr {
        Expr::Var => Ok(x.with_precision(ctx.work)),
        Expr::Num(v) => Ok(v.with_precision(ctx.work)),
        Expr::Param(name) => params
            .get(name)
            .map(|v| v.with_precision(ctx.work))
            .ok_or_else(|| EvalError::Unbound(name.clone())),
        Expr::Neg(e) => Ok(-eval_ast(e, x, params, ctx)?),
        Expr::Bin(op, a, b) => {
            let a = eval_ast(a, x, params, ctx)?;
            let b = eval_ast(b, x, params, ctx)?;
            apply_bin(*op, &a, &b)
        }
        Expr::Pow(e, n) => apply_pow(&eval_ast(e, x, params, ctx)?, *n),
        Expr::Call(f, e) => apply_func(*f, &eval_ast(e, x, params, ctx)?),
        Expr::Cond(p, t, e) => {
            let flag = match &**p {
                Pred::IsInt(a) => is_int(&eval_ast(a, x, params, ctx)?, ctx),
                Pred::Lt(a, b) => eval_ast(a, x, params, ctx)? < eval_ast(b, x, params, ctx)?,
                Pred::Eq(a, b) => eval_ast(a, x, params, ctx)? == eval_ast(b, x, params, ctx)?,
            };
            if flag {
                eval_ast(t, x, params, ctx)
            } else {
                eval_ast(e, x, params, ctx)
            }
        }
    }
}

impl EvalProgram {
    /// Resolves parameters and rounds constants to the working precision.
    pub fn bind(&self, params: &BTreeMap<String, Real>, digits: Precision) -> Result<BoundProgram, MapError> {
        let ctx = EvalContext::new(digits);
        let mut values = Vec::with_capacity(self.params.len());
        for name in &self.params {
            let v = params.get(name).ok_or_else(|| MapError::UnboundParameter(name.clone()))?;
            values.push(v.with_precision(ctx.work));
        }
        Ok(BoundProgram {
            code: self.code.clone(),
            consts: self.consts.iter().map(|c| c.with_precision(ctx.work)).collect(),
            params: values,
            ctx,
        })
    }
}

/// A program with every parameter resolved, ready to evaluate.
#[derive(Clone, Debug)]
pub struct BoundProgram {
    code: Vec<Instr>,
    consts: Vec<Real>,
    params: Vec<Real>,
    ctx: EvalContext,
}

impl BoundProgram {
    pub fn context(&self) -> EvalContext {
        self.ctx
    }

    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    pub fn eval(&self, x: &Real) -> Result<Real, EvalError> {
        let mut stack = Vec::with_capacity(8);
        self.eval_with(x, &mut stack)
    }

    /// Evaluates with a caller-provided stack to avoid reallocating per step.
    pub fn eval_with(&self, x: &Real, stack: &mut Vec<Real>) -> Result<Real, EvalError> {
        stack.clear();
        let mut flag = false;
        let mut pc = 0;
        while pc < self.code.len() {
            match &self.code[pc] {
                Instr::LoadX => stack.push(x.with_precision(self.ctx.work)),
                Instr::LoadConst(i) => stack.push(self.consts[*i].clone()),
                Instr::LoadParam(i) => stack.push(self.params[*i].clone()),
                Instr::Neg => {
                    let v = stack.pop().expect("stack underflow");
                    stack.push(-v);
                }
                Instr::Add | Instr::Sub | Instr::Mul | Instr::Div => {
                    let b = stack.pop().expect("stack underflow");
                    let a = stack.pop().expect("stack underflow");
                    let op = match self.code[pc] {
                        Instr::Add => BinOp::Add,
                        Instr::Sub => BinOp::Sub,
                        Instr::Mul => BinOp::Mul,
                        _ => BinOp::Div,
                    };
                    stack.push(apply_bin(op, &a, &b)?);
                }
                Instr::Powi(n) => {
                    let a = stack.pop().expect("stack underflow");
                    stack.push(apply_pow(&a, *n)?);
                }
                Instr::Call(f) => {
                    let a = stack.pop().expect("stack underflow");
                    stack.push(apply_func(*f, &a)?);
                }
                Instr::IsInt => {
                    let a = stack.pop().expect("stack underflow");
                    flag = is_int(&a, &self.ctx);
                }
                Instr::Lt | Instr::Eq => {
                    let b = stack.pop().expect("stack underflow");
                    let a = stack.pop().expect("stack underflow");
                    flag = if self.code[pc] == Instr::Lt { a < b } else { a == b };
                }
                Instr::JumpIfNot(t) => {
                    if !flag {
                        pc = *t;
                        continue;
                    }
                }
                Instr::Jump(t) => {
                    pc = *t;
                    continue;
                }
            }
            pc += 1;
        }
        Ok(stack.pop().expect("program leaves one value"))
    }
}

//! The map-definition language and L-system definitions.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr      = predicate "?" expr ":" expr | sum ;
//! predicate = "isint" "(" expr ")" | sum ( "<" | "=" ) sum ;
//! sum       = term { ( "+" | "-" ) term } ;
//! term      = unary { ( "*" | "/" ) unary } ;
//! unary     = "-" unary | power ;
//! power     = primary [ "^" [ "-" ] integer ] ;
//! primary   = number | "x" | parameter | func "(" expr ")" | "(" expr ")" ;
//! func      = "sinpi" | "sin" | "cos" | "gamma" | "floor" | "abs" ;
//! number    = digits [ "." digits ] [ ( "e" | "E" ) [ "+" | "-" ] digits ] ;
//! parameter = letter { letter | digit | "_" } ;   (any name except x, isint, func)
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

mod ast;
mod lsystem;
mod parser;
mod program;

pub use ast::{BinOp, Expr, Func, Pred};
pub use lsystem::{parse_lsystem, LSystemSpec, Letter};
pub use parser::parse_expr;
pub use program::{compile, eval_ast, BoundProgram, EvalContext, EvalProgram, Instr};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{NumericError, Precision, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("parameter {0} has no value")]
    UnboundParameter(String),
    #[error("letter {0} has no rewriting rule")]
    MissingRule(char),
    #[error("letter {0} is not in the alphabet")]
    UnknownLetter(char),
    #[error("letter {0} has more than one rule")]
    DuplicateRule(char),
    #[error("letter {0} has no function binding")]
    MissingBinding(char),
    #[error("unknown built-in {0}")]
    UnknownBuiltin(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("parameter {0} has no value")]
    Unbound(String),
}

/// A parsed map `x ↦ f(x)` with named parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub name: String,
    pub expr: Expr,
    pub params: Vec<String>,
}

impl MapSpec {
    pub fn parse(name: &str, text: &str) -> Result<MapSpec, MapError> {
        let expr = parse_expr(text)?;
        Ok(MapSpec::from_expr(name, expr))
    }

    pub fn from_expr(name: &str, expr: Expr) -> MapSpec {
        let params = expr.params().into_iter().collect();
        MapSpec { name: name.to_string(), expr, params }
    }

    pub fn compile(&self) -> EvalProgram {
        compile(&self.expr)
    }

    pub fn bind(&self, params: &BTreeMap<String, Real>, digits: Precision) -> Result<BoundProgram, MapError> {
        self.compile().bind(params, digits)
    }

    /// Canonical source text.
    pub fn text(&self) -> String {
        self.expr.to_string()
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

impl Serialize for MapSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("MapSpec", 3)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("expression", &self.text())?;
        st.serialize_field("params", &self.params)?;
        st.end()
    }
}

/// `parse_map` with the default name `map`.
pub fn parse_map(text: &str) -> Result<MapSpec, MapError> {
    MapSpec::parse("map", text)
}

pub const SINE_DRIFT: &str = "0.4*sinpi(x) + x + b";

const L1_RULES: &str = "axiom A; A -> A B; B -> B A";

/// Names accepted by [`builtin_map`].
pub const BUILTIN_MAPS: [&str; 2] = ["sine-drift", "identity"];

/// Names accepted by [`builtin_lsystem`].
pub const BUILTIN_LSYSTEMS: [&str; 2] = ["lfam-gamma-cos", "lfam-gamma-sin"];

pub fn builtin_map(name: &str) -> Result<MapSpec, MapError> {
    let text = match name {
        "sine-drift" => SINE_DRIFT,
        "identity" => "x",
        _ => return Err(MapError::UnknownBuiltin(name.to_string())),
    };
    MapSpec::parse(name, text)
}

/// The Thue–Morse system A → AB, B → BA from axiom A, without bindings.
pub fn l1() -> LSystemSpec {
    parse_lsystem(L1_RULES).expect("built-in system parses")
}

pub fn builtin_lsystem(name: &str) -> Result<LSystemSpec, MapError> {
    let bindings = match name {
        "lfam-gamma-cos" => "A := gamma(x + 1); B := cos(x)",
        "lfam-gamma-sin" => "A := isint(x) ? gamma(x + 0.5) : gamma(x); B := sinpi(x)",
        _ => return Err(MapError::UnknownBuiltin(name.to_string())),
    };
    let mut spec = parse_lsystem(&format!("{L1_RULES}; {bindings}"))?;
    spec.name = name.to_string();
    Ok(spec)
}

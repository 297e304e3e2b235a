use std::collections::BTreeMap;

use crate::mapexpr::{builtin_lsystem, builtin_map, LSystemSpec, MapError, MapSpec};
use crate::numerics::{Precision, Real};

use super::{iterate, literate, EngineError, Orbit, Trajectory, WindowPolicy};

/// Either kind of dynamical rule the engine can run.
#[derive(Clone, Debug)]
pub enum System {
    Map(MapSpec),
    LSystem(LSystemSpec),
}

impl System {
    /// A built-in map or L-system family by name.
    pub fn builtin(name: &str) -> Result<System, MapError> {
        match builtin_map(name) {
            Ok(m) => Ok(System::Map(m)),
            Err(_) => builtin_lsystem(name).map(System::LSystem),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            System::Map(m) => &m.name,
            System::LSystem(l) => &l.name,
        }
    }

    /// Canonical source text.
    pub fn text(&self) -> String {
        match self {
            System::Map(m) => m.text(),
            System::LSystem(l) => l.text(),
        }
    }

    pub fn orbit(&self, a: &Real, params: &BTreeMap<String, Real>, digits: Precision) -> Result<Orbit, EngineError> {
        match self {
            System::Map(m) => Orbit::map(m, a, params, digits),
            System::LSystem(l) => Orbit::lsystem(l, a, params, digits),
        }
    }

    pub fn run(
        &self,
        a: &Real,
        params: &BTreeMap<String, Real>,
        n: u64,
        digits: Precision,
        policy: WindowPolicy,
    ) -> Result<Trajectory, EngineError> {
        match self {
            System::Map(m) => iterate(m, a, params, n, digits, policy),
            System::LSystem(l) => literate(l, a, params, n, digits, policy),
        }
    }
}

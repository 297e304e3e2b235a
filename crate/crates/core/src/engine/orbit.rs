use std::collections::BTreeMap;

use crate::mapexpr::{BoundProgram, EvalError, LSystemSpec, Letter, MapSpec};
use crate::numerics::{Precision, Real};

use super::word::LazyWord;
use super::EngineError;

#[derive(Clone, Debug)]
enum Rule {
    Plain(BoundProgram),
    Lsys { alphabet: Vec<Letter>, programs: Vec<BoundProgram>, word: LazyWord },
}

/// Resumable iteration state: the current index and value at working precision.
#[derive(Clone, Debug)]
pub struct Orbit {
    rule: Rule,
    index: u64,
    value: Real,
    work: Precision,
    stack: Vec<Real>,
}

/// Where an orbit stands; enough to continue it bit-identically.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub index: u64,
    pub value: Real,
}

impl Orbit {
    /// Plain iteration with u(1) = a.
    pub fn map(
        map: &MapSpec,
        a: &Real,
        params: &BTreeMap<String, Real>,
        digits: Precision,
    ) -> Result<Orbit, EngineError> {
        let prog = map.bind(params, digits)?;
        let work = prog.context().work;
        Ok(Orbit { rule: Rule::Plain(prog), index: 1, value: a.with_precision(work), work, stack: Vec::new() })
    }

    /// L-iteration with U(0) = a; step n applies the function of letter n.
    pub fn lsystem(
        spec: &LSystemSpec,
        a: &Real,
        params: &BTreeMap<String, Real>,
        digits: Precision,
    ) -> Result<Orbit, EngineError> {
        spec.require_bindings()?;
        let programs = spec
            .alphabet
            .iter()
            .map(|c| spec.bindings[c].bind(params, digits))
            .collect::<Result<Vec<_>, _>>()?;
        let work = digits.guarded();
        let word = LazyWord::new(spec)?;
        Ok(Orbit {
            rule: Rule::Lsys { alphabet: spec.alphabet.clone(), programs, word },
            index: 0,
            value: a.with_precision(work),
            work,
            stack: Vec::new(),
        })
    }

    /// Continues from a checkpoint taken on an orbit of the same rule.
    pub fn resume(&self, cp: &Checkpoint) -> Orbit {
        let mut out = self.clone();
        let first = self.first_index();
        if let Rule::Lsys { word, .. } = &mut out.rule {
            word.rewind();
            word.skip_letters(cp.index - first);
        }
        out.index = cp.index;
        out.value = cp.value.with_precision(self.work);
        out
    }

    pub fn first_index(&self) -> u64 {
        match self.rule {
            Rule::Plain(_) => 1,
            Rule::Lsys { .. } => 0,
        }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn value(&self) -> &Real {
        &self.value
    }

    pub fn work_precision(&self) -> Precision {
        self.work
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint { index: self.index, value: self.value.clone() }
    }

    pub fn is_lsystem(&self) -> bool {
        matches!(self.rule, Rule::Lsys { .. })
    }

    /// Advances one step. On error the orbit stays at the last good value.
    pub fn step(&mut self) -> Result<&Real, EvalError> {
        let next = match &mut self.rule {
            Rule::Plain(prog) => prog.eval_with(&self.value, &mut self.stack)?,
            Rule::Lsys { alphabet, programs, word } => {
                let c = word.next().expect("infinite word");
                let k = alphabet.iter().position(|a| *a == c).expect("letter in alphabet");
                match programs[k].eval_with(&self.value, &mut self.stack) {
                    Ok(v) => v,
                    Err(e) => {
                        // Put the word back so a retry applies the same letter.
                        word.rewind();
                        word.skip_letters(self.index);
                        return Err(e);
                    }
                }
            }
        };
        self.value = next;
        self.index += 1;
        Ok(&self.value)
    }
}

//! Tautology checking by Boolean abstraction.
//!
//! Variables and maximal boxed subformulas become propositional atoms
//! (structurally equal ones share an atom); the resulting circuit is
//! evaluated on every assignment, 64 assignments per machine word.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{Formula, Kind};

pub const ATOM_BUDGET: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TautError {
    #[error("Boolean abstraction has {0} atoms, budget is {ATOM_BUDGET}")]
    TooManyAtoms(usize),
}

enum Gate {
    False,
    Atom(usize),
    Imp(usize, usize),
}

struct Abstraction {
    gates: Vec<Gate>,
    atoms: HashMap<Formula, usize>,
    by_ptr: HashMap<usize, usize>,
}

impl Abstraction {
    fn gate(&mut self, f: &Formula) -> Result<usize, TautError> {
        if let Some(&g) = self.by_ptr.get(&f.ptr()) {
            return Ok(g);
        }
        let g = match f.kind() {
            Kind::Falsum => Gate::False,
            Kind::Var(_) | Kind::Box(_) => {
                let next = self.atoms.len();
                let id = *self.atoms.entry(f.clone()).or_insert(next);
                if self.atoms.len() > ATOM_BUDGET {
                    return Err(TautError::TooManyAtoms(self.atoms.len()));
                }
                Gate::Atom(id)
            }
            Kind::Implies(a, b) => {
                let a = self.gate(a)?;
                let b = self.gate(b)?;
                Gate::Imp(a, b)
            }
        };
        self.gates.push(g);
        let id = self.gates.len() - 1;
        self.by_ptr.insert(f.ptr(), id);
        Ok(id)
    }
}

/// Number of distinct atoms in the Boolean abstraction of `f`, capped one
/// past the budget.
pub fn abstraction_atoms(f: &Formula) -> usize {
    let mut abs = Abstraction {
        gates: Vec::new(),
        atoms: HashMap::new(),
        by_ptr: HashMap::new(),
    };
    match abs.gate(f) {
        Ok(_) => abs.atoms.len(),
        Err(TautError::TooManyAtoms(k)) => k,
    }
}

const PATTERNS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

/// Whether the Boolean abstraction of `f` is a classical tautology.
pub fn taut_check(f: &Formula) -> Result<bool, TautError> {
    let mut abs = Abstraction {
        gates: Vec::new(),
        atoms: HashMap::new(),
        by_ptr: HashMap::new(),
    };
    let root = abs.gate(f)?;
    let k = abs.atoms.len();
    let words: usize = if k <= 6 { 1 } else { 1 << (k - 6) };
    let valid_mask: u64 = if k >= 6 { u64::MAX } else { (1u64 << (1u32 << k)) - 1 };
    let mut vals = vec![0u64; abs.gates.len()];
    for w in 0..words {
        for (i, g) in abs.gates.iter().enumerate() {
            vals[i] = match *g {
                Gate::False => 0,
                Gate::Atom(a) if a < 6 => PATTERNS[a],
                Gate::Atom(a) => {
                    if (w >> (a - 6)) & 1 == 1 {
                        u64::MAX
                    } else {
                        0
                    }
                }
                Gate::Imp(a, b) => !vals[a] | vals[b],
            };
        }
        if vals[root] & valid_mask != valid_mask {
            return Ok(false);
        }
    }
    Ok(true)
}

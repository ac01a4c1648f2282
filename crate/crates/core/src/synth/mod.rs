//! Fixed-point construction.
//!
//! For a boxed `□A(p)` the main loop builds `B₀ = □A` and, for `k < n−1`,
//! `B_k′ = zero_instance(B_k)` and `B_{k+1}` = element `k+1` of the
//! `(n−k−1)`-shifting sequence of `B_k′`. Each stage satisfies
//! `dep_mod(B_k) ⊆ {0, …, n−k−1}`, so `B_{n−1}` has `p` only at residue 0
//! and `B_{n−1}(⊤)` is a fixed point. Arbitrary modalized formulas reduce to
//! boxed systems (see [`decompose`] and [`simultaneous_fixed_points`]).

mod system;
mod trace;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::depth::dep_mod;
use crate::formula::{iterate, replace_by_residue, substitute, Formula, LogicIndex};
use crate::proof::{CheckError, Certificate, DeriveError, Prover, Thm};

pub use system::{
    decompose, derive_fixed_point_cert, fixed_point, fixed_point_with, simultaneous_fixed_points,
    simultaneous_fixed_points_certified, Decomposition,
};
pub use trace::{SynthTrace, TraceFormatError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("expected a formula of shape box A, got {0}")]
    NotBoxed(String),
    #[error("formula is not modalized in {0}")]
    NotModalized(String),
    #[error("system has {equations} equations but {vars} variables")]
    Arity { equations: usize, vars: usize },
    #[error("system variable {0} is listed twice")]
    DuplicateVar(String),
    #[error("loop invariant violated at stage {stage}: residues {residues:?}")]
    Invariant { stage: usize, residues: BTreeSet<usize> },
    #[error("variable hygiene violated: {0}")]
    Hygiene(String),
    #[error("certificate construction failed: {0}")]
    Derive(#[from] DeriveError),
    #[error("emitted certificate rejected by the checker: {0}")]
    Kernel(CheckError),
}

/// Which construction produced a fixed point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// `□A(⊤)`, when every `p` sits at residue 0 (always the case for GL).
    ResidueZero,
    /// `(□A)ⁿ(⊤)`, when every `p` sits at one nonzero residue.
    Power,
    /// The stage-by-stage loop.
    Loop,
    /// Decomposition into a boxed system.
    Reduction,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ResidueZero => "residue-zero",
            Method::Power => "power",
            Method::Loop => "loop",
            Method::Reduction => "reduction",
        }
    }
}

/// Whether shortcut fixed points are used where they apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// The loop for every boxed formula (GL still takes `□A(⊤)`).
    #[default]
    General,
    /// `□A(⊤)` or `(□A)ⁿ(⊤)` whenever the residue set is a singleton.
    PreferShortcut,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointResult {
    pub fixed_point: Formula,
    pub trace: SynthTrace,
    /// Kernel-checked certificate of `F ↔ A(F)`, when requested.
    pub certificate: Option<Certificate>,
    pub method: Method,
    /// The strategy the result was computed under.
    pub strategy: Strategy,
}

pub(crate) fn expect_boxed(f: &Formula) -> Result<&Formula, SynthError> {
    f.as_box()
        .ok_or_else(|| SynthError::NotBoxed(crate::print::print(f, true)))
}

/// Replaces the residue-0 occurrences of `p` in `boxed` by `⊤`.
pub fn zero_instance(boxed: &Formula, p: &str, n: LogicIndex) -> Result<Formula, SynthError> {
    expect_boxed(boxed)?;
    Ok(replace_by_residue(boxed, p, 0, n.get(), &Formula::top()))
}

/// `[□A₀, …, □A_count]`: `□A₀ = boxed`, and `□A_{i+1}` replaces the
/// occurrences of `p` in `□A_i` at depth `≡ k + i (mod n)` by `boxed`.
pub fn shifting_sequence(boxed: &Formula, p: &str, k: usize, n: LogicIndex, count: usize) -> Result<Vec<Formula>, SynthError> {
    expect_boxed(boxed)?;
    let n = n.get();
    let mut out = Vec::with_capacity(count + 1);
    out.push(boxed.clone());
    for i in 0..count {
        let next = replace_by_residue(&out[i], p, (k + i) % n, n, boxed);
        out.push(next);
    }
    Ok(out)
}

/// One iteration of the loop.
#[derive(Clone, Debug)]
pub(crate) struct Round {
    pub(crate) b: Formula,
    pub(crate) shift: usize,
    pub(crate) seq: Vec<Formula>,
}

pub(crate) struct LoopRun {
    pub(crate) rounds: Vec<Round>,
    pub(crate) last: Formula,
    pub(crate) trace: SynthTrace,
}

fn run_loop(boxed: &Formula, p: &str, n: LogicIndex) -> Result<LoopRun, SynthError> {
    expect_boxed(boxed)?;
    let nn = n.get();
    let mut trace = SynthTrace::new(boxed.clone(), n);
    trace.push("B0", boxed.clone());
    let mut b = boxed.clone();
    let mut rounds = Vec::with_capacity(nn.saturating_sub(1));
    for k in 0..nn - 1 {
        let b0 = zero_instance(&b, p, n)?;
        trace.push(format!("B{k}'"), b0.clone());
        let shift = nn - k - 1;
        let seq = shifting_sequence(&b0, p, shift, n, k + 1)?;
        for (i, c) in seq.iter().enumerate().skip(1) {
            if i == k + 1 {
                trace.push(format!("B{}", k + 1), c.clone());
            } else {
                trace.push(format!("C{k},{i}"), c.clone());
            }
        }
        let next = seq[k + 1].clone();
        let residues = dep_mod(&next, p, n);
        if residues.iter().any(|&r| r > nn - k - 2) {
            return Err(SynthError::Invariant { stage: k + 1, residues });
        }
        rounds.push(Round { b: b.clone(), shift, seq });
        b = next;
    }
    Ok(LoopRun { rounds, last: b, trace })
}

/// `dep_mod(B_k, p, n)` for every stage `B_k` of the loop, in order.
pub fn loop_stage_residues(boxed: &Formula, p: &str, n: LogicIndex) -> Result<Vec<BTreeSet<usize>>, SynthError> {
    let run = run_loop(boxed, p, n)?;
    let mut out = vec![dep_mod(boxed, p, n)];
    out.extend(run.rounds.iter().map(|r| dep_mod(r.seq.last().unwrap(), p, n)));
    Ok(out)
}

/// The loop's fixed point `B_{n−1}(⊤)` with its trace. For `n = 1` this is
/// `□A(⊤)`.
pub fn boxed_fixed_point(boxed: &Formula, p: &str, n: LogicIndex, want_cert: bool) -> Result<FixedPointResult, SynthError> {
    let mut prover = want_cert.then(|| Prover::new(n));
    let (fixed_point, trace, method, thm) = solve_boxed(boxed, p, n, Strategy::General, prover.as_mut())?;
    let certificate = match (prover, thm) {
        (Some(pr), Some(t)) => Some(system::checked(&pr, t)?),
        _ => None,
    };
    Ok(FixedPointResult {
        fixed_point,
        trace,
        certificate,
        method,
        strategy: Strategy::General,
    })
}

/// The shortcut fixed points: `□A(⊤)` if `n = 1` or every `p` sits at
/// residue 0, `(□A)ⁿ(⊤)` if every `p` sits at one nonzero residue, and
/// `None` otherwise.
pub fn simple_fixed_point(boxed: &Formula, p: &str, n: LogicIndex) -> Result<Option<Formula>, SynthError> {
    Ok(shortcut(boxed, p, n)?.map(|(f, _)| f))
}

fn shortcut(boxed: &Formula, p: &str, n: LogicIndex) -> Result<Option<(Formula, Method)>, SynthError> {
    expect_boxed(boxed)?;
    let res = dep_mod(boxed, p, n);
    let top = Formula::top();
    if n.is_gl() || res.iter().all(|&r| r == 0) {
        return Ok(Some((substitute(boxed, p, &top), Method::ResidueZero)));
    }
    if res.len() == 1 {
        let g = iterate(boxed, p, n.get());
        return Ok(Some((substitute(&g, p, &top), Method::Power)));
    }
    Ok(None)
}

/// Solves a single boxed equation, proving `F ↔ boxed(F)` in `prover`
/// when one is supplied.
pub(crate) fn solve_boxed(
    boxed: &Formula,
    p: &str,
    n: LogicIndex,
    strategy: Strategy,
    prover: Option<&mut Prover>,
) -> Result<(Formula, SynthTrace, Method, Option<Thm>), SynthError> {
    expect_boxed(boxed)?;
    let quick = if strategy == Strategy::PreferShortcut || n.is_gl() {
        shortcut(boxed, p, n)?
    } else {
        None
    };
    if let Some((f, method)) = quick {
        let mut trace = SynthTrace::new(boxed.clone(), n);
        trace.push("B0", boxed.clone());
        if method == Method::Power {
            for k in 2..=n.get() {
                trace.push(format!("G{k}"), iterate(boxed, p, k));
            }
        }
        trace.push("fixpoint", f.clone());
        let thm = match prover {
            Some(pr) => Some(match method {
                Method::Power => pr.thm2(boxed, p)?,
                _ => pr.fp1(boxed, p)?,
            }),
            None => None,
        };
        return Ok((f, trace, method, thm));
    }
    let run = run_loop(boxed, p, n)?;
    let f = substitute(&run.last, p, &Formula::top());
    let mut trace = run.trace;
    trace.push("fixpoint", f.clone());
    let thm = match prover {
        Some(pr) => {
            let mut t = pr.fp1(&run.last, p)?;
            for r in run.rounds.iter().rev() {
                t = pr.shifting_lift(&r.seq, r.shift, p, &f, t)?;
                t = pr.zero_instance_lift(&f, &r.b, p, t)?;
            }
            Some(t)
        }
        None => None,
    };
    Ok((f, trace, Method::Loop, thm))
}

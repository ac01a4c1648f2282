//! The trusted checker.
//!
//! A certificate is accepted iff every line is justified by one of the five
//! primitive forms and the last line is the stated goal. Nothing else in the
//! crate needs to be trusted: every derived rule only emits lines for this
//! checker to re-validate.

use std::fmt;

use thiserror::Error;

use super::cert::{Certificate, Justification};
use super::taut::{taut_check, TautError};
use crate::formula::{Formula, LogicIndex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckFailure {
    #[error("certificate has no lines")]
    Empty,
    #[error("premise index {0} does not precede this line")]
    IndexOutOfRange(usize),
    #[error("not a tautology")]
    NotTautology,
    #[error(transparent)]
    Taut(#[from] TautError),
    #[error("bad shape: {0}")]
    BadShape(&'static str),
    #[error("axiom instance for n = {found}, logic is n = {expected}")]
    WrongN { expected: usize, found: usize },
    #[error("certificate logic n = {found}, expected n = {expected}")]
    WrongLogic { expected: usize, found: usize },
    #[error("last line does not match the goal")]
    GoalMismatch,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct CheckError {
    /// First failing line, if the failure is attached to a line.
    pub line: Option<usize>,
    pub reason: CheckFailure,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.reason),
            None => write!(f, "{}", self.reason),
        }
    }
}

/// Matches `□(X → Y) → (□X → □Y)`.
pub fn is_axk(f: &Formula) -> bool {
    (|| {
        let (l, r) = f.as_implies()?;
        let (x, y) = l.as_box()?.as_implies()?;
        let (bx, by) = r.as_implies()?;
        Some(bx.as_box()? == x && by.as_box()? == y)
    })()
    .unwrap_or(false)
}

/// If `f` is `□(□ᵐX → X) → □X` with `m ≥ 1`, returns `m`.
pub fn axwgl_power(f: &Formula) -> Option<usize> {
    let (l, r) = f.as_implies()?;
    let (boxed_x, x) = l.as_box()?.as_implies()?;
    if r.as_box()? != x {
        return None;
    }
    // Strip boxes from □ᵐX until X appears.
    let mut cur = boxed_x;
    let mut m = 0;
    loop {
        if m > 0 && cur == x {
            return Some(m);
        }
        cur = cur.as_box()?;
        m += 1;
    }
}

fn check_line(cert: &Certificate, idx: usize) -> Result<(), CheckFailure> {
    let line = &cert.lines[idx];
    let f = &line.formula;
    let prem = |i: usize| {
        if i < idx {
            Ok(&cert.lines[i].formula)
        } else {
            Err(CheckFailure::IndexOutOfRange(i))
        }
    };
    match line.justification {
        Justification::Taut => {
            if !taut_check(f)? {
                return Err(CheckFailure::NotTautology);
            }
        }
        Justification::AxK => {
            if !is_axk(f) {
                return Err(CheckFailure::BadShape("not an instance of K"));
            }
        }
        Justification::AxWgl => {
            if !wgl_matches_n(f, cert.logic.get()) {
                return Err(match axwgl_power(f) {
                    Some(found) => CheckFailure::WrongN {
                        expected: cert.logic.get(),
                        found,
                    },
                    None => CheckFailure::BadShape("not an instance of the wGL axiom"),
                });
            }
        }
        Justification::Mp(i, j) => {
            let (a, imp) = (prem(i)?, prem(j)?);
            let (ante, cons) = imp
                .as_implies()
                .ok_or(CheckFailure::BadShape("modus ponens cites a non-implication"))?;
            if ante != a || cons != f {
                return Err(CheckFailure::BadShape("modus ponens premises do not match"));
            }
        }
        Justification::Nec(i) => {
            let a = prem(i)?;
            if f.as_box() != Some(a) {
                return Err(CheckFailure::BadShape("necessitation conclusion is not the boxed premise"));
            }
        }
    }
    Ok(())
}

fn wgl_matches_n(f: &Formula, n: usize) -> bool {
    (|| {
        let (l, r) = f.as_implies()?;
        let (boxed_x, x) = l.as_box()?.as_implies()?;
        let rx = r.as_box()?;
        if rx != x {
            return None;
        }
        Some(crate::formula::box_power(n, x) == *boxed_x)
    })()
    .unwrap_or(false)
}

/// Checks every line and the goal.
pub fn check(cert: &Certificate) -> Result<(), CheckError> {
    if cert.lines.is_empty() {
        return Err(CheckError {
            line: None,
            reason: CheckFailure::Empty,
        });
    }
    for idx in 0..cert.lines.len() {
        check_line(cert, idx).map_err(|reason| CheckError { line: Some(idx), reason })?;
    }
    if cert.lines.last().map(|l| &l.formula) != Some(&cert.goal) {
        return Err(CheckError {
            line: None,
            reason: CheckFailure::GoalMismatch,
        });
    }
    Ok(())
}

/// [`check`], additionally requiring the certificate to be for `wGL_n`.
pub fn check_in(cert: &Certificate, n: LogicIndex) -> Result<(), CheckError> {
    if cert.logic != n {
        return Err(CheckError {
            line: None,
            reason: CheckFailure::WrongLogic {
                expected: n.get(),
                found: cert.logic.get(),
            },
        });
    }
    check(cert)
}

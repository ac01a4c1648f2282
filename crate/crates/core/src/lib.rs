//! Fixed points of modalized formulas in the logics `wGL_n`
//! (`K + □(□ⁿp → p) → □p`), with Hilbert-style certificates and bounded
//! Kripke countermodel search.
//!
//! ```
//! use modal_fixpoint::{fixed_point, parse, print, simplify, LogicIndex};
//!
//! let a = parse("box box ~p").unwrap();
//! let n = LogicIndex::new(3).unwrap();
//! let r = fixed_point(&a, "p", n, true).unwrap();
//! assert!(r.certificate.is_some());
//! println!("{}", print(&simplify(&r.fixed_point), true));
//! ```

pub mod depth;
pub mod formula;
pub mod kripke;
pub mod parse;
pub mod print;
pub mod proof;
pub mod random;
pub mod simplify;
pub mod synth;
pub mod verify;

pub use depth::{dep, dep_mod, is_modalized, occurrences, occurrences_by_residue, DepthProfile};
pub use formula::{
    atoms, box_power, boxdot, conj, iterate, replace_by_residue, substitute, substitute_all, substitute_at, Formula,
    FormulaError, Kind, LogicIndex, OccurrencePath, Step,
};
pub use parse::{parse, ParseError};
pub use print::print;
pub use simplify::simplify;
pub use synth::{fixed_point, FixedPointResult, SynthError, SynthTrace};

//! Hilbert-style proofs in `wGL_n`: a small trusted checker ([`check`]) and
//! an untrusted builder ([`Prover`]) whose output the checker re-validates.

mod cert;
mod derive;
mod kernel;
mod lemmas;
mod prover;
mod taut;

pub use cert::{CertFormatError, Certificate, Justification, ProofLine, SHARE_ABOVE};
pub use derive::*;
pub use kernel::{axwgl_power, check, check_in, is_axk, CheckError, CheckFailure};
pub use lemmas::{hole_equivalence, Hole, SubstKind};
pub use prover::{DeriveError, Prover, Thm};
pub use taut::{abstraction_atoms, taut_check, TautError, ATOM_BUDGET};

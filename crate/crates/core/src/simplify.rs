//! Opt-in cosmetic simplifier. Every rewrite is an equivalence of K:
//! `⊥ → x ↦ ⊤`, `x → ⊤ ↦ ⊤`, `⊤ → x ↦ x`, `¬¬x ↦ x` and `□⊤ ↦ ⊤`.

use std::collections::HashMap;

use crate::formula::{Formula, Kind};

/// One local rewrite at an implication whose children are already simplified.
pub(crate) fn simplify_implies(a: Formula, b: Formula) -> Formula {
    if a.is_falsum() || b.is_top() {
        Formula::top()
    } else if a.is_top() {
        b
    } else if b.is_falsum() {
        match a.as_not() {
            Some(x) => x.clone(),
            None => Formula::not(a),
        }
    } else {
        Formula::implies(a, b)
    }
}

pub(crate) fn simplify_box(a: Formula) -> Formula {
    if a.is_top() {
        a
    } else {
        Formula::boxed(a)
    }
}

pub fn simplify(f: &Formula) -> Formula {
    fn go(f: &Formula, memo: &mut HashMap<usize, Formula>) -> Formula {
        if let Some(r) = memo.get(&f.ptr()) {
            return r.clone();
        }
        let out = match f.kind() {
            Kind::Falsum | Kind::Var(_) => f.clone(),
            Kind::Implies(a, b) => {
                let (a2, b2) = (go(a, memo), go(b, memo));
                let r = simplify_implies(a2, b2);
                if let Some((x, y)) = r.as_implies() {
                    if x.ptr_eq(a) && y.ptr_eq(b) {
                        f.clone()
                    } else {
                        r
                    }
                } else {
                    r
                }
            }
            Kind::Box(a) => {
                let a2 = go(a, memo);
                if a2.ptr_eq(a) && !a2.is_top() {
                    f.clone()
                } else {
                    simplify_box(a2)
                }
            }
        };
        memo.insert(f.ptr(), out.clone());
        out
    }
    go(f, &mut HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::substitute;
    use crate::parse::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(simplify(&f("box (false -> q)")), Formula::top());
        assert_eq!(simplify(&f("box (p -> q) & dia r")), f("~(box (p -> q) -> box ~r)"));
        assert_eq!(simplify(&f("~~p")), f("p"));
        assert_eq!(simplify(&f("true -> p")), f("p"));
        assert_eq!(simplify(&f("p -> true")), f("true"));
        assert_eq!(simplify(&f("box box ~true")), f("box box false"));
    }

    #[test]
    fn both_slots_identified() {
        // □B(⊤,⊤) where both slots were p is literally □A(⊤).
        let a = f("box (p & box p)");
        let b = f("box (p & box q)");
        let b_tt = substitute(&substitute(&b, "p", &Formula::top()), "q", &Formula::top());
        assert_eq!(simplify(&b_tt), simplify(&substitute(&a, "p", &Formula::top())));
    }

    #[test]
    fn power_shortcut_normalises() {
        assert_eq!(
            simplify(&f("box box ~box box ~box box ~true")),
            simplify(&f("box box dia dia box box false"))
        );
    }

    #[test]
    fn idempotent() {
        let g = f("~~(true -> box ~~p) | (false -> q)");
        assert_eq!(simplify(&simplify(&g)), simplify(&g));
    }
}

//! Deterministic printer. With sugar off only `false`, `->` and `box`
//! appear; with sugar on the derived connectives are recovered from their
//! desugared shapes. Either way the output parses back to the same formula.

use crate::formula::{Formula, Kind};

const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

type Refs<'a> = &'a dyn Fn(&Formula) -> Option<usize>;

pub fn print(f: &Formula, sugar: bool) -> String {
    let mut out = String::new();
    go(f, sugar, &|_| None, 0, &mut out);
    out
}

/// Sugar-free, writing `#k` for every proper subformula that `refs` maps to
/// `Some(k)`. The root itself is always expanded.
pub(crate) fn print_with_refs(f: &Formula, refs: Refs<'_>) -> String {
    let mut out = String::new();
    go(f, false, &|g: &Formula| if g.ptr_eq(f) { None } else { refs(g) }, 0, &mut out);
    out
}

fn open(prec: u8, need: u8, out: &mut String) -> bool {
    let wrap = prec < need;
    if wrap {
        out.push('(');
    }
    wrap
}

fn close(wrap: bool, out: &mut String) {
    if wrap {
        out.push(')');
    }
}

struct Ctx<'a> {
    sugar: bool,
    refs: Refs<'a>,
}

fn binary(op: &str, prec: u8, need: u8, l: (&Formula, u8), r: (&Formula, u8), cx: &Ctx<'_>, out: &mut String) {
    let w = open(prec, need, out);
    walk(l.0, cx, l.1, out);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    walk(r.0, cx, r.1, out);
    close(w, out);
}

fn unary(op: &str, inner: &Formula, need: u8, cx: &Ctx<'_>, out: &mut String) {
    let w = open(UNARY, need, out);
    out.push_str(op);
    walk(inner, cx, UNARY, out);
    close(w, out);
}

fn go(f: &Formula, sugar: bool, refs: Refs<'_>, need: u8, out: &mut String) {
    walk(f, &Ctx { sugar, refs }, need, out)
}

fn walk(f: &Formula, cx: &Ctx<'_>, need: u8, out: &mut String) {
    if let Some(k) = (cx.refs)(f) {
        out.push('#');
        out.push_str(&k.to_string());
        return;
    }
    if cx.sugar {
        if f.is_top() {
            out.push_str("true");
            return;
        }
        if let Some((a, b)) = f.as_iff() {
            return binary("<->", IFF, need, (a, IFF), (b, IMP), cx, out);
        }
        if let Some((a, b)) = f.as_and() {
            return binary("&", AND, need, (a, AND), (b, UNARY), cx, out);
        }
        if let Some(a) = f.as_dia() {
            return unary("dia ", a, need, cx, out);
        }
        if let Some(a) = f.as_not() {
            return unary("~", a, need, cx, out);
        }
        if let Some((na, b)) = f.as_implies() {
            if let Some(a) = na.as_not() {
                if !a.is_falsum() {
                    return binary("|", OR, need, (a, OR), (b, AND), cx, out);
                }
            }
        }
    }
    match f.kind() {
        Kind::Falsum => out.push_str("false"),
        Kind::Var(v) => out.push_str(v),
        Kind::Implies(a, b) => binary("->", IMP, need, (a, OR), (b, IMP), cx, out),
        Kind::Box(a) => unary("box ", a, need, cx, out),
    }
}

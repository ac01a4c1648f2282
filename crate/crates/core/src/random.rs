//! Seedable random formula generation for sweeps and property tests.
//! Sizes count core AST nodes (`⊥`, variables, `→`, `□`).

use rand::Rng;

use crate::depth::is_modalized;
use crate::formula::{contains_var, Formula};

/// A random core formula of exactly `size` nodes over `vars` and `⊥`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, vars: &[&str], size: usize) -> Formula {
    build(rng, vars, size.max(1), None)
}

/// A random core formula of height at most `max_height`, roughly balanced
/// between leaves, implications and boxes.
pub fn random_formula_height<R: Rng + ?Sized>(rng: &mut R, vars: &[&str], max_height: usize) -> Formula {
    if max_height == 0 || rng.gen_bool(0.25) {
        let k = rng.gen_range(0..=vars.len());
        return if k == vars.len() {
            Formula::falsum()
        } else {
            Formula::var(vars[k])
        };
    }
    if rng.gen_bool(0.4) {
        Formula::boxed(random_formula_height(rng, vars, max_height - 1))
    } else {
        Formula::implies(
            random_formula_height(rng, vars, max_height - 1),
            random_formula_height(rng, vars, max_height - 1),
        )
    }
}

/// A random formula of at most `max_size` nodes that is modalized in `p` and
/// mentions `p`, with parameters drawn from `params`.
pub fn random_modalized<R: Rng + ?Sized>(rng: &mut R, p: &str, params: &[&str], max_size: usize) -> Formula {
    let mut vars = vec![p];
    vars.extend_from_slice(params);
    loop {
        let size = rng.gen_range(2..=max_size.max(2));
        let f = build(rng, &vars, size, Some(p));
        debug_assert!(is_modalized(&f, p));
        if contains_var(&f, p) {
            return f;
        }
    }
}

// `guard = Some(p)`: `p` may appear only under a box.
fn build<R: Rng + ?Sized>(rng: &mut R, vars: &[&str], size: usize, guard: Option<&str>) -> Formula {
    if size == 1 {
        let leaves: Vec<&str> = vars.iter().copied().filter(|v| Some(*v) != guard).collect();
        let k = rng.gen_range(0..=leaves.len());
        return if k == leaves.len() {
            Formula::falsum()
        } else {
            Formula::var(leaves[k])
        };
    }
    if size == 2 || rng.gen_bool(0.3) {
        return Formula::boxed(build(rng, vars, size - 1, None));
    }
    let left = rng.gen_range(1..size - 1);
    Formula::implies(build(rng, vars, left, guard), build(rng, vars, size - 1 - left, guard))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for size in 1..30 {
            assert_eq!(random_formula(&mut rng, &["p", "q"], size).size(), size);
        }
    }

    #[test]
    fn bounded_height() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            assert!(random_formula_height(&mut rng, &["p"], 4).height() <= 4);
        }
    }

    #[test]
    fn modalized_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let f = random_modalized(&mut rng, "p", &["q", "r"], 12);
            assert!(f.size() <= 12);
            assert!(is_modalized(&f, "p") && contains_var(&f, "p"));
        }
    }
}

//! Seeded random sequents over `p/1`, `q/1` and `r/0`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Connective, Formula, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub seed: u64,
    pub size: usize,
    pub max_depth: usize,
    pub max_side: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 0,
            size: 200,
            max_depth: 3,
            max_side: 2,
        }
    }
}

const VARS: [&str; 2] = ["x", "y"];

fn atom<R: Rng>(rng: &mut R) -> Formula {
    let x = *VARS.choose(rng).expect("nonempty");
    match rng.gen_range(0..3) {
        0 => Formula::atom("p", [x]),
        1 => Formula::atom("q", [x]),
        _ => Formula::prop("r"),
    }
}

/// A random formula over `p/1`, `q/1`, `r/0` and variables `x`, `y`, of depth
/// at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, conns: &[Connective], depth: usize) -> Formula {
    formula(rng, conns, depth)
}

/// Every formula of depth at most `depth` over `p(x)`, `q(x)`, `r`, the given
/// connectives and quantifiers on `x`. Grows doubly exponentially; depth 2
/// with the six builtins is about 16 000 formulas.
pub fn all_formulas(conns: &[Connective], depth: usize) -> Vec<Formula> {
    let mut pool = vec![Formula::atom("p", ["x"]), Formula::atom("q", ["x"]), Formula::prop("r")];
    for _ in 0..depth {
        let prev = pool.clone();
        let mut next = vec![Formula::atom("p", ["x"]), Formula::atom("q", ["x"]), Formula::prop("r")];
        for c in conns {
            let mut tuples: Vec<Vec<Formula>> = vec![Vec::new()];
            for _ in 0..c.arity() {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        prev.iter().map(move |f| {
                            let mut t = t.clone();
                            t.push(f.clone());
                            t
                        })
                    })
                    .collect();
            }
            next.extend(tuples.into_iter().map(|args| Formula::conn(c, args)));
        }
        for f in &prev {
            next.push(Formula::forall("x", f.clone()));
            next.push(Formula::exists("x", f.clone()));
        }
        pool = next;
    }
    let mut seen = BTreeSet::new();
    pool.retain(|f| seen.insert(f.clone()));
    pool
}

fn formula<R: Rng>(rng: &mut R, conns: &[Connective], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return atom(rng);
    }
    let choice = rng.gen_range(0..conns.len() + 2);
    if choice < conns.len() {
        let c = &conns[choice];
        let args = (0..c.arity())
            .map(|_| formula(rng, conns, depth - 1))
            .collect();
        return Formula::conn(c, args);
    }
    let x = *VARS.choose(rng).expect("nonempty");
    let body = formula(rng, conns, depth - 1);
    if choice == conns.len() {
        Formula::forall(x, body)
    } else {
        Formula::exists(x, body)
    }
}

/// `size` distinct sequents, reproducible from the seed.
///
/// Each side holds 0 to `max_side` formulas of depth at most `max_depth`.
/// Generation stops early if the space looks exhausted.
pub fn generate_corpus(conns: &[Connective], config: &CorpusConfig) -> Vec<Sequent> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut misses = 0;
    while out.len() < config.size && misses < 100 * config.size.max(1) {
        let side = |rng: &mut ChaCha8Rng| -> Vec<Formula> {
            let n = rng.gen_range(0..=config.max_side);
            (0..n)
                .map(|_| formula(rng, conns, config.max_depth))
                .collect()
        };
        let gamma = side(&mut rng);
        let delta = side(&mut rng);
        let s = Sequent::new(gamma, delta);
        if seen.insert(s.clone()) {
            out.push(s);
        } else {
            misses += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conns() -> Vec<Connective> {
        ["not", "and", "imp"]
            .iter()
            .map(|n| Connective::builtin(n).unwrap())
            .collect()
    }

    #[test]
    fn exhaustive_pool_sizes() {
        let all: Vec<Connective> = crate::truthfun::BUILTIN_NAMES
            .iter()
            .map(|n| Connective::builtin(n).unwrap())
            .collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all_formulas(&all, 0).len(), 3);
        assert_eq!(all_formulas(&all, 1).len(), 57);
        assert!(all_formulas(&all, 1).iter().all(|f| f.depth() <= 1));
    }

    #[test]
    fn reproducible_and_bounded() {
        let cfg = CorpusConfig {
            seed: 7,
            size: 50,
            ..CorpusConfig::default()
        };
        let a = generate_corpus(&conns(), &cfg);
        assert_eq!(a, generate_corpus(&conns(), &cfg));
        assert_eq!(a.len(), 50);
        for s in &a {
            assert!(s.antecedent.len() <= 2 && s.succedent.len() <= 2);
            assert!(s.formulas().all(|f| f.depth() <= 3));
            for (p, _) in s.predicates() {
                assert!(["p", "q", "r"].contains(&p.as_str()));
            }
        }
        let other = generate_corpus(&conns(), &CorpusConfig { seed: 8, ..cfg });
        assert_ne!(a, other);
    }
}

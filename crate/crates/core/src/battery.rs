//! Seeded batteries of symbolic supports for cross-checking the certifiers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::supportsets::{one, prog, ProductTerm, SupportSet2D, Term1D};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatteryCase {
    pub name: String,
    pub support: SupportSet2D,
}

/// Shape limits for [`random_support`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatteryShape {
    pub max_terms: usize,
    pub max_step: u64,
    pub max_base: u64,
    /// Percent of terms drawn as progressions.
    pub progression_percent: u32,
}

impl Default for BatteryShape {
    fn default() -> Self {
        BatteryShape { max_terms: 5, max_step: 8, max_base: 10, progression_percent: 75 }
    }
}

fn random_term<R: Rng>(rng: &mut R, shape: &BatteryShape) -> Term1D {
    if rng.random_range(0..100) < shape.progression_percent {
        prog(rng.random_range(0..=shape.max_base), rng.random_range(1..=shape.max_step))
    } else {
        one(rng.random_range(0..=shape.max_base))
    }
}

pub fn random_support<R: Rng>(rng: &mut R, shape: &BatteryShape) -> SupportSet2D {
    let n = rng.random_range(1..=shape.max_terms);
    SupportSet2D::new(
        (0..n)
            .map(|_| ProductTerm::new(random_term(rng, shape), random_term(rng, shape)))
            .collect(),
    )
}

/// Supports whose verdicts are known by construction.
pub fn curated() -> Vec<BatteryCase> {
    let case = |name: &str, terms: Vec<(Term1D, Term1D)>| BatteryCase {
        name: name.to_string(),
        support: SupportSet2D::new(terms.into_iter().map(|(k, l)| ProductTerm::new(k, l)).collect()),
    };
    let mut out = vec![
        case("full", vec![(prog(0, 1), prog(0, 1))]),
        case("even-l", vec![(prog(0, 1), prog(0, 2))]),
        case("odd-l", vec![(prog(0, 1), prog(1, 2))]),
        case("even-k", vec![(prog(0, 2), prog(0, 1))]),
        case("k-mod-3-zero", vec![(prog(0, 3), prog(0, 1))]),
        case("k-missing-3Z", vec![(prog(1, 3), prog(0, 1)), (prog(2, 3), prog(0, 1))]),
        case(
            "l-singletons-then-even-k",
            vec![(prog(0, 1), one(0)), (prog(0, 1), one(1)), (prog(0, 2), prog(2, 2)), (prog(0, 2), prog(3, 2))],
        ),
        case(
            "quadrants",
            vec![(prog(0, 2), prog(0, 2)), (prog(0, 2), prog(1, 2)), (prog(1, 2), prog(0, 2)), (prog(1, 2), prog(1, 2))],
        ),
        case("k-odd-l-even", vec![(prog(1, 2), prog(0, 2)), (prog(0, 2), prog(1, 2))]),
        case("finite", vec![(one(0), one(0)), (one(1), one(1)), (one(2), one(3))]),
        case("residues-0-1-mod-3", vec![(prog(0, 3), prog(0, 1)), (prog(1, 3), prog(0, 1))]),
        case("k-odd-only", vec![(prog(1, 2), prog(0, 1))]),
    ];
    // Mixed-parity supports where every section and every row is too thin
    // for the sufficient tests, while every parity tail still meets all
    // progressions: even rows sit on k-classes {a} ∪ B, odd rows on
    // {a} ∪ C, and both unions cover ±Z/n.
    for (name, b, c) in [("split-mod3-a", 2, 1), ("split-mod3-b", 1, 2)] {
        out.push(case(
            name,
            vec![
                (prog(0, 3), prog(0, 4)),
                (prog(0, 3), prog(1, 4)),
                (prog(b, 3), prog(2, 4)),
                (prog(c, 3), prog(3, 4)),
            ],
        ));
    }
    out.push(case(
        "split-mod5",
        vec![
            (prog(0, 5), prog(0, 4)),
            (prog(0, 5), prog(1, 4)),
            (prog(1, 5), prog(2, 4)),
            (prog(2, 5), prog(2, 4)),
            (prog(3, 5), prog(3, 4)),
            (prog(4, 5), prog(3, 4)),
        ],
    ));
    out
}

/// The curated cases followed by `n_random` seeded random supports.
pub fn standard_battery(seed: u64, n_random: usize) -> Vec<BatteryCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = BatteryShape::default();
    let mut out = curated();
    out.extend((0..n_random).map(|i| BatteryCase {
        name: format!("random-{i}"),
        support: random_support(&mut rng, &shape),
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_is_seeded() {
        assert_eq!(standard_battery(7, 20), standard_battery(7, 20));
        assert_ne!(standard_battery(7, 20), standard_battery(8, 20));
        assert_eq!(standard_battery(1, 30).len(), curated().len() + 30);
    }

    #[test]
    fn random_terms_respect_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let s = random_support(&mut rng, &BatteryShape::default());
            assert!((1..=5).contains(&s.terms.len()));
            for t in &s.terms {
                for part in [t.k, t.l] {
                    assert!(part.anchor() <= 10);
                    assert!(part.step().is_none_or(|n| (1..=8).contains(&n)));
                }
            }
        }
    }
}

//! Eventually periodic subsets of `Z+` and `Z+ x Z+`.
//!
//! A [`SupportSet1D`] is a finite union of singletons and one-sided arithmetic
//! progressions `{a, a+n, a+2n, ...}`; a [`SupportSet2D`] is a finite union of
//! Cartesian products of two such terms. The class is closed under sections,
//! parity tails and symmetrization, and every membership question the
//! certifiers ask about it is decidable.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Radius of the brute-force scan every emitted [`ProgressionWitness`] must pass.
pub const WITNESS_SCAN_RADIUS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Any,
}

impl Parity {
    pub fn matches(self, v: u64) -> bool {
        match self {
            Parity::Even => v.is_multiple_of(2),
            Parity::Odd => v % 2 == 1,
            Parity::Any => true,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Any => "any",
        })
    }
}

/// A singleton `{value}` or the progression `{base + i*step : i >= 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTerm", into = "RawTerm")]
pub enum Term1D {
    Singleton(u64),
    Progression { base: u64, step: u64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
enum RawTerm {
    #[serde(rename = "one")]
    One { value: u64 },
    #[serde(rename = "prog")]
    Prog { base: u64, step: u64 },
}

impl TryFrom<RawTerm> for Term1D {
    type Error = String;

    fn try_from(raw: RawTerm) -> Result<Self, Self::Error> {
        match raw {
            RawTerm::One { value } => Ok(Term1D::Singleton(value)),
            RawTerm::Prog { base, step } if step >= 1 => Ok(Term1D::Progression { base, step }),
            RawTerm::Prog { .. } => Err("progression step must be >= 1".to_string()),
        }
    }
}

impl From<Term1D> for RawTerm {
    fn from(t: Term1D) -> Self {
        match t {
            Term1D::Singleton(value) => RawTerm::One { value },
            Term1D::Progression { base, step } => RawTerm::Prog { base, step },
        }
    }
}

/// Shorthand for `Term1D::Progression`. Panics on a zero step.
pub fn prog(base: u64, step: u64) -> Term1D {
    assert!(step >= 1, "progression step must be >= 1");
    Term1D::Progression { base, step }
}

/// Shorthand for `Term1D::Singleton`.
pub fn one(value: u64) -> Term1D {
    Term1D::Singleton(value)
}

impl Term1D {
    pub fn contains(&self, v: u64) -> bool {
        match *self {
            Term1D::Singleton(x) => x == v,
            Term1D::Progression { base, step } => v >= base && (v - base).is_multiple_of(step),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Term1D::Progression { .. })
    }

    /// Infinitely many members of the parity class. An even step keeps the
    /// parity of the base; an odd step alternates.
    pub fn infinitely_many(&self, parity: Parity) -> bool {
        match *self {
            Term1D::Singleton(_) => false,
            Term1D::Progression { base, step } => step % 2 == 1 || parity.matches(base),
        }
    }

    /// At least one member of the parity class.
    pub fn has_member_of(&self, parity: Parity) -> bool {
        match *self {
            Term1D::Singleton(v) => parity.matches(v),
            Term1D::Progression { .. } => self.infinitely_many(parity),
        }
    }

    /// At least one member `>= gamma` in the parity class.
    pub fn has_member_at_least(&self, gamma: u64, parity: Parity) -> bool {
        match *self {
            Term1D::Singleton(v) => v >= gamma && parity.matches(v),
            Term1D::Progression { .. } => self.infinitely_many(parity),
        }
    }

    /// Base of a progression or value of a singleton.
    pub fn anchor(&self) -> u64 {
        match *self {
            Term1D::Singleton(v) => v,
            Term1D::Progression { base, .. } => base,
        }
    }

    pub fn step(&self) -> Option<u64> {
        match *self {
            Term1D::Singleton(_) => None,
            Term1D::Progression { step, .. } => Some(step),
        }
    }

    /// Members `<= limit`, ascending.
    pub fn members_up_to(&self, limit: u64) -> impl Iterator<Item = u64> {
        let (start, step, single) = match *self {
            Term1D::Singleton(v) => (v, 1, true),
            Term1D::Progression { base, step } => (base, step, false),
        };
        let count = if start > limit {
            0
        } else if single {
            1
        } else {
            (limit - start) / step + 1
        };
        (0..count).map(move |i| start + i * step)
    }
}

impl fmt::Display for Term1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Term1D::Singleton(v) => write!(f, "{{{v}}}"),
            Term1D::Progression { base, step } => write!(f, "prog({base},{step})"),
        }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b))
        .checked_mul(b)
        .expect("lcm of progression steps overflowed u64")
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Finite union of [`Term1D`]; the empty union is the empty set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportSet1D {
    pub terms: Vec<Term1D>,
}

impl SupportSet1D {
    pub fn new(terms: Vec<Term1D>) -> Self {
        SupportSet1D { terms }
    }

    pub fn empty() -> Self {
        SupportSet1D::default()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn with(mut self, term: Term1D) -> Self {
        self.terms.push(term);
        self
    }

    pub fn contains(&self, v: u64) -> bool {
        self.terms.iter().any(|t| t.contains(v))
    }

    /// Membership in the symmetrized set `±S ⊆ Z`.
    pub fn contains_symmetric(&self, z: i64) -> bool {
        self.contains(z.unsigned_abs())
    }

    pub fn has_infinitely_many(&self, parity: Parity) -> bool {
        self.terms.iter().any(|t| t.infinitely_many(parity))
    }

    pub fn is_finite(&self) -> bool {
        !self.terms.iter().any(Term1D::is_infinite)
    }

    /// Least common multiple of the progression steps, 1 if there are none.
    pub fn period(&self) -> u64 {
        self.terms.iter().filter_map(Term1D::step).fold(1, lcm)
    }

    /// `1 + ` the largest base or singleton value (0 for the empty set).
    /// Beyond it, membership is periodic with [`SupportSet1D::period`].
    pub fn prefix_bound(&self) -> u64 {
        self.terms.iter().map(|t| t.anchor() + 1).max().unwrap_or(0)
    }

    /// Sorted, deduplicated members `<= limit`.
    pub fn members_up_to(&self, limit: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self.terms.iter().flat_map(|t| t.members_up_to(limit)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Decide whether `±S` meets `nZ + j` for every `n >= 1` and every `j`.
    ///
    /// Progressions alone decide the question: a progression with step `s`
    /// hits class `j` modulo `n` iff `j ≡ ±a (mod gcd(s, n))`, and
    /// `gcd(s, n) = gcd(s, gcd(n, L))` with `L` the lcm of steps, so only the
    /// divisors of `L` need checking. When some divisor `d` leaves a class
    /// uncovered, every lift of that class to a multiple of `d` stays
    /// uncovered, and singletons can block at most two classes each, so a
    /// multiple of `d` with a fully empty class exists.
    pub fn meets_every_progression(&self) -> ProgressionVerdict {
        let progs: Vec<(u64, u64)> = self
            .terms
            .iter()
            .filter_map(|t| match *t {
                Term1D::Progression { base, step } => Some((base, step)),
                Term1D::Singleton(_) => None,
            })
            .collect();
        let singles: Vec<u64> = self
            .terms
            .iter()
            .filter_map(|t| match *t {
                Term1D::Singleton(v) => Some(v),
                Term1D::Progression { .. } => None,
            })
            .collect();

        let infinite_covers = |j: u64, n: u64| {
            progs.iter().any(|&(a, s)| {
                let g = gcd(s, n);
                let r = a % g;
                j % g == r || j % g == (g - r) % g
            })
        };

        let period = self.period();
        let failing = divisors(period)
            .into_iter()
            .find(|&d| (0..d).any(|j| !infinite_covers(j, d)));
        let Some(d) = failing else {
            return ProgressionVerdict::MeetsAll;
        };

        // p = 2 * |singletons| + 1 is always enough; the loop bound is that.
        let max_p = 2 * singles.len() as u64 + 1;
        for p in 1..=max_p {
            let n = d * p;
            let free = (0..n).find(|&j| {
                !infinite_covers(j, n)
                    && !singles.iter().any(|&v| v % n == j || (n - v % n) % n == j)
            });
            if let Some(j) = free {
                let witness = ProgressionWitness { modulus: n, residue: j };
                assert!(
                    witness.confirmed_by_scan(self, WITNESS_SCAN_RADIUS),
                    "progression witness {witness} failed re-validation for {self}"
                );
                return ProgressionVerdict::Misses(witness);
            }
        }
        unreachable!("no free residue class below modulus {}", d * max_p)
    }
}

impl fmt::Display for SupportSet1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("∅");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// A residue class `nZ + j` that `±S` misses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProgressionWitness {
    pub modulus: u64,
    pub residue: u64,
}

impl ProgressionWitness {
    /// Brute-force check: no element of `±S` in `[-radius, radius]` lies in
    /// the class.
    pub fn confirmed_by_scan(&self, set: &SupportSet1D, radius: u64) -> bool {
        let n = self.modulus;
        let j = self.residue % n;
        set.terms.iter().all(|t| {
            t.members_up_to(radius)
                .all(|v| v % n != j && (n - v % n) % n != j)
        })
    }
}

impl fmt::Display for ProgressionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Z+{}", self.modulus, self.residue)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgressionVerdict {
    MeetsAll,
    Misses(ProgressionWitness),
}

impl ProgressionVerdict {
    pub fn meets(&self) -> bool {
        matches!(self, ProgressionVerdict::MeetsAll)
    }

    pub fn witness(&self) -> Option<ProgressionWitness> {
        match *self {
            ProgressionVerdict::MeetsAll => None,
            ProgressionVerdict::Misses(w) => Some(w),
        }
    }
}

/// `k x l` product of two terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductTerm {
    pub k: Term1D,
    pub l: Term1D,
}

impl ProductTerm {
    pub fn new(k: Term1D, l: Term1D) -> Self {
        ProductTerm { k, l }
    }

    pub fn contains(&self, k: u64, l: u64) -> bool {
        self.k.contains(k) && self.l.contains(l)
    }
}

impl fmt::Display for ProductTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}×{}", self.k, self.l)
    }
}

/// Finite union of [`ProductTerm`]s.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportSet2D {
    pub terms: Vec<ProductTerm>,
}

/// Output of [`SupportSet2D::derived_parity_tail_set`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedSet {
    pub set: SupportSet1D,
    /// Past this `gamma` the derived set no longer changes.
    pub stabilization: u64,
}

impl SupportSet2D {
    pub fn new(terms: Vec<ProductTerm>) -> Self {
        SupportSet2D { terms }
    }

    pub fn empty() -> Self {
        SupportSet2D::default()
    }

    /// Single product `k x l`.
    pub fn product(k: Term1D, l: Term1D) -> Self {
        SupportSet2D { terms: vec![ProductTerm::new(k, l)] }
    }

    pub fn with(mut self, k: Term1D, l: Term1D) -> Self {
        self.terms.push(ProductTerm::new(k, l));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, k: u64, l: u64) -> bool {
        self.terms.iter().any(|t| t.contains(k, l))
    }

    /// `{l : (k, l) ∈ S}`.
    pub fn section(&self, k: u64) -> SupportSet1D {
        SupportSet1D::new(
            self.terms
                .iter()
                .filter(|t| t.k.contains(k))
                .map(|t| t.l)
                .collect(),
        )
    }

    /// `{k : (k, l) ∈ S}`.
    pub fn row(&self, l: u64) -> SupportSet1D {
        self.transpose().section(l)
    }

    /// Swap the two axes.
    pub fn transpose(&self) -> SupportSet2D {
        SupportSet2D::new(self.terms.iter().map(|t| ProductTerm::new(t.l, t.k)).collect())
    }

    /// Projection onto the circle (`k`) axis.
    pub fn k_projection(&self) -> SupportSet1D {
        SupportSet1D::new(self.terms.iter().map(|t| t.k).collect())
    }

    /// Projection onto the sphere (`l`) axis.
    pub fn l_projection(&self) -> SupportSet1D {
        SupportSet1D::new(self.terms.iter().map(|t| t.l).collect())
    }

    /// `1 + ` the largest `l`-singleton, or 0 when there is none.
    pub fn stabilization_bound(&self) -> u64 {
        self.terms
            .iter()
            .filter_map(|t| match t.l {
                Term1D::Singleton(v) => Some(v + 1),
                Term1D::Progression { .. } => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// `{k : section(k) ∩ {gamma, gamma+1, ...} ∩ parity ≠ ∅}`, built termwise.
    pub fn derived_parity_tail_set(&self, gamma: u64, parity: Parity) -> DerivedSet {
        let set = SupportSet1D::new(
            self.terms
                .iter()
                .filter(|t| t.l.has_member_at_least(gamma, parity))
                .map(|t| t.k)
                .collect(),
        );
        DerivedSet { set, stabilization: self.stabilization_bound() }
    }
}

impl fmt::Display for SupportSet2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("∅");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

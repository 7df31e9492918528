//! Exact decision procedures for strict positive definiteness.
//!
//! Characterizations return [`Verdict::Spd`] or [`Verdict::NotSpd`]; the
//! sufficient tests return [`Verdict::SufficientOnly`] or
//! [`Verdict::Inconclusive`] and never refute anything.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, KernelSupport, SpaceDescriptor};
use crate::supportsets::{one, prog, Parity, ProgressionVerdict, ProgressionWitness, SupportSet1D, SupportSet2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "SPD")]
    Spd,
    #[serde(rename = "NotSPD")]
    NotSpd,
    SufficientOnly,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Spd => "SPD",
            Verdict::NotSpd => "NotSPD",
            Verdict::SufficientOnly => "SufficientOnly",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Which decision procedure produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    CircleProgressions,
    SphereParity,
    CircleSphereParityTails,
    CircleSphereGammaLoop,
    CircleTphTails,
    SufficientCircleOuter,
    SufficientSphereOuter,
    TwoSphereQuadrants,
}

impl Method {
    pub fn is_characterization(self) -> bool {
        !matches!(self, Method::SufficientCircleOuter | Method::SufficientSphereOuter)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub condition: String,
    pub outcome: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// A residue class the relevant symmetrized set misses; for product
    /// spaces also the `gamma` and `l`-parity at which it was found.
    Progression {
        witness: ProgressionWitness,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        gamma: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        parity: Option<Parity>,
    },
    /// Only finitely many support members of this parity.
    ParityDeficit { missing: Parity },
    /// A parity quadrant whose projections are not both unbounded.
    Quadrant { k_parity: Parity, l_parity: Parity },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub space: String,
    pub verdict: Verdict,
    pub method: Method,
    pub trace: Vec<TraceEntry>,
    pub counterexample: Option<Counterexample>,
}

impl Certificate {
    fn new(space: &str, method: Method) -> Self {
        Certificate {
            space: space.to_string(),
            verdict: Verdict::Spd,
            method,
            trace: Vec::new(),
            counterexample: None,
        }
    }

    fn note(&mut self, condition: impl Into<String>, outcome: bool, gamma: Option<u64>) {
        self.trace.push(TraceEntry { condition: condition.into(), outcome, gamma });
    }

    fn refute(mut self, counterexample: Counterexample) -> Self {
        self.verdict = Verdict::NotSpd;
        self.counterexample = Some(counterexample);
        self
    }

    pub fn is_spd(&self) -> bool {
        self.verdict == Verdict::Spd
    }

    /// `(gamma, parity, witness)` of a failed parity-tail check.
    pub fn failing_tail(&self) -> Option<(u64, Option<Parity>, ProgressionWitness)> {
        match self.counterexample? {
            Counterexample::Progression { witness, gamma, parity } => Some((gamma?, parity, witness)),
            _ => None,
        }
    }
}

fn check_dim(m: usize) -> Result<()> {
    if m < 2 {
        Err(Error::InvalidDimension(m))
    } else {
        Ok(())
    }
}

/// `S^1`: `±S` must meet every residue class.
pub fn certify_circle(support: &SupportSet1D) -> Certificate {
    let mut cert = Certificate::new("circle", Method::CircleProgressions);
    let verdict = support.meets_every_progression();
    cert.note(format!("±({support}) meets every nZ+j"), verdict.meets(), None);
    match verdict {
        ProgressionVerdict::MeetsAll => cert,
        ProgressionVerdict::Misses(witness) => {
            cert.refute(Counterexample::Progression { witness, gamma: None, parity: None })
        }
    }
}

/// `S^m`, `m >= 2`: infinitely many even and infinitely many odd degrees.
pub fn certify_sphere(support: &SupportSet1D, m: usize) -> Result<Certificate> {
    check_dim(m)?;
    let mut cert = Certificate::new("sphere", Method::SphereParity);
    let mut missing = None;
    for parity in [Parity::Even, Parity::Odd] {
        let ok = support.has_infinitely_many(parity);
        cert.note(format!("infinitely many {parity} degrees in {support}"), ok, None);
        if !ok && missing.is_none() {
            missing = Some(parity);
        }
    }
    Ok(match missing {
        None => cert,
        Some(missing) => cert.refute(Counterexample::ParityDeficit { missing }),
    })
}

/// Range of `gamma` to inspect and whether it covers the stabilization bound.
fn gamma_range(bound: u64, gamma_max: Option<u64>) -> (u64, bool) {
    match gamma_max {
        Some(g) => (g, g >= bound),
        None => (bound, true),
    }
}

fn parity_tail_loop(
    s2: &SupportSet2D,
    space: &str,
    method: Method,
    parities: &[Parity],
    gamma_max: Option<u64>,
) -> Certificate {
    let mut cert = Certificate::new(space, method);
    let bound = s2.stabilization_bound();
    let (last, complete) = gamma_range(bound, gamma_max);
    for gamma in 0..=last {
        for &parity in parities {
            let derived = s2.derived_parity_tail_set(gamma, parity);
            let verdict = derived.set.meets_every_progression();
            cert.note(
                format!("±{{k : J^k ∩ [{gamma},∞) ∩ {parity} ≠ ∅}} = ±({}) meets every nZ+j", derived.set),
                verdict.meets(),
                Some(gamma),
            );
            if let ProgressionVerdict::Misses(witness) = verdict {
                return cert.refute(Counterexample::Progression {
                    witness,
                    gamma: Some(gamma),
                    parity: Some(parity),
                });
            }
        }
    }
    if !complete {
        cert.note(format!("gamma range stopped at {last} below the stabilization bound {bound}"), false, None);
        cert.verdict = Verdict::Inconclusive;
    }
    cert
}

/// `S^1 x S^m`: for every `gamma`, both parity-tail circle supports pass the
/// circle test. Only `gamma <= gamma*` needs checking.
pub fn certify_circle_sphere(s2: &SupportSet2D, m: usize) -> Result<Certificate> {
    certify_circle_sphere_with(s2, m, None)
}

pub fn certify_circle_sphere_with(s2: &SupportSet2D, m: usize, gamma_max: Option<u64>) -> Result<Certificate> {
    check_dim(m)?;
    Ok(parity_tail_loop(
        s2,
        "circle_sphere",
        Method::CircleSphereParityTails,
        &[Parity::Odd, Parity::Even],
        gamma_max,
    ))
}

/// Second route to the `S^1 x S^m` verdict: builds each circle support by
/// enumerating sections over a finite `k`-window and scanning `l`-windows,
/// then promotes the periodic part of the window to progressions.
pub fn certify_circle_sphere_gamma_loop(s2: &SupportSet2D, m: usize) -> Result<Certificate> {
    certify_circle_sphere_gamma_loop_with(s2, m, None)
}

pub fn certify_circle_sphere_gamma_loop_with(
    s2: &SupportSet2D,
    m: usize,
    gamma_max: Option<u64>,
) -> Result<Certificate> {
    check_dim(m)?;
    let mut cert = Certificate::new("circle_sphere", Method::CircleSphereGammaLoop);
    let k_axis = s2.k_projection();
    let (k_prefix, k_period) = (k_axis.prefix_bound(), k_axis.period());
    let l_axis = s2.l_projection();
    let (l_prefix, l_period) = (l_axis.prefix_bound(), l_axis.period());
    let bound = l_axis
        .terms
        .iter()
        .filter(|t| !t.is_infinite())
        .map(|t| t.anchor() + 1)
        .max()
        .unwrap_or(0);
    let (last, complete) = gamma_range(bound, gamma_max);

    let sections: Vec<SupportSet1D> = (0..k_prefix + k_period).map(|k| s2.section(k)).collect();
    for gamma in 0..=last {
        // a section with a member >= gamma of some parity has one below this
        let l_hi = gamma.max(l_prefix) + 2 * l_period;
        for parity in [Parity::Odd, Parity::Even] {
            let terms: Vec<_> = sections
                .iter()
                .enumerate()
                .filter(|(_, sec)| (gamma..=l_hi).any(|l| parity.matches(l) && sec.contains(l)))
                .map(|(k, _)| {
                    let k = k as u64;
                    if k < k_prefix {
                        one(k)
                    } else {
                        prog(k, k_period)
                    }
                })
                .collect();
            let circle_support = SupportSet1D::new(terms);
            let circle = certify_circle(&circle_support);
            cert.note(
                format!("f_{gamma}^{parity}: circle support ±({circle_support}) meets every nZ+j"),
                circle.is_spd(),
                Some(gamma),
            );
            if let Some(Counterexample::Progression { witness, .. }) = circle.counterexample {
                return Ok(cert.refute(Counterexample::Progression {
                    witness,
                    gamma: Some(gamma),
                    parity: Some(parity),
                }));
            }
        }
    }
    if !complete {
        cert.note(format!("gamma range stopped at {last} below the stabilization bound {bound}"), false, None);
        cert.verdict = Verdict::Inconclusive;
    }
    Ok(cert)
}

/// `S^1 x M^d` for a projective space or the Cayley plane: no parity split.
pub fn certify_circle_tph(s2: &SupportSet2D, space: SpaceDescriptor) -> Result<Certificate> {
    certify_circle_tph_with(s2, space, None)
}

pub fn certify_circle_tph_with(
    s2: &SupportSet2D,
    space: SpaceDescriptor,
    gamma_max: Option<u64>,
) -> Result<Certificate> {
    if !matches!(space, SpaceDescriptor::CircleTph { .. }) {
        return Err(Error::WrongCertifier(format!(
            "{space} is not a circle x projective space; use the sphere certifiers"
        )));
    }
    space.validate()?;
    Ok(parity_tail_loop(s2, "circle_tph", Method::CircleTphTails, &[Parity::Any], gamma_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OuterAxis {
    CircleOuter,
    SphereOuter,
}

/// Indices in `[0, prefix + period)` whose inner test passes, promoted to
/// progressions past the prefix. Asserts the outcome is periodic there.
fn promote_periodic(prefix: u64, period: u64, mut passes: impl FnMut(u64) -> bool) -> SupportSet1D {
    let mut terms = Vec::new();
    for idx in 0..prefix + period {
        let ok = passes(idx);
        if idx >= prefix {
            assert_eq!(ok, passes(idx + period), "inner outcome not periodic at {idx}");
        }
        if ok {
            terms.push(if idx < prefix { one(idx) } else { prog(idx, period) });
        }
    }
    SupportSet1D::new(terms)
}

/// Sufficient condition through sections (`CircleOuter`:
/// `{k : J^k ∈ SPD(S^m)} ∈ SPD(S^1)`) or rows (`SphereOuter`:
/// `{l : {k : (k,l) ∈ J} ∈ SPD(S^1)} ∈ SPD(S^m)`).
pub fn sufficient_product(s2: &SupportSet2D, m: usize, axis: OuterAxis) -> Result<Certificate> {
    check_dim(m)?;
    let (method, outer_set, outer_ok) = match axis {
        OuterAxis::CircleOuter => {
            let k_axis = s2.k_projection();
            let set = promote_periodic(k_axis.prefix_bound(), k_axis.period(), |k| {
                certify_sphere(&s2.section(k), m).expect("m checked").is_spd()
            });
            let ok = certify_circle(&set).is_spd();
            (Method::SufficientCircleOuter, set, ok)
        }
        OuterAxis::SphereOuter => {
            let rows = s2.transpose();
            let l_axis = rows.k_projection();
            let set = promote_periodic(l_axis.prefix_bound(), l_axis.period(), |l| {
                certify_circle(&rows.section(l)).is_spd()
            });
            let ok = certify_sphere(&set, m)?.is_spd();
            (Method::SufficientSphereOuter, set, ok)
        }
    };
    let mut cert = Certificate::new("circle_sphere", method);
    let condition = match axis {
        OuterAxis::CircleOuter => format!("{{k : J^k ∈ SPD(S^{m})}} = {outer_set} ∈ SPD(S^1)"),
        OuterAxis::SphereOuter => format!("{{l : row_l ∈ SPD(S^1)}} = {outer_set} ∈ SPD(S^{m})"),
    };
    cert.note(condition, outer_ok, None);
    cert.verdict = if outer_ok { Verdict::SufficientOnly } else { Verdict::Inconclusive };
    Ok(cert)
}

/// `S^m x S^M`, `m, M >= 2`: each parity quadrant must contain support
/// points whose two coordinate projections are both unbounded.
pub fn certify_two_spheres(s2: &SupportSet2D, m: usize, big_m: usize) -> Result<Certificate> {
    check_dim(m)?;
    check_dim(big_m)?;
    let mut cert = Certificate::new("sphere_sphere", Method::TwoSphereQuadrants);
    cert.note("reading: both coordinate projections of J ∩ Q unbounded", true, None);
    for kp in [Parity::Even, Parity::Odd] {
        for lp in [Parity::Even, Parity::Odd] {
            let k_unbounded = s2
                .terms
                .iter()
                .any(|t| t.k.infinitely_many(kp) && t.l.has_member_of(lp));
            let l_unbounded = s2
                .terms
                .iter()
                .any(|t| t.l.infinitely_many(lp) && t.k.has_member_of(kp));
            let ok = k_unbounded && l_unbounded;
            cert.note(format!("quadrant ({kp}, {lp}): k unbounded {k_unbounded}, l unbounded {l_unbounded}"), ok, None);
            if !ok {
                return Ok(cert.refute(Counterexample::Quadrant { k_parity: kp, l_parity: lp }));
            }
        }
    }
    Ok(cert)
}

/// Run the characterization that matches the kernel's space on its declared support.
pub fn certify_spec(spec: &KernelSpec, gamma_max: Option<u64>) -> Result<Certificate> {
    match (spec.space(), spec.declared_support()) {
        (SpaceDescriptor::Circle, KernelSupport::Single(s)) => Ok(certify_circle(s)),
        (SpaceDescriptor::Sphere { m }, KernelSupport::Single(s)) => certify_sphere(s, m),
        (SpaceDescriptor::CircleSphere { m }, KernelSupport::Product(s2)) => {
            certify_circle_sphere_with(s2, m, gamma_max)
        }
        (space @ SpaceDescriptor::CircleTph { .. }, KernelSupport::Product(s2)) => {
            certify_circle_tph_with(s2, space, gamma_max)
        }
        (space, _) => Err(Error::InvalidSpace(format!("support shape does not match {space}"))),
    }
}

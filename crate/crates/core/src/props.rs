//! FitzGerald's properties of a finite algebra and their transfer to the
//! endomorphism monoid.
//!
//! Retracts are the images of idempotent endomorphisms and coretracts are
//! their kernels, so every check reduces to comparing images and kernels of
//! the idempotents of `End(A)`:
//!
//! * (RI)  the intersection of two retracts is a retract;
//! * (UR)  distinct idempotents have distinct images;
//! * (RI*) the join of two coretract congruences is a coretract congruence;
//! * (UR*) distinct idempotents have distinct kernels.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, Subalgebra};
use crate::congruence::{congruence_join, Congruence};
use crate::elemset::ElemSet;
use crate::hom::{endomorphisms_with_limit, EndMonoid, EndoMap, DEFAULT_ENDO_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropsConfig {
    /// Carrier-size guard for the endomorphism search on the input algebra.
    pub endo_limit: usize,
    /// Largest endomorphism monoid whose canonical right set the transfer
    /// audit will analyse.
    pub monoid_limit: usize,
}

impl Default for PropsConfig {
    fn default() -> Self {
        PropsConfig {
            endo_limit: DEFAULT_ENDO_LIMIT,
            monoid_limit: 512,
        }
    }
}

/// A retract subalgebra with every idempotent endomorphism having it as image.
#[derive(Debug, Clone)]
pub struct Retract {
    pub subalgebra: Subalgebra,
    /// Indices into the endomorphism monoid.
    pub idempotents: Vec<usize>,
}

/// A coretract congruence with every idempotent endomorphism having it as kernel.
#[derive(Debug, Clone)]
pub struct Coretract {
    pub congruence: Congruence,
    pub idempotents: Vec<usize>,
}

/// Endomorphisms of an algebra together with the images and kernels of its
/// idempotents; the shared input of every property check.
#[derive(Debug, Clone)]
pub struct Analysis<'a> {
    pub algebra: &'a FiniteAlgebra,
    pub end: EndMonoid,
    pub idempotents: Vec<usize>,
    images: Vec<ElemSet>,
    kernels: Vec<Congruence>,
}

impl<'a> Analysis<'a> {
    pub fn new(algebra: &'a FiniteAlgebra, endo_limit: usize) -> Result<Self, AlgebraError> {
        let end = endomorphisms_with_limit(algebra, endo_limit)?;
        Ok(Self::from_end(algebra, end))
    }

    pub fn from_end(algebra: &'a FiniteAlgebra, end: EndMonoid) -> Self {
        let idempotents = end.idempotents();
        let images = idempotents.iter().map(|&i| end.maps[i].image()).collect();
        let kernels = idempotents
            .iter()
            .map(|&i| end.maps[i].kernel_congruence(algebra))
            .collect();
        Analysis {
            algebra,
            end,
            idempotents,
            images,
            kernels,
        }
    }

    fn map(&self, i: usize) -> &EndoMap {
        &self.end.maps[i]
    }

    /// Retracts ordered by their first idempotent.
    pub fn retracts(&self) -> Vec<Retract> {
        let mut groups: Vec<Retract> = Vec::new();
        for (k, img) in self.images.iter().enumerate() {
            match groups.iter_mut().find(|r| r.subalgebra.members == *img) {
                Some(r) => r.idempotents.push(self.idempotents[k]),
                None => groups.push(Retract {
                    subalgebra: Subalgebra {
                        members: img.clone(),
                    },
                    idempotents: vec![self.idempotents[k]],
                }),
            }
        }
        groups
    }

    pub fn coretracts(&self) -> Vec<Coretract> {
        let mut groups: Vec<Coretract> = Vec::new();
        for (k, ker) in self.kernels.iter().enumerate() {
            match groups.iter_mut().find(|c| c.congruence == *ker) {
                Some(c) => c.idempotents.push(self.idempotents[k]),
                None => groups.push(Coretract {
                    congruence: ker.clone(),
                    idempotents: vec![self.idempotents[k]],
                }),
            }
        }
        groups
    }

    /// Every pair of retracts (identity included, each unordered pair once)
    /// with its intersection; stops at the first failure.
    fn intersections(&self) -> (Vec<IntersectionWitness>, Option<IntersectionWitness>) {
        let retracts = self.retracts();
        let mut nontrivial = Vec::new();
        for (i, r1) in retracts.iter().enumerate() {
            for r2 in &retracts[i..] {
                let meet = r1.subalgebra.members.intersection(&r2.subalgebra.members);
                let is_retract = retracts.iter().any(|r| r.subalgebra.members == meet);
                let w = IntersectionWitness {
                    left: self.algebra.set_names(&r1.subalgebra.members),
                    right: self.algebra.set_names(&r2.subalgebra.members),
                    intersection: self.algebra.set_names(&meet),
                    is_retract,
                };
                if !is_retract {
                    return (nontrivial, Some(w));
                }
                if meet != r1.subalgebra.members && meet != r2.subalgebra.members {
                    nontrivial.push(w);
                }
            }
        }
        (nontrivial, None)
    }

    fn joins(&self) -> (Vec<JoinWitness>, Option<JoinWitness>) {
        let coretracts = self.coretracts();
        let mut nontrivial = Vec::new();
        for (i, c1) in coretracts.iter().enumerate() {
            for c2 in &coretracts[i..] {
                let (r, s) = (&c1.congruence, &c2.congruence);
                let join = if r.refines(s) {
                    s.clone()
                } else if s.refines(r) {
                    r.clone()
                } else {
                    congruence_join(self.algebra, r, s).expect("kernels share the carrier")
                };
                let is_coretract = coretracts.iter().any(|c| c.congruence == join);
                let w = JoinWitness {
                    left: r.blocks_named(self.algebra),
                    right: s.blocks_named(self.algebra),
                    join: join.blocks_named(self.algebra),
                    is_coretract,
                };
                if !is_coretract {
                    return (nontrivial, Some(w));
                }
                if join != *r && join != *s {
                    nontrivial.push(w);
                }
            }
        }
        (nontrivial, None)
    }

    fn render_map(&self, i: usize) -> Vec<String> {
        self.map(i).images.iter().map(|&y| self.algebra.name(y)).collect()
    }

    pub fn check_ri(&self) -> Verdict<IntersectionWitness> {
        Verdict::from_witness(self.intersections().1)
    }

    pub fn check_ur(&self) -> Verdict<ImageCollision> {
        let w = self.first_collision(&self.images).map(|(a, b)| ImageCollision {
            first: self.render_map(self.idempotents[a]),
            second: self.render_map(self.idempotents[b]),
            image: self.algebra.set_names(&self.images[a]),
        });
        Verdict::from_witness(w)
    }

    pub fn check_ur_star(&self) -> Verdict<KernelCollision> {
        let w = self.first_collision(&self.kernels).map(|(a, b)| KernelCollision {
            first: self.render_map(self.idempotents[a]),
            second: self.render_map(self.idempotents[b]),
            kernel: self.kernels[a].blocks_named(self.algebra),
        });
        Verdict::from_witness(w)
    }

    pub fn check_ri_star(&self) -> Verdict<JoinWitness> {
        Verdict::from_witness(self.joins().1)
    }

    pub fn idempotents_commute(&self) -> Verdict<CommuteWitness> {
        let v = self.end.monoid.idempotents_commute();
        let w = v.witness.map(|(x, y)| CommuteWitness {
            first: self.render_map(x),
            second: self.render_map(y),
            first_after_second: self.render_map(self.end.monoid.mul(x, y)),
            second_after_first: self.render_map(self.end.monoid.mul(y, x)),
        });
        Verdict::from_witness(w)
    }

    /// Least pair `(a, b)`, `a < b`, of idempotent positions with equal keys.
    fn first_collision<K: PartialEq>(&self, keys: &[K]) -> Option<(usize, usize)> {
        (0..keys.len())
            .flat_map(|a| (a + 1..keys.len()).map(move |b| (a, b)))
            .find(|&(a, b)| keys[a] == keys[b])
    }

    pub fn report(&self) -> PropertyReport {
        let (intersections, ri_w) = self.intersections();
        let (joins, ri_star_w) = self.joins();
        let ur = self.check_ur();
        let ur_star = self.check_ur_star();
        let commute = self.idempotents_commute();
        let retracts = self
            .retracts()
            .into_iter()
            .map(|r| RetractEntry {
                members: self.algebra.set_names(&r.subalgebra.members),
                idempotents: r.idempotents.iter().map(|&i| self.render_map(i)).collect(),
            })
            .collect();
        let coretracts = self
            .coretracts()
            .into_iter()
            .map(|c| CoretractEntry {
                blocks: c.congruence.blocks_named(self.algebra),
                idempotents: c.idempotents.iter().map(|&i| self.render_map(i)).collect(),
            })
            .collect();
        PropertyReport {
            ri: ri_w.is_none(),
            ur: ur.holds,
            ri_star: ri_star_w.is_none(),
            ur_star: ur_star.holds,
            idempotents_commute: commute.holds,
            witnesses: Witnesses {
                ri: ri_w,
                ur: ur.witness,
                ri_star: ri_star_w,
                ur_star: ur_star.witness,
                idempotents_commute: commute.witness,
                intersections,
                joins,
                retracts,
                coretracts,
            },
        }
    }
}

/// A verdict together with the least counter-witness when it fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

impl<W> Verdict<W> {
    fn from_witness(witness: Option<W>) -> Self {
        Verdict {
            holds: witness.is_none(),
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionWitness {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub intersection: Vec<String>,
    pub is_retract: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinWitness {
    pub left: Vec<Vec<String>>,
    pub right: Vec<Vec<String>>,
    pub join: Vec<Vec<String>>,
    pub is_coretract: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageCollision {
    pub first: Vec<String>,
    pub second: Vec<String>,
    pub image: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelCollision {
    pub first: Vec<String>,
    pub second: Vec<String>,
    pub kernel: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommuteWitness {
    pub first: Vec<String>,
    pub second: Vec<String>,
    /// `first ∘ second`
    pub first_after_second: Vec<String>,
    /// `second ∘ first`
    pub second_after_first: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RetractEntry {
    pub members: Vec<String>,
    pub idempotents: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoretractEntry {
    pub blocks: Vec<Vec<String>>,
    pub idempotents: Vec<Vec<String>>,
}

/// Counter-witnesses for failing properties, the nontrivial intersections and
/// joins that were checked, and the retract/coretract listings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witnesses {
    pub ri: Option<IntersectionWitness>,
    pub ur: Option<ImageCollision>,
    pub ri_star: Option<JoinWitness>,
    pub ur_star: Option<KernelCollision>,
    pub idempotents_commute: Option<CommuteWitness>,
    pub intersections: Vec<IntersectionWitness>,
    pub joins: Vec<JoinWitness>,
    pub retracts: Vec<RetractEntry>,
    pub coretracts: Vec<CoretractEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub ri: bool,
    pub ur: bool,
    pub ri_star: bool,
    pub ur_star: bool,
    pub idempotents_commute: bool,
    pub witnesses: Witnesses,
}

impl PropertyReport {
    pub fn holds(&self, p: Property) -> bool {
        match p {
            Property::Ri => self.ri,
            Property::Ur => self.ur,
            Property::RiStar => self.ri_star,
            Property::UrStar => self.ur_star,
        }
    }

    /// All four properties hold while idempotents fail to commute.
    pub fn is_counterexample(&self) -> bool {
        self.ri && self.ur && self.ri_star && self.ur_star && !self.idempotents_commute
    }

    pub fn verdicts(&self) -> [bool; 5] {
        [self.ri, self.ur, self.ri_star, self.ur_star, self.idempotents_commute]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "{:<22}{}", "RI", yn(self.ri))?;
        writeln!(f, "{:<22}{}", "UR", yn(self.ur))?;
        writeln!(f, "{:<22}{}", "RI*", yn(self.ri_star))?;
        writeln!(f, "{:<22}{}", "UR*", yn(self.ur_star))?;
        writeln!(f, "{:<22}{}", "idempotents commute", yn(self.idempotents_commute))?;
        let w = &self.witnesses;
        writeln!(f, "retracts: {}", w.retracts.len())?;
        for r in &w.retracts {
            writeln!(f, "  {{{}}}  ({} idempotent(s))", r.members.join(","), r.idempotents.len())?;
        }
        writeln!(f, "coretracts: {}", w.coretracts.len())?;
        for c in &w.coretracts {
            writeln!(f, "  {}  ({} idempotent(s))", blocks(&c.blocks), c.idempotents.len())?;
        }
        for i in &w.intersections {
            writeln!(
                f,
                "intersection {{{}}} ∩ {{{}}} = {{{}}}",
                i.left.join(","),
                i.right.join(","),
                i.intersection.join(",")
            )?;
        }
        for j in &w.joins {
            writeln!(f, "join {} ∨ {} = {}", blocks(&j.left), blocks(&j.right), blocks(&j.join))?;
        }
        if let Some(x) = &w.ri {
            writeln!(
                f,
                "RI fails: {{{}}} ∩ {{{}}} = {{{}}} is not a retract",
                x.left.join(","),
                x.right.join(","),
                x.intersection.join(",")
            )?;
        }
        if let Some(x) = &w.ur {
            writeln!(
                f,
                "UR fails: [{}] and [{}] share image {{{}}}",
                x.first.join(" "),
                x.second.join(" "),
                x.image.join(",")
            )?;
        }
        if let Some(x) = &w.ri_star {
            writeln!(
                f,
                "RI* fails: {} ∨ {} = {} is not a coretract",
                blocks(&x.left),
                blocks(&x.right),
                blocks(&x.join)
            )?;
        }
        if let Some(x) = &w.ur_star {
            writeln!(
                f,
                "UR* fails: [{}] and [{}] share kernel {}",
                x.first.join(" "),
                x.second.join(" "),
                blocks(&x.kernel)
            )?;
        }
        if let Some(x) = &w.idempotents_commute {
            writeln!(
                f,
                "noncommuting idempotents: [{}] and [{}]",
                x.first.join(" "),
                x.second.join(" ")
            )?;
        }
        Ok(())
    }
}

fn blocks(b: &[Vec<String>]) -> String {
    let parts: Vec<String> = b.iter().map(|x| format!("{{{}}}", x.join(","))).collect();
    parts.join("")
}

pub fn retracts(a: &FiniteAlgebra) -> Result<Vec<Retract>, AlgebraError> {
    Ok(Analysis::new(a, DEFAULT_ENDO_LIMIT)?.retracts())
}

pub fn check_ri(a: &FiniteAlgebra) -> Result<Verdict<IntersectionWitness>, AlgebraError> {
    Ok(Analysis::new(a, DEFAULT_ENDO_LIMIT)?.check_ri())
}

pub fn check_ur(a: &FiniteAlgebra) -> Result<Verdict<ImageCollision>, AlgebraError> {
    Ok(Analysis::new(a, DEFAULT_ENDO_LIMIT)?.check_ur())
}

pub fn check_ri_star(a: &FiniteAlgebra) -> Result<Verdict<JoinWitness>, AlgebraError> {
    Ok(Analysis::new(a, DEFAULT_ENDO_LIMIT)?.check_ri_star())
}

pub fn check_ur_star(a: &FiniteAlgebra) -> Result<Verdict<KernelCollision>, AlgebraError> {
    Ok(Analysis::new(a, DEFAULT_ENDO_LIMIT)?.check_ur_star())
}

pub fn full_report(a: &FiniteAlgebra) -> Result<PropertyReport, AlgebraError> {
    full_report_with(a, &PropsConfig::default())
}

pub fn full_report_with(a: &FiniteAlgebra, cfg: &PropsConfig) -> Result<PropertyReport, AlgebraError> {
    Ok(Analysis::new(a, cfg.endo_limit)?.report())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Ri,
    Ur,
    RiStar,
    UrStar,
}

impl Property {
    pub const ALL: [Property; 4] = [Property::Ri, Property::Ur, Property::RiStar, Property::UrStar];

    /// Whether the property transfers from the monoid's canonical right set
    /// back to the algebra. (RI) is the one that does not.
    pub fn transfers_back(self) -> bool {
        self != Property::Ri
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Ri => "RI",
            Property::Ur => "UR",
            Property::RiStar => "RI*",
            Property::UrStar => "UR*",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Holds for the algebra but not for the canonical right set of its monoid.
    AlgebraToMonoid,
    /// Holds for the canonical right set but not for the algebra.
    MonoidToAlgebra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransferViolation {
    pub property: Property,
    pub direction: Direction,
}

/// Both reports of a transfer audit and the implication failures between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeAudit {
    pub monoid_order: usize,
    pub algebra: PropertyReport,
    pub monoid_set: PropertyReport,
    pub violations: Vec<TransferViolation>,
}

impl BridgeAudit {
    /// Rows `(property, algebra verdict, monoid-set verdict)`.
    pub fn matrix(&self) -> Vec<(Property, bool, bool)> {
        Property::ALL
            .iter()
            .map(|&p| (p, self.algebra.holds(p), self.monoid_set.holds(p)))
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("transfer violated: {violations:?}", violations = .0.violations)]
    TransferViolation(Box<BridgeAudit>),
}

/// Computes `S = End(A)`, the canonical right `S`-set, and both reports,
/// recording every failed implication:
/// a property of `A` must hold for the `S`-set, and (UR), (RI*), (UR*) of the
/// `S`-set must hold for `A`.
pub fn bridge_audit(a: &FiniteAlgebra, cfg: &PropsConfig) -> Result<BridgeAudit, AlgebraError> {
    let analysis = Analysis::new(a, cfg.endo_limit)?;
    let monoid = analysis.end.monoid.clone();
    if monoid.order() > cfg.monoid_limit {
        return Err(AlgebraError::SizeLimitExceeded {
            size: monoid.order(),
            limit: cfg.monoid_limit,
        });
    }
    let set = monoid.canonical_right_mset();
    // The canonical right set is generated by the identity, so its
    // endomorphism search is linear in the monoid order.
    let set_analysis = Analysis::new(&set, set.size().max(cfg.endo_limit))?;
    let algebra = analysis.report();
    let monoid_set = set_analysis.report();
    let mut violations = Vec::new();
    for p in Property::ALL {
        if algebra.holds(p) && !monoid_set.holds(p) {
            violations.push(TransferViolation {
                property: p,
                direction: Direction::AlgebraToMonoid,
            });
        }
        if p.transfers_back() && monoid_set.holds(p) && !algebra.holds(p) {
            violations.push(TransferViolation {
                property: p,
                direction: Direction::MonoidToAlgebra,
            });
        }
    }
    Ok(BridgeAudit {
        monoid_order: monoid.order(),
        algebra,
        monoid_set,
        violations,
    })
}

/// [`bridge_audit`], with any violation turned into an error.
pub fn bridge_check(a: &FiniteAlgebra, cfg: &PropsConfig) -> Result<BridgeAudit, BridgeError> {
    let audit = bridge_audit(a, cfg)?;
    if audit.violations.is_empty() {
        Ok(audit)
    } else {
        Err(BridgeError::TransferViolation(Box::new(audit)))
    }
}

/// All idempotent endomorphisms with image exactly `r`; empty when `r` is not a retract.
pub fn split_mono_check(a: &FiniteAlgebra, r: &ElemSet) -> Result<Vec<EndoMap>, AlgebraError> {
    let sub = a.subalgebra(r.clone())?;
    let analysis = Analysis::new(a, DEFAULT_ENDO_LIMIT)?;
    Ok(analysis
        .retracts()
        .into_iter()
        .filter(|x| x.subalgebra == sub)
        .flat_map(|x| x.idempotents)
        .map(|i| analysis.end.maps[i].clone())
        .collect())
}

/// Idempotents grouped by kernel, keyed by block-id array; used by audits.
pub fn kernel_classes(analysis: &Analysis<'_>) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut out: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (k, &i) in analysis.idempotents.iter().enumerate() {
        out.entry(analysis.kernels[k].block_ids().to_vec()).or_default().push(i);
    }
    out
}

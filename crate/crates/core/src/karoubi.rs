//! Finite categories, Karoubi envelopes of finite monoids and categories of
//! retracts of finite algebras.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra};
use crate::hom::homomorphisms;
use crate::monoid::FiniteMonoid;
use crate::props::Analysis;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("composite of morphisms {g} ∘ {f} is missing or has the wrong endpoints")]
    BadComposite { g: usize, f: usize },
    #[error("identity of object {0} is not a two-sided unit")]
    BadIdentity(usize),
    #[error("composition is not associative at ({h}, {g}, {f})")]
    NotAssociative { h: usize, g: usize, f: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Morphism {
    pub source: usize,
    pub target: usize,
    pub label: String,
}

/// A category with finitely many objects and morphisms. Composition is a
/// table indexed by `(g, f)` holding `g ∘ f` whenever `target(f) = source(g)`.
#[derive(Debug, Clone)]
pub struct FiniteCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<usize>,
    compose: Vec<Option<usize>>,
}

impl FiniteCategory {
    /// Builds and validates a category; `compose(g, f)` is only called on
    /// composable pairs.
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        mut compose: impl FnMut(usize, usize) -> Option<usize>,
    ) -> Result<Self, CategoryError> {
        let m = morphisms.len();
        let mut table = vec![None; m * m];
        for g in 0..m {
            for f in 0..m {
                if morphisms[f].target != morphisms[g].source {
                    continue;
                }
                let gf = compose(g, f)
                    .filter(|&c| {
                        c < m
                            && morphisms[c].source == morphisms[f].source
                            && morphisms[c].target == morphisms[g].target
                    })
                    .ok_or(CategoryError::BadComposite { g, f })?;
                table[g * m + f] = Some(gf);
            }
        }
        let cat = FiniteCategory {
            objects,
            morphisms,
            identities,
            compose: table,
        };
        cat.validate()?;
        Ok(cat)
    }

    fn validate(&self) -> Result<(), CategoryError> {
        for (o, &id) in self.identities.iter().enumerate() {
            let ok = self.morphisms[id].source == o
                && self.morphisms[id].target == o
                && (0..self.morphisms.len()).all(|f| {
                    (self.morphisms[f].target != o || self.comp(id, f) == Some(f))
                        && (self.morphisms[f].source != o || self.comp(f, id) == Some(f))
                });
            if !ok {
                return Err(CategoryError::BadIdentity(o));
            }
        }
        let m = self.morphisms.len();
        for f in 0..m {
            for g in 0..m {
                let Some(gf) = self.comp(g, f) else { continue };
                for h in 0..m {
                    let Some(hg) = self.comp(h, g) else { continue };
                    if self.comp(h, gf) != self.comp(hg, f) {
                        return Err(CategoryError::NotAssociative { h, g, f });
                    }
                }
            }
        }
        Ok(())
    }

    /// A monoid as a category with one object.
    pub fn from_monoid(m: &FiniteMonoid) -> Self {
        let morphisms = (0..m.order())
            .map(|x| Morphism {
                source: 0,
                target: 0,
                label: m.name(x),
            })
            .collect();
        FiniteCategory::new(vec!["*".into()], morphisms, vec![0], |g, f| Some(m.mul(g, f)))
            .expect("a monoid is a one-object category")
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn identity(&self, object: usize) -> usize {
        self.identities[object]
    }

    pub fn object(&self, label: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == label)
    }

    /// `g ∘ f`, when composable.
    pub fn comp(&self, g: usize, f: usize) -> Option<usize> {
        self.compose[g * self.morphisms.len() + f]
    }

    /// Morphisms `source → target`, by id.
    pub fn hom(&self, source: usize, target: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&f| self.morphisms[f].source == source && self.morphisms[f].target == target)
            .collect()
    }

    /// A pair `(i, r)` with `i: c' → c`, `r: c → c'`, `r ∘ i = 1_{c'}` and
    /// `i ∘ r = e`, for an idempotent `e: c → c`.
    pub fn split(&self, e: usize) -> Option<(usize, usize)> {
        let c = self.morphisms[e].source;
        for c2 in 0..self.objects.len() {
            for i in self.hom(c2, c) {
                for r in self.hom(c, c2) {
                    if self.comp(r, i) == Some(self.identities[c2]) && self.comp(i, r) == Some(e) {
                        return Some((i, r));
                    }
                }
            }
        }
        None
    }

    /// Whether `c` is a retract of `d`: some `i: c → d`, `r: d → c` with `r ∘ i = 1_c`.
    pub fn is_retract_of(&self, c: usize, d: usize) -> bool {
        self.hom(c, d).into_iter().any(|i| {
            self.hom(d, c)
                .into_iter()
                .any(|r| self.comp(r, i) == Some(self.identities[c]))
        })
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            objects: &'a [String],
            morphisms: &'a [Morphism],
            identities: &'a [usize],
            composition: Vec<[usize; 3]>,
        }
        let m = self.morphisms.len();
        let composition = (0..m)
            .flat_map(|g| (0..m).map(move |f| (g, f)))
            .filter_map(|(g, f)| self.comp(g, f).map(|gf| [g, f, gf]))
            .collect();
        serde_json::to_string_pretty(&Dump {
            objects: &self.objects,
            morphisms: &self.morphisms,
            identities: &self.identities,
            composition,
        })
        .expect("category serialization cannot fail")
    }
}

/// The Karoubi envelope: one object per idempotent `e`, morphisms `e → f`
/// the elements `f·s·e`, composition the monoid product.
pub fn karoubi_envelope(m: &FiniteMonoid) -> FiniteCategory {
    let idem = m.idempotents();
    let objects = idem.iter().map(|&e| m.name(e)).collect();
    let mut morphisms = Vec::new();
    // (source, target, element) → id, filled in canonical order.
    let mut id_of = std::collections::HashMap::new();
    for (si, &e) in idem.iter().enumerate() {
        for (ti, &f) in idem.iter().enumerate() {
            let mut elems: Vec<usize> = (0..m.order()).map(|s| m.mul(m.mul(f, s), e)).collect();
            elems.sort_unstable();
            elems.dedup();
            for x in elems {
                id_of.insert((si, ti, x), morphisms.len());
                morphisms.push(Morphism {
                    source: si,
                    target: ti,
                    label: m.name(x),
                });
            }
        }
    }
    let elem_of: Vec<usize> = {
        let mut v = vec![0; morphisms.len()];
        for (&(_, _, x), &id) in &id_of {
            v[id] = x;
        }
        v
    };
    let identities = idem
        .iter()
        .enumerate()
        .map(|(i, &e)| id_of[&(i, i, e)])
        .collect();
    let src_tgt: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.source, m.target)).collect();
    FiniteCategory::new(objects, morphisms, identities, |g, f| {
        let x = m.mul(elem_of[g], elem_of[f]);
        id_of.get(&(src_tgt[f].0, src_tgt[g].1, x)).copied()
    })
    .expect("the Karoubi envelope of a monoid is a category")
}

/// The full subcategory of retracts of `a`: objects are the retract
/// subalgebras (ordered as in [`Analysis::retracts`]), morphisms all
/// homomorphisms between the induced algebras.
pub fn category_of_retracts(a: &FiniteAlgebra, endo_limit: usize) -> Result<FiniteCategory, CategoryError> {
    let analysis = Analysis::new(a, endo_limit)?;
    category_of_retracts_from(&analysis)
}

fn category_of_retracts_from(analysis: &Analysis<'_>) -> Result<FiniteCategory, CategoryError> {
    let a = analysis.algebra;
    let retracts = analysis.retracts();
    let induced: Vec<FiniteAlgebra> = retracts.iter().map(|r| a.induced(&r.subalgebra).0).collect();
    let objects = retracts
        .iter()
        .map(|r| format!("{{{}}}", a.set_names(&r.subalgebra.members).join(",")))
        .collect();
    let mut morphisms = Vec::new();
    let mut maps: Vec<Vec<usize>> = Vec::new();
    let mut id_of = std::collections::HashMap::new();
    for (si, s) in induced.iter().enumerate() {
        for (ti, t) in induced.iter().enumerate() {
            for f in homomorphisms(s, t)? {
                id_of.insert((si, ti, f.clone()), morphisms.len());
                let label = f.iter().map(|&y| t.name(y)).collect::<Vec<_>>().join(" ");
                morphisms.push(Morphism {
                    source: si,
                    target: ti,
                    label: format!("[{label}]"),
                });
                maps.push(f);
            }
        }
    }
    let identities = induced
        .iter()
        .enumerate()
        .map(|(i, s)| id_of[&(i, i, (0..s.size()).collect::<Vec<_>>())])
        .collect();
    let src_tgt: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.source, m.target)).collect();
    FiniteCategory::new(objects, morphisms, identities, |g, f| {
        let gf: Vec<usize> = maps[f].iter().map(|&x| maps[g][x]).collect();
        id_of.get(&(src_tgt[f].0, src_tgt[g].1, gf)).copied()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletionVerdict {
    /// Every idempotent endomorphism splits.
    pub idempotents_split: bool,
    /// First idempotent (by morphism id) that does not split.
    pub split_failure: Option<usize>,
    /// Every object is a retract of an object in the given subcategory.
    pub retracts_of_subcategory: bool,
    pub retract_failure: Option<usize>,
}

impl CompletionVerdict {
    pub fn holds(&self) -> bool {
        self.idempotents_split && self.retracts_of_subcategory
    }
}

/// Checks both conditions for `c` to be an idempotent completion of the full
/// subcategory on the objects `d`.
pub fn is_idempotent_completion(c: &FiniteCategory, d: &[usize]) -> CompletionVerdict {
    assert!(!d.is_empty(), "subcategory must have an object");
    let split_failure = (0..c.morphisms.len()).find(|&e| {
        let m = &c.morphisms[e];
        m.source == m.target && c.comp(e, e) == Some(e) && c.split(e).is_none()
    });
    let retract_failure = (0..c.objects.len()).find(|&o| !d.iter().any(|&x| c.is_retract_of(o, x)));
    CompletionVerdict {
        idempotents_split: split_failure.is_none(),
        split_failure,
        retracts_of_subcategory: retract_failure.is_none(),
        retract_failure,
    }
}

/// One row of the envelope/retract comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomComparison {
    pub source: String,
    pub target: String,
    pub envelope: usize,
    pub retracts: usize,
}

/// Comparison of `karoubi_envelope(End(A))` with `category_of_retracts(A)`
/// under `idempotent e ↦ image of e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KaroubiAudit {
    pub envelope_objects: usize,
    pub retract_objects: usize,
    /// Number of distinct images among the idempotents.
    pub distinct_images: usize,
    pub rows: Vec<HomComparison>,
}

impl KaroubiAudit {
    pub fn consistent(&self) -> bool {
        self.retract_objects == self.distinct_images && self.rows.iter().all(|r| r.envelope == r.retracts)
    }
}

pub fn karoubi_audit(a: &FiniteAlgebra, endo_limit: usize) -> Result<KaroubiAudit, CategoryError> {
    let analysis = Analysis::new(a, endo_limit)?;
    let m = &analysis.end.monoid;
    let env = karoubi_envelope(m);
    let cat = category_of_retracts_from(&analysis)?;
    let retracts = analysis.retracts();
    let object_of = |idem: usize| {
        retracts
            .iter()
            .position(|r| r.idempotents.contains(&idem))
            .expect("every idempotent has a retract")
    };
    let idem = m.idempotents();
    let mut rows = Vec::new();
    for (si, &e) in idem.iter().enumerate() {
        for (ti, &f) in idem.iter().enumerate() {
            rows.push(HomComparison {
                source: m.name(e),
                target: m.name(f),
                envelope: env.hom(si, ti).len(),
                retracts: cat.hom(object_of(e), object_of(f)).len(),
            });
        }
    }
    Ok(KaroubiAudit {
        envelope_objects: env.objects().len(),
        retract_objects: cat.objects().len(),
        distinct_images: retracts.len(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::corpus;
    use crate::hom::DEFAULT_ENDO_LIMIT;
    use crate::monoid::verify_monoid_axioms;

    #[test]
    fn envelope_of_paper_monoid() {
        let s = builtin::fitzgerald_monoid();
        let k = karoubi_envelope(&s);
        assert_eq!(k.objects(), ["1", "e", "f", "g"]);
        let (e, f) = (k.object("e").unwrap(), k.object("f").unwrap());
        let labels: Vec<&str> = k.hom(e, f).iter().map(|&i| k.morphisms()[i].label.as_str()).collect();
        assert_eq!(labels, ["g", "fe"]);
        let one = k.object("1").unwrap();
        assert!(is_idempotent_completion(&k, &[one]).holds());
    }

    #[test]
    fn small_envelopes() {
        let k = karoubi_envelope(&FiniteMonoid::trivial());
        assert_eq!((k.objects().len(), k.morphisms().len()), (1, 1));

        let z = verify_monoid_axioms(vec![0, 1, 1, 1], 2).unwrap();
        let k = karoubi_envelope(&z);
        let count = |s, t| k.hom(s, t).len();
        assert_eq!([count(0, 0), count(0, 1), count(1, 0), count(1, 1)], [2, 1, 1, 1]);
    }

    #[test]
    fn one_object_category_does_not_split() {
        let s = builtin::fitzgerald_monoid();
        let c = FiniteCategory::from_monoid(&s);
        let v = is_idempotent_completion(&c, &[0]);
        assert!(!v.idempotents_split);
        assert_eq!(v.split_failure, s.element("e"));
        assert!(v.retracts_of_subcategory);
    }

    #[test]
    fn retracts_of_paper_algebra() {
        let a = builtin::fitzgerald_algebra();
        let c = category_of_retracts(&a, DEFAULT_ENDO_LIMIT).unwrap();
        assert_eq!(c.objects().len(), 4);
        assert!(is_idempotent_completion(&c, &[0]).holds());
        let es = c.object("{e,g,ef}").unwrap();
        let fs = c.object("{f,g,fe}").unwrap();
        assert_eq!(c.hom(es, fs).len(), 2);
        assert_eq!(category_of_retracts(&builtin::singleton(), 10).unwrap().objects().len(), 1);
    }

    #[test]
    fn audits() {
        for a in [builtin::fitzgerald_algebra(), corpus::gen_pointed_set(3), corpus::gen_set(3)] {
            let audit = karoubi_audit(&a, DEFAULT_ENDO_LIMIT).unwrap();
            assert!(audit.consistent(), "{audit:?}");
        }
    }

    #[test]
    fn rejects_bad_composition() {
        let morphisms = vec![
            Morphism { source: 0, target: 0, label: "1".into() },
            Morphism { source: 0, target: 0, label: "a".into() },
        ];
        // a ∘ a = 1 but 1 ∘ a = 1: identity law fails
        let r = FiniteCategory::new(vec!["x".into()], morphisms, vec![0], |g, f| {
            Some(if f == 1 && g <= 1 { 0 } else { g.max(f) })
        });
        assert!(r.is_err());
    }
}

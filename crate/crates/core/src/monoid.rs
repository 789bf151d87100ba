//! Finite monoids given by complete multiplication tables.
//!
//! Elements are indices `0..order`; the identity is always index 0. The
//! product `i·j` is stored at `table[i * order + j]`.

use std::collections::{BTreeMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{FiniteAlgebra, Operation};
use crate::elemset::ElemSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("monoid order must be positive")]
    EmptyOrder,
    #[error("table has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("table entry at position {position} is {value}, outside 0..{order}")]
    IndexOutOfRange {
        position: usize,
        value: usize,
        order: usize,
    },
    #[error("element 0 is not an identity: fails at element {element}")]
    NoIdentity { element: usize },
    #[error("identity must be element 0, found {0}")]
    IdentityNotZero(usize),
    #[error("not associative: ({i}·{j})·{k} ≠ {i}·({j}·{k})")]
    NotAssociative { i: usize, j: usize, k: usize },
    #[error("{found} names given for {order} elements")]
    NamesMismatch { order: usize, found: usize },
    #[error("ideals belong to different monoids or sides")]
    ParentMismatch,
    #[error("malformed monoid JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteMonoid {
    order: usize,
    table: Vec<usize>,
    names: Option<Vec<String>>,
}

/// Validates a flat product table and returns the monoid it describes.
///
/// Checks run in a fixed order (ranges, identity, associativity) and the
/// first violation found is reported.
pub fn verify_monoid_axioms(table: Vec<usize>, order: usize) -> Result<FiniteMonoid, MonoidError> {
    if order == 0 {
        return Err(MonoidError::EmptyOrder);
    }
    if table.len() != order * order {
        return Err(MonoidError::LengthMismatch {
            expected: order * order,
            found: table.len(),
        });
    }
    if let Some((position, &value)) = table.iter().enumerate().find(|(_, &v)| v >= order) {
        return Err(MonoidError::IndexOutOfRange {
            position,
            value,
            order,
        });
    }
    for x in 0..order {
        if table[x] != x || table[x * order] != x {
            return Err(MonoidError::NoIdentity { element: x });
        }
    }
    for i in 0..order {
        for j in 0..order {
            let ij = table[i * order + j];
            for k in 0..order {
                if table[ij * order + k] != table[i * order + table[j * order + k]] {
                    return Err(MonoidError::NotAssociative { i, j, k });
                }
            }
        }
    }
    Ok(FiniteMonoid {
        order,
        table,
        names: None,
    })
}

/// A table built by composing maps, hence associative; only the identity
/// row and column and the entry range are checked.
pub(crate) fn composition_monoid(table: Vec<usize>, order: usize) -> FiniteMonoid {
    assert_eq!(table.len(), order * order);
    assert!(table.iter().all(|&v| v < order));
    assert!((0..order).all(|x| table[x] == x && table[x * order] == x));
    FiniteMonoid {
        order,
        table,
        names: None,
    }
}

impl FiniteMonoid {
    pub fn trivial() -> Self {
        FiniteMonoid {
            order: 1,
            table: vec![0],
            names: None,
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, MonoidError> {
        if names.len() != self.order {
            return Err(MonoidError::NamesMismatch {
                order: self.order,
                found: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn name(&self, x: usize) -> String {
        match &self.names {
            Some(n) => n[x].clone(),
            None => x.to_string(),
        }
    }

    /// Looks up an element by display name.
    pub fn element(&self, name: &str) -> Option<usize> {
        (0..self.order).find(|&x| self.name(x) == name)
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    /// `x^n` with `x^0 = 1`.
    pub fn pow(&self, x: usize, n: usize) -> usize {
        (0..n).fold(0, |acc, _| self.mul(acc, x))
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.mul(x, x) == x
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Elements `x` with `x·x = x`, in increasing index order.
    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.order).filter(|&x| self.is_idempotent(x)).collect()
    }

    /// Whether all idempotents commute; otherwise the lexicographically least
    /// pair `(x, y)`, `x < y`, with `x·y ≠ y·x`.
    pub fn idempotents_commute(&self) -> CommuteVerdict {
        let idem = self.idempotents();
        let witness = idem
            .iter()
            .tuple_combinations()
            .find(|(&x, &y)| self.mul(x, y) != self.mul(y, x))
            .map(|(&x, &y)| (x, y));
        CommuteVerdict {
            commute: witness.is_none(),
            witness,
        }
    }

    /// The principal right ideal `aM` or left ideal `Ma`.
    pub fn ideal(&self, a: usize, side: Side) -> IdealSubset<'_> {
        assert!(a < self.order, "element {a} out of range");
        let members = ElemSet::from_iter(
            self.order,
            (0..self.order).map(|s| match side {
                Side::Right => self.mul(a, s),
                Side::Left => self.mul(s, a),
            }),
        );
        IdealSubset {
            parent: self,
            members,
            side,
            generator: a,
        }
    }

    /// For each unordered pair of idempotents `{x, y}`, the least `n ≥ 1` with
    /// `(xy)^n = (yx)^n`.
    ///
    /// The pair `((xy)^n, (yx)^n)` evolves by a fixed map, so the search stops
    /// as soon as a pair repeats: from then on the sequence is periodic.
    pub fn ri_sufficient(&self) -> RiSufficiency {
        let idem = self.idempotents();
        let mut pairs = Vec::new();
        let mut seen = HashSet::new();
        for (i, &x) in idem.iter().enumerate() {
            for &y in &idem[i..] {
                let (xy, yx) = (self.mul(x, y), self.mul(y, x));
                let (mut p, mut q) = (xy, yx);
                let mut exponent = None;
                seen.clear();
                for n in 1.. {
                    if p == q {
                        exponent = Some(n);
                        break;
                    }
                    if !seen.insert((p, q)) {
                        break;
                    }
                    p = self.mul(p, xy);
                    q = self.mul(q, yx);
                }
                pairs.push(PairExponent { x, y, exponent });
            }
        }
        RiSufficiency {
            holds: pairs.iter().all(|p| p.exponent.is_some()),
            pairs,
        }
    }

    /// Exponent for one pair, if it was checked.
    pub fn ri_exponent(&self, x: usize, y: usize) -> Option<usize> {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        self.ri_sufficient()
            .pairs
            .into_iter()
            .find(|p| p.x == x && p.y == y)
            .and_then(|p| p.exponent)
    }

    /// M acting on itself by right multiplication: one unary operation per
    /// element `m`, sending `x` to `x·m`.
    pub fn canonical_right_mset(&self) -> FiniteAlgebra {
        let n = self.order;
        let ops = (0..n)
            .map(|m| Operation {
                name: self.name(m),
                arity: 1,
                table: (0..n).map(|x| self.mul(x, m)).collect(),
            })
            .collect::<Vec<_>>();
        let names = (0..n).map(|x| self.name(x)).collect();
        FiniteAlgebra::new(n, ops)
            .and_then(|a| a.with_names(names))
            .expect("right multiplication tables are always valid")
    }

    /// Applies the relabelling `perm` (old index → new index), which must fix 0.
    pub fn permuted(&self, perm: &[usize]) -> FiniteMonoid {
        let n = self.order;
        assert_eq!(perm.len(), n);
        assert_eq!(perm[0], 0, "relabelling must fix the identity");
        let mut table = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                table[perm[i] * n + perm[j]] = perm[self.mul(i, j)];
            }
        }
        let names = self.names.as_ref().map(|names| {
            let mut out = vec![String::new(); n];
            for (i, name) in names.iter().enumerate() {
                out[perm[i]] = name.clone();
            }
            out
        });
        FiniteMonoid {
            order: n,
            table,
            names,
        }
    }

    /// Shortlex-least table among all identity-fixing relabellings.
    pub fn canonical_form(&self) -> FiniteMonoid {
        let n = self.order;
        let mut best = self.table.clone();
        let mut perm = vec![0; n];
        let mut candidate = vec![0; n * n];
        for rest in (1..n).permutations(n - 1) {
            perm[1..].copy_from_slice(&rest);
            relabel_into(&self.table, n, &perm, &mut candidate);
            if candidate < best {
                best.copy_from_slice(&candidate);
            }
        }
        FiniteMonoid {
            order: n,
            table: best,
            names: None,
        }
    }

    /// True when no identity-fixing relabelling yields a smaller table.
    pub fn is_canonical(&self) -> bool {
        is_canonical_table(&self.table, self.order)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MonoidFile {
            order: self.order,
            identity: 0,
            table: self.table.clone(),
            names: self.names.clone(),
        })
        .expect("monoid serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<FiniteMonoid, MonoidError> {
        let file: MonoidFile =
            serde_json::from_str(text).map_err(|e| MonoidError::Json(e.to_string()))?;
        if file.identity != 0 {
            return Err(MonoidError::IdentityNotZero(file.identity));
        }
        let m = verify_monoid_axioms(file.table, file.order)?;
        match file.names {
            Some(names) => m.with_names(names),
            None => Ok(m),
        }
    }
}

/// Table-only canonicity test used by the enumerator.
pub(crate) fn is_canonical_table(table: &[usize], n: usize) -> bool {
    let mut perm = vec![0; n];
    for rest in (1..n).permutations(n - 1) {
        perm[1..].copy_from_slice(&rest);
        // perm: old → new. Compare cell by cell in new row-major order.
        let mut inv = vec![0; n];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        for cell in 0..n * n {
            let (a, b) = (inv[cell / n], inv[cell % n]);
            let v = perm[table[a * n + b]];
            match v.cmp(&table[cell]) {
                std::cmp::Ordering::Less => return false,
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    true
}

fn relabel_into(table: &[usize], n: usize, perm: &[usize], out: &mut [usize]) {
    for i in 0..n {
        for j in 0..n {
            out[perm[i] * n + perm[j]] = perm[table[i * n + j]];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommuteVerdict {
    pub commute: bool,
    pub witness: Option<(usize, usize)>,
}

/// A principal one-sided ideal `aM` (right) or `Ma` (left).
#[derive(Debug, Clone)]
pub struct IdealSubset<'a> {
    pub parent: &'a FiniteMonoid,
    pub members: ElemSet,
    pub side: Side,
    pub generator: usize,
}

impl IdealSubset<'_> {
    pub fn names(&self) -> Vec<String> {
        self.members.iter().map(|x| self.parent.name(x)).collect()
    }
}

pub fn intersect_ideals(x: &IdealSubset<'_>, y: &IdealSubset<'_>) -> Result<ElemSet, MonoidError> {
    if x.side != y.side || !(std::ptr::eq(x.parent, y.parent) || x.parent == y.parent) {
        return Err(MonoidError::ParentMismatch);
    }
    Ok(x.members.intersection(&y.members))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairExponent {
    pub x: usize,
    pub y: usize,
    pub exponent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RiSufficiency {
    pub holds: bool,
    pub pairs: Vec<PairExponent>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MonoidFile {
    order: usize,
    identity: usize,
    table: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

/// Per-element isomorphism invariants: idempotency, principal ideal sizes and
/// the index/period of the cyclic submonoid.
fn element_invariants(m: &FiniteMonoid) -> Vec<(bool, usize, usize, usize, usize)> {
    (0..m.order)
        .map(|x| {
            let right = m.ideal(x, Side::Right).members.count();
            let left = m.ideal(x, Side::Left).members.count();
            let mut seen = BTreeMap::new();
            let mut p = x;
            let mut k = 1;
            let (index, period) = loop {
                if let Some(&first) = seen.get(&p) {
                    break (first, k - first);
                }
                seen.insert(p, k);
                p = m.mul(p, x);
                k += 1;
            };
            (m.is_idempotent(x), right, left, index, period)
        })
        .collect()
}

/// Decides whether two monoids are isomorphic; on success returns the
/// bijection `phi` (indices of `m` → indices of `n`) with `phi[0] = 0`.
pub fn monoid_isomorphic(m: &FiniteMonoid, n: &FiniteMonoid) -> Option<Vec<usize>> {
    if m.order != n.order {
        return None;
    }
    let inv_m = element_invariants(m);
    let inv_n = element_invariants(n);
    let mut sorted_m = inv_m.clone();
    let mut sorted_n = inv_n.clone();
    sorted_m.sort();
    sorted_n.sort();
    if sorted_m != sorted_n || inv_m[0] != inv_n[0] {
        return None;
    }
    let mut phi = vec![None; m.order];
    let mut used = vec![false; m.order];
    phi[0] = Some(0);
    used[0] = true;
    iso_search(m, n, &inv_m, &inv_n, phi, used)
}

fn iso_search(
    m: &FiniteMonoid,
    n: &FiniteMonoid,
    inv_m: &[(bool, usize, usize, usize, usize)],
    inv_n: &[(bool, usize, usize, usize, usize)],
    mut phi: Vec<Option<usize>>,
    mut used: Vec<bool>,
) -> Option<Vec<usize>> {
    // Propagate phi(a·b) = phi(a)·phi(b) until stable.
    loop {
        let mut changed = false;
        for a in 0..m.order {
            let Some(pa) = phi[a] else { continue };
            for b in 0..m.order {
                let Some(pb) = phi[b] else { continue };
                let target = n.mul(pa, pb);
                let ab = m.mul(a, b);
                match phi[ab] {
                    Some(t) if t != target => return None,
                    Some(_) => {}
                    None => {
                        if used[target] || inv_m[ab] != inv_n[target] {
                            return None;
                        }
                        phi[ab] = Some(target);
                        used[target] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let Some(next) = phi.iter().position(Option::is_none) else {
        return Some(phi.into_iter().map(Option::unwrap).collect());
    };
    for cand in 0..n.order {
        if used[cand] || inv_m[next] != inv_n[cand] {
            continue;
        }
        let mut phi2 = phi.clone();
        let mut used2 = used.clone();
        phi2[next] = Some(cand);
        used2[cand] = true;
        if let Some(found) = iso_search(m, n, inv_m, inv_n, phi2, used2) {
            return Some(found);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn two_element(z_squared: usize) -> FiniteMonoid {
        verify_monoid_axioms(vec![0, 1, 1, z_squared], 2).unwrap()
    }

    /// Direct table-scan oracle, independent of `idempotents`.
    fn scan_idempotents(m: &FiniteMonoid) -> Vec<usize> {
        let n = m.order();
        (0..n).filter(|&x| m.table()[x * n + x] == x).collect()
    }

    #[test]
    fn trivial_monoid() {
        let m = verify_monoid_axioms(vec![0], 1).unwrap();
        assert_eq!(m.order(), 1);
        assert_eq!(m.idempotents(), vec![0]);
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(
            verify_monoid_axioms(vec![1, 1, 1, 1], 2),
            Err(MonoidError::NoIdentity { element: 0 })
        );
        assert!(matches!(
            verify_monoid_axioms(vec![0, 1, 1, 2], 2),
            Err(MonoidError::IndexOutOfRange { position: 3, value: 2, .. })
        ));
        assert!(matches!(
            verify_monoid_axioms(vec![0, 1, 1], 2),
            Err(MonoidError::LengthMismatch { .. })
        ));
        // identity row/column fine, but a·a = b, a·b = a, b·a = b, b·b = a
        // breaks (a·a)·b = b·b = a versus a·(a·b) = a·a = b.
        let t = vec![0, 1, 2, 1, 2, 1, 2, 2, 1];
        assert!(matches!(
            verify_monoid_axioms(t, 3),
            Err(MonoidError::NotAssociative { .. })
        ));
    }

    #[test]
    fn fitzgerald_idempotents_and_ideals() {
        let s = builtin::fitzgerald_monoid();
        let names = |xs: Vec<usize>| xs.into_iter().map(|x| s.name(x)).collect::<Vec<_>>();
        assert_eq!(names(s.idempotents()), ["1", "e", "f", "g"]);
        assert_eq!(s.idempotents(), scan_idempotents(&s));

        let v = s.idempotents_commute();
        assert!(!v.commute);
        let (x, y) = v.witness.unwrap();
        assert_eq!((s.name(x).as_str(), s.name(y).as_str()), ("e", "f"));
        assert_eq!(s.name(s.mul(x, y)), "ef");
        assert_eq!(s.name(s.mul(y, x)), "fe");

        let e = s.element("e").unwrap();
        let f = s.element("f").unwrap();
        let g = s.element("g").unwrap();
        assert_eq!(s.ideal(e, Side::Right).names(), ["e", "g", "ef"]);
        assert_eq!(s.ideal(f, Side::Right).names(), ["f", "g", "fe"]);
        assert_eq!(s.ideal(g, Side::Right).names(), ["g"]);
        assert!(s.ideal(0, Side::Right).members.is_full());
        assert_eq!(s.ideal(f, Side::Left).names(), ["f", "g", "ef"]);

        let es = s.ideal(e, Side::Right);
        let fs = s.ideal(f, Side::Right);
        assert_eq!(intersect_ideals(&es, &fs).unwrap(), s.ideal(g, Side::Right).members);
        assert_eq!(intersect_ideals(&es, &es).unwrap(), es.members);
        let se = s.ideal(e, Side::Left);
        let sf = s.ideal(f, Side::Left);
        assert_eq!(intersect_ideals(&se, &sf).unwrap(), s.ideal(g, Side::Left).members);
        assert_eq!(intersect_ideals(&es, &se), Err(MonoidError::ParentMismatch));
        let other = FiniteMonoid::trivial();
        assert_eq!(
            intersect_ideals(&es, &other.ideal(0, Side::Right)),
            Err(MonoidError::ParentMismatch)
        );
    }

    #[test]
    fn cyclic_with_a_cubed_equal_a() {
        // {1, a, a²}, a³ = a
        let t = vec![0, 1, 2, 1, 2, 1, 2, 1, 2];
        let m = verify_monoid_axioms(t, 3).unwrap();
        assert_eq!(m.idempotents(), scan_idempotents(&m));
        assert_eq!(m.idempotents(), vec![0, 2]);
    }

    #[test]
    fn full_transformation_monoid_on_two_points() {
        let t2 = builtin::full_transformation_monoid(2);
        assert_eq!(t2.order(), 4);
        assert_eq!(scan_idempotents(&t2).len(), 3);
        let v = t2.idempotents_commute();
        assert!(!v.commute);
        assert!(v.witness.is_some());
        // Two constant maps: (xy)^n and (yx)^n are the two constants forever.
        let r = t2.ri_sufficient();
        assert!(!r.holds);
        assert_eq!(r.pairs.iter().filter(|p| p.exponent.is_none()).count(), 1);
    }

    #[test]
    fn ri_sufficient_exponents() {
        let s = builtin::fitzgerald_monoid();
        let e = s.element("e").unwrap();
        let f = s.element("f").unwrap();
        let r = s.ri_sufficient();
        assert!(r.holds);
        assert_eq!(s.ri_exponent(e, f), Some(2));
        assert_eq!(s.ri_exponent(f, e), Some(2));
        for p in &r.pairs {
            if p.x == 0 {
                assert_eq!(p.exponent, Some(1));
            }
        }
        let z = two_element(1);
        let r = z.ri_sufficient();
        assert!(r.holds);
        assert!(r.pairs.iter().all(|p| p.exponent == Some(1)));
    }

    #[test]
    fn canonical_right_mset_shapes() {
        let a = FiniteMonoid::trivial().canonical_right_mset();
        assert_eq!(a.size(), 1);
        assert_eq!(a.signature().len(), 1);
        let s = builtin::fitzgerald_monoid().canonical_right_mset();
        assert_eq!(s.size(), 6);
        assert_eq!(s.signature().len(), 6);
        assert!(s.signature().iter().all(|(_, arity)| arity == 1));
    }

    #[test]
    fn isomorphism_checks() {
        let s = builtin::fitzgerald_monoid();
        let e = s.element("e").unwrap();
        let f = s.element("f").unwrap();
        let ef = s.element("ef").unwrap();
        let fe = s.element("fe").unwrap();
        let mut perm: Vec<usize> = (0..6).collect();
        perm.swap(e, f);
        perm.swap(ef, fe);
        assert_eq!(s.permuted(&perm).table(), s.table());
        let swapped = s.permuted(&[0, 3, 5, 1, 2, 4]);
        assert_ne!(swapped.table(), s.table());
        let phi = monoid_isomorphic(&s, &swapped).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(phi[s.mul(a, b)], swapped.mul(phi[a], phi[b]));
            }
        }
        assert!(monoid_isomorphic(&s, &FiniteMonoid::trivial()).is_none());
        assert!(monoid_isomorphic(&two_element(1), &two_element(0)).is_none());
        assert!(monoid_isomorphic(&two_element(0), &two_element(0)).is_some());
    }

    #[test]
    fn canonical_form_is_invariant() {
        let s = builtin::fitzgerald_monoid();
        let p = vec![0, 3, 5, 1, 2, 4];
        let c1 = s.canonical_form();
        let c2 = s.permuted(&p).canonical_form();
        assert_eq!(c1.table(), c2.table());
        assert!(c1.is_canonical());
        assert!(monoid_isomorphic(&c1, &s).is_some());
    }

    #[test]
    fn json_round_trip() {
        let s = builtin::fitzgerald_monoid();
        let back = FiniteMonoid::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(matches!(
            FiniteMonoid::from_json(r#"{"order":1,"identity":1,"table":[0]}"#),
            Err(MonoidError::IdentityNotZero(1))
        ));
    }
}

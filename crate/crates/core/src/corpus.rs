//! Generators for families of test algebras: plain sets, pointed sets,
//! G-sets for finite abelian groups, finite abelian groups themselves and
//! canonical right M-sets. Every generator validates the equational laws of
//! its family before returning.

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, Operation};
use crate::builtin;
use crate::monoid::{FiniteMonoid, MonoidError};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown corpus family `{0}`")]
    UnknownFamily(String),
    #[error("bad corpus parameter `{0}`")]
    BadParameter(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("orbit size {size} is not the index of a subgroup of {group}")]
    NoSuchOrbit { size: usize, group: String },
    #[error("generated algebra violates its laws: {0}")]
    LawViolation(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// A finite abelian group `Z/n_1 × … × Z/n_k`; elements are mixed-radix
/// indices with the first factor most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    moduli: Vec<usize>,
}

impl AbelianGroup {
    pub fn new(moduli: Vec<usize>) -> Self {
        assert!(moduli.iter().all(|&m| m >= 1), "moduli must be positive");
        AbelianGroup { moduli }
    }

    /// Parses `Z4`, `Z/4`, `Z2xZ2`, `Z/2×Z/2`.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let bad = || CorpusError::BadParameter(text.to_string());
        let moduli = text
            .split(['x', '×', '*'])
            .map(|part| {
                let digits = part.trim().trim_start_matches('Z').trim_start_matches('/');
                digits.parse::<usize>().ok().filter(|&m| m >= 1).ok_or_else(bad)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AbelianGroup::new(moduli))
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product()
    }

    fn digits(&self, mut x: usize) -> Vec<usize> {
        let mut d = vec![0; self.moduli.len()];
        for (slot, &m) in d.iter_mut().zip(&self.moduli).rev() {
            *slot = x % m;
            x /= m;
        }
        d
    }

    fn undigits(&self, d: &[usize]) -> usize {
        d.iter().zip(&self.moduli).fold(0, |acc, (&v, &m)| acc * m + v)
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.digits(x), self.digits(y));
        let sum: Vec<usize> = a
            .iter()
            .zip(&b)
            .zip(&self.moduli)
            .map(|((p, q), m)| (p + q) % m)
            .collect();
        self.undigits(&sum)
    }

    pub fn neg(&self, x: usize) -> usize {
        let d: Vec<usize> = self
            .digits(x)
            .iter()
            .zip(&self.moduli)
            .map(|(v, m)| (m - v) % m)
            .collect();
        self.undigits(&d)
    }

    pub fn element_name(&self, x: usize) -> String {
        let d = self.digits(x);
        if d.len() == 1 {
            d[0].to_string()
        } else {
            let parts: Vec<String> = d.iter().map(|v| v.to_string()).collect();
            format!("({})", parts.join(","))
        }
    }

    /// All subgroups as sorted element lists, ordered by decreasing size and
    /// then lexicographically.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut found: Vec<Vec<usize>> = Vec::new();
        // Every subgroup of a group of order ≤ 8 is generated by at most three elements.
        let mut gens: Vec<Vec<usize>> = vec![vec![]];
        for g in 0..n {
            gens.push(vec![g]);
            for h in g + 1..n {
                gens.push(vec![g, h]);
                for k in h + 1..n {
                    gens.push(vec![g, h, k]);
                }
            }
        }
        for gs in gens {
            let mut members = vec![false; n];
            members[0] = true;
            let mut changed = true;
            while changed {
                changed = false;
                for x in 0..n {
                    if !members[x] {
                        continue;
                    }
                    for &g in &gs {
                        let y = self.add(x, g);
                        if !members[y] {
                            members[y] = true;
                            changed = true;
                        }
                    }
                }
            }
            let sub: Vec<usize> = (0..n).filter(|&x| members[x]).collect();
            if !found.contains(&sub) {
                found.push(sub);
            }
        }
        found.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        found
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z{m}")).collect();
        f.write_str(&parts.join("x"))
    }
}

/// Abelian groups of order at most `max`, one per isomorphism class.
pub fn abelian_groups_up_to(max: usize) -> Vec<AbelianGroup> {
    // Invariant-factor decompositions n_1 | n_2 | … with product ≤ max.
    fn go(max: usize, prefix: &mut Vec<usize>, out: &mut Vec<AbelianGroup>) {
        let product: usize = prefix.iter().product();
        let last = prefix.last().copied().unwrap_or(1);
        if !prefix.is_empty() {
            out.push(AbelianGroup::new(prefix.clone()));
        }
        let mut next = if prefix.is_empty() { 2 } else { last };
        while product * next <= max {
            if next % last == 0 {
                prefix.push(next);
                go(max, prefix, out);
                prefix.pop();
            }
            next += 1;
        }
    }
    let mut out = vec![AbelianGroup::new(vec![1])];
    go(max, &mut Vec::new(), &mut out);
    out.sort_by_key(|g| (g.order(), g.moduli.len()));
    out
}

/// A plain set: `n` elements, empty signature.
pub fn gen_set(n: usize) -> FiniteAlgebra {
    FiniteAlgebra::new(n, vec![]).expect("empty signature is always valid")
}

/// A pointed set of size `n ≥ 1`; the point is element 0, named `*`.
pub fn gen_pointed_set(n: usize) -> FiniteAlgebra {
    assert!(n >= 1, "a pointed set needs its point");
    let op = Operation {
        name: "*".into(),
        arity: 0,
        table: vec![0],
    };
    let names = std::iter::once("*".to_string())
        .chain((1..n).map(|i| i.to_string()))
        .collect();
    FiniteAlgebra::new(n, vec![op])
        .and_then(|a| a.with_names(names))
        .expect("valid pointed set")
}

/// The group as an algebra with binary `+`, unary `-` and constant `0`.
pub fn gen_abelian(g: &AbelianGroup) -> FiniteAlgebra {
    let n = g.order();
    let add = Operation {
        name: "+".into(),
        arity: 2,
        table: (0..n * n).map(|i| g.add(i / n, i % n)).collect(),
    };
    let neg = Operation {
        name: "-".into(),
        arity: 1,
        table: (0..n).map(|x| g.neg(x)).collect(),
    };
    let zero = Operation {
        name: "0".into(),
        arity: 0,
        table: vec![0],
    };
    let names = (0..n).map(|x| g.element_name(x)).collect();
    let a = FiniteAlgebra::new(n, vec![add, neg, zero])
        .and_then(|a| a.with_names(names))
        .expect("group tables are valid");
    check_group_laws(&a).expect("generated group satisfies the group laws");
    a
}

/// Checks the abelian group laws on an algebra with operations `+`, `-`, `0`.
pub fn check_group_laws(a: &FiniteAlgebra) -> Result<(), CorpusError> {
    let op = |name: &str| {
        a.operations()
            .iter()
            .position(|o| o.name == name)
            .ok_or_else(|| CorpusError::LawViolation(format!("missing operation `{name}`")))
    };
    let (add, neg, zero) = (op("+")?, op("-")?, op("0")?);
    let z = a.apply(zero, &[]);
    let n = a.size();
    let fail = |law: &str| Err(CorpusError::LawViolation(law.to_string()));
    for x in 0..n {
        if a.apply(add, &[x, z]) != x {
            return fail("x + 0 = x");
        }
        if a.apply(add, &[x, a.apply(neg, &[x])]) != z {
            return fail("x + (-x) = 0");
        }
        for y in 0..n {
            if a.apply(add, &[x, y]) != a.apply(add, &[y, x]) {
                return fail("x + y = y + x");
            }
            for w in 0..n {
                let l = a.apply(add, &[a.apply(add, &[x, y]), w]);
                let r = a.apply(add, &[x, a.apply(add, &[y, w])]);
                if l != r {
                    return fail("(x + y) + w = x + (y + w)");
                }
            }
        }
    }
    Ok(())
}

/// A G-set given as a disjoint union of coset spaces `G/H`, one per listed
/// subgroup. There is one unary operation per group element `h`, sending the
/// coset `x + H` to `x + h + H`.
pub fn gen_gset(g: &AbelianGroup, orbits: &[Vec<usize>]) -> FiniteAlgebra {
    let n = g.order();
    // (orbit, representative) per point, and the point index of each coset.
    let mut points: Vec<(usize, usize)> = Vec::new();
    let mut locate: Vec<Vec<usize>> = Vec::new();
    for (o, h) in orbits.iter().enumerate() {
        let mut coset_of = vec![usize::MAX; n];
        for x in 0..n {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let id = points.len();
            points.push((o, x));
            for &y in h {
                coset_of[g.add(x, y)] = id;
            }
        }
        locate.push(coset_of);
    }
    let size = points.len();
    let ops = (0..n)
        .map(|h| Operation {
            name: format!("act{}", g.element_name(h)),
            arity: 1,
            table: points
                .iter()
                .map(|&(o, x)| locate[o][g.add(x, h)])
                .collect(),
        })
        .collect();
    let names = points
        .iter()
        .map(|&(o, x)| format!("o{o}:{}", g.element_name(x)))
        .collect();
    let a = FiniteAlgebra::new(size, ops)
        .and_then(|a| a.with_names(names))
        .expect("coset actions are valid");
    check_action_laws(g, &a).expect("generated G-set satisfies the action laws");
    a
}

/// Orbits specified by size; for each size the `k`-th subgroup of that index
/// is taken when written `size/k` (default `k = 0`).
pub fn gen_gset_by_sizes(g: &AbelianGroup, orbits: &[&str]) -> Result<FiniteAlgebra, CorpusError> {
    let subgroups = g.subgroups();
    let mut chosen = Vec::new();
    for spec in orbits {
        let (size, which) = match spec.split_once('/') {
            Some((s, k)) => (s.trim(), k.trim()),
            None => (spec.trim(), "0"),
        };
        let bad = || CorpusError::BadParameter(spec.to_string());
        let size: usize = size.parse().map_err(|_| bad())?;
        let which: usize = which.parse().map_err(|_| bad())?;
        let h = subgroups
            .iter()
            .filter(|h| size > 0 && h.len() * size == g.order())
            .nth(which)
            .ok_or_else(|| CorpusError::NoSuchOrbit {
                size,
                group: g.to_string(),
            })?;
        chosen.push(h.clone());
    }
    Ok(gen_gset(g, &chosen))
}

/// Every G-set of size at most `max_size`, as multisets of coset spaces.
pub fn all_gsets(g: &AbelianGroup, max_size: usize) -> Vec<FiniteAlgebra> {
    let subgroups = g.subgroups();
    let mut out = Vec::new();
    fn go(
        g: &AbelianGroup,
        subgroups: &[Vec<usize>],
        start: usize,
        room: usize,
        chosen: &mut Vec<Vec<usize>>,
        out: &mut Vec<FiniteAlgebra>,
    ) {
        out.push(gen_gset(g, chosen));
        for (i, h) in subgroups.iter().enumerate().skip(start) {
            let index = g.order() / h.len();
            if index <= room {
                chosen.push(h.clone());
                go(g, subgroups, i, room - index, chosen, out);
                chosen.pop();
            }
        }
    }
    go(g, &subgroups, 0, max_size, &mut Vec::new(), &mut out);
    out
}

/// Checks `x·0 = x` and `(x·g)·h = x·(g+h)` for a G-set generated by [`gen_gset`].
pub fn check_action_laws(g: &AbelianGroup, a: &FiniteAlgebra) -> Result<(), CorpusError> {
    let n = g.order();
    if a.operations().len() != n || a.operations().iter().any(|o| o.arity != 1) {
        return Err(CorpusError::LawViolation("one unary operation per group element".into()));
    }
    let act = |x: usize, h: usize| a.operations()[h].table[x];
    for x in 0..a.size() {
        if act(x, 0) != x {
            return Err(CorpusError::LawViolation("x·0 = x".into()));
        }
        for p in 0..n {
            for q in 0..n {
                if act(act(x, p), q) != act(x, g.add(p, q)) {
                    return Err(CorpusError::LawViolation("(x·g)·h = x·(g+h)".into()));
                }
            }
        }
    }
    Ok(())
}

/// Checks the right action laws of a canonical M-set: `x·1 = x` and
/// `(x·m)·k = x·(mk)`.
pub fn check_mset_laws(m: &FiniteMonoid, a: &FiniteAlgebra) -> Result<(), CorpusError> {
    let act = |x: usize, s: usize| a.operations()[s].table[x];
    for x in 0..a.size() {
        if act(x, 0) != x {
            return Err(CorpusError::LawViolation("x·1 = x".into()));
        }
        for s in 0..m.order() {
            for t in 0..m.order() {
                if act(act(x, s), t) != act(x, m.mul(s, t)) {
                    return Err(CorpusError::LawViolation("(x·m)·k = x·(mk)".into()));
                }
            }
        }
    }
    Ok(())
}

pub fn gen_canonical_mset(m: &FiniteMonoid) -> FiniteAlgebra {
    let a = m.canonical_right_mset();
    check_mset_laws(m, &a).expect("right multiplication is an action");
    a
}

/// Where an algebra comes from, as written on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusSpec {
    Set(usize),
    PointedSet(usize),
    GSet(AbelianGroup, Vec<String>),
    Abelian(AbelianGroup),
    CanonicalMset(PathBuf),
    Builtin(String),
}

impl CorpusSpec {
    /// Parses `set:N`, `pointed_set:N`, `gset:G:o1,o2,…`, `abelian:G`,
    /// `mset:PATH` (or `mset:builtin:NAME`) and `builtin:NAME`, with or
    /// without a leading `corpus:`.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let text = text.strip_prefix("corpus:").unwrap_or(text);
        let (family, rest) = text.split_once(':').unwrap_or((text, ""));
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| CorpusError::BadParameter(s.to_string()))
        };
        match family {
            "set" => Ok(CorpusSpec::Set(num(rest)?)),
            "pointed_set" | "pointed" => {
                let n = num(rest)?;
                if n == 0 {
                    return Err(CorpusError::BadParameter(rest.into()));
                }
                Ok(CorpusSpec::PointedSet(n))
            }
            "abelian" => Ok(CorpusSpec::Abelian(AbelianGroup::parse(rest)?)),
            "gset" => {
                let (group, orbits) = rest.split_once(':').unwrap_or((rest, ""));
                let orbits = orbits
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect();
                Ok(CorpusSpec::GSet(AbelianGroup::parse(group)?, orbits))
            }
            "mset" => Ok(CorpusSpec::CanonicalMset(PathBuf::from(rest))),
            "builtin" => Ok(CorpusSpec::Builtin(rest.to_string())),
            other => Err(CorpusError::UnknownFamily(other.to_string())),
        }
    }

    pub fn generate(&self) -> Result<FiniteAlgebra, CorpusError> {
        match self {
            CorpusSpec::Set(n) => Ok(gen_set(*n)),
            CorpusSpec::PointedSet(n) => Ok(gen_pointed_set(*n)),
            CorpusSpec::Abelian(g) => Ok(gen_abelian(g)),
            CorpusSpec::GSet(g, orbits) => {
                let refs: Vec<&str> = orbits.iter().map(String::as_str).collect();
                gen_gset_by_sizes(g, &refs)
            }
            CorpusSpec::CanonicalMset(path) => {
                let m = match path.to_str().and_then(|p| p.strip_prefix("builtin:")) {
                    Some(name) => builtin::monoid_by_name(name)
                        .ok_or_else(|| CorpusError::UnknownBuiltin(name.to_string()))?,
                    None => {
                        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
                            path: path.clone(),
                            source,
                        })?;
                        FiniteMonoid::from_json(&text)?
                    }
                };
                Ok(gen_canonical_mset(&m))
            }
            CorpusSpec::Builtin(name) => builtin::algebra_by_name(name)
                .ok_or_else(|| CorpusError::UnknownBuiltin(name.clone())),
        }
    }
}

/// The groups whose G-sets form the G-set family.
pub fn gset_groups() -> Vec<AbelianGroup> {
    vec![
        AbelianGroup::new(vec![2]),
        AbelianGroup::new(vec![3]),
        AbelianGroup::new(vec![4]),
        AbelianGroup::new(vec![2, 2]),
    ]
}

/// Orbit sizes of a generated G-set, read off the `o{k}:` element names.
fn orbit_sizes(a: &FiniteAlgebra) -> String {
    let mut sizes: Vec<usize> = Vec::new();
    let mut last = None;
    for x in 0..a.size() {
        let name = a.name(x);
        let orbit = name.split(':').next().map(String::from);
        if orbit != last {
            sizes.push(0);
            last = orbit;
        }
        *sizes.last_mut().expect("pushed above") += 1;
    }
    sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Every corpus algebra with carrier size at most `max_size`, labelled.
pub fn small_corpus(max_size: usize) -> Vec<(String, FiniteAlgebra)> {
    let mut out = Vec::new();
    for n in 0..=max_size {
        out.push((format!("set:{n}"), gen_set(n)));
    }
    for n in 1..=max_size {
        out.push((format!("pointed_set:{n}"), gen_pointed_set(n)));
    }
    for g in abelian_groups_up_to(max_size) {
        out.push((format!("abelian:{g}"), gen_abelian(&g)));
    }
    for g in gset_groups() {
        for (i, a) in all_gsets(&g, max_size).into_iter().enumerate() {
            out.push((format!("gset:{g}:{}#{i}", orbit_sizes(&a)), a));
        }
    }
    out.push(("builtin:singleton".into(), builtin::singleton()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_group_lists() {
        let names: Vec<String> = abelian_groups_up_to(8).iter().map(|g| g.to_string()).collect();
        assert_eq!(
            names,
            ["Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "Z7", "Z8", "Z2xZ4", "Z2xZ2xZ2"]
        );
        assert_eq!(AbelianGroup::parse("Z/2×Z/2").unwrap(), AbelianGroup::new(vec![2, 2]));
        assert!(AbelianGroup::parse("Q8").is_err());
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(AbelianGroup::new(vec![4]).subgroups().len(), 3);
        assert_eq!(AbelianGroup::new(vec![2, 2]).subgroups().len(), 5);
        assert_eq!(AbelianGroup::new(vec![2, 2, 2]).subgroups().len(), 16);
    }

    #[test]
    fn gsets() {
        let z2 = AbelianGroup::new(vec![2]);
        let a = gen_gset_by_sizes(&z2, &["2", "1"]).unwrap();
        assert_eq!(a.size(), 3);
        assert_eq!(a.operations().len(), 2);
        assert!(matches!(
            gen_gset_by_sizes(&z2, &["3"]),
            Err(CorpusError::NoSuchOrbit { size: 3, .. })
        ));
        let klein = AbelianGroup::new(vec![2, 2]);
        let x = gen_gset_by_sizes(&klein, &["2/0"]).unwrap();
        let y = gen_gset_by_sizes(&klein, &["2/1"]).unwrap();
        assert_ne!(x, y);
        // Z2-sets of size ≤ 2: ∅, 1, 1+1, 2
        assert_eq!(all_gsets(&z2, 2).len(), 4);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(CorpusSpec::parse("corpus:set:3").unwrap(), CorpusSpec::Set(3));
        assert_eq!(CorpusSpec::parse("pointed_set:2").unwrap(), CorpusSpec::PointedSet(2));
        assert!(CorpusSpec::parse("pointed_set:0").is_err());
        assert!(CorpusSpec::parse("torus:3").is_err());
        let a = CorpusSpec::parse("corpus:gset:Z2:2,1").unwrap().generate().unwrap();
        assert_eq!(a.size(), 3);
        let fitz = CorpusSpec::parse("mset:builtin:fitzgerald").unwrap().generate().unwrap();
        assert_eq!(fitz, builtin::fitzgerald_algebra());
        assert_eq!(gen_set(0).size(), 0);
    }

    #[test]
    fn law_validators_reject_bad_tables() {
        let bad = FiniteAlgebra::new(
            2,
            vec![Operation {
                name: "act0".into(),
                arity: 1,
                table: vec![1, 0],
            }],
        )
        .unwrap();
        assert!(check_action_laws(&AbelianGroup::new(vec![1]), &bad).is_err());
        let not_group = FiniteAlgebra::new(
            2,
            vec![
                Operation { name: "+".into(), arity: 2, table: vec![0, 0, 0, 0] },
                Operation { name: "-".into(), arity: 1, table: vec![0, 1] },
                Operation { name: "0".into(), arity: 0, table: vec![0] },
            ],
        )
        .unwrap();
        assert!(check_group_laws(&not_group).is_err());
    }
}

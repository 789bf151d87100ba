//! Congruences, joins and quotient algebras.

use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;

use crate::algebra::{AlgebraError, FiniteAlgebra, Operation};

/// Largest carrier accepted by [`enumerate_congruences`].
pub const CONGRUENCE_ENUM_LIMIT: usize = 8;

/// An equivalence relation on the carrier, stored as block ids numbered by
/// first occurrence so that equal relations have equal arrays.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    block_ids: Vec<usize>,
}

impl Congruence {
    /// Canonicalizes arbitrary labels: `x ≡ y` iff `labels[x] == labels[y]`.
    /// Compatibility is not checked.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut renumber = std::collections::HashMap::new();
        let block_ids = labels
            .iter()
            .map(|l| {
                let next = renumber.len();
                *renumber.entry(*l).or_insert(next)
            })
            .collect();
        Congruence { block_ids }
    }

    /// Wraps a partition after checking it is compatible with every operation.
    pub fn from_partition(a: &FiniteAlgebra, labels: &[usize]) -> Result<Self, AlgebraError> {
        if labels.len() != a.size() {
            return Err(AlgebraError::ParentMismatch);
        }
        let c = Self::from_labels(labels);
        c.check_compatible(a)?;
        Ok(c)
    }

    pub fn discrete(n: usize) -> Self {
        Congruence {
            block_ids: (0..n).collect(),
        }
    }

    pub fn total(n: usize) -> Self {
        Congruence {
            block_ids: vec![0; n],
        }
    }

    pub fn block_ids(&self) -> &[usize] {
        &self.block_ids
    }

    pub fn universe(&self) -> usize {
        self.block_ids.len()
    }

    pub fn block_count(&self) -> usize {
        self.block_ids.iter().max().map_or(0, |m| m + 1)
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.block_ids[x] == self.block_ids[y]
    }

    pub fn is_total(&self) -> bool {
        self.block_count() <= 1
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (x, &b) in self.block_ids.iter().enumerate() {
            blocks[b].push(x);
        }
        blocks
    }

    pub fn blocks_named(&self, a: &FiniteAlgebra) -> Vec<Vec<String>> {
        self.blocks()
            .into_iter()
            .map(|b| b.into_iter().map(|x| a.name(x)).collect())
            .collect()
    }

    /// `self ⊆ other` as relations.
    pub fn refines(&self, other: &Congruence) -> bool {
        self.universe() == other.universe()
            && self.blocks().iter().all(|b| b.iter().all(|&x| other.related(b[0], x)))
    }

    /// Checks that every operation respects the partition; reports the first
    /// tuple whose single-coordinate change to its block representative moves
    /// the result to another block.
    pub fn check_compatible(&self, a: &FiniteAlgebra) -> Result<(), AlgebraError> {
        if self.universe() != a.size() {
            return Err(AlgebraError::ParentMismatch);
        }
        let reps: Vec<usize> = self.blocks().iter().map(|b| b[0]).collect();
        for (k, op) in a.operations().iter().enumerate() {
            for (idx, &out) in op.table.iter().enumerate() {
                let tuple = a.decode_tuple(idx, op.arity);
                for pos in 0..op.arity {
                    let mut moved = tuple.clone();
                    moved[pos] = reps[self.block_ids[tuple[pos]]];
                    if !self.related(out, a.apply(k, &moved)) {
                        return Err(AlgebraError::IncompatiblePartition {
                            op: op.name.clone(),
                            tuple,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Closes a union-find partition under compatibility with every operation.
fn close_under_operations(a: &FiniteAlgebra, uf: &mut UnionFind<usize>) {
    loop {
        let mut changed = false;
        for (k, op) in a.operations().iter().enumerate() {
            match op.arity {
                0 => {}
                1 => {
                    for x in 0..a.size() {
                        let r = uf.find_mut(x);
                        if r != x {
                            changed |= uf.union(op.table[x], op.table[r]);
                        }
                    }
                }
                _ => {
                    for (idx, &out) in op.table.iter().enumerate() {
                        let tuple = a.decode_tuple(idx, op.arity);
                        for pos in 0..op.arity {
                            let r = uf.find_mut(tuple[pos]);
                            if r != tuple[pos] {
                                let mut moved = tuple.clone();
                                moved[pos] = r;
                                changed |= uf.union(out, a.apply(k, &moved));
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// The congruence generated by a set of pairs together with existing congruences.
fn generated<'c>(
    a: &FiniteAlgebra,
    parts: impl IntoIterator<Item = &'c Congruence>,
    pairs: &[(usize, usize)],
) -> Congruence {
    let mut uf = UnionFind::new(a.size());
    for c in parts {
        for block in c.blocks() {
            for &x in &block[1..] {
                uf.union(block[0], x);
            }
        }
    }
    for &(x, y) in pairs {
        uf.union(x, y);
    }
    close_under_operations(a, &mut uf);
    Congruence::from_labels(&uf.into_labeling())
}

/// Least congruence containing both `rho` and `sigma`.
pub fn congruence_join(
    a: &FiniteAlgebra,
    rho: &Congruence,
    sigma: &Congruence,
) -> Result<Congruence, AlgebraError> {
    if rho.universe() != a.size() || sigma.universe() != a.size() {
        return Err(AlgebraError::ParentMismatch);
    }
    Ok(generated(a, [rho, sigma], &[]))
}

/// The principal congruence `Cg(x, y)`.
pub fn principal_congruence(a: &FiniteAlgebra, x: usize, y: usize) -> Congruence {
    generated(a, [], &[(x, y)])
}

/// All congruences of `a`, as joins of principal congruences, sorted by their
/// block-id arrays.
pub fn enumerate_congruences(a: &FiniteAlgebra) -> Result<Vec<Congruence>, AlgebraError> {
    if a.size() > CONGRUENCE_ENUM_LIMIT {
        return Err(AlgebraError::SizeLimitExceeded {
            size: a.size(),
            limit: CONGRUENCE_ENUM_LIMIT,
        });
    }
    let n = a.size();
    let principal: BTreeSet<Congruence> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .map(|(x, y)| principal_congruence(a, x, y))
        .collect();
    let mut all: BTreeSet<Congruence> = BTreeSet::new();
    all.insert(Congruence::discrete(n));
    let mut frontier: Vec<Congruence> = all.iter().cloned().collect();
    while let Some(c) = frontier.pop() {
        for p in &principal {
            let j = generated(a, [&c, p], &[]);
            if all.insert(j.clone()) {
                frontier.push(j);
            }
        }
    }
    Ok(all.into_iter().collect())
}

/// `a / rho` together with the projection `x ↦ [x]`.
///
/// Blocks are numbered as in `rho`; each operation is evaluated on the least
/// element of every block.
pub fn quotient_algebra(
    a: &FiniteAlgebra,
    rho: &Congruence,
) -> Result<(FiniteAlgebra, Vec<usize>), AlgebraError> {
    rho.check_compatible(a)?;
    let blocks = rho.blocks();
    let reps: Vec<usize> = blocks.iter().map(|b| b[0]).collect();
    let m = blocks.len();
    let ops = a
        .operations()
        .iter()
        .enumerate()
        .map(|(k, op)| {
            let table = crate::algebra::product(&(0..m).collect::<Vec<_>>(), op.arity)
                .map(|t| {
                    let args: Vec<usize> = t.iter().map(|&b| reps[b]).collect();
                    rho.block_ids[a.apply(k, &args)]
                })
                .collect();
            Operation {
                name: op.name.clone(),
                arity: op.arity,
                table,
            }
        })
        .collect();
    let mut q = FiniteAlgebra::new(m, ops)?;
    if a.names().is_some() {
        let names = blocks
            .iter()
            .map(|b| {
                let parts: Vec<String> = b.iter().map(|&x| a.name(x)).collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect();
        q = q.with_names(names)?;
    }
    Ok((q, rho.block_ids.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::corpus;
    use crate::hom::{algebra_isomorphic, endomorphisms, EndoMap};

    /// Restricted growth strings: every set partition of `0..n` exactly once.
    fn all_partitions(n: usize) -> Vec<Vec<usize>> {
        fn go(n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for b in 0..=max + 1 {
                cur.push(b);
                go(n, cur, max.max(b), out);
                cur.pop();
            }
        }
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        let mut cur = vec![0];
        go(n, &mut cur, 0, &mut out);
        out
    }

    /// Oracle: filter every partition by a direct all-pairs compatibility test.
    fn congruences_by_filter(a: &FiniteAlgebra) -> Vec<Congruence> {
        let mut out: Vec<Congruence> = all_partitions(a.size())
            .into_iter()
            .filter(|p| {
                a.operations().iter().enumerate().all(|(k, op)| {
                    let tuples: Vec<Vec<usize>> = (0..op.table.len())
                        .map(|i| a.decode_tuple(i, op.arity))
                        .collect();
                    tuples.iter().all(|s| {
                        tuples.iter().all(|t| {
                            !s.iter().zip(t).all(|(x, y)| p[*x] == p[*y])
                                || p[a.apply(k, s)] == p[a.apply(k, t)]
                        })
                    })
                })
            })
            .map(|p| Congruence::from_labels(&p))
            .collect();
        out.sort();
        out
    }

    fn paper_kernels() -> (FiniteAlgebra, [Congruence; 4]) {
        let a = builtin::fitzgerald_algebra();
        let s = builtin::fitzgerald_monoid();
        let k = |name: &str| {
            let x = s.element(name).unwrap();
            EndoMap::new(&a, (0..6).map(|y| s.mul(x, y)).collect())
                .unwrap()
                .kernel_congruence(&a)
        };
        let ks = [k("1"), k("e"), k("f"), k("g")];
        (a, ks)
    }

    #[test]
    fn partition_oracle_counts() {
        assert_eq!(all_partitions(3).len(), 5);
        assert_eq!(all_partitions(5).len(), 52);
    }

    #[test]
    fn paper_joins() {
        let (a, [r1, re, rf, rg]) = paper_kernels();
        assert_eq!(
            rf.blocks_named(&a),
            vec![vec!["1", "f"], vec!["e", "fe"], vec!["g", "ef"]]
        );
        let j = congruence_join(&a, &re, &rf).unwrap();
        assert!(j.is_total());
        assert_eq!(j, rg);
        assert_eq!(congruence_join(&a, &re, &re).unwrap(), re);
        assert_eq!(congruence_join(&a, &r1, &rf).unwrap(), rf);
        assert_eq!(
            congruence_join(&a, &re, &Congruence::discrete(3)),
            Err(AlgebraError::ParentMismatch)
        );
    }

    #[test]
    fn enumeration_matches_filter_oracle() {
        let algebras = [
            builtin::fitzgerald_algebra(),
            builtin::singleton(),
            corpus::gen_set(3),
            corpus::gen_pointed_set(4),
            corpus::gen_abelian(&corpus::AbelianGroup::new(vec![2, 2])),
            corpus::gen_abelian(&corpus::AbelianGroup::new(vec![6])),
        ];
        for a in &algebras {
            assert_eq!(enumerate_congruences(a).unwrap(), congruences_by_filter(a));
        }
        assert_eq!(enumerate_congruences(&builtin::fitzgerald_algebra()).unwrap().len(), 16);
        assert_eq!(enumerate_congruences(&builtin::singleton()).unwrap().len(), 1);
        assert_eq!(enumerate_congruences(&corpus::gen_set(3)).unwrap().len(), 5);
        assert!(enumerate_congruences(&corpus::gen_set(9)).is_err());
    }

    #[test]
    fn join_is_least_upper_bound() {
        for a in [corpus::gen_pointed_set(4), corpus::gen_abelian(&corpus::AbelianGroup::new(vec![4]))] {
            let all = enumerate_congruences(&a).unwrap();
            for r in &all {
                for s in &all {
                    let j = congruence_join(&a, r, s).unwrap();
                    let least = all
                        .iter()
                        .filter(|c| r.refines(c) && s.refines(c))
                        .find(|c| all.iter().filter(|d| r.refines(d) && s.refines(d)).all(|d| c.refines(d)))
                        .unwrap();
                    assert_eq!(&j, least);
                }
            }
        }
    }

    #[test]
    fn quotients() {
        let (a, [r1, re, _, rg]) = paper_kernels();
        let (q, proj) = quotient_algebra(&a, &re).unwrap();
        assert_eq!(q.size(), 3);
        assert_eq!(FiniteAlgebra::is_homomorphism(&proj, &a, &q), Ok(None));
        let e = a.element("e").unwrap();
        let es = a.subalgebra_closure(&crate::elemset::ElemSet::from_iter(6, [e]));
        let (es_alg, _) = a.induced(&es);
        assert!(algebra_isomorphic(&q, &es_alg).is_some());

        let (q1, _) = quotient_algebra(&a, &r1).unwrap();
        assert!(algebra_isomorphic(&q1, &a).is_some());
        assert_eq!(quotient_algebra(&a, &rg).unwrap().0.size(), 1);

        let bad = Congruence::from_labels(&[0, 1, 0, 0, 0, 0]);
        assert!(matches!(
            quotient_algebra(&a, &bad),
            Err(AlgebraError::IncompatiblePartition { .. })
        ));
        assert!(Congruence::from_partition(&a, &[0, 1, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn kernels_of_endomorphisms_are_congruences() {
        let a = corpus::gen_abelian(&corpus::AbelianGroup::new(vec![2, 4]));
        for f in &endomorphisms(&a).unwrap().maps {
            let k = f.kernel_congruence(&a);
            assert!(k.check_compatible(&a).is_ok());
            let (q, proj) = quotient_algebra(&a, &k).unwrap();
            assert_eq!(FiniteAlgebra::is_homomorphism(&proj, &a, &q), Ok(None));
        }
    }
}

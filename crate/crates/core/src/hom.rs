//! Homomorphism search and endomorphism monoids.

use std::collections::HashMap;

use crate::algebra::{AlgebraError, FiniteAlgebra, Subalgebra};
use crate::congruence::Congruence;
use crate::elemset::ElemSet;
use crate::monoid::{composition_monoid, FiniteMonoid};

/// Default carrier-size guard for endomorphism searches.
pub const DEFAULT_ENDO_LIMIT: usize = 10;

const UNSET: usize = usize::MAX;

/// Depth-first search for homomorphisms `a → b`.
///
/// Images are assigned in carrier order. Whenever all arguments of a tuple
/// are assigned, the image of its result is forced, which either assigns a
/// new element (propagated further) or checks an existing one.
struct HomSearch<'a> {
    a: &'a FiniteAlgebra,
    b: &'a FiniteAlgebra,
    injective: bool,
    stop_after: Option<usize>,
    found: Vec<Vec<usize>>,
}

#[derive(Clone)]
struct State {
    images: Vec<usize>,
    used: Vec<bool>,
    assigned: Vec<usize>,
}

impl HomSearch<'_> {
    fn assign(&self, st: &mut State, x: usize, y: usize, queue: &mut Vec<usize>) -> bool {
        if self.injective && st.used[y] {
            return false;
        }
        st.images[x] = y;
        st.used[y] = true;
        st.assigned.push(x);
        queue.push(x);
        true
    }

    fn force(&self, st: &mut State, out: usize, target: usize, queue: &mut Vec<usize>) -> bool {
        match st.images[out] {
            UNSET => self.assign(st, out, target, queue),
            y => y == target,
        }
    }

    fn propagate(&self, st: &mut State, mut queue: Vec<usize>) -> bool {
        while let Some(x) = queue.pop() {
            for (k, op) in self.a.operations().iter().enumerate() {
                if op.arity == 0 {
                    continue;
                }
                if op.arity == 1 {
                    let out = op.table[x];
                    let target = self.b.apply(k, &[st.images[x]]);
                    if !self.force(st, out, target, &mut queue) {
                        return false;
                    }
                    continue;
                }
                // Tuples with x in some position and assigned elements elsewhere.
                let others = st.assigned.clone();
                let mut args = vec![0; op.arity];
                for pos in 0..op.arity {
                    let free = op.arity - 1;
                    let total = others.len().pow(free as u32);
                    for mut idx in 0..total {
                        for (slot, arg) in args.iter_mut().enumerate() {
                            if slot == pos {
                                *arg = x;
                            } else {
                                *arg = others[idx % others.len()];
                                idx /= others.len();
                            }
                        }
                        let out = self.a.apply(k, &args);
                        let mapped: Vec<usize> = args.iter().map(|&v| st.images[v]).collect();
                        let target = self.b.apply(k, &mapped);
                        if !self.force(st, out, target, &mut queue) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn run(&mut self) {
        let n = self.a.size();
        let mut st = State {
            images: vec![UNSET; n],
            used: vec![false; self.b.size()],
            assigned: Vec::new(),
        };
        let mut queue = Vec::new();
        for (k, op) in self.a.operations().iter().enumerate() {
            if op.arity == 0 && !self.force(&mut st, op.table[0], self.b.apply(k, &[]), &mut queue)
            {
                return;
            }
        }
        if self.propagate(&mut st, queue) {
            self.descend(st);
        }
    }

    fn done(&self) -> bool {
        self.stop_after.is_some_and(|k| self.found.len() >= k)
    }

    fn descend(&mut self, st: State) {
        let Some(next) = st.images.iter().position(|&y| y == UNSET) else {
            self.found.push(st.images);
            return;
        };
        for y in 0..self.b.size() {
            if self.done() {
                return;
            }
            let mut branch = st.clone();
            let mut queue = Vec::new();
            if self.assign(&mut branch, next, y, &mut queue) && self.propagate(&mut branch, queue) {
                self.descend(branch);
            }
        }
    }
}

/// All homomorphisms `a → b`, in lexicographic order of their image arrays.
pub fn homomorphisms(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<Vec<Vec<usize>>, AlgebraError> {
    if a.signature() != b.signature() {
        return Err(AlgebraError::SignatureMismatch);
    }
    let mut search = HomSearch {
        a,
        b,
        injective: false,
        stop_after: None,
        found: Vec::new(),
    };
    search.run();
    Ok(search.found)
}

/// An isomorphism `a → b`, if one exists.
pub fn algebra_isomorphic(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Vec<usize>> {
    if a.size() != b.size() || a.signature() != b.signature() {
        return None;
    }
    let mut search = HomSearch {
        a,
        b,
        injective: true,
        stop_after: Some(1),
        found: Vec::new(),
    };
    search.run();
    search.found.pop()
}

/// An endomorphism, stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndoMap {
    pub images: Vec<usize>,
}

impl EndoMap {
    /// Checks that `images` is an endomorphism of `a`.
    pub fn new(a: &FiniteAlgebra, images: Vec<usize>) -> Result<Self, AlgebraError> {
        match FiniteAlgebra::is_homomorphism(&images, a, a)? {
            None => Ok(EndoMap { images }),
            Some((op, tuple)) => Err(AlgebraError::NotHomomorphism { op, tuple }),
        }
    }

    pub fn identity(size: usize) -> Self {
        EndoMap {
            images: (0..size).collect(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &EndoMap) -> EndoMap {
        EndoMap {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.images.iter().all(|&y| self.images[y] == y)
    }

    pub fn image(&self) -> ElemSet {
        ElemSet::from_iter(self.images.len(), self.images.iter().copied())
    }

    /// The image as a subalgebra. Images of homomorphisms are always closed;
    /// debug builds re-check it.
    pub fn image_subalgebra(&self, a: &FiniteAlgebra) -> Subalgebra {
        let members = self.image();
        debug_assert!(a.subalgebra(members.clone()).is_ok());
        Subalgebra { members }
    }

    pub fn kernel_congruence(&self, a: &FiniteAlgebra) -> Congruence {
        let c = Congruence::from_labels(&self.images);
        debug_assert!(c.check_compatible(a).is_ok());
        c
    }

    pub fn render(&self, a: &FiniteAlgebra) -> String {
        let parts: Vec<String> = self.images.iter().map(|&y| a.name(y)).collect();
        format!("[{}]", parts.join(" "))
    }
}

/// All endomorphisms of an algebra with their composition monoid.
///
/// The identity map is element 0; the remaining maps follow in lexicographic
/// order of their image arrays. The product is `(s·t)(x) = s(t(x))`.
#[derive(Debug, Clone)]
pub struct EndMonoid {
    pub maps: Vec<EndoMap>,
    pub monoid: FiniteMonoid,
    index: HashMap<Vec<usize>, usize>,
}

impl EndMonoid {
    pub fn index_of(&self, f: &EndoMap) -> Option<usize> {
        self.index.get(&f.images).copied()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn idempotents(&self) -> Vec<usize> {
        self.monoid.idempotents()
    }
}

pub fn endomorphisms(a: &FiniteAlgebra) -> Result<EndMonoid, AlgebraError> {
    endomorphisms_with_limit(a, DEFAULT_ENDO_LIMIT)
}

pub fn endomorphisms_with_limit(a: &FiniteAlgebra, limit: usize) -> Result<EndMonoid, AlgebraError> {
    if a.size() > limit {
        return Err(AlgebraError::SizeLimitExceeded {
            size: a.size(),
            limit,
        });
    }
    let id = EndoMap::identity(a.size());
    let mut maps = vec![id.clone()];
    maps.extend(
        homomorphisms(a, a)?
            .into_iter()
            .map(|images| EndoMap { images })
            .filter(|m| *m != id),
    );
    let index: HashMap<Vec<usize>, usize> = maps
        .iter()
        .enumerate()
        .map(|(i, m)| (m.images.clone(), i))
        .collect();
    let n = maps.len();
    let mut table = Vec::with_capacity(n * n);
    for s in &maps {
        for t in &maps {
            table.push(index[&s.compose(t).images]);
        }
    }
    let names = maps.iter().map(|m| m.render(a)).collect();
    let monoid = composition_monoid(table, n)
        .with_names(names)
        .expect("one name per endomorphism");
    Ok(EndMonoid { maps, monoid, index })
}

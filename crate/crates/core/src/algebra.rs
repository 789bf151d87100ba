//! Finite algebras over finitary signatures.
//!
//! An operation of arity `k` on a carrier of size `n` is stored as a flat
//! table of length `n^k`; the tuple `(a_1, …, a_k)` lives at index
//! `Σ a_i · n^(k-i)` (first argument most significant).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elemset::ElemSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("operation `{op}` has {found} table entries, expected {expected}")]
    TableLengthMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("operation `{op}` has entry {value} at index {index}, outside 0..{size}")]
    EntryOutOfRange {
        op: String,
        index: usize,
        value: usize,
        size: usize,
    },
    #[error("empty carrier cannot interpret constant `{0}`")]
    EmptyCarrierWithConstants(String),
    #[error("duplicate operation name `{0}`")]
    DuplicateOperation(String),
    #[error("{found} names given for {size} elements")]
    NamesMismatch { size: usize, found: usize },
    #[error("algebras have different signatures")]
    SignatureMismatch,
    #[error("map has {found} images for a carrier of size {size}")]
    MapLengthMismatch { size: usize, found: usize },
    #[error("map sends {element} to {image}, outside the codomain")]
    ImageOutOfRange { element: usize, image: usize },
    #[error("map is not a homomorphism: fails on `{op}` at tuple {tuple:?}")]
    NotHomomorphism { op: String, tuple: Vec<usize> },
    #[error("carrier size {size} exceeds the search limit {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },
    #[error("objects belong to carriers of different sizes")]
    ParentMismatch,
    #[error("partition is not compatible with `{op}` at tuple {tuple:?}")]
    IncompatiblePartition { op: String, tuple: Vec<usize> },
    #[error("subset is not closed under `{op}`")]
    NotSubalgebra { op: String },
    #[error("malformed algebra JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

/// Names and arities of the operations of an algebra, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    operations: Vec<(String, usize)>,
}

impl Signature {
    pub fn new(operations: Vec<(String, usize)>) -> Self {
        Signature { operations }
    }

    pub fn len(&self) -> usize {
        self.operations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.operations.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn has_constants(&self) -> bool {
        self.operations.iter().any(|(_, a)| *a == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    size: usize,
    ops: Vec<Operation>,
    names: Option<Vec<String>>,
}

impl FiniteAlgebra {
    /// Validates raw operation tables against a carrier of `size` elements.
    pub fn new(size: usize, ops: Vec<Operation>) -> Result<Self, AlgebraError> {
        let mut seen = HashSet::new();
        for op in &ops {
            if !seen.insert(op.name.as_str()) {
                return Err(AlgebraError::DuplicateOperation(op.name.clone()));
            }
            if size == 0 && op.arity == 0 {
                return Err(AlgebraError::EmptyCarrierWithConstants(op.name.clone()));
            }
            let expected = size.pow(op.arity as u32);
            if op.table.len() != expected {
                return Err(AlgebraError::TableLengthMismatch {
                    op: op.name.clone(),
                    expected,
                    found: op.table.len(),
                });
            }
            if let Some((index, &value)) = op.table.iter().enumerate().find(|(_, &v)| v >= size) {
                return Err(AlgebraError::EntryOutOfRange {
                    op: op.name.clone(),
                    index,
                    value,
                    size,
                });
            }
        }
        Ok(FiniteAlgebra {
            size,
            ops,
            names: None,
        })
    }

    /// Same as [`FiniteAlgebra::new`] but checks the tables against a declared signature.
    pub fn validate(
        signature: &Signature,
        tables: Vec<Vec<usize>>,
        size: usize,
    ) -> Result<Self, AlgebraError> {
        if signature.len() != tables.len() {
            return Err(AlgebraError::SignatureMismatch);
        }
        let ops = signature
            .iter()
            .zip(tables)
            .map(|((name, arity), table)| Operation {
                name: name.to_string(),
                arity,
                table,
            })
            .collect();
        Self::new(size, ops)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, AlgebraError> {
        if names.len() != self.size {
            return Err(AlgebraError::NamesMismatch {
                size: self.size,
                found: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn operations(&self) -> &[Operation] {
        &self.ops
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.ops.iter().map(|o| (o.name.clone(), o.arity)).collect())
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

    pub fn element(&self, name: &str) -> Option<usize> {
        (0..self.size).find(|&x| self.name(x) == name)
    }

    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.ops.iter().find(|o| o.name == name)
    }

    pub fn set_names(&self, set: &ElemSet) -> Vec<String> {
        set.iter().map(|x| self.name(x)).collect()
    }

    /// Position of an argument tuple in an operation table.
    pub fn tuple_index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.ops[op].arity);
        self.ops[op].table[self.tuple_index(args)]
    }

    pub(crate) fn decode_tuple(&self, mut index: usize, arity: usize) -> Vec<usize> {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = index % self.size;
            index /= self.size;
        }
        t
    }

    /// Checks `f(μ_A(a…)) = μ_B(f(a)…)` for every operation and tuple.
    ///
    /// `Ok(None)` means `f` is a homomorphism; `Ok(Some((op, tuple)))` names
    /// the first violation in operation/tuple order.
    pub fn is_homomorphism(
        f: &[usize],
        a: &FiniteAlgebra,
        b: &FiniteAlgebra,
    ) -> Result<Option<(String, Vec<usize>)>, AlgebraError> {
        if a.signature() != b.signature() {
            return Err(AlgebraError::SignatureMismatch);
        }
        if f.len() != a.size {
            return Err(AlgebraError::MapLengthMismatch {
                size: a.size,
                found: f.len(),
            });
        }
        if let Some((element, &image)) = f.iter().enumerate().find(|(_, &y)| y >= b.size) {
            return Err(AlgebraError::ImageOutOfRange { element, image });
        }
        for (k, op) in a.ops.iter().enumerate() {
            for (idx, &out) in op.table.iter().enumerate() {
                let tuple = a.decode_tuple(idx, op.arity);
                let mapped: Vec<usize> = tuple.iter().map(|&x| f[x]).collect();
                if f[out] != b.apply(k, &mapped) {
                    return Ok(Some((op.name.clone(), tuple)));
                }
            }
        }
        Ok(None)
    }

    /// Least subset containing `seed` and all constants, closed under every
    /// operation.
    pub fn subalgebra_closure(&self, seed: &ElemSet) -> Subalgebra {
        assert_eq!(seed.universe(), self.size, "seed over the wrong carrier");
        let mut members = seed.clone();
        for op in self.ops.iter().filter(|o| o.arity == 0) {
            members.insert(op.table[0]);
        }
        loop {
            let mut changed = false;
            for (k, op) in self.ops.iter().enumerate().filter(|(_, o)| o.arity > 0) {
                let current = members.to_vec();
                for tuple in product(&current, op.arity) {
                    changed |= members.insert(self.apply(k, &tuple));
                }
            }
            if !changed {
                break;
            }
        }
        Subalgebra { members }
    }

    /// Wraps a subset, checking closure.
    pub fn subalgebra(&self, members: ElemSet) -> Result<Subalgebra, AlgebraError> {
        if members.universe() != self.size {
            return Err(AlgebraError::ParentMismatch);
        }
        let current = members.to_vec();
        for (k, op) in self.ops.iter().enumerate() {
            if product(&current, op.arity).any(|t| !members.contains(self.apply(k, &t))) {
                return Err(AlgebraError::NotSubalgebra {
                    op: op.name.clone(),
                });
            }
        }
        Ok(Subalgebra { members })
    }

    /// The algebra induced on a subalgebra, with its members renumbered in
    /// increasing order; also returns the inclusion map.
    pub fn induced(&self, sub: &Subalgebra) -> (FiniteAlgebra, Vec<usize>) {
        let incl = sub.members.to_vec();
        let mut local = vec![usize::MAX; self.size];
        for (i, &x) in incl.iter().enumerate() {
            local[x] = i;
        }
        let n = incl.len();
        let ops = self
            .ops
            .iter()
            .enumerate()
            .map(|(k, op)| {
                let mut table = Vec::with_capacity(n.pow(op.arity as u32));
                for t in product(&(0..n).collect::<Vec<_>>(), op.arity) {
                    let global: Vec<usize> = t.iter().map(|&i| incl[i]).collect();
                    table.push(local[self.apply(k, &global)]);
                }
                Operation {
                    name: op.name.clone(),
                    arity: op.arity,
                    table,
                }
            })
            .collect();
        let mut induced = FiniteAlgebra::new(n, ops).expect("subalgebra is closed");
        if let Some(names) = &self.names {
            induced.names = Some(incl.iter().map(|&x| names[x].clone()).collect());
        }
        (induced, incl)
    }

    /// Relabels the carrier by `perm` (old element → new element).
    pub fn permuted(&self, perm: &[usize]) -> FiniteAlgebra {
        assert_eq!(perm.len(), self.size);
        let ops = self
            .ops
            .iter()
            .map(|op| {
                let mut table = vec![0; op.table.len()];
                for (idx, &out) in op.table.iter().enumerate() {
                    let t: Vec<usize> = self
                        .decode_tuple(idx, op.arity)
                        .into_iter()
                        .map(|x| perm[x])
                        .collect();
                    table[self.tuple_index(&t)] = perm[out];
                }
                Operation {
                    name: op.name.clone(),
                    arity: op.arity,
                    table,
                }
            })
            .collect();
        let names = self.names.as_ref().map(|names| {
            let mut out = vec![String::new(); self.size];
            for (i, name) in names.iter().enumerate() {
                out[perm[i]] = name.clone();
            }
            out
        });
        FiniteAlgebra {
            size: self.size,
            ops,
            names,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&AlgebraFile {
            size: self.size,
            operations: self.ops.clone(),
            names: self.names.clone(),
        })
        .expect("algebra serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<FiniteAlgebra, AlgebraError> {
        let file: AlgebraFile =
            serde_json::from_str(text).map_err(|e| AlgebraError::Json(e.to_string()))?;
        let a = FiniteAlgebra::new(file.size, file.operations)?;
        match file.names {
            Some(names) => a.with_names(names),
            None => Ok(a),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct AlgebraFile {
    size: usize,
    operations: Vec<Operation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

/// A subset of the carrier closed under every operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subalgebra {
    pub members: ElemSet,
}

impl Subalgebra {
    pub fn len(&self) -> usize {
        self.members.count()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All `arity`-tuples over `items`, first coordinate varying slowest.
pub(crate) fn product(items: &[usize], arity: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total = if arity == 0 {
        1
    } else if items.is_empty() {
        0
    } else {
        items.len().pow(arity as u32)
    };
    let base = items.len().max(1);
    (0..total).map(move |mut idx| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = items[idx % base];
            idx /= base;
        }
        t
    })
}

//! Named instances shipped with the library.

use crate::algebra::FiniteAlgebra;
use crate::monoid::{composition_monoid, FiniteMonoid};

/// The six-element monoid `⟨e, f, g⟩` with elements ordered `[1, e, f, g, ef, fe]`.
pub const FITZGERALD_S_JSON: &str = include_str!("../data/fitzgerald_s.json");

/// Relations for [`FITZGERALD_S_JSON`], with the chained equalities expanded.
pub const FITZGERALD_PRESENTATION: &str =
    "e,f,g | e e = e ; f f = f ; g g = g ; f g = g ; g f = g ; e g = g ; g e = g ; f e f = g ; e f e = g";

/// The same relations without `fef = g = efe`; the resulting monoid is infinite.
pub const ALTERNATING_PRESENTATION: &str =
    "e,f,g | e e = e ; f f = f ; g g = g ; e g = g ; g e = g ; g f = g ; f g = g";

pub fn fitzgerald_monoid() -> FiniteMonoid {
    FiniteMonoid::from_json(FITZGERALD_S_JSON).expect("shipped monoid file is valid")
}

/// The canonical right set of [`fitzgerald_monoid`].
pub fn fitzgerald_algebra() -> FiniteAlgebra {
    fitzgerald_monoid().canonical_right_mset()
}

/// One element, no operations.
pub fn singleton() -> FiniteAlgebra {
    FiniteAlgebra::new(1, vec![]).expect("valid")
}

/// All self-maps of `0..n` under composition `(s·t)(x) = s(t(x))`, identity
/// first and the rest in lexicographic order of their image arrays.
pub fn full_transformation_monoid(n: usize) -> FiniteMonoid {
    let count = n.pow(n as u32);
    let identity: Vec<usize> = (0..n).collect();
    let mut maps = vec![identity.clone()];
    for mut idx in 0..count {
        let mut f = vec![0; n];
        for slot in f.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        if f != identity {
            maps.push(f);
        }
    }
    let index: std::collections::HashMap<&[usize], usize> =
        maps.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    let mut table = Vec::with_capacity(maps.len() * maps.len());
    for s in &maps {
        for t in &maps {
            let st: Vec<usize> = t.iter().map(|&x| s[x]).collect();
            table.push(index[st.as_slice()]);
        }
    }
    composition_monoid(table, maps.len())
}

pub fn algebra_by_name(name: &str) -> Option<FiniteAlgebra> {
    match name {
        "fitzgerald" => Some(fitzgerald_algebra()),
        "singleton" => Some(singleton()),
        "empty" => Some(FiniteAlgebra::new(0, vec![]).expect("valid")),
        _ => None,
    }
}

pub fn monoid_by_name(name: &str) -> Option<FiniteMonoid> {
    match name {
        "fitzgerald" => Some(fitzgerald_monoid()),
        "trivial" => Some(FiniteMonoid::trivial()),
        _ => None,
    }
}

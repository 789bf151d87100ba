//! (RI*) of an algebra need not pass to the canonical right set of its
//! endomorphism monoid.

use fitzgerald::corpus::{gen_gset_by_sizes, AbelianGroup};
use fitzgerald::hom::endomorphisms;
use fitzgerald::props::{bridge_audit, bridge_check, BridgeError, Direction, Property, PropsConfig};

fn equivalence_join(p: &[usize], q: &[usize]) -> Vec<usize> {
    let n = p.len();
    let mut label: Vec<usize> = (0..n).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for x in 0..n {
            for y in 0..n {
                if (p[x] == p[y] || q[x] == q[y]) && label[x] != label[y] {
                    let l = label[x].min(label[y]);
                    label[x] = l;
                    label[y] = l;
                    changed = true;
                }
            }
        }
    }
    label
}

fn same_partition(p: &[usize], q: &[usize]) -> bool {
    (0..p.len()).all(|x| (0..p.len()).all(|y| (p[x] == p[y]) == (q[x] == q[y])))
}

/// Z/2 acting on four points with one free orbit and two fixed points.
#[test]
fn z2_set_with_two_fixed_points() {
    let a = gen_gset_by_sizes(&AbelianGroup::new(vec![2]), &["1", "2", "1"]).unwrap();
    assert_eq!(a.size(), 4);
    let audit = bridge_audit(&a, &PropsConfig::default()).unwrap();
    assert_eq!(audit.monoid_order, 16);
    assert!(audit.algebra.ri_star);
    assert!(!audit.monoid_set.ri_star);
    assert_eq!(audit.violations.len(), 1);
    assert_eq!(audit.violations[0].property, Property::RiStar);
    assert_eq!(audit.violations[0].direction, Direction::AlgebraToMonoid);
    assert!(matches!(
        bridge_check(&a, &PropsConfig::default()),
        Err(BridgeError::TransferViolation(_))
    ));

    // Oracle on A: kernels of idempotent endomorphisms, joins by closure.
    let end = endomorphisms(&a).unwrap();
    let idem: Vec<usize> = (0..end.len()).filter(|&i| end.maps[i].is_idempotent()).collect();
    let ker_a: Vec<Vec<usize>> = idem.iter().map(|&i| end.maps[i].images.clone()).collect();
    assert!(ker_a
        .iter()
        .all(|p| ker_a.iter().all(|q| ker_a.iter().any(|k| same_partition(k, &equivalence_join(p, q))))));

    // Oracle on S: the kernel of s ↦ e·s for each idempotent e.
    let m = &end.monoid;
    let ker_s: Vec<Vec<usize>> = idem.iter().map(|&e| (0..m.order()).map(|s| m.mul(e, s)).collect()).collect();
    let failing = ker_s
        .iter()
        .flat_map(|p| ker_s.iter().map(move |q| (p, q)))
        .filter(|(p, q)| !ker_s.iter().any(|k| same_partition(k, &equivalence_join(p, q))))
        .count();
    assert!(failing > 0);
}

#[test]
fn other_directions_hold_on_the_same_family() {
    for sizes in [["2", "1", "1"], ["1", "1", "2"], ["2", "2", "1"]] {
        for g in [vec![2], vec![4], vec![2, 2]] {
            let Ok(a) = gen_gset_by_sizes(&AbelianGroup::new(g), &sizes) else {
                continue;
            };
            let audit = bridge_audit(&a, &PropsConfig::default()).unwrap();
            for v in &audit.violations {
                assert_eq!((v.property, v.direction), (Property::RiStar, Direction::AlgebraToMonoid));
            }
        }
    }
}

use super::*;
use proptest::prelude::*;

fn fp(orders: &[u64]) -> FreeProduct {
    FreeProduct::new(orders.to_vec()).unwrap()
}

#[test]
fn reduction_examples() {
    let g = fp(&[3, 3]);
    assert!(g.word(&[(0, 2), (0, -2)]).is_empty());
    assert_eq!(g.word(&[(0, 4)]), g.word(&[(0, 1)]));
    let st = g.word(&[(0, 1), (1, 1)]);
    assert!(g.mul(&st, &g.inverse(&st)).is_empty());
    assert_eq!(
        g.format(&g.word(&[(0, 2), (1, 1)]), Some(&["s", "t"])),
        "s^-1 t^1"
    );
    let w = g.parse("s^2 t s^-3", Some(&["s", "t"])).unwrap();
    assert_eq!(w, g.word(&[(0, 2), (1, 1)]));
    assert_eq!(
        g.parse("s0^1 s1^-1", None).unwrap(),
        g.word(&[(0, 1), (1, 2)])
    );
    assert!(g.parse("s2^1", None).is_err());
}

#[test]
fn images() {
    let g = fp(&[5, 5]);
    for f in 1..5u64 {
        let a = CyclicAssignment::new(&g, 5, vec![1, f]).unwrap();
        for i in 1..5i64 {
            let w = g.word(&[(0, i), (1, 1), (0, -(f as i64) - i)]);
            assert_eq!(hom_image(&w, &a), 0);
        }
    }
    let a = CyclicAssignment::new(&fp(&[4]), 4, vec![1]).unwrap();
    assert_eq!(hom_image(&fp(&[4]).generator(0), &a), 1);
}

#[test]
fn assignment_validation() {
    let g = fp(&[4, 6]);
    assert_eq!(
        CyclicAssignment::new(&g, 12, vec![6, 4]).unwrap_err(),
        Error::NonGenerating
    );
    assert_eq!(
        CyclicAssignment::new(&fp(&[4, 4]), 4, vec![2, 1]).unwrap_err(),
        Error::KernelHasTorsion
    );
    assert!(CyclicAssignment::new(&g, 12, vec![3, 2]).is_ok());
}

fn check_kernel(orders: &[u64], n: u64, images: Vec<u64>, expect: usize) {
    let g = fp(orders);
    let a = CyclicAssignment::new(&g, n, images).unwrap();
    let gens = kernel_generators_rs(&g, &a).unwrap();
    assert_eq!(gens.len(), expect, "orders {orders:?} n={n}");
    assert_eq!(kernel_rank_formula(&g, n), expect as i64);
    for w in &gens {
        assert_eq!(hom_image(w, &a), 0);
    }
    assert_eq!(subgroup_index(&g, &gens, 100_000), Some(n as usize));
}

#[test]
fn kernel_ranks() {
    for q in [2u64, 3, 5, 7] {
        for f in 1..q {
            check_kernel(&[q, q], q, vec![1, f], (q - 1) as usize);
        }
    }
    for m in 1..4usize {
        for n in 2..5u64 {
            check_kernel(&vec![n; m + 1], n, vec![1; m + 1], m * (n as usize - 1));
        }
    }
    check_kernel(&[2, 3], 6, vec![3, 2], 2);
    check_kernel(&[4, 6], 12, vec![3, 2], 8);
}

#[test]
fn reidemeister_basis_shape() {
    // With all factors mapped to 1 the basis is s_0^j s_i s_0^{-j-1} up to
    // relabelling: every generator has that form for some i, j.
    let g = fp(&[3, 3, 3]);
    let a = CyclicAssignment::new(&g, 3, vec![1, 1, 1]).unwrap();
    let gens = kernel_generators_rs(&g, &a).unwrap();
    let expected: Vec<FreeProductWord> = (1..3)
        .flat_map(|i| (1..3i64).map(move |j| (i, j)))
        .map(|(i, j)| g.word(&[(0, j), (i, 1), (0, -j - 1)]))
        .collect();
    assert_eq!(gens.len(), expected.len());
    assert_eq!(subgroup_index(&g, &expected, 10_000), Some(3));
}

#[test]
fn coset_enumeration_sanity() {
    let d = fp(&[2, 2]);
    let s0s1 = d.word(&[(0, 1), (1, 1)]);
    for k in 1..6 {
        assert_eq!(
            subgroup_index(&d, &[d.pow(&s0s1, k)], 10_000),
            Some(2 * k as usize)
        );
    }
    assert_eq!(
        subgroup_index(&d, &[d.generator(0), d.generator(1)], 100),
        Some(1)
    );
    assert_eq!(subgroup_index(&fp(&[5]), &[], 100), Some(5));
    // infinite index
    assert_eq!(subgroup_index(&d, &[d.generator(0)], 500), None);
}

#[test]
fn torsion_examples() {
    let d = fp(&[2, 2]);
    let a = CyclicAssignment::new(&d, 2, vec![1, 1]).unwrap();
    assert!(torsion_scan(&d, Some(&a), 6));
    let t = fp(&[3, 3]);
    let a = CyclicAssignment::new(&t, 3, vec![1, 1]).unwrap();
    assert!(torsion_scan(&t, Some(&a), 5));
    assert!(!torsion_scan(&d, None, 6));
}

#[test]
fn finite_order_elements_are_conjugate_into_factors() {
    for (m, n) in [(2u64, 3u64), (3, 3), (2, 4)] {
        let g = fp(&[m, n]);
        let words = enumerate(&g, 6);
        let conjugators = enumerate(&g, 3);
        let lcm = m.lcm(&n) as i64;
        for w in &words {
            if !(1..=lcm).any(|k| g.pow(w, k).is_empty()) {
                continue;
            }
            let ok = conjugators.iter().any(|c| g.conjugate(c, w).len() <= 1);
            assert!(ok, "{} not conjugate into a factor", g.format(w, None));
        }
    }
}

fn enumerate(g: &FreeProduct, max_len: usize) -> Vec<FreeProductWord> {
    let mut all = vec![g.identity()];
    let mut frontier = vec![g.identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for f in 0..g.rank() {
                if w.syllables().last().is_some_and(|&(h, _)| h == f) {
                    continue;
                }
                for e in 1..g.orders()[f] {
                    next.push(g.mul(w, &g.word(&[(f, e as i64)])));
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

fn raw_word() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..3, -12i64..12), 0..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduction_is_confluent(w in raw_word(), v in raw_word()) {
        let g = fp(&[2, 3, 4]);
        let x = g.word(&w);
        prop_assert_eq!(g.reduce(&x), x.clone());
        prop_assert!(g.mul(&x, &g.inverse(&x)).is_empty());
        // Reducing the concatenation equals multiplying normal forms.
        let mut cat = w.clone();
        cat.extend(v.iter().copied());
        prop_assert_eq!(g.word(&cat), g.mul(&x, &g.word(&v)));
    }

    #[test]
    fn image_is_a_homomorphism(w in raw_word(), v in raw_word()) {
        let g = fp(&[2, 3, 4]);
        let a = CyclicAssignment::new(&g, 12, vec![6, 4, 3]).unwrap();
        let (x, y) = (g.word(&w), g.word(&v));
        prop_assert_eq!(hom_image(&g.mul(&x, &y), &a), (hom_image(&x, &a) + hom_image(&y, &a)) % 12);
    }
}

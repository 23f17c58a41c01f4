use mirrorkit_core::arith::rat;
use mirrorkit_core::check::all_passed;
use mirrorkit_core::lattice::*;
use proptest::prelude::*;

fn u() -> IntegerLattice {
    IntegerLattice::hyperbolic_plane()
}

/// Blocks paired with their known signatures.
fn block() -> impl Strategy<Value = (IntegerLattice, Signature)> {
    prop_oneof![
        Just((u(), Signature::new(1, 1))),
        Just((IntegerLattice::e8_negative(), Signature::new(0, 8))),
        (-6i64..=6)
            .prop_filter("nonzero", |x| *x != 0)
            .prop_map(|n| (IntegerLattice::rank_one(n), if n > 0 { Signature::new(1, 0) } else { Signature::new(0, 1) })),
        Just((IntegerLattice::new(vec![vec![2, 1], vec![1, 2]]).unwrap(), Signature::new(2, 0))),
    ]
}

proptest! {
    #[test]
    fn signature_is_additive(parts in proptest::collection::vec(block(), 1..4)) {
        let lattices: Vec<IntegerLattice> = parts.iter().map(|p| p.0.clone()).collect();
        let total = IntegerLattice::sum_of(&lattices);
        let expect = parts.iter().fold(Signature::new(0, 0), |acc, p| acc + p.1);
        prop_assert_eq!(total.signature().unwrap(), expect);
        for (l, sig) in &parts {
            prop_assert_eq!(l.signature().unwrap(), *sig);
        }
    }
}

#[test]
fn e8_guard() {
    let e8 = IntegerLattice::e8_negative();
    assert!(e8.is_even());
    assert_eq!(e8.determinant().unwrap().abs(), 1);
    assert_eq!(e8.signature().unwrap(), Signature::new(0, 8));
    let k3 = IntegerLattice::k3();
    assert_eq!(k3.signature().unwrap(), Signature::new(3, 19));
    assert_eq!(IntegerLattice::mukai().signature().unwrap(), Signature::new(4, 20));
}

#[test]
fn mirror_of_u_plus_two_e8() {
    let m = IntegerLattice::sum_of(&[u(), IntegerLattice::e8_negative(), IntegerLattice::e8_negative()]);
    let emb = standard_k3_embedding(&m).unwrap();
    let d = dn_mirror(&emb, None).unwrap();
    assert!(all_passed(&d.checks), "{:?}", d.checks);
    assert_eq!(d.n.rank(), 2);
    assert!(d.n.is_even());
    assert_eq!(d.signature_n, Signature::new(1, 1));
    assert_eq!(d.n.determinant().unwrap(), -1);
    assert!(matches!(congruence(&d.n, &u()).unwrap(), Congruence::Equivalent(_)));
    assert_eq!(d.m.rank() + 2 + d.n.rank(), 22);
    assert_eq!(d.signature_m + Signature::new(1, 1) + d.signature_n, Signature::new(3, 19));
}

#[test]
fn mirror_of_degree_two() {
    let emb = standard_k3_embedding(&IntegerLattice::rank_one(2)).unwrap();
    let d = dn_mirror(&emb, None).unwrap();
    assert!(all_passed(&d.checks), "{:?}", d.checks);
    assert_eq!(d.n.rank(), 19);
    assert_eq!(d.signature_n, Signature::new(1, 18));
    assert_eq!(d.n.determinant().unwrap().abs(), 2);
    assert_eq!(d.m.rank() + 2 + d.n.rank(), 22);
}

#[test]
fn complement_twice_saturates() {
    let k3 = IntegerLattice::k3();
    for basis in [
        vec![{
            let mut v = vec![0i64; 22];
            v[0] = 1;
            v[1] = 1;
            v
        }],
        vec![
            {
                let mut v = vec![0i64; 22];
                v[0] = 1;
                v[1] = 2;
                v
            },
            {
                let mut v = vec![0i64; 22];
                v[6] = 1;
                v
            },
        ],
    ] {
        let r = basis.len();
        let emb = SublatticeEmbedding::new(k3.clone(), basis).unwrap();
        assert!(emb.is_primitive().unwrap());
        let twice = emb.orthogonal_complement().unwrap().orthogonal_complement().unwrap();
        assert_eq!(twice.rank(), r);
        assert!(twice.is_primitive().unwrap());
    }
}

#[test]
fn isotropic_quotients_of_even_lattices_are_even() {
    let amb = IntegerLattice::sum_of(&[u(), u(), IntegerLattice::rank_one(-4)]);
    for f in [vec![1, 0, 0, 0, 0], vec![0, 1, 0, 0, 0], vec![1, 0, 0, 1, 0], vec![2, 0, 1, 0, 1]] {
        let sq = amb.square(&f).unwrap();
        if sq != 0 {
            continue;
        }
        let q = isotropic_quotient(&amb, &f).unwrap();
        assert!(q.lattice.is_even());
        assert_eq!(q.lattice.rank(), amb.rank() - 2);
    }
}

#[test]
fn hyperkahler_rotation_preserves_frames() {
    let l = IntegerLattice::sum_of(&[u(), u(), u()]);
    let r = |v: &[i64]| v.iter().map(|&x| rat(x as i128)).collect::<Vec<_>>();
    let f = PositiveFrame::new(
        &l,
        r(&[1, 1, 0, 0, 0, 0]),
        r(&[0, 0, 1, 1, 0, 0]),
        r(&[0, 0, 0, 0, 1, 1]),
    )
    .unwrap();
    let j = f.rotate(HkAxis::J);
    let k = f.rotate(HkAxis::K);
    assert!(j.is_valid() && k.is_valid());
    assert_eq!(j.rotate(HkAxis::K), f);
    assert_eq!(j.rotate(HkAxis::J).rotate(HkAxis::J), f);
}

#[test]
fn abelian_splittings() {
    for k in 1..=2 {
        for l in 1..=2 {
            let s = abelian_splitting(k, l).unwrap();
            assert!(all_passed(&s.checks), "{:?}", s.checks);
            assert_eq!(s.index, 2 * (k * l) as i128);
        }
    }
}

#[test]
fn mukai_pairing_example() {
    let k3 = IntegerLattice::k3();
    let v = MukaiVector::new(1, vec![0; 22], -1);
    assert_eq!(mukai_pairing(&k3, &v, &v).unwrap(), 2);
}

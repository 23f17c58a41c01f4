use std::collections::BTreeMap;

use mirrorkit_core::monodromy::*;
use proptest::prelude::*;

fn a_b() -> (SL2Matrix, SL2Matrix) {
    let a = SL2Matrix::T;
    let b = SL2Matrix::S.conjugate(&SL2Matrix::T).unwrap();
    (a, b)
}

fn alternating(len: usize) -> Vec<SL2Matrix> {
    let (a, b) = a_b();
    (0..len).map(|i| if i % 2 == 0 { a } else { b }).collect()
}

#[test]
fn ab_to_the_sixth_is_identity() {
    let (a, b) = a_b();
    assert_eq!(a.mul(&b).unwrap().pow(6).unwrap(), SL2Matrix::IDENTITY);
    let r = factorization_check(&alternating(12)).unwrap();
    assert!(r.is_identity && r.all_standard);
    assert_eq!(r.divisible_by_12, Some(true));
}

#[test]
fn twenty_four_factors_split_in_half() {
    let r = split_fibration(&alternating(24), 12).unwrap();
    assert!(r.trivial_halves);
    assert_eq!((r.first.len(), r.second.len()), (12, 12));
    assert!(r.checks.iter().all(|c| c.passed));
    let f = factorization_check(&alternating(24)).unwrap();
    assert_eq!(f.divisible_by_12, Some(true));
}

/// Every identity factorization into standard transvections found by a
/// short exhaustive search over conjugates of T has length divisible by 12.
#[test]
fn identity_factorizations_have_length_divisible_by_twelve() {
    let (a, b) = a_b();
    let c = SL2Matrix::T.mul(&SL2Matrix::S).unwrap().conjugate(&SL2Matrix::T).unwrap();
    let gens = [a, b, c];
    let mut found = 0;
    // Products of (AB)^6-style cycles in all three pairings.
    for &x in &gens {
        for &y in &gens {
            if x == y {
                continue;
            }
            for reps in 1..=12usize {
                let word: Vec<SL2Matrix> = (0..2 * reps).map(|i| if i % 2 == 0 { x } else { y }).collect();
                let r = factorization_check(&word).unwrap();
                if r.is_identity {
                    found += 1;
                    assert_eq!(r.divisible_by_12, Some(true));
                    assert_eq!(word.len() % 12, 0);
                }
            }
        }
    }
    assert!(found > 0);
}

fn random_sl2() -> impl Strategy<Value = SL2Matrix> {
    proptest::collection::vec((-6i64..=6, 0i64..4), 1..12).prop_filter_map("entries too large", |steps| {
        let mut m = SL2Matrix::IDENTITY;
        for (k, s) in steps {
            m = m.mul(&SL2Matrix::t_power(k)).ok()?.mul(&SL2Matrix::S.pow(s).ok()?).ok()?;
        }
        m.entries().iter().all(|x| x.abs() <= 1_000_000).then_some(m)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn word_roundtrip(m in random_sl2()) {
        prop_assert_eq!(word_decompose(&m).evaluate().unwrap(), m);
    }
}

proptest! {
    #[test]
    fn degree_is_conjugation_invariant(m in random_sl2(), c in random_sl2()) {
        prop_assume!(c.conjugate(&m).is_ok());
        prop_assert_eq!(abelianized_degree(&c.conjugate(&m).unwrap()), abelianized_degree(&m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn conjugates_of_t_are_standard(c in random_sl2()) {
        let m = c.conjugate(&SL2Matrix::T).unwrap();
        prop_assert_eq!(transvection_invariant(&m).unwrap().amplitude, 1);
        let m2 = c.conjugate(&SL2Matrix::t_power(3)).unwrap();
        prop_assert_eq!(transvection_invariant(&m2).unwrap().amplitude, 3);
    }
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn is_zero(m: &[Vec<i64>]) -> bool {
    m.iter().all(|r| r.iter().all(|&x| x == 0))
}

proptest! {
    /// Oracle: the nilpotency index of N read off by powering it.
    #[test]
    fn kulikov_matches_nilpotency(x in -3i64..=3, y in -3i64..=3, z in -3i64..=3) {
        let n = vec![vec![0, 2 * x, 2 * y], vec![0, 0, 2 * z], vec![0, 0, 0]];
        let n2 = mat_mul(&n, &n);
        let mut m = n.clone();
        for i in 0..3 {
            m[i][i] += 1;
            for j in 0..3 {
                m[i][j] += n2[i][j] / 2;
            }
        }
        let expect = if is_zero(&n) { 1 } else if is_zero(&n2) { 2 } else { 3 };
        let t = classify_kulikov(&UnipotentOperator::new(m).unwrap()).unwrap();
        prop_assert_eq!(t.nilpotency_index(), expect);
    }
}

/// Brute-force exterior algebra on Z^4: forms as maps from sorted index
/// lists to coefficients.
type Form = BTreeMap<Vec<usize>, i64>;

fn wedge(a: &Form, b: &Form) -> Form {
    let mut out = Form::new();
    for (s, x) in a {
        for (t, y) in b {
            let mut idx: Vec<usize> = s.iter().chain(t).copied().collect();
            let mut sign = 1;
            // Bubble sort, tracking the permutation sign.
            for i in 0..idx.len() {
                for j in 0..idx.len() - 1 - i {
                    if idx[j] > idx[j + 1] {
                        idx.swap(j, j + 1);
                        sign = -sign;
                    }
                }
            }
            if idx.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            *out.entry(idx).or_insert(0) += sign * x * y;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn form_of(c: [i64; 6]) -> Form {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    pairs.iter().zip(c).filter(|(_, v)| *v != 0).map(|(&(i, j), v)| (vec![i, j], v)).collect()
}

proptest! {
    #[test]
    fn cup_nilpotency_matches_exterior_algebra(c in proptest::array::uniform6(-2i64..=2)) {
        let l = CohomologyClassT4::from_coefficients(c);
        let f = form_of(c);
        let one: Form = [(vec![], 1)].into_iter().collect();
        let mut power = one;
        let mut order = 0u8;
        while !power.is_empty() {
            power = wedge(&power, &f);
            order += 1;
        }
        prop_assert_eq!(cup_nilpotency(&l), order.max(1));
        prop_assert_eq!(cup_nilpotency(&l) == 3, l.pfaffian() != 0);
        // The 16x16 operator has the same nilpotency.
        let op = l.wedge_operator();
        let mut p = op.clone();
        let mut k = 1u8;
        while !is_zero(&p) {
            p = mat_mul(&p, &op);
            k += 1;
        }
        prop_assert_eq!(k, cup_nilpotency(&l));
    }
}

#[test]
fn fixture_classes_match_kulikov_types() {
    let fiber = CohomologyClassT4::from_coefficients([0, 1, 0, 0, 0, 0]);
    let ample = CohomologyClassT4::from_coefficients([0, 1, 0, 0, 1, 0]);
    assert_eq!(cup_nilpotency(&fiber), 2);
    assert_eq!(cup_nilpotency(&ample), 3);
    assert_eq!(classify_kulikov(&cup_monodromy(&fiber).unwrap()).unwrap(), KulikovType::II);
    assert_eq!(classify_kulikov(&cup_monodromy(&ample).unwrap()).unwrap(), KulikovType::III);
    assert_eq!(
        classify_kulikov(&cup_monodromy(&CohomologyClassT4::from_coefficients([0; 6])).unwrap()).unwrap(),
        KulikovType::I
    );
}

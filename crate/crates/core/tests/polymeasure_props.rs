mod common;

use proptest::prelude::*;
use qmeasure::interference::is_grade_additive;
use qmeasure::polymeasure::polarization_recover;
use qmeasure::random::Generator;
use qmeasure::{FiniteSpace, MSet, PolyMeasure, RawCylinderTable, Scalar, SemivariationMode};

fn power(k: usize, d: usize) -> Vec<FiniteSpace> {
    vec![FiniteSpace::lettered(k).unwrap(); d]
}

#[test]
fn diagonals_are_grade_d() {
    let mut g = Generator::new(21);
    for (d, k) in [(2, 3), (2, 4), (3, 3), (3, 4)] {
        for _ in 0..25 {
            let lambda = g.polymeasure(power(k, d), 9).unwrap();
            let report = is_grade_additive(&lambda.diagonal().unwrap(), d).unwrap();
            assert!(report.is_additive_at_grade, "d={d} k={k}: {:?}", report.witness);
        }
    }
    // structured: rank-one and all-ones tensors
    let space = FiniteSpace::lettered(4).unwrap();
    let v = [Scalar::from(3), Scalar::new(-1, 2), Scalar::from(0), Scalar::new(5, 3)];
    for d in 2..=3 {
        let outer = PolyMeasure::on_power(&space, d, |ix| ix.iter().map(|&i| v[i].clone()).fold(Scalar::one(), |a, b| a * b)).unwrap();
        assert!(is_grade_additive(&outer.diagonal().unwrap(), d).unwrap().is_additive_at_grade);
    }
}

#[test]
fn diagonal_matches_cylinder_oracle() {
    let mut g = Generator::new(22);
    let lambda = g.polymeasure(power(3, 3), 5).unwrap();
    let mu = lambda.diagonal().unwrap();
    for a in lambda.factors()[0].sets() {
        let expected = common::cylinder_value(&lambda, &[a.clone(), a.clone(), a.clone()]);
        assert_eq!(mu.value(&a).unwrap(), expected);
    }
}

#[test]
fn polarization_matches_permutation_sum() {
    let mut g = Generator::new(23);
    for d in 1..=4 {
        for k in [2, 4, 6] {
            if d == 4 && k == 6 {
                continue; // covered by the acceptance suite
            }
            let space = FiniteSpace::lettered(k).unwrap();
            for _ in 0..5 {
                let lambda = g.polymeasure(vec![space.clone(); d], 7).unwrap();
                let mu = lambda.diagonal().unwrap();
                let sets = g.disjoint_tuple(&space, d);
                assert_eq!(
                    polarization_recover(&mu, &sets).unwrap(),
                    common::permutation_sum(&lambda, &sets)
                );
            }
        }
    }
}

#[test]
fn symmetrize_preserves_diagonal_rank_three() {
    let mut g = Generator::new(24);
    for _ in 0..10 {
        let lambda = g.polymeasure(power(3, 3), 6).unwrap();
        let sym = lambda.symmetrize().unwrap();
        assert!(sym.is_symmetric());
        assert_eq!(sym.symmetrize().unwrap(), sym);
        assert_eq!(sym.diagonal().unwrap(), lambda.diagonal().unwrap());
    }
}

#[test]
fn variation_attained_at_atoms() {
    let mut g = Generator::new(25);
    for k0 in 1..=3 {
        for k1 in 1..=3 {
            let f = vec![FiniteSpace::lettered(k0).unwrap(), FiniteSpace::lettered(k1).unwrap()];
            for _ in 0..3 {
                let lambda = g.polymeasure(f.clone(), 4).unwrap();
                assert_eq!(lambda.variation(), common::partition_pair_variation(&lambda));
            }
        }
    }
    let sp = FiniteSpace::lettered(2).unwrap();
    let checker = PolyMeasure::new(
        vec![sp.clone(), sp],
        [1, -1, -1, 1].into_iter().map(Scalar::from).collect(),
    )
    .unwrap();
    assert_eq!(common::partition_pair_variation(&checker), Scalar::from(4));
}

#[test]
fn exact_semivariation_matches_brute_force() {
    let mut g = Generator::new(26);
    for shape in [vec![3, 3], vec![2, 4], vec![1, 3], vec![2, 2, 2], vec![3], vec![1, 2, 3]] {
        let f: Vec<FiniteSpace> = shape.iter().map(|&k| FiniteSpace::lettered(k).unwrap()).collect();
        for _ in 0..4 {
            let lambda = g.polymeasure(f.clone(), 5).unwrap();
            let sv = lambda.semivariation(SemivariationMode::Exact).unwrap();
            assert_eq!(sv.value, common::brute_semivariation(&lambda), "shape {shape:?}");
            // the reported signs attain the value
            let mut sum = Scalar::zero();
            let mut ix = vec![0usize; shape.len()];
            for v in lambda.tensor() {
                let sign: i64 = ix.iter().enumerate().map(|(j, &i)| sv.signs[j][i] as i64).product();
                sum += Scalar::from(sign) * v.clone();
                for j in (0..shape.len()).rev() {
                    ix[j] += 1;
                    if ix[j] < shape[j] {
                        break;
                    }
                    ix[j] = 0;
                }
            }
            assert_eq!(sum.abs(), sv.value);
        }
    }
}

#[test]
fn sampled_semivariation_is_reproducible_lower_bound() {
    let mut g = Generator::new(27);
    let lambda = g.polymeasure(power(4, 2), 8).unwrap();
    let exact = lambda.semivariation(SemivariationMode::Exact).unwrap().value;
    let mode = SemivariationMode::Sampled { seed: 99, trials: 5 };
    let a = lambda.semivariation(mode).unwrap();
    let b = lambda.semivariation(mode).unwrap();
    assert_eq!(a, b);
    assert!(a.value <= exact);
}

#[test]
fn marginals_are_additive() {
    let mut g = Generator::new(28);
    let f = vec![
        FiniteSpace::lettered(3).unwrap(),
        FiniteSpace::lettered(2).unwrap(),
        FiniteSpace::lettered(4).unwrap(),
    ];
    let lambda = g.polymeasure(f.clone(), 6).unwrap();
    for slot in 0..3 {
        let m = lambda.marginal(slot).unwrap();
        assert!(is_grade_additive(&m, 1).unwrap().is_additive_at_grade);
        for b in f[slot].sets() {
            let mut sets: Vec<MSet> = f.iter().map(FiniteSpace::full_set).collect();
            sets[slot] = b.clone();
            assert_eq!(m.value(&b).unwrap(), lambda.evaluate(&sets).unwrap());
        }
    }
}

#[test]
fn tensor_tables_are_separately_additive() {
    let mut g = Generator::new(29);
    for shape in [vec![2, 3], vec![3], vec![2, 2, 2]] {
        let f: Vec<FiniteSpace> = shape.iter().map(|&k| FiniteSpace::lettered(k).unwrap()).collect();
        let lambda = g.polymeasure(f, 5).unwrap();
        let table = RawCylinderTable::from_polymeasure(&lambda).unwrap();
        assert!(table.check_separate_additivity().unwrap().additive);
        assert_eq!(table.to_polymeasure().unwrap(), lambda);
    }
}

fn bins_to_sets(space: &FiniteSpace, bins: &[usize], m: usize) -> Vec<MSet> {
    (0..m)
        .map(|j| {
            let members: Vec<usize> = (0..bins.len()).filter(|&i| bins[i] == j + 1).collect();
            space.set(&members).unwrap()
        })
        .collect()
}

proptest! {
    #[test]
    fn evaluate_is_multi_additive(seed in any::<u64>(), slot in 0usize..3, bins in prop::collection::vec(0usize..=2, 4), others in prop::collection::vec(0u32..16, 3)) {
        let space = FiniteSpace::lettered(4).unwrap();
        let lambda = Generator::new(seed).polymeasure(vec![space.clone(); 3], 9).unwrap();
        let bc = bins_to_sets(&space, &bins, 2);
        let mut sets: Vec<MSet> = others.iter().map(|&m| space.set_from_mask(m).unwrap()).collect();
        sets[slot] = bc[0].union(&bc[1]).unwrap();
        let joint = lambda.evaluate(&sets).unwrap();
        sets[slot] = bc[0].clone();
        let left = lambda.evaluate(&sets).unwrap();
        sets[slot] = bc[1].clone();
        let right = lambda.evaluate(&sets).unwrap();
        prop_assert_eq!(joint, left + right);
    }

    #[test]
    fn fixing_commutes_with_evaluation(seed in any::<u64>(), masks in prop::collection::vec(0u32..8, 3), fixed in prop::collection::vec(any::<bool>(), 3)) {
        let n_fixed = fixed.iter().filter(|&&b| b).count();
        prop_assume!(n_fixed >= 1 && n_fixed <= 2);
        let space = FiniteSpace::lettered(3).unwrap();
        let lambda = Generator::new(seed).polymeasure(vec![space.clone(); 3], 9).unwrap();
        let sets: Vec<MSet> = masks.iter().map(|&m| space.set_from_mask(m).unwrap()).collect();
        let assignment: Vec<Option<MSet>> = sets.iter().zip(&fixed).map(|(s, &f)| f.then(|| s.clone())).collect();
        let reduced = lambda.fix_arguments(&assignment).unwrap();
        let rest: Vec<MSet> = sets.iter().zip(&fixed).filter(|(_, &f)| !f).map(|(s, _)| s.clone()).collect();
        prop_assert_eq!(reduced.evaluate(&rest).unwrap(), lambda.evaluate(&sets).unwrap());
        prop_assert_eq!(lambda.evaluate(&sets).unwrap(), common::cylinder_value(&lambda, &sets));
    }

    #[test]
    fn semivariation_below_variation(seed in any::<u64>(), k0 in 1usize..=4, k1 in 1usize..=4, same_sign in any::<bool>()) {
        let f = vec![FiniteSpace::lettered(k0).unwrap(), FiniteSpace::lettered(k1).unwrap()];
        let mut lambda = Generator::new(seed).polymeasure(f.clone(), 9).unwrap();
        if same_sign {
            lambda = PolyMeasure::new(f, lambda.tensor().iter().map(Scalar::abs).collect()).unwrap();
        }
        let sv = lambda.semivariation(SemivariationMode::Exact).unwrap().value;
        let var = lambda.variation();
        prop_assert!(sv <= var);
        if same_sign {
            prop_assert_eq!(sv, var);
        }
    }
}

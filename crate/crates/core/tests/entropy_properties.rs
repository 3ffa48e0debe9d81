use luinv::entropy::{char_poly_relation, renyi, schmidt_from_jk, Spectrum};
use luinv::state::{density_from_pure, partial_trace, random_density, random_pure_state};
use luinv::tensor::tensor_product;
use proptest::prelude::*;

fn spectrum(max_d: usize) -> impl Strategy<Value = Spectrum> {
    prop::collection::vec(0.0f64..1.0, 1..=max_d).prop_filter_map("non-zero weight", |w| {
        let total: f64 = w.iter().sum();
        (total > 1e-6).then(|| Spectrum::new(w.iter().map(|x| x / total).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn renyi_is_non_increasing_in_alpha(s in spectrum(6)) {
        let values: Vec<f64> = [0.5, 2.0, 3.0, 4.0].iter().map(|&a| renyi(&s, a).unwrap()).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn power_sums_round_trip(weights in prop::collection::vec(0.01f64..1.0, 1..=4)) {
        let total: f64 = weights.iter().sum();
        let mut squares: Vec<f64> = weights.iter().map(|w| w / total).collect();
        squares.sort_by(|a, b| b.total_cmp(a));
        let j: Vec<f64> = (1..=squares.len()).map(|k| squares.iter().map(|x| x.powi(k as i32)).sum()).collect();
        let sigma = schmidt_from_jk(&j).unwrap();
        for (s, x) in sigma.iter().zip(&squares) {
            prop_assert!((s - x.sqrt()).abs() <= 1e-8, "{:?} {:?}", sigma, squares);
        }
    }

    #[test]
    fn traced_and_entropy_forms_agree(seed in any::<u64>(), d in 1usize..=6) {
        let rel = char_poly_relation(&random_density(&[d], seed).unwrap()).unwrap();
        prop_assert!((rel.traced_residual - rel.entropy_residual).abs() <= 1e-10);
        prop_assert!(rel.entropy_residual <= 1e-8);
    }
}

#[test]
fn product_states_have_zero_entropy() {
    let a = random_pure_state(&[2], 1).unwrap();
    let b = random_pure_state(&[3], 2).unwrap();
    let psi = tensor_product(&a, &b);
    let reduced = partial_trace(&density_from_pure(&psi), &[2, 3], &[0]).unwrap();
    let s = Spectrum::from_density(&reduced).unwrap();
    for alpha in [0.5, 2.0, 3.0, 10.0] {
        assert!(renyi(&s, alpha).unwrap().abs() <= 1e-12);
    }
}

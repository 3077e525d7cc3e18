use std::sync::OnceLock;

use proptest::prelude::*;

use lieheat::cli::{format_f64, ExperimentConfig};
use lieheat::group::{irrep_enumerate, GroupElement, GroupSpec};
use lieheat::heatkernel::SpectralKernel;
use lieheat::linalg::RMat;
use lieheat::operators::{
    basis_change_bounds, check_diag_dominant, comparability_constants, BasisChange, BiInvariantLaplacian,
    ComparabilityMethod, SubLaplacianSpec,
};
use lieheat::verify::{classify_trend, Trend};

fn su2_element() -> impl Strategy<Value = GroupElement> {
    prop::array::uniform3(-4.0f64..4.0).prop_map(|v| GroupSpec::su2().exp_vec(&v).unwrap())
}

fn su2_kernel() -> &'static SpectralKernel {
    static K: OnceLock<SpectralKernel> = OnceLock::new();
    K.get_or_init(|| {
        let g = GroupSpec::su2();
        let a = RMat::from_row_slice(3, 3, &[1.0, 0.3, 0.0, 0.3, 1.2, 0.2, 0.0, 0.2, 2.0]);
        let l = SubLaplacianSpec::new(g.clone(), a, BiInvariantLaplacian::unit(&g)).unwrap();
        SpectralKernel::build(&l, 1200.0).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn su2_irreps_are_homomorphisms(x in su2_element(), y in su2_element()) {
        let g = GroupSpec::su2();
        let xy = g.multiply(&x, &y).unwrap();
        for p in irrep_enumerate(&g, &[1.0], 15.0).unwrap() {
            let lhs = g.rep_matrix(&p, &xy).unwrap();
            let rhs = g.rep_matrix(&p, &x).unwrap() * g.rep_matrix(&p, &y).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-11);
        }
    }

    #[test]
    fn perturbed_density_is_symmetric_and_positive(x in su2_element(), t in 0.05f64..2.0) {
        let k = su2_kernel();
        let g = k.spec().group();
        let a = k.heat_density(t, &x).unwrap();
        let b = k.heat_density(t, &g.inverse(&x).unwrap()).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.abs_error + b.abs_error + 1e-12);
        prop_assert!(a.value + a.abs_error > 0.0);
    }

    #[test]
    fn blockwise_semigroup(t in 0.01f64..1.0, s in 0.01f64..1.0) {
        let k = su2_kernel();
        let g = k.spec().group();
        for (b, p) in k.blocks().iter().zip(k.irreps().iter()).take(12) {
            let d = g.irrep_dim(p);
            let prod = b.apply(|l| (-t * l).exp()).to_matrix(d) * b.apply(|l| (-s * l).exp()).to_matrix(d);
            let direct = b.apply(|l| (-(t + s) * l).exp()).to_matrix(d);
            prop_assert!((prod - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_dominance_gives_gershgorin_bounds(
        eps in 0.05f64..0.95,
        diag in prop::array::uniform3(0.5f64..3.0),
        raw in prop::array::uniform6(-1.0f64..1.0),
    ) {
        // scale each row's off-diagonal mass below eps·a_ii
        let mut a = RMat::from_diagonal(&nalgebra::DVector::from_row_slice(&diag));
        let pairs = [(0, 1), (0, 2), (1, 2)];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let v = raw[k] * 0.49 * eps * diag[i].min(diag[j]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        prop_assert!(check_diag_dominant(&a, eps).unwrap());
        let c = comparability_constants(&a, &[1.0; 3], ComparabilityMethod::Gershgorin).unwrap();
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let max = diag.iter().copied().fold(0.0, f64::max);
        prop_assert!(c.c >= (1.0 - eps) * min - 1e-12);
        prop_assert!(c.big_c <= (1.0 + eps) * max + 1e-12);
        let exact = comparability_constants(&a, &[1.0; 3], ComparabilityMethod::Eigen).unwrap();
        prop_assert!(exact.c >= c.c - 1e-12 && exact.big_c <= c.big_c + 1e-12);
    }

    #[test]
    fn basis_change_bounds_bracket_every_vector(
        t in prop::array::uniform9(-1.0f64..1.0),
        xi in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let m = RMat::identity(3, 3) * 2.0 + RMat::from_row_slice(3, 3, &t) * 0.5;
        let (c, big_c) = basis_change_bounds(&BasisChange::new(m.clone()).unwrap()).unwrap();
        let v = nalgebra::DVector::from_row_slice(&xi);
        let (n, tn) = (v.norm(), (&m * &v).norm());
        prop_assert!(tn >= c * n * (1.0 - 1e-12) - 1e-15);
        prop_assert!(tn <= big_c * n * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn table_numbers_round_trip(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        let back: f64 = format_f64(v).parse().unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }

    #[test]
    fn power_laws_are_classified(b in 0.5f64..3.0, c in 0.1f64..10.0) {
        let x: Vec<f64> = (0..16).map(|i| 0.5f64.powi(i)).collect();
        let down: Vec<f64> = x.iter().map(|t| c * t.powf(b)).collect();
        let up: Vec<f64> = x.iter().map(|t| c * t.powf(-b)).collect();
        let flat: Vec<f64> = x.iter().map(|t| c * (1.0 + 0.01 * t)).collect();
        prop_assert_eq!(classify_trend(&x, &down), Trend::Decreasing);
        prop_assert_eq!(classify_trend(&x, &up), Trend::Diverging);
        prop_assert_eq!(classify_trend(&x, &flat), Trend::Bounded);
    }

    #[test]
    fn echoed_configs_parse_back(t in 0.01f64..2.0, seed in any::<u32>(), points in 2usize..20) {
        let text = format!(
            "[group]\nfactors = [\"su2\"]\n[suites.semigroup]\nt = {t:?}\nseed = {seed}\npoints = {points}\n[suites.minkowski]\n"
        );
        let cfg = ExperimentConfig::parse(&text).unwrap();
        let again = ExperimentConfig::parse(&toml::to_string(&cfg).unwrap()).unwrap();
        prop_assert_eq!(cfg, again);
    }
}

use armax_core::armax::{stationary_joint_cdf, DEFAULT_TRUNC_TOL};
use armax_core::copulas::ExtremeValueCopula;
use armax_core::extremal::theoretical_mv_extremal_index;
use armax_core::{AttractionDomain, CopulaSpec, MarginSpec, ProcessConfig};
use proptest::prelude::*;

fn margin_strategy() -> impl Strategy<Value = MarginSpec> {
    prop_oneof![
        (0.5f64..3.0).prop_map(|alpha| MarginSpec::Frechet { alpha }),
        (0.2f64..3.0).prop_map(|rate| MarginSpec::Exponential { rate }),
        (0.2f64..2.0).prop_map(|k| MarginSpec::WeibullMin { k }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fixed_point(
        d in 1usize..=3,
        c in proptest::collection::vec(0.05f64..0.95, 3),
        margins in proptest::collection::vec(margin_strategy(), 3),
        x in proptest::collection::vec(0.2f64..20.0, 3),
        gamma in 1.0f64..4.0,
    ) {
        let cfg = ProcessConfig::new(c[..d].to_vec(), margins[..d].to_vec(), CopulaSpec::Gumbel { gamma }).unwrap();
        let x = &x[..d];
        let f = stationary_joint_cdf(&cfg, x, DEFAULT_TRUNC_TOL).unwrap();
        let xc: Vec<f64> = x.iter().zip(&cfg.c).map(|(x, c)| x / c).collect();
        let fc = stationary_joint_cdf(&cfg, &xc, DEFAULT_TRUNC_TOL).unwrap();
        let g = cfg.innovation_cdf(x);
        prop_assert!((f - fc * g).abs() <= 1e-10, "F={f} F(x/c)G={}", fc * g);
    }

    #[test]
    fn example_one_closed_form(
        tau in proptest::collection::vec(0.01f64..10.0, 4),
        c in proptest::collection::vec(0.01f64..0.99, 4),
        gamma in 1.0f64..8.0,
    ) {
        let doms = [AttractionDomain::Gumbel, AttractionDomain::Gumbel, AttractionDomain::Frechet { alpha: 1.0 }, AttractionDomain::Frechet { alpha: 1.0 }];
        let cop = CopulaSpec::Gumbel { gamma };
        let th = theoretical_mv_extremal_index(&cop, &doms, &c, &tau).unwrap().theta;
        let num = ((tau[2] * c[2]).powf(gamma) + (tau[3] * c[3]).powf(gamma)).powf(1.0 / gamma);
        let den = tau.iter().map(|t| t.powf(gamma)).sum::<f64>().powf(1.0 / gamma);
        prop_assert!((th - (1.0 - num / den)).abs() < 1e-10);
        prop_assert!((cop.exponent(&tau) - den).abs() < 1e-9 * den);
    }
}

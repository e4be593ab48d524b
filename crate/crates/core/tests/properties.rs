use proptest::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use wedge_spectra::band::{ess_spectrum_bottom, ground_energy, BandConfig, TauGrid};
use wedge_spectra::bounds::{gaussian_upper_bound, quasimode_energy, GAUSSIAN_NODES};
use wedge_spectra::geometry::{face_angles, GeometryClass, MagneticField};
use wedge_spectra::spec1d::{constants, Profile1D, Weight};

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn tangent_essential_spectrum_stays_above_theta0(
        gamma in 0.05f64..1.5,
        alpha in 0.1f64..0.9,
        tau in -4.0f64..4.0,
    ) {
        let alpha = alpha * PI;
        // in-plane part along the upper face
        let field = MagneticField::from_spherical(gamma, (PI - alpha) / 2.0).unwrap();
        let geom = face_angles(&field, alpha).unwrap();
        prop_assert_eq!(geom.klass, GeometryClass::Tangent);
        let bottom = ess_spectrum_bottom(&geom, tau).unwrap();
        prop_assert!(bottom >= constants().theta0_value() - 1e-9, "{}", bottom);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn optimal_gaussian_beats_sampled_gaussians(
        gamma in 0.3f64..1.5,
        theta in 0.0f64..1.2,
        alpha in 0.05f64..0.6,
        log_rho in -1.0f64..1.0,
        shift in -1.0f64..1.0,
    ) {
        let field = MagneticField::from_spherical(gamma, theta).unwrap();
        let alpha = alpha * PI;
        let (best, _) = gaussian_upper_bound(&field, alpha).unwrap();
        let profile = Profile1D::gaussian(log_rho.exp(), Weight::RadialR, GAUSSIAN_NODES).unwrap();
        let trial = quasimode_energy(&field, alpha, profile.moment_sqrt_r + shift, &profile).unwrap();
        prop_assert!(best.bound <= trial.bound + 1e-9, "{} > {}", best.bound, trial.bound);
    }
}

#[test]
fn ground_energy_does_not_exceed_e_star() {
    let cfg = BandConfig { length: 8.0, n: 16, taus: TauGrid { min: -2.0, max: 3.0, step: 0.5 }, ..BandConfig::default() };
    let cases = [
        (MagneticField::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0).unwrap(), 0.8 * PI),
        (MagneticField::new(0.0, 0.0, 1.0).unwrap(), 0.5 * PI),
        (MagneticField::new(0.3, 0.5, 0.6).unwrap(), 0.4 * PI),
    ];
    for (field, alpha) in cases {
        let (report, band) = ground_energy(&field, alpha, &cfg).unwrap();
        assert!(report.energy <= report.e_star + cfg.margin(), "{report:?}");
        assert!(band.values.iter().all(|&v| v >= report.energy));
    }
}

use std::f64::consts::{FRAC_PI_2, PI};

use liquilens::cap_geometry::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn sag_form_volume(d: f64, h: f64) -> f64 {
    let a = d / 2.0;
    PI * h * (3.0 * a * a + h * h) / 6.0
}

/// (D, h) with D ∈ [0.1, 10] and h ∈ (0, D/2].
fn cap() -> impl Strategy<Value = (f64, f64)> {
    (0.1f64..=10.0, 1e-6f64..=1.0).prop_map(|(d, u)| (d, u * d / 2.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn angle_form_volume_equals_sag_form((d, h) in cap()) {
        let r = radius_from_sag(d, h).unwrap();
        let theta = contact_angle_from_sag(d, h).unwrap();
        let v = cap_volume_from_angle(r, theta).unwrap();
        prop_assert!(rel(v, cap_volume_from_sag(d, h).unwrap()) <= 1e-12);
        prop_assert!(rel(v, sag_form_volume(d, h)) <= 1e-12);
    }

    #[test]
    fn sag_round_trips((d, h) in cap()) {
        let theta = contact_angle_from_sag(d, h).unwrap();
        prop_assert!(rel(sag_from_contact_angle(d, theta).unwrap(), h) <= 1e-10);
        let v = cap_volume_from_sag(d, h).unwrap();
        prop_assert!(rel(sag_from_volume(d, v).unwrap(), h) <= 1e-10);
    }

    #[test]
    fn scale_covariance((d, h) in cap(), k in 0.01f64..100.0) {
        let r = radius_from_sag(d, h).unwrap();
        let v = cap_volume_from_sag(d, h).unwrap();
        let theta = contact_angle_from_sag(d, h).unwrap();
        prop_assert!(rel(radius_from_sag(k * d, k * h).unwrap(), k * r) <= 1e-12);
        prop_assert!(rel(cap_volume_from_sag(k * d, k * h).unwrap(), k.powi(3) * v) <= 1e-12);
        prop_assert!(rel(contact_angle_from_sag(k * d, k * h).unwrap(), theta) <= 1e-12);
        let back = sag_from_volume(k * d, k.powi(3) * v).unwrap();
        prop_assert!(rel(back, k * h) <= 1e-10);
    }

    #[test]
    fn complementary_angle_form((d, h) in cap()) {
        let r = radius_from_sag(d, h).unwrap();
        let derived = FRAC_PI_2 - ((2.0 * r - 2.0 * h) / d).atan();
        let half_angle = 2.0 * (2.0 * h / d).atan();
        prop_assert!((derived - half_angle).abs() <= 1e-12);
        prop_assert!((contact_angle_from_sag(d, h).unwrap() - half_angle).abs() <= 1e-12);
    }

    #[test]
    fn decomposition_matches_contact_angle((d, h) in cap()) {
        let parts = angle_decomposition(d, h).unwrap();
        let theta = contact_angle_from_sag(d, h).unwrap();
        prop_assert!((parts.theta - theta).abs() <= 1e-12);
        // inscribed angle: the chord angle is half the contact angle
        prop_assert!((parts.gamma - parts.beta).abs() <= 1e-12);
    }

    #[test]
    fn resolved_states_agree((d, h) in cap()) {
        let from_sag = resolve_cap(d, CapInput::Sag(h)).unwrap();
        let from_volume = resolve_cap(d, CapInput::Volume(from_sag.volume)).unwrap();
        let from_angle = resolve_cap(d, CapInput::ContactAngle(from_sag.contact_angle)).unwrap();
        for other in [from_volume, from_angle] {
            prop_assert!(rel(other.sag, from_sag.sag) <= 1e-10);
            prop_assert!(rel(other.radius, from_sag.radius) <= 1e-10);
        }
    }
}

#[test]
fn monotone_on_dense_grid() {
    for d in [0.1, 2.0, 10.0] {
        let hs: Vec<f64> = (1..=1000).map(|i| d / 2.0 * f64::from(i) / 1000.0).collect();
        let thetas: Vec<f64> = hs.iter().map(|&h| contact_angle_from_sag(d, h).unwrap()).collect();
        let vols: Vec<f64> = hs.iter().map(|&h| cap_volume_from_sag(d, h).unwrap()).collect();
        assert!(thetas.windows(2).all(|w| w[1] > w[0]));
        assert!(vols.windows(2).all(|w| w[1] > w[0]));

        let vmax = hemisphere_volume(d);
        let sags: Vec<f64> = (1..=1000)
            .map(|i| sag_from_volume(d, vmax * f64::from(i) / 1000.0).unwrap())
            .collect();
        assert!(sags.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn flat_film_limit() {
    let radii: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4].iter().map(|&h| radius_from_sag(2.0, h).unwrap()).collect();
    assert!(radii.windows(2).all(|w| w[1] > w[0]));
    assert!(radii[3] > 4.9e3);
}

#[test]
fn single_precision_tracks_double() {
    for h in [0.05f32, 0.2, 0.4557, 1.0] {
        let v32 = cap_volume_from_sag(2.0f32, h).unwrap();
        let v64 = cap_volume_from_sag(2.0f64, f64::from(h)).unwrap();
        assert!(rel(f64::from(v32), v64) < 1e-6);
        let back = sag_from_volume(2.0f32, v32).unwrap();
        assert!(((back - h) / h).abs() < 1e-5);
    }
}

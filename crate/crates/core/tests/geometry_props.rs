use proptest::prelude::*;
use tls_noise::geometry::{
    field_kernel, geometry_matrix_element, sample_configuration, voltage_kernel, LayerBox,
    LayerRegion, OrientationClass, Tls, Vec3,
};
use tls_noise::inference::ModelHypothesis;

fn unit() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(u, phi)| {
        let s = (1.0 - u * u).sqrt();
        Vec3::new(s * phi.cos(), s * phi.sin(), u)
    })
}

fn site() -> impl Strategy<Value = Vec3> {
    (-100.0f64..100.0, -100.0f64..100.0).prop_map(|(x, y)| Vec3::new(x, y, 0.0))
}

fn position() -> impl Strategy<Value = Vec3> {
    (-200.0f64..200.0, -200.0f64..200.0, 5.0f64..120.0).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn tls(pos: Vec3, orient: Vec3) -> Tls {
    Tls::new(pos, orient, 1.0, 0.1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matrix_element_is_symmetric(p in position(), q in position(), a in unit(), b in unit(), r1 in site(), r2 in site()) {
        let m = tls(p, a);
        let n = tls(q, b);
        let x = geometry_matrix_element(&m, &n, r1, r2).unwrap();
        let y = geometry_matrix_element(&n, &m, r2, r1).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
    }

    #[test]
    fn sign_follows_projections(p in position(), a in unit(), r1 in site(), r2 in site()) {
        let t = tls(p, a);
        let u1 = (p - r1) * (1.0 / (p - r1).norm());
        let u2 = (p - r2) * (1.0 / (p - r2).norm());
        let s = a.dot(u1) * a.dot(u2);
        let g = geometry_matrix_element(&t, &t, r1, r2).unwrap();
        prop_assume!(s.abs() > 1e-9);
        prop_assert_eq!(g.signum(), s.signum());
    }

    #[test]
    fn slab_criterion(x in -300.0f64..300.0, y in -100.0f64..100.0, z in 1.0f64..100.0, d in 10.0f64..200.0) {
        prop_assume!((x.abs() - d / 2.0).abs() > 1e-6);
        let t = tls(Vec3::new(x, y, z), Vec3::X);
        let g = geometry_matrix_element(&t, &t, Vec3::new(-d / 2.0, 0.0, 0.0), Vec3::new(d / 2.0, 0.0, 0.0)).unwrap();
        prop_assert_eq!(g < 0.0, x.abs() < d / 2.0);
    }

    #[test]
    fn field_is_gradient_of_voltage(p in position(), a in unit(), r in site()) {
        let t = tls(p, a);
        let e = field_kernel(&t, r, 11.0).unwrap();
        let h = 1e-3;
        for (axis, step) in [Vec3::X, Vec3::Y, Vec3::Z].into_iter().enumerate() {
            let fd = (voltage_kernel(&t, r + step * h, 11.0).unwrap()
                - voltage_kernel(&t, r - step * h, 11.0).unwrap())
                / (2.0 * h);
            let scale = e.norm();
            prop_assert!((fd - e.component(axis)).abs() <= 1e-5 * scale, "axis {axis}: {fd} vs {}", e.component(axis));
        }
    }

    #[test]
    fn voltage_is_linear_in_moment(p in position(), a in unit(), r in site(), c in 0.01f64..100.0) {
        let t = tls(p, a);
        let scaled = t.clone().with_moment(c).unwrap();
        let v = voltage_kernel(&t, r, 11.0).unwrap();
        let w = voltage_kernel(&scaled, r, 11.0).unwrap();
        prop_assert!((w - c * v).abs() <= 1e-12 * (c * v).abs().max(1e-300));
    }
}

#[test]
fn kernel_reference_value() {
    // 40-digit reference for p = 1 e·nm, h = 50 nm, ε_r = 11
    let t = tls(Vec3::new(0.0, 0.0, 50.0), Vec3::Z);
    let v = voltage_kernel(&t, Vec3::default(), 11.0).unwrap();
    let reference = -5.236234719427517e-5;
    assert!(((v - reference) / reference).abs() < 1e-12, "{v}");
}

#[test]
fn symmetric_field_cases() {
    let above = Vec3::new(0.0, 0.0, 50.0);
    let e = field_kernel(&tls(above, Vec3::Z), Vec3::default(), 11.0).unwrap();
    assert!(e.x.abs() < 1e-30 && e.y.abs() < 1e-30 && e.z != 0.0);
    let e = field_kernel(&tls(above, Vec3::X), Vec3::default(), 11.0).unwrap();
    assert!(e.x != 0.0 && e.y.abs() < 1e-30);
}

fn hypothesis(n: usize, orientation: OrientationClass) -> ModelHypothesis {
    ModelHypothesis {
        n_tls: n,
        dipole_length: 1.0,
        orientation,
        layer: LayerRegion::Box(LayerBox::sheet(150.0, 72.0).unwrap()),
        rate_interval: (1e-5, 1.0),
        prior_weight: 1.0,
        epsilon_r: 11.0,
    }
}

#[test]
fn sampling_classes_and_determinism() {
    let c = sample_configuration(&hypothesis(10, OrientationClass::HorizontalY), 3).unwrap();
    assert!(c.tls().iter().all(|t| t.orientation() == Vec3::Y));
    let a = sample_configuration(&hypothesis(50, OrientationClass::FullyRandom), 11).unwrap();
    let b = sample_configuration(&hypothesis(50, OrientationClass::FullyRandom), 11).unwrap();
    assert_eq!(a, b);
    for t in a.tls() {
        let p = t.position();
        assert!(p.x.abs() <= 150.0 && p.y.abs() <= 150.0 && p.z == 72.0);
        assert!((1e-5..=1.0).contains(&t.switch_rate()));
    }
}

#[test]
fn fully_random_orientation_has_zero_mean_z() {
    let n = 10_000;
    let c = sample_configuration(&hypothesis(n, OrientationClass::FullyRandom), 5).unwrap();
    let mean: f64 = c.tls().iter().map(|t| t.orientation().z).sum::<f64>() / n as f64;
    // uniform cosθ on [−1, 1] has variance 1/3
    let se = (1.0 / 3.0 / n as f64).sqrt();
    assert!(mean.abs() < 3.0 * se, "{mean}");
}

#[test]
fn degenerate_layer_is_rejected_by_sampling() {
    let mut h = hypothesis(3, OrientationClass::VerticalZ);
    h.layer = LayerRegion::Box(LayerBox { x: (0.0, 0.0), y: (-1.0, 1.0), z: (50.0, 50.0) });
    assert!(matches!(sample_configuration(&h, 0), Err(tls_noise::Error::DegenerateLayer)));
}

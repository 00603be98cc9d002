//! Acceptance suite: every numbered criterion below runs at the default
//! desk-scale grids and prints one PASS line on success. Criterion 10
//! (byte-identical CLI output across runs and worker counts) lives in the
//! CLI crate's test suite.

use emknot::cavity::{check_boundary, check_symmetries, ModeSpec};
use emknot::clebsch::{
    check_gradient_relation, fields_from_clebsch, lemma_integrals, mobius_t2_value,
    mode_starred_partners, pair_field, primed_clebsch, starred_fields, CValue,
};
use emknot::field::{ScalarField, SpaceTimePoint, Vec3, DEFAULT_FD_STEP};
use emknot::quadrature::GridSpec;
use emknot::quantize::{
    amplitude_for_photons, energy_analytic, energy_numeric, helicity, quantization_report,
    ReportTolerances,
};
use emknot::topology::{
    canonical_hopf_link, degree_d, degree_d_fullperiod, degree_integrand, gauss_linking,
    hopf_scalar, surface_degree, t4_degree, trace_level_curve, SphereMap,
};
use emknot::{DEFAULT_SPACE_POINTS, DEFAULT_TIME_POINTS};
use num_complex::Complex64;
use std::f64::consts::PI;

const MODES: [[i64; 3]; 3] = [[1, 1, 1], [2, 1, 1], [3, 2, 1]];

#[test]
fn criterion_1_energy_identity() {
    for k in MODES {
        for a in [0.3, 1.0] {
            let mode = ModeSpec::new(k, a).unwrap();
            let expect = mode.omega * mode.omega * a * a * PI.powi(3) / 16.0;
            for i in 0..4 {
                let t = i as f64 * mode.tau / 7.0;
                let num = energy_numeric(&mode, t, DEFAULT_SPACE_POINTS)
                    .unwrap()
                    .value;
                let rel = (num - expect).abs() / expect;
                assert!(
                    rel < 1e-9,
                    "energy mismatch {rel:.3e} for k={k:?}, A={a}, t={t}"
                );
            }
        }
    }
    println!("criterion 1 (energy identity E = ω²A²π³/16): PASS");
}

#[test]
fn criterion_2_symmetry_suite() {
    for k in MODES {
        let mode = ModeSpec::new(k, 1.0).unwrap();
        let rep = check_symmetries(&mode, 1000);
        assert!(
            rep.max_violation < 1e-12,
            "symmetry violation {:.3e} for k={k:?}",
            rep.max_violation
        );
        let b = check_boundary(&mode, 1000);
        assert!(b.max_tangential_e < 1e-12 && b.max_normal_b < 1e-12);
    }
    println!("criterion 2 (reflection/time symmetry suite < 1e-12): PASS");
}

#[test]
fn criterion_3_lemma_integrals() {
    for k in [[1i64, 1, 1], [2, 1, 1]] {
        let mode = ModeSpec::new(k, 1.0).unwrap();
        let (e_star, b_star) = mode_starred_partners(&mode, 0.5, 0.5);
        let grid = GridSpec::cavity(DEFAULT_SPACE_POINTS);
        for frac in [8.0, 3.0] {
            let t = mode.tau / frac;
            let li = lemma_integrals(&mode.b_field(), &b_star, &mode.e_field(), &e_star, t, &grid)
                .unwrap();
            assert!(
                li.b_rel_diff() < 1e-8,
                "∫B·B* vs ∫B²: {:.3e} at t=τ/{frac}, k={k:?}",
                li.b_rel_diff()
            );
            assert!(
                li.e_rel_diff() < 1e-8,
                "∫E·E* vs ∫E²: {:.3e} at t=τ/{frac}, k={k:?}",
                li.e_rel_diff()
            );
        }
    }
    println!("criterion 3 (lemma ∫B·B* = ∫B², ∫E·E* = ∫E²): PASS");
}

#[test]
fn criterion_4_degree_integrand_identity() {
    let mode = ModeSpec::new([1, 1, 1], 1.0).unwrap();
    let grid = GridSpec::cavity(DEFAULT_SPACE_POINTS);
    let energy = energy_analytic(&mode);
    for i in 0..8 {
        // times where sin 2ωt is bounded away from zero
        let t = (i as f64 + 0.5) * mode.tau / 16.0;
        let value = degree_integrand(&mode, t, &grid).unwrap();
        let expect = energy * (2.0 * mode.omega * t).sin();
        let rel = (value - expect).abs() / expect.abs();
        assert!(rel < 1e-7, "integrand mismatch {rel:.3e} at t={t}");
    }
    println!("criterion 4 (degree integrand = E sin 2ωt): PASS");
}

#[test]
fn criterion_5_energy_quantization() {
    for n in [1.0, 2.0, 3.0, 7.0] {
        let a = amplitude_for_photons(n, [1, 1, 1]).unwrap();
        let mode = ModeSpec::new([1, 1, 1], a).unwrap();
        let d = degree_d(&mode, DEFAULT_SPACE_POINTS, DEFAULT_TIME_POINTS)
            .unwrap()
            .d;
        assert!(
            (d - 4.0 * n).abs() < 1e-6,
            "degree {d} vs 4n = {} for n={n}",
            4.0 * n
        );
        let rep = quantization_report(
            &mode,
            DEFAULT_SPACE_POINTS,
            DEFAULT_TIME_POINTS,
            ReportTolerances::default(),
        )
        .unwrap();
        assert_eq!(rep.d_rounded, Some(4 * n as i64));
        assert!(rep.pass, "report failed for n={n}: {rep:?}");
    }
    println!("criterion 5 (E = (d/4)·ω at quantized amplitudes): PASS");
}

#[test]
fn criterion_6_vanishing_integrals() {
    for (k, a) in [([1i64, 1, 1], 1.0), ([2, 1, 1], 0.7)] {
        let mode = ModeSpec::new(k, a).unwrap();
        let t4 = t4_degree(&mode.e_field(), &mode.b_field(), mode.tau, 32, 32).unwrap();
        assert!(
            t4.value.abs() < 1e-9,
            "T⁴ integral {} for k={k:?}",
            t4.value
        );

        let signed =
            degree_d_fullperiod(&mode, DEFAULT_SPACE_POINTS, DEFAULT_TIME_POINTS, false).unwrap();
        assert!(signed.abs() < 1e-9, "signed full period {signed}");

        let absolute =
            degree_d_fullperiod(&mode, DEFAULT_SPACE_POINTS, DEFAULT_TIME_POINTS, true).unwrap();
        let d = degree_d(&mode, DEFAULT_SPACE_POINTS, DEFAULT_TIME_POINTS)
            .unwrap()
            .d;
        assert!(
            (absolute - d).abs() < 1e-6 * d,
            "absolute variant {absolute} vs degree {d}"
        );
    }
    println!("criterion 6 (vanishing T⁴ and signed full-period integrals): PASS");
}

#[test]
fn criterion_7_helicity() {
    let mode = ModeSpec::new([1, 1, 1], 1.0).unwrap();
    let mut values = Vec::new();
    for i in 0..8 {
        let t = i as f64 * mode.tau / 8.0;
        let h = helicity(&mode, t, DEFAULT_SPACE_POINTS).unwrap().value;
        assert!(h.abs() < 1e-10, "helicity {h} at t={t}");
        values.push(h);
    }
    let spread = values.iter().cloned().fold(f64::MIN, f64::max)
        - values.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-10, "helicity spread {spread}");
    println!("criterion 7 (standing-mode helicity = 0, time-independent): PASS");
}

#[test]
fn criterion_8_topology_oracles() {
    let grid = SphereMap::param_grid(48);
    let id = surface_degree(&SphereMap::identity(), &grid).unwrap();
    assert_eq!(id.rounded, 1);
    assert!((id.raw - 1.0).abs() < 0.01);
    let dbl = surface_degree(&SphereMap::azimuth_doubling(), &grid).unwrap();
    assert_eq!(dbl.rounded, 2);
    assert!((dbl.raw - 2.0).abs() < 0.01);

    let (c1, c2) = canonical_hopf_link(512);
    let link = gauss_linking(&c1, &c2).unwrap();
    assert_eq!(link.rounded.abs(), 1);
    assert!((link.raw - link.rounded as f64).abs() < 0.01);

    // two fibers of the Hopf map, traced from seeds on distinct level sets
    let phi = hopf_scalar();
    let f0 = trace_level_curve(
        &phi,
        Complex64::new(0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        0.0,
        0.01,
        2000,
    )
    .unwrap();
    let s: f64 = 0.5;
    let f1 = trace_level_curve(
        &phi,
        Complex64::new(1.0, 0.0),
        Vec3::new(s, 1.0 - (2.0 - 2.0 * s * s).sqrt(), s),
        0.0,
        0.01,
        2000,
    )
    .unwrap();
    assert!(f0.closed && f1.closed, "fibers must close");
    let fiber_link = gauss_linking(&f0, &f1).unwrap();
    assert_eq!(
        fiber_link.rounded, 1,
        "fiber linking raw {}",
        fiber_link.raw
    );
    assert!(fiber_link.near_integer);
    println!("criterion 8 (degree, linking and Hopf-fiber oracles): PASS");
}

#[test]
fn criterion_9_clebsch_machinery() {
    // T₂ conjugate-inversion property on 100 deterministic pseudo-random inputs
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let z = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let t_conj = match mobius_t2_value(CValue::Finite(z.conj())) {
            CValue::Finite(w) => w,
            CValue::Infinity => continue,
        };
        let t_z = match mobius_t2_value(CValue::Finite(z)) {
            CValue::Finite(w) => w,
            CValue::Infinity => continue,
        };
        let expect = Complex64::new(1.0, 0.0) / t_z.conj();
        assert!((t_conj - expect).norm() < 1e-12);
    }

    // gauge invariance of the generated field
    let pair = emknot::clebsch::ClebschPair::new(
        ScalarField::spatial(|r| r.x.sin() * r.y.sin()),
        ScalarField::spatial(|r| r.z / (2.0 * PI) + 0.1 * r.x.sin()),
        false,
    );
    let before = pair_field(&pair);
    let after = pair_field(&emknot::clebsch::gauge_t1(&pair, |p| p * p - 0.3 * p));
    for i in 0..50 {
        let pt = SpaceTimePoint::new(
            0.3 + 0.05 * i as f64,
            2.9 - 0.04 * i as f64,
            0.5 + 0.045 * i as f64,
            0.0,
        );
        assert!((before.eval(&pt) - after.eval(&pt)).norm() < 1e-8);
    }

    // the primed construction reconstructs its fields: ∇P×∇S = B(r,0)cos ωt
    // and ∇U×∇V = E(r,τ/4)sin ωt. The supplied spatial pairs encode an
    // actual standing wave (ω = √2): B₀ = ∇p0×∇s0 and E₀ = ∇uq×∇vq satisfy
    // ∇×B₀ = ωE₀ and ∇×E₀ = ωB₀, so the starred/unstarred differences are
    // genuinely curl-free.
    let omega = 2.0f64.sqrt();
    let tau = 2.0 * PI / omega;
    let p0 = ScalarField::spatial(|r| r.x.sin() * r.y.sin())
        .with_spatial_gradient(|r| Vec3::new(r.x.cos() * r.y.sin(), r.x.sin() * r.y.cos(), 0.0));
    let s0 = ScalarField::spatial(|r| r.z / (2.0 * PI))
        .with_spatial_gradient(|_| Vec3::new(0.0, 0.0, 1.0 / (2.0 * PI)));
    let vq = ScalarField::spatial(|r| (1.0 - r.y.cos()) / 2.0)
        .with_spatial_gradient(|r| Vec3::new(0.0, r.y.sin() / 2.0, 0.0));
    let uq_scale = 2.0f64.sqrt() / PI;
    let uq = ScalarField::spatial(move |r| -uq_scale * r.x.cos())
        .with_spatial_gradient(move |r| Vec3::new(uq_scale * r.x.sin(), 0.0, 0.0));
    let samples: Vec<Vec3> = (0..200)
        .map(|i| {
            let f = i as f64 / 200.0;
            Vec3::new(
                0.2 + 2.7 * f,
                0.3 + 2.5 * ((7.0 * f) % 1.0),
                0.25 + 2.6 * ((13.0 * f) % 1.0),
            )
        })
        .collect();
    let primed = primed_clebsch(&p0, &s0, &vq, &uq, omega, &samples).unwrap();
    let b_rec = pair_field(&primed.ps);
    let (_, e_rec) = fields_from_clebsch(&primed.ps, &primed.vu);
    for (i, r) in samples.iter().take(50).enumerate() {
        let t = (i as f64 / 50.0) * tau;
        let pt = SpaceTimePoint::at(*r, t);
        let b0 = Vec3::new(r.x.sin() * r.y.cos(), -r.x.cos() * r.y.sin(), 0.0) / (2.0 * PI);
        assert!(
            (b_rec.eval(&pt) - b0 * (omega * t).cos()).norm() < 1e-6,
            "B reconstruction"
        );
        let e0 = Vec3::new(0.0, 0.0, r.x.sin() * r.y.sin()) / (PI * 2.0f64.sqrt());
        assert!(
            (e_rec.eval(&pt) - e0 * (omega * t).sin()).norm() < 1e-6,
            "E reconstruction"
        );
    }

    // starred/unstarred differences are curl-free for the standing-wave pairs
    let (e_star, b_star) = starred_fields(&primed.ps, &primed.vu);
    let rep = check_gradient_relation(
        &e_rec,
        &e_star,
        &b_rec,
        &b_star,
        tau,
        40,
        4242,
        DEFAULT_FD_STEP,
    );
    assert!(rep.max_curl_e_diff < 1e-5, "{}", rep.max_curl_e_diff);
    assert!(rep.max_curl_b_diff < 1e-5, "{}", rep.max_curl_b_diff);

    // and for a real mode with explicit gradient-shifted partners
    let mode = ModeSpec::new([2, 1, 1], 0.8).unwrap();
    let (me_star, mb_star) = mode_starred_partners(&mode, 0.5, 0.5);
    let rep = check_gradient_relation(
        &mode.e_field(),
        &me_star,
        &mode.b_field(),
        &mb_star,
        mode.tau,
        40,
        77,
        DEFAULT_FD_STEP,
    );
    assert!(rep.max_curl_e_diff < 1e-5 && rep.max_curl_b_diff < 1e-5);
    println!("criterion 9 (Clebsch machinery: T₂, T₁, reconstruction, curl relations): PASS");
}

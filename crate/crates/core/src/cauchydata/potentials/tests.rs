use super::*;
use crate::cauchydata::catalog::catalog_curve;
use crate::cauchydata::curve::{Ambient, FieldKind};
use crate::jet::Jet;
use crate::minkalg::orthonormal_defect;

fn curve(s: &str) -> CurveData {
    catalog_curve(&s.parse().unwrap()).unwrap()
}

/// Fourth-order central difference of a frame-valued function.
fn fd_frame<V: AmbientVector>(frame: impl Fn(f64) -> Frame3<V>, t: f64) -> Frame3<V> {
    let h = 1e-3;
    let (a, b, cc, d) = (frame(t - 2.0 * h), frame(t - h), frame(t + h), frame(t + 2.0 * h));
    [0, 1, 2].map(|i| (a[i] - d[i] + (cc[i] - b[i]) * 8.0) * (1.0 / (12.0 * h)))
}

fn lam_one(a: &LaurentTriple) -> Mat2 {
    a.eval(re(1.0))
}

#[test]
fn cmc_potential_at_one_is_the_frame_connection() {
    for (name, h) in [("lorentz-helix", 0.7), ("timelike-line", -1.0), ("lcircle:rho=1.5", 0.3), ("spacelike-line", 2.0)] {
        let data = curve(name);
        let case = classify(&data).unwrap().case;
        for t in [-0.6, 0.0, 0.45] {
            let frame = |u: f64| cmc_frame(&data.point(u), case).unwrap().0;
            let f = frame(t);
            assert!(orthonormal_defect(&f) < 1e-12, "{name}");
            let x = frame_connection(&f, &fd_frame(frame, t));
            let a = cmc_loop_potential(&data.point(t), case, h).unwrap();
            let d = (lam_one(&a) - x.to_matrix()).norm();
            assert!(d < 1e-9, "{name} t={t}: {d:e}");
            assert!(a.parity_defect() < 1e-15);
            assert!(a.realform_defect(crate::minkalg::RealForm::Split) < 1e-15);
        }
    }
}

#[test]
fn flat_line_has_only_mean_curvature_terms() {
    let data = curve("timelike-line");
    let h = 0.8;
    let a = cmc_loop_potential(&data.point(0.3), CaseKind::CmcTimelike, h).unwrap();
    // s = 1, so every entry is ±H/2
    assert_eq!(a.z0, Mat2::ZERO);
    assert!((a.p1 - Mat2::real(0.0, -0.4, 0.4, 0.0)).norm() < 1e-15);
    assert!((a.m1 - Mat2::real(0.0, 0.4, -0.4, 0.0)).norm() < 1e-15);
}

#[test]
fn circle_data_gives_the_revolution_pair() {
    for (rho, h) in [(1.0, -0.5), (2.0, 0.3), (0.5, -2.0)] {
        let data = curve(&format!("lcircle:rho={rho}"));
        let pot = potential_cmc_noncharacteristic(&data, h).unwrap();
        assert_eq!(pot.case(), CaseKind::CmcSpacelike);
        assert_eq!(pot.curve_map, CurveMap::Diagonal);
        let rev = potential_revolution_timelike(rho, h).unwrap();
        for t in [-0.7, 0.2] {
            let (a, b) = ((pot.pair.chi)(t), (rev.chi)(t));
            assert!((a.m1 - b.m1).norm() + (a.z0 - b.z0).norm() + (a.p1 - b.p1).norm() < 1e-12);
            let (a, b) = ((pot.pair.psi)(t), (rev.psi)(t));
            assert!((a.m1 - b.m1).norm() + (a.p1 - b.p1).norm() < 1e-12);
        }
    }
}

#[test]
fn revolution_pair_closed_forms() {
    let p = potential_revolution_timelike(1.0, -0.5).unwrap();
    let e0 = Vec3L::basis(0).to_matrix();
    let a = (p.chi)(0.0);
    assert!((a.p1 - e0 * -0.25).norm() < 1e-15);
    assert!((a.m1 - e0 * -0.25).norm() < 1e-15);
    // ρH = −1: the λ coefficient loses its upper entry
    let a = (potential_revolution_timelike(2.0, -0.5).unwrap().chi)(0.0);
    assert_eq!(a.p1.get(0, 1), re(0.0));
    assert_eq!(a.m1.get(1, 0), re(0.0));
    assert!((a.p1.get(1, 0).re + 0.5).abs() < 1e-15);
    let r = p.check(&[0.0, 1.0], &[0.0, 1.0]);
    assert!(r.regular && r.parity_defect == 0.0 && r.realform_defect == 0.0);
    assert!(potential_revolution_timelike(-1.0, 1.0).is_err());
    assert!(potential_revolution_timelike(1.0, 0.0).is_err());
}

#[test]
fn timelike_pair_is_regular_and_placed() {
    let data = curve("lorentz-helix").with_t0(0.3);
    let pot = potential_cmc_noncharacteristic(&data, 0.5).unwrap();
    assert_eq!(pot.curve_map, CurveMap::Antidiagonal);
    assert_eq!((pot.pair.x_base, pot.pair.y_base), (0.3, -0.3));
    let xs: Vec<f64> = (0..11).map(|i| -1.0 + 0.2 * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|x| -x).collect();
    let r = pot.pair.check(&xs, &ys);
    assert!(r.regular && r.parity_defect < 1e-15 && r.realform_defect < 1e-15);
    let Placement::Lorentz(iso) = pot.placement else { panic!() };
    let p = data.point(0.3);
    assert_eq!(iso.translation.coords(), p.pos);
    // E₀ is the unit tangent
    let s = (-ip_l3(Vec3L::from_coords(p.d1), Vec3L::from_coords(p.d1))).sqrt();
    assert!((iso.apply_vector(Vec3L::basis(0)) - Vec3L::from_coords(p.d1) * (1.0 / s)).coord_norm() < 1e-14);
    assert!(potential_cmc_noncharacteristic(&data, 0.0).is_err());
    assert!(potential_cmc_noncharacteristic(&curve("null-axis"), 0.5).is_err());
}

use crate::minkalg::ip_l3;

fn one(v: f64) -> ScalarFn {
    Arc::new(move |_| v)
}

#[test]
fn null_axis_potential_is_the_model_one() {
    let data = curve("null-axis");
    let pot = potential_cmc_null(&data, one(1.0), one(0.0), Some(0.5)).unwrap();
    assert_eq!(pot.mean_curvature, Some(0.5));
    for t in [-0.4, 0.0, 0.3] {
        let a = (pot.pair.chi)(t);
        assert!((a.p1 - Mat2::real(0.0, 0.0, 1.0, 0.0)).norm() < 1e-12, "{:?}", a.p1);
        assert!(a.z0.norm() < 1e-12 && a.m1.norm() == 0.0);
        let k = pot.null_scale.as_ref().unwrap()(t);
        assert!((k + 1.0).abs() < 1e-12, "k = {k}");
    }
    let b = (pot.pair.psi)(0.2);
    assert_eq!(b.m1, Mat2::real(0.0, 1.0, 0.0, 0.0));
    assert!(matches!(
        potential_cmc_null(&data, one(1.0), one(0.0), Some(0.7)),
        Err(Error::HypothesisViolation { .. })
    ));
    assert!(matches!(
        potential_cmc_null(&data, one(0.0), one(1.0), None),
        Err(Error::HypothesisViolation { .. })
    ));
    // a different H in the data is forced through
    let pot = potential_cmc_null(&curve("null-axis:H=2"), one(1.0), one(0.0), None).unwrap();
    assert!((pot.mean_curvature.unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn null_chi_matches_the_null_frame_connection() {
    // null helix f' = (1, cos t, sin t) with V = ½(−1, cos t, sin t)
    let data = CurveData::from_jets(
        "nh",
        Ambient::Lorentz,
        FieldKind::Velocity,
        (-1.0, 1.0),
        |t| {
            let (s, c) = t.sin_cos();
            [t, s, -c]
        },
        |t| {
            let (s, c) = t.sin_cos();
            [Jet::constant(-0.5), c * 0.5, s * 0.5]
        },
    );
    let rep = classify(&data).unwrap();
    assert_eq!(rep.case, CaseKind::CmcNull);
    let pot = potential_cmc_null(&data, one(0.3), one(0.1), None).unwrap();
    for t in [-0.5, 0.4] {
        let frame = |u: f64| cmc_frame(&data.point(u), CaseKind::CmcNull).unwrap().0;
        let x = frame_connection(&frame(t), &fd_frame(frame, t));
        let a = (pot.pair.chi)(t);
        assert!((lam_one(&a) - x.to_matrix()).norm() < 1e-9);
    }
}

#[test]
fn parabola_invariants_match_closed_form() {
    let data = curve("parabola");
    let rep = classify(&data).unwrap();
    for t in [-0.9, -0.2, 0.0, 0.5] {
        let (inv, frame) = psph_invariants(&data.point(t), rep.case, 1.0).unwrap();
        let q = 1.0 + 4.0 * t * t;
        let want = (q.powi(3) + 4.0).sqrt() / (2.0 * q);
        assert!((0.5 * (inv.beta + inv.alpha) - want).abs() < 1e-13);
        assert!((0.5 * (inv.beta - inv.alpha) - want).abs() < 1e-13);
        assert!(inv.theta_v.abs() < 1e-14);
        assert!(orthonormal_defect(&frame) < 1e-13);
    }
}

#[test]
fn circle_invariants_match_frenet() {
    for r in [0.5_f64, 1.0, 3.0] {
        let data = curve(&format!("circle:r={r}"));
        let (inv, _) = psph_invariants(&data.point(0.3), CaseKind::PsphPrincipal, 1.0).unwrap();
        // |f'| = r, |N'| = r κ = 1
        assert!((inv.beta - (r * r + 1.0).sqrt()).abs() < 1e-14);
        assert!((inv.theta - r.atan()).abs() < 1e-14);
    }
}

#[test]
fn psph_potential_at_one_is_the_frame_connection() {
    for name in ["parabola", "ellipse", "cubic", "lemniscate", "catenary", "helix", "helix:r=2,c=1.5"] {
        let data = curve(name);
        let rep = classify(&data).unwrap();
        for t in [-0.5, 0.1, 0.6] {
            let frame = |u: f64| psph_invariants(&data.point(u), rep.case, 1.0).unwrap().1;
            let f = frame(t);
            assert!(orthonormal_defect(&f) < 1e-12, "{name}");
            let x = frame_connection(&f, &fd_frame(frame, t));
            let (inv, _) = psph_invariants(&data.point(t), rep.case, 1.0).unwrap();
            let a = psph_loop_potential(&inv);
            let d = (lam_one(&a) - x.to_matrix()).norm();
            assert!(d < 1e-9, "{name} t={t}: {d:e}");
            assert!(a.realform_defect(crate::minkalg::RealForm::Unitary) < 1e-15);
            assert!(a.parity_defect() < 1e-15);
        }
    }
}

#[test]
fn general_case_identities() {
    let data = curve("helix");
    for p in data.samples(9) {
        let (inv, _) = psph_invariants(&p, CaseKind::PsphGeneral, 1.0).unwrap();
        let [f1, _, _, n1, _] = psph_vectors(&p, 1.0);
        let (ff, nn, g) = (f1.ip(&f1), n1.ip(&n1), f1.ip(&n1));
        let (a2, b2) = (inv.alpha.powi(2), inv.beta.powi(2));
        let phi = 2.0 * inv.theta;
        assert!(phi > 0.0 && phi < std::f64::consts::PI);
        assert!((a2 + b2 - ff - nn).abs() < 1e-12);
        assert!((0.5 * (b2 - a2) * phi.sin() - g).abs() < 1e-12);
        assert!(((b2 - a2) * phi.cos() - (nn - ff)).abs() < 1e-12);
        assert!((ff * nn - g * g - a2 * b2).abs() < 1e-12);
    }
}

#[test]
fn flipping_the_normal_is_absorbed() {
    let a = curve("ellipse");
    let b = CurveData::from_jets(
        "ellipse-",
        Ambient::Euclid,
        FieldKind::Normal,
        (-1.0, 1.0),
        |t| {
            let (s, c) = t.sin_cos();
            [s, c * 2.0, Jet::constant(0.0)]
        },
        |t| {
            let (s, c) = t.sin_cos();
            let l = (s * s * 4.0 + c * c).sqrt().recip();
            [s * -2.0 * l, c * -l, Jet::constant(0.0)]
        },
    );
    let pa = potential_psph_noncharacteristic(&a).unwrap();
    let pb = potential_psph_noncharacteristic(&b).unwrap();
    assert!(!pa.report.normal_flipped);
    assert!(pb.report.normal_flipped);
    for t in [-0.4, 0.3] {
        let (x, y) = ((pa.pair.chi)(t), (pb.pair.chi)(t));
        assert!((x.p1 - y.p1).norm() + (x.z0 - y.z0).norm() + (x.m1 - y.m1).norm() < 1e-12);
    }
    assert_eq!(pa.placement, pb.placement);
}

#[test]
fn asymptotic_helix_potential() {
    for sign in [1.0, -1.0] {
        let data = curve(&format!("asymptotic-helix:sign={sign}"));
        let alpha: ComplexFn = Arc::new(|_| c(0.0, 0.5));
        let pot = potential_psph_characteristic(&data, alpha).unwrap();
        assert_eq!(pot.curve_map, CurveMap::XAxis);
        let a = (pot.pair.chi)(0.2);
        // b = |f'|/2 = 1/(2√2)
        let b = a.p1.get(0, 1).im;
        assert!((b - 0.5 / 2f64.sqrt()).abs() < 1e-14, "b = {b}");
        assert!(a.realform_defect(crate::minkalg::RealForm::Unitary) < 1e-15);
        let p = (pot.pair.psi)(0.0);
        assert!(p.realform_defect(crate::minkalg::RealForm::Unitary) < 1e-15);
        let zero: ComplexFn = Arc::new(|_| c(0.0, 0.0));
        assert!(potential_psph_characteristic(&data, zero).is_err());
    }
    assert!(potential_psph_characteristic(&curve("parabola"), Arc::new(|_| re(1.0))).is_err());
}

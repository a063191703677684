use tomflow_web::{delta_v_curve_native, riemann_profile_native, stability_curve_native, Setup};

fn fig(q_exp: f64) -> Setup {
    Setup::new(q_exp, 1.0, 1.5, 0.8, 0.2, 0.1, 0.5)
}

#[test]
fn profile_covers_all_regions() {
    let p = riemann_profile_native(&fig(0.5), 0.3, -1.0, 1.0, 401).unwrap();
    assert_eq!(p.x.len(), 401);
    for code in 0..4 {
        assert!(p.region.contains(&(code as f64)), "region {code}");
    }
    assert!(p.summary.starts_with("rarefaction"));
    assert!(p.region.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn linear_pressure_has_no_deviation() {
    let c = delta_v_curve_native(&fig(1.0), 0.3, 50).unwrap();
    assert_eq!(c.x.len(), 50);
    assert!(c.y.iter().all(|d| d.abs() < 1e-12));
    let c = delta_v_curve_native(&fig(2.0), 0.3, 50).unwrap();
    assert!(c.y.iter().any(|d| d.abs() > 1e-4));
}

#[test]
fn shock_has_no_fan_curve() {
    let s = Setup::new(1.0, 2.0, 1.5, 0.3, 0.5, 0.7, 0.2);
    assert!(delta_v_curve_native(&s, 0.3, 10).is_err());
    let p = riemann_profile_native(&s, 0.3, -1.0, 1.0, 11).unwrap();
    assert!(p.summary.starts_with("shock"));
}

#[test]
fn stability_matches_closed_form() {
    // q = h, h = ρ, H = ρ²
    let s = stability_curve_native(1.0, 1.0, 2.0, 0.5, 0.1, 0.9, 9).unwrap();
    for (rho, mu) in s.rho.iter().zip(&s.mu) {
        assert!((mu - rho * (1.0 - 2.0 * rho)).abs() < 1e-12);
    }
    assert!(s.gamma.iter().all(|g| g.abs() < 1e-14));
}

#[test]
fn rejects_bad_grids() {
    assert!(riemann_profile_native(&fig(1.0), 0.0, -1.0, 1.0, 10).is_err());
    assert!(stability_curve_native(1.0, 1.0, 1.0, 0.0, 0.5, 0.1, 10).is_err());
    assert!(riemann_profile_native(&Setup::new(-1.0, 1.0, 1.0, 0.5, 0.1, 0.2, 0.3), 0.3, -1.0, 1.0, 10).is_err());
}

use chermnykh::dynamics::{integrate, IntegrateOptions};
use chermnykh::equilibria::{collinear_points, triangular_points, Label};
use chermnykh::model::{DiskProfile, MeanMotion, PiMode};
use chermnykh::stability::{classify, solve_quartic};
use chermnykh::{Model, Position, State, SystemParams};
use nalgebra::Matrix4;
use proptest::prelude::*;

const H: f64 = 1e-6;

fn disk_params() -> impl Strategy<Value = SystemParams> {
    (0.001..0.1f64, 0.6..1.0f64, 0.0..0.005f64, 1.1..2.0f64, 0.0..0.5f64, any::<bool>()).prop_map(
        |(mu, q1, a2, b, mb, local)| {
            let mut p = SystemParams::paper().with_mu(mu);
            p.q1 = q1;
            p.a2 = a2;
            p.disk = DiskProfile::with_mass(1.0, b, 1e-4, mb);
            p.pi_mode = PiMode::Exact;
            p.mean_motion = if local { MeanMotion::Local } else { MeanMotion::Frozen };
            p
        },
    )
}

fn free_params() -> impl Strategy<Value = SystemParams> {
    (0.001..0.5f64, 0.6..1.0f64, 0.0..0.005f64).prop_map(|(mu, q1, a2)| {
        let mut p = SystemParams::classical(mu);
        p.q1 = q1;
        p.a2 = a2;
        p
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

fn fd<F: Fn(Position) -> f64>(f: F, p: Position) -> (f64, f64) {
    let dx = (f(Position::new(p.x + H, p.y)) - f(Position::new(p.x - H, p.y))) / (2.0 * H);
    let dy = (f(Position::new(p.x, p.y + H)) - f(Position::new(p.x, p.y - H))) / (2.0 * H);
    (dx, dy)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_matches_fd_of_omega_without_disk(params in free_params(), (u, v) in (-2.0..2.0f64, -2.0..2.0f64)) {
        let m = Model::new(params).unwrap();
        let p = Position::new(u, v);
        let d = m.distances(p).unwrap();
        prop_assume!(d.r1 > 0.1 && d.r2 > 0.1);
        let g = m.gradient(p).unwrap();
        let (fx, fy) = fd(|q| m.omega(q).unwrap(), p);
        prop_assert!(close(g.x, fx, 1e-5) && close(g.y, fy, 1e-5), "{g:?} vs ({fx}, {fy})");
    }

    #[test]
    fn gradient_matches_fd_of_force_potential(params in disk_params(), seed in (-2.0..2.0f64, -2.0..2.0f64)) {
        let mut params = params;
        params.mean_motion = MeanMotion::Frozen;
        let m = Model::new(params).unwrap();
        let p = Position::new(seed.0, seed.1);
        let d = m.distances(p).unwrap_or(chermnykh::model::Distances { r1: 0.0, r2: 0.0, r: 0.0 });
        prop_assume!(d.r1 > 0.1 && d.r2 > 0.1 && d.r > 0.1);
        let g = m.gradient(p).unwrap();
        let (fx, fy) = fd(|q| m.force_potential(q).unwrap(), p);
        prop_assert!(close(g.x, fx, 1e-5) && close(g.y, fy, 1e-5), "{g:?} vs ({fx}, {fy})");
    }

    #[test]
    fn omega_and_gradient_differ_by_known_disk_term(params in disk_params(), seed in (-2.0..2.0f64, -2.0..2.0f64)) {
        let mut params = params;
        params.mean_motion = MeanMotion::Frozen;
        let m = Model::new(params).unwrap();
        let p = Position::new(seed.0, seed.1);
        let d = m.distances(p).unwrap_or(chermnykh::model::Distances { r1: 0.0, r2: 0.0, r: 0.0 });
        prop_assume!(d.r1 > 0.1 && d.r2 > 0.1 && d.r > 0.1);
        let g = m.gradient(p).unwrap();
        let (fx, fy) = fd(|q| m.omega(q).unwrap(), p);
        let k = 17.0 / 8.0 * m.disk().log / d.r.powi(4);
        prop_assert!(close(fx - g.x, k * p.x, 1e-5) && close(fy - g.y, k * p.y, 1e-5));
    }

    #[test]
    fn hessian_matches_fd_of_gradient(params in disk_params(), seed in (-2.0..2.0f64, -2.0..2.0f64)) {
        let m = Model::new(params).unwrap();
        let p = Position::new(seed.0, seed.1);
        let d = m.distances(p).unwrap_or(chermnykh::model::Distances { r1: 0.0, r2: 0.0, r: 0.0 });
        prop_assume!(d.r1 > 0.1 && d.r2 > 0.1 && d.r > 0.1);
        // Jacobian of the gradient field as used by Newton.
        let j = m.gradient_jacobian(p).unwrap();
        let (gxx, gxy) = fd(|q| m.gradient(q).unwrap().x, p);
        let (gyx, gyy) = fd(|q| m.gradient(q).unwrap().y, p);
        prop_assert!(close(j.xx, gxx, 1e-5) && close(j.yy, gyy, 1e-5));
        prop_assert!(close(j.xy, gxy, 1e-5) && close(j.xy, gyx, 1e-5));
        // Hessian with the mean motion frozen at the point.
        let lin = m.linearized_at(p).unwrap();
        let h = m.hessian(p).unwrap();
        let (hxx, hxy) = fd(|q| lin.gradient(q).unwrap().x, p);
        let (_, hyy) = fd(|q| lin.gradient(q).unwrap().y, p);
        prop_assert!(close(h.xx, hxx, 1e-5) && close(h.yy, hyy, 1e-5) && close(h.xy, hxy, 1e-5));
    }

    #[test]
    fn omega_is_even_in_y(params in disk_params(), seed in (-2.0..2.0f64, 0.05..2.0f64)) {
        let m = Model::new(params).unwrap();
        let p = Position::new(seed.0, seed.1);
        let q = Position::new(seed.0, -seed.1);
        prop_assume!(m.distances(p).map(|d| d.r1 > 1e-3 && d.r2 > 1e-3).unwrap_or(false));
        prop_assert_eq!(m.omega(p).unwrap(), m.omega(q).unwrap());
        prop_assert_eq!(m.gradient(p).unwrap().y, -m.gradient(q).unwrap().y);
        prop_assert_eq!(m.hessian(p).unwrap().xy, -m.hessian(q).unwrap().xy);
    }

    #[test]
    fn closure_round_trip(b in 1.01..3.0f64, h in 1e-5..1e-3f64, mb in 0.0..1.0f64) {
        let disk = DiskProfile::with_mass(1.0, b, h, mb);
        for pi in [PiMode::Exact, PiMode::Paper314] {
            let back = DiskProfile::with_density(1.0, b, h, disk.c(pi));
            prop_assert!((back.mass(pi) - mb).abs() <= 1e-12 * (1.0 + mb));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn quartic_matches_variational_matrix(params in disk_params()) {
        let m = Model::new(params).unwrap();
        let mut points = collinear_points(&m).unwrap();
        if let Ok(t) = triangular_points(&m) {
            if t.l4().converged {
                points.push(*t.l4());
            }
        }
        prop_assert!(!points.is_empty());
        for pt in points {
            let r = classify(&pt, &m).unwrap();
            let (h, n) = (r.quartic.hessian, r.quartic.n_sq.sqrt());
            #[rustfmt::skip]
            let a = Matrix4::new(
                0.0, 0.0, 1.0, 0.0,
                0.0, 0.0, 0.0, 1.0,
                h.xx, h.xy, 0.0, 2.0 * n,
                h.xy, h.yy, -2.0 * n, 0.0,
            );
            let mut eig: Vec<_> = a.complex_eigenvalues().iter().copied().collect();
            let roots = solve_quartic(r.quartic.p, r.quartic.q);
            let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for z in roots {
                let (k, d) = eig
                    .iter()
                    .enumerate()
                    .map(|(k, w)| (k, (w - z).norm()))
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .unwrap();
                prop_assert!(d < 1e-8 * scale, "{} {z} off by {d}", pt.label);
                eig.swap_remove(k);
            }
        }
    }
}

/// Independent classical oracle: bisection on the textbook collinear force.
fn classical_collinear(mu: f64) -> [f64; 3] {
    let f = |x: f64| {
        let d1 = x + mu;
        let d2 = x - 1.0 + mu;
        x - (1.0 - mu) * d1 / d1.abs().powi(3) - mu * d2 / d2.abs().powi(3)
    };
    let bisect = |mut a: f64, mut b: f64| {
        let sa = f(a).signum();
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m).signum() == sa {
                a = m
            } else {
                b = m
            }
        }
        0.5 * (a + b)
    };
    let e = 1e-9;
    [bisect(1.0 - mu + e, 3.0), bisect(-mu + e, 1.0 - mu - e), bisect(-3.0, -mu - e)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn classical_limit_matches_oracles(mu in 0.001..0.5f64) {
        let m = Model::new(SystemParams::classical(mu)).unwrap();
        let pts = collinear_points(&m).unwrap();
        prop_assert_eq!(pts.len(), 3);
        let oracle = classical_collinear(mu);
        for (label, x) in [Label::L1, Label::L2, Label::L3].into_iter().zip(oracle) {
            let p = pts.iter().find(|p| p.label == label).unwrap();
            prop_assert!((p.x - x).abs() < 1e-9, "{label}: {} vs {x}", p.x);
        }
        let t = triangular_points(&m).unwrap();
        prop_assert!((t.l4().x - (0.5 - mu)).abs() < 1e-9);
        prop_assert!((t.l4().y - 3f64.sqrt() / 2.0).abs() < 1e-9);
        prop_assert_eq!(t.l5().y, -t.l4().y);
    }
}

fn classical_l4(mu: f64) -> (Model, State) {
    let m = Model::new(SystemParams::classical(mu)).unwrap();
    (m, State::at_rest(Position::new(0.5 - mu, 3f64.sqrt() / 2.0)))
}

#[test]
fn jacobi_drift_near_l4() {
    let (m, s) = classical_l4(0.001);
    let s = State::new(s.x + 1e-8, s.y, 0.0, 0.0);
    let tr = integrate(&m, s, 20.0, IntegrateOptions::default()).unwrap();
    assert_eq!(tr.last().t, 20.0);
    assert!(tr.c_drift < 1e-8, "{}", tr.c_drift);
}

#[test]
fn time_reversal_returns_to_start() {
    let mut params = SystemParams::paper();
    params.mean_motion = MeanMotion::Frozen;
    let m = Model::new(params).unwrap();
    let s0 = State::new(0.45, 0.7, 0.01, -0.02);
    let fwd = integrate(&m, s0, 10.0, IntegrateOptions::default()).unwrap();
    let e = fwd.last().state;
    // Same flow run backward from the end state.
    let back = integrate(&m, e, -10.0, IntegrateOptions::default()).unwrap();
    let r = back.last().state;
    let err = [r.x - s0.x, r.y - s0.y, r.vx - s0.vx, r.vy - s0.vy].iter().map(|d| d.abs()).fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn l1_escape_rate_matches_eigenvalue() {
    let mu = 0.01;
    let m = Model::new(SystemParams::classical(mu)).unwrap();
    let l1 = collinear_points(&m).unwrap().into_iter().find(|p| p.label == Label::L1).unwrap();
    let rate = classify(&l1, &m).unwrap().max_re();
    let s0 = State::new(l1.x + 1e-6, 0.0, 0.0, 0.0);
    let tr = integrate(&m, s0, 8.0, IntegrateOptions::default()).unwrap();
    let dist = |s: &State| (s.x - l1.x).hypot(s.y);
    // Growth between the first samples past 1e-5 and past 1e-3.
    let a = tr.samples.iter().find(|s| dist(&s.state) > 1e-5).unwrap();
    let b = tr.samples.iter().find(|s| dist(&s.state) > 1e-3).unwrap();
    let measured = (dist(&b.state) / dist(&a.state)).ln() / (b.t - a.t);
    assert!((measured - rate).abs() < 0.2 * rate, "{measured} vs {rate}");
}

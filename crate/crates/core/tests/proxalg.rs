use hadamard::bifunction::{dual_residual, equilibrium_residual, Bifunction, ConvexFunctional, DomainK, VectorField};
use hadamard::geometry::{random_point, Point, Space};
use hadamard::proxalg::{
    asymptotic_regularity, diameter_bound, fejer_check, obtuse_angle_check, residual_lower_bound, run_prox,
    telescoping_violation, to_csv, to_json, Provenance, RunConfig, Status, StepSchedule, StopRule, CSV_HEADER,
};
use hadamard::resolvent::ResolventQuery;
use hadamard::sampling;
use nalgebra::Matrix2;

fn e(c: &[f64]) -> Point {
    Point::euclidean(c.to_vec())
}

fn half_sq(p: Point) -> Bifunction {
    Bifunction::FromFunctional(ConvexFunctional::half_sq_dist(p, 1.0))
}

fn rotation() -> Bifunction {
    Bifunction::FromField(VectorField::EuclideanAffine {
        m: vec![vec![0.0, -1.0], vec![1.0, 0.0]],
        b: vec![0.0, 0.0],
    })
}

fn constant(space: Space, f: Bifunction, x0: Point, lambda: f64, n: usize) -> RunConfig {
    let mut c = RunConfig::new(space, f, DomainK::WholeSpace, x0, StepSchedule::Constant { lambda });
    c.max_iters = n;
    c.stop = StopRule::MaxIters;
    c
}

fn prov() -> Provenance {
    Provenance {
        tool_version: "test".into(),
        config_hash: "0".into(),
        seed: 0,
    }
}

#[test]
fn half_sq_iterates_decay_geometrically() {
    let cases = [
        (Space::euclidean(2), e(&[3.0, -1.0]), e(&[0.5, 0.5])),
        (Space::hyperboloid(2), Point::hyperboloid_lift(&[1.0, 1.5]), Point::hyperboloid_lift(&[-0.5, 0.0])),
        (Space::spider(3), Point::spider(0, 2.0), Point::spider(2, 1.0)),
    ];
    for (s, x0, p) in cases {
        let lam = 0.8;
        let t = run_prox(&constant(s.clone(), half_sq(p.clone()), x0.clone(), lam, 30)).unwrap();
        let d0 = s.dist(&x0, &p).unwrap();
        for (k, x) in t.iterates.iter().enumerate() {
            let expect = d0 / (1.0 + lam).powi(k as i32);
            assert!((s.dist(x, &p).unwrap() - expect).abs() <= 1e-6, "{} k={k}", s.label());
        }
    }
}

#[test]
fn equilibrium_start_is_stationary() {
    let s = Space::spider(3);
    let p = Point::spider(1, 1.5);
    let mut c = constant(s, half_sq(p.clone()), p.clone(), 1.0, 5);
    c.stop = StopRule::SuccessiveDist { eps: 1e-12 };
    let t = run_prox(&c).unwrap();
    assert_eq!(t.status, Status::Converged);
    assert!(t.iterates.iter().all(|x| *x == p));
    assert_eq!(residual_lower_bound(&t, 0).unwrap(), 0.0);
    assert_eq!(fejer_check(&t, &p).unwrap(), 0.0);
}

#[test]
fn rotation_contracts_by_the_singular_value() {
    let lam: f64 = 1.0;
    // J = (I + λR)^{-1}; its singular values are all equal
    let j = (Matrix2::<f64>::identity() + lam * Matrix2::new(0.0, -1.0, 1.0, 0.0)).try_inverse().unwrap();
    let factor = j.singular_values()[0];
    assert!((factor - 0.5f64.sqrt()).abs() < 1e-15);

    let s = Space::euclidean(2);
    let x0 = e(&[2.0, 1.0]);
    let n0 = s.dist(&x0, &s.origin()).unwrap();
    let t = run_prox(&constant(s.clone(), rotation(), x0, lam, 30)).unwrap();
    for (k, x) in t.iterates.iter().enumerate() {
        let norm = s.dist(x, &s.origin()).unwrap();
        assert!((norm - n0 * factor.powi(k as i32)).abs() <= 1e-6);
    }
    assert!(fejer_check(&t, &s.origin()).unwrap() < 0.0);
}

#[test]
fn ball_diameter_bound_halves_with_doubling_steps() {
    let s = Space::euclidean(2);
    let k = DomainK::ball(e(&[0.0, 0.0]), 2.0);
    let mut c = RunConfig::new(
        s.clone(),
        half_sq(e(&[0.5, 0.5])),
        k.clone(),
        e(&[-1.5, 1.0]),
        StepSchedule::Geometric { lambda0: 1.0, ratio: 2.0 },
    );
    c.max_iters = 12;
    c.stop = StopRule::MaxIters;
    c.inner_tol = 1e-10;
    let t = run_prox(&c).unwrap();
    assert_eq!(t.status, Status::MaxIters);
    let b = t.diameter_bounds.as_ref().unwrap();
    assert_eq!(b[0], -16.0);
    for i in 1..b.len() {
        assert_eq!(b[i], 0.5 * b[i - 1]);
        assert_eq!(diameter_bound(&t, i, &k).unwrap(), b[i]);
    }
    for (i, (&eq, &lb)) in t.equilibrium_residuals.iter().zip(&t.residual_lower_bounds).enumerate() {
        assert!(eq >= lb - 1e-9, "step {i}");
        assert!(eq >= b[i]);
    }
    assert!(t.equilibrium_residuals.last().unwrap().abs() < 1e-6);
    assert!(diameter_bound(&t, 0, &DomainK::WholeSpace).is_err());
    assert!(residual_lower_bound(&t, 99).is_err());
}

#[test]
fn successive_bound_holds_on_unconstrained_runs() {
    let mut rng = sampling::stream(3, 0);
    for s in [Space::euclidean(3), Space::hyperboloid(2), Space::spider(4)] {
        let p = random_point(&s, 1.0, &mut rng);
        let x0 = random_point(&s, 2.0, &mut rng);
        let mut c = constant(s.clone(), half_sq(p.clone()), x0, 0.5, 15);
        c.reference_solution = Some(p.clone());
        let t = run_prox(&c).unwrap();
        for i in 0..t.len() {
            assert!(t.equilibrium_residuals[i] >= t.residual_lower_bounds[i] - 1e-9);
        }
        assert!(telescoping_violation(&t, &p).unwrap() <= 1e-6);
        assert!(fejer_check(&t, &p).unwrap() <= 2e-6);
    }
}

#[test]
fn final_iterates_solve_primal_and_dual_problems() {
    let s = Space::euclidean(2);
    let mut rng = sampling::stream(9, 0);
    let grid: Vec<Point> = (0..1000).map(|_| random_point(&s, 3.0, &mut rng)).collect();
    for f in [half_sq(e(&[0.3, -0.2])), rotation()] {
        let mut c = constant(s.clone(), f.clone(), e(&[2.0, 2.0]), 1.0, 200);
        c.stop = StopRule::SuccessiveDist { eps: 1e-9 };
        let t = run_prox(&c).unwrap();
        assert_eq!(t.status, Status::Converged);
        assert!(equilibrium_residual(&s, &f, t.last(), &grid).unwrap() >= -1e-4);
        assert!(dual_residual(&s, &f, t.last(), &grid).unwrap() <= 1e-4);
    }
}

#[test]
fn residual_bound_stop_rule() {
    let s = Space::euclidean(1);
    let mut c = constant(s, half_sq(e(&[0.0])), e(&[1.0]), 1.0, 100);
    c.stop = StopRule::ResidualBound { eps: 1e-6 };
    let t = run_prox(&c).unwrap();
    assert_eq!(t.status, Status::Converged);
    assert!(*t.residual_lower_bounds.last().unwrap() > -1e-6);
    assert!(t.residual_lower_bounds[t.len() - 2] <= -1e-6);
}

#[test]
fn obtuse_angle_examples() {
    let s = Space::euclidean(1);
    let f = half_sq(e(&[0.0]));
    let k = DomainK::WholeSpace;
    let q = ResolventQuery::new(&s, &f, &k, 1.0, e(&[1.0]));
    assert!((obtuse_angle_check(&q, &e(&[0.0])).unwrap() + 0.25).abs() < 1e-15);
    assert_eq!(obtuse_angle_check(&q.at(e(&[0.0])), &e(&[0.0])).unwrap(), 0.0);

    let s = Space::euclidean(2);
    let r = rotation();
    let mut rng = sampling::stream(4, 0);
    for _ in 0..200 {
        let xbar = random_point(&s, 3.0, &mut rng);
        let q = ResolventQuery::new(&s, &r, &k, 0.7, xbar);
        assert!(obtuse_angle_check(&q, &s.origin()).unwrap() <= 1e-8);
    }
}

#[test]
fn regularity_diagnostics() {
    let s = Space::euclidean(2);
    let p = e(&[1.0, 1.0]);
    let lam = 1.0;
    let mut c = constant(s.clone(), half_sq(p.clone()), e(&[4.0, -3.0]), lam, 40);
    c.reference_solution = Some(p.clone());
    let t = run_prox(&c).unwrap();
    let r = asymptotic_regularity(&t, Some(&p), 1e-6).unwrap();
    assert!(r.regular);
    assert_eq!(r.telescoping, Some(true));
    assert!((r.rate.unwrap() - 1.0 / (1.0 + lam)).abs() < 1e-6);

    let still = run_prox(&constant(s.clone(), half_sq(p.clone()), p.clone(), 1.0, 12)).unwrap();
    let r = asymptotic_regularity(&still, Some(&p), 1e-6).unwrap();
    assert!(r.regular && r.rate.is_none());

    let short = run_prox(&constant(s, half_sq(p.clone()), p, 1.0, 3)).unwrap();
    assert!(asymptotic_regularity(&short, None, 1e-6).is_err());
}

#[test]
fn expanding_custom_bifunction_is_flagged_irregular() {
    // F(x, y) = -½ x (y - x): the field A(x) = -x/2 pushes iterates outward
    let s = Space::euclidean(1);
    let f = Bifunction::custom("outward", |_, x, y| {
        let (x, y) = (x.coords().unwrap()[0], y.coords().unwrap()[0]);
        -0.5 * x * (y - x)
    });
    let mut c = constant(s, f, e(&[0.01]), 1.0, 10);
    c.grid_radius = 50.0;
    let t = run_prox(&c).unwrap();
    assert_eq!(t.status, Status::MaxIters);
    let last = t.last().coords().unwrap()[0];
    assert!((last - 0.01 * 2f64.powi(10)).abs() < 1e-3);
    assert!(!asymptotic_regularity(&t, None, 1e-6).unwrap().regular);
}

#[test]
fn unsolvable_resolvent_truncates_the_trace() {
    let s = Space::euclidean(2);
    let f = Bifunction::custom("neg_one", |_, _, _| -1.0);
    let mut c = constant(s, f, e(&[0.0, 0.0]), 1.0, 5);
    c.inner_max_iters = 200;
    let t = run_prox(&c).unwrap();
    assert_eq!(t.status, Status::ResolventFailure);
    assert_eq!(t.iterates.len(), 1);
    assert!(t.failure.as_ref().unwrap().contains("step 0"));
}

#[test]
fn anti_monotone_field_is_rejected() {
    let s = Space::euclidean(2);
    let f = Bifunction::FromField(VectorField::GeodesicField {
        target: e(&[0.0, 0.0]),
        scale: 1.0,
    });
    assert!(run_prox(&constant(s, f, e(&[1.0, 0.0]), 1.0, 3)).is_err());
}

#[test]
fn csv_layout() {
    let s = Space::euclidean(2);
    let mut c = constant(s, half_sq(e(&[0.0, 0.0])), e(&[1.0, 0.0]), 1.0, 3);
    c.reference_solution = Some(e(&[0.0, 0.0]));
    let t = run_prox(&c).unwrap();
    let csv = to_csv(&t, &prov()).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "# hadamard test config_hash=0 seed=0");
    assert_eq!(lines[1], CSV_HEADER.join(","));
    assert_eq!(lines.len(), 2 + 3);
    let row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(row[0], "1");
    assert_eq!(row[1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(row[2].parse::<f64>().unwrap(), 0.5);
    assert_eq!(row[3].parse::<f64>().unwrap(), 0.5);
    assert_eq!(row[5], "");

    let json: serde_json::Value = serde_json::from_str(&to_json(&t, &prov()).unwrap()).unwrap();
    assert_eq!(json["trace"]["status"], "max_iters");
    assert_eq!(json["trace"]["iterates"].as_array().unwrap().len(), 4);
    assert_eq!(json["provenance"]["config_hash"], "0");
}

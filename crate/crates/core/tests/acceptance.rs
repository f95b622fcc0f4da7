//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line; exits nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use hadamard::bifunction::{Bifunction, ConvexFunctional, DomainK, VectorField};
use hadamard::geometry::battery::run_battery;
use hadamard::geometry::{random_in_ball, random_point, Point, Space};
use hadamard::kkm::{
    diameter_estimate, finite_intersection_certify, kkm_cover_check, lipschitz_gap, t_map, vertex_coord,
    FinitePointSet, SimplexCoord, DEFAULT_RESOLUTION,
};
use hadamard::proxalg::{fejer_check, obtuse_angle_check, run_prox, telescoping_violation, RunConfig, Status, StepSchedule, StopRule};
use hadamard::resolvent::{firm_nonexpansivity_gap, nonexpansivity_gap, resolve, verify_resolvent, Method, ResolventQuery};
use hadamard::sampling;
use nalgebra::Matrix2;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

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

fn quadratic() -> Bifunction {
    Bifunction::FromFunctional(ConvexFunctional::Quadratic {
        q: vec![vec![2.0, 0.5], vec![0.5, 1.0]],
        b: vec![-1.0, 0.5],
    })
}

fn affine() -> Bifunction {
    Bifunction::FromField(VectorField::EuclideanAffine {
        m: vec![vec![1.0, -2.0], vec![2.0, 0.5]],
        b: vec![-1.0, 0.0],
    })
}

fn battery_spaces() -> Vec<Space> {
    vec![
        Space::euclidean(1),
        Space::euclidean(2),
        Space::euclidean(3),
        Space::hyperboloid(1),
        Space::hyperboloid(2),
        Space::spider(3),
        Space::spider(5),
        Space::product(Space::euclidean(2), Space::spider(3)),
    ]
}

/// HalfSqDist pairings: one random anchor per space.
fn half_sq_cases(seed: u64) -> Vec<(Space, Bifunction, Point)> {
    let mut rng = sampling::stream(seed, 0);
    battery_spaces()
        .into_iter()
        .map(|s| {
            let p = random_point(&s, 1.5, &mut rng);
            (s, half_sq(p.clone()), p)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = String::new();
    let mut ok = true;
    for s in battery_spaces() {
        let r = match run_battery(&s, 10_000, 2024) {
            Ok(r) => r,
            Err(err) => return outcome(false, err.to_string()),
        };
        let flat_ok = r.flat.as_ref().is_none_or(|f| {
            f.cn_max_abs <= 1e-9
                && f.lemma_ii_equality_max <= 1e-9
                && f.affine_max <= 1e-9
                && f.dot_product_max.is_none_or(|d| d <= 1e-9)
        });
        let this = r.cn_min >= -1e-10
            && r.cs_min >= -1e-10
            && r.lemma_i_max_residual <= 1e-10
            && r.lemma_ii_max_violation <= 1e-10
            && flat_ok;
        if !this {
            worst = format!(
                "{}: cn_min={:e} cs_min={:e} lemma_i={:e} lemma_ii={:e}",
                r.space, r.cn_min, r.cs_min, r.lemma_i_max_residual, r.lemma_ii_max_violation
            );
        }
        ok &= this;
    }
    let t = start.elapsed();
    ok &= t < Duration::from_secs(10);
    outcome(ok, format!("8 spaces x 10^4 samples in {:.2}s {worst}", t.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let mut cases: Vec<(Space, Bifunction)> = half_sq_cases(2).into_iter().map(|(s, f, _)| (s, f)).collect();
    cases.push((Space::euclidean(2), quadratic()));
    cases.push((Space::euclidean(2), affine()));
    let k = DomainK::WholeSpace;
    let mut rng = sampling::stream(2, 1);
    let (mut max_dist, mut max_verify) = (0.0f64, 0.0f64);
    let mut failures = 0;
    for (s, f) in &cases {
        for i in 0..100 {
            let x = random_point(s, 2.5, &mut rng);
            let lambda = 0.1 + 4.9 * rng.random::<f64>();
            let q = ResolventQuery::new(s, f, &k, lambda, x.clone()).with_tol(1e-6).with_seed(i);
            let closed = resolve(&q);
            let generic = resolve(&q.clone().generic_only());
            match (closed, generic) {
                (Ok(c), Ok(g)) if c.method == Method::ClosedForm && g.method == Method::Generic => {
                    max_dist = max_dist.max(s.dist(&c.z, &g.z).unwrap());
                    // an independent check grid: random points around z and x
                    let grid: Vec<Point> = (0..200)
                        .map(|_| random_in_ball(s, &g.z, 3.0, &mut rng))
                        .chain([x.clone()])
                        .collect();
                    max_verify = max_verify.max(verify_resolvent(&g.z, &q, &grid).unwrap());
                }
                _ => failures += 1,
            }
        }
    }
    outcome(
        failures == 0 && max_dist <= 1e-3 && max_verify <= 1e-6,
        format!(
            "{} pairings x 100 queries: max dist {max_dist:e}, max verify gap {max_verify:e}, failures {failures}",
            cases.len()
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut families: Vec<(Space, Bifunction, DomainK)> =
        half_sq_cases(3).into_iter().map(|(s, f, _)| (s, f, DomainK::WholeSpace)).collect();
    families.push((Space::euclidean(2), quadratic(), DomainK::WholeSpace));
    families.push((Space::euclidean(2), affine(), DomainK::WholeSpace));
    families.push((Space::euclidean(2), rotation(), DomainK::WholeSpace));
    families.push((
        Space::spider(3),
        half_sq(Point::spider(1, 3.0)),
        DomainK::ball(Point::hub(), 2.0),
    ));
    let mut rng = sampling::stream(3, 1);
    let (mut ne, mut fne) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (s, f, k) in &families {
        let pairs: Vec<(Point, Point)> = (0..1000)
            .map(|_| {
                let mut pt = || k.project(s, &random_point(s, 3.0, &mut rng));
                (pt(), pt())
            })
            .collect();
        let q = ResolventQuery::new(s, f, k, 0.5 + rng.random::<f64>(), s.origin());
        match (nonexpansivity_gap(&q, &pairs), firm_nonexpansivity_gap(&q, &pairs)) {
            (Ok(a), Ok(b)) => {
                ne = ne.max(a);
                fne = fne.max(b);
            }
            (Err(err), _) | (_, Err(err)) => return outcome(false, format!("{}: {err}", s.label())),
        }
    }

    // contraction factor of the rotation resolvent
    let s = Space::euclidean(2);
    let r = rotation();
    let k = DomainK::WholeSpace;
    let mut factor_err = 0.0f64;
    for lam in [0.5, 1.0, 2.0] {
        let m: Matrix2<f64> = Matrix2::identity() + Matrix2::new(0.0, -1.0, 1.0, 0.0) * lam;
        let sv = m.try_inverse().unwrap().singular_values();
        let oracle = sv[0].max(sv[1]);
        factor_err = factor_err.max((oracle - 1.0 / (1.0 + lam * lam).sqrt()).abs());
        let q = ResolventQuery::new(&s, &r, &k, lam, s.origin());
        for _ in 0..100 {
            let (x, y) = (random_point(&s, 3.0, &mut rng), random_point(&s, 3.0, &mut rng));
            let jx = resolve(&q.at(x.clone())).unwrap().z;
            let jy = resolve(&q.at(y.clone())).unwrap().z;
            let ratio = s.dist(&jx, &jy).unwrap() / s.dist(&x, &y).unwrap();
            factor_err = factor_err.max((ratio - oracle).abs());
        }
    }
    outcome(
        ne <= 1e-6 && fne <= 1e-6 && factor_err <= 1e-9,
        format!(
            "{} families x 10^3 pairs: nonexp {ne:e}, firm {fne:e}; rotation factor err {factor_err:e}",
            families.len()
        ),
    )
}

fn constant_run(s: &Space, f: Bifunction, x0: Point, lambda: f64, n: usize) -> RunConfig {
    let mut c = RunConfig::new(s.clone(), f, DomainK::WholeSpace, x0, StepSchedule::Constant { lambda });
    c.max_iters = n;
    c.stop = StopRule::MaxIters;
    c
}

fn criterion_4() -> Outcome {
    let mut rng = sampling::stream(4, 0);
    let mut worst = 0.0f64;
    for (s, f, p) in half_sq_cases(4) {
        let x0 = random_point(&s, 3.0, &mut rng);
        let lam = 0.7;
        let t = match run_prox(&constant_run(&s, f, x0.clone(), lam, 30)) {
            Ok(t) if t.len() == 30 => t,
            _ => return outcome(false, format!("{}: run did not complete", s.label())),
        };
        let d0 = s.dist(&x0, &p).unwrap();
        for (k, x) in t.iterates.iter().enumerate() {
            worst = worst.max((s.dist(x, &p).unwrap() - d0 / (1.0 + lam).powi(k as i32)).abs());
        }
    }
    let s = Space::euclidean(2);
    let mut rot = 0.0f64;
    for lam in [0.5, 1.0, 2.0] {
        let x0 = e(&[2.0, -1.5]);
        let n0 = s.dist(&x0, &s.origin()).unwrap();
        let t = run_prox(&constant_run(&s, rotation(), x0, lam, 30)).unwrap();
        for (k, x) in t.iterates.iter().enumerate() {
            let expect = n0 * (1.0 + lam * lam).powf(-(k as f64) / 2.0);
            rot = rot.max((s.dist(x, &s.origin()).unwrap() - expect).abs());
        }
    }
    outcome(
        worst <= 1e-6 && rot <= 1e-6,
        format!("half-sq max err {worst:e} over 8 spaces x 30 steps; rotation max err {rot:e}"),
    )
}

fn shipped_configs() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    v.sort();
    v
}

/// Shipped configs for the `run` subcommand.
fn shipped_runs() -> Vec<(PathBuf, RunConfig)> {
    shipped_configs()
        .into_iter()
        .filter_map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
            v.as_object_mut().unwrap().remove("schema");
            serde_json::from_value::<RunConfig>(v).ok().map(|c| (p, c))
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let runs = shipped_runs();
    let (mut fej, mut tel) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (p, c) in &runs {
        let Some(xs) = c.reference_solution.clone() else {
            return outcome(false, format!("{} has no reference solution", p.display()));
        };
        let t = match run_prox(c) {
            Ok(t) if t.status != Status::ResolventFailure => t,
            _ => return outcome(false, format!("{} failed", p.display())),
        };
        fej = fej.max(fejer_check(&t, &xs).unwrap());
        tel = tel.max(telescoping_violation(&t, &xs).unwrap());
    }
    outcome(
        !runs.is_empty() && fej <= 2e-6 && tel <= 1e-6,
        format!("{} shipped runs: fejer {fej:e}, telescoping {tel:e}", runs.len()),
    )
}

fn criterion_6() -> Outcome {
    let r = 2.0;
    let cases = [
        (Space::euclidean(2), e(&[3.0, 1.0]), e(&[0.0, 0.0]), e(&[-1.5, 1.0])),
        (Space::spider(3), Point::spider(1, 4.0), Point::hub(), Point::spider(0, 1.5)),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (s, p, center, x0) in cases {
        let mut c = RunConfig::new(
            s.clone(),
            half_sq(p),
            DomainK::ball(center, r),
            x0,
            StepSchedule::Geometric { lambda0: 1.0, ratio: 2.0 },
        );
        c.max_iters = 20;
        c.stop = StopRule::MaxIters;
        c.inner_tol = 1e-10;
        let t = match run_prox(&c) {
            Ok(t) if t.len() == 20 => t,
            Ok(t) => return outcome(false, format!("{}: stopped after {} steps: {:?}", s.label(), t.len(), t.failure)),
            Err(err) => return outcome(false, err.to_string()),
        };
        // residual of x^k (k = 1..20) against -4r²/λ_{k-1}
        let mut slack = f64::INFINITY;
        for k in 0..t.len() {
            let bound = -4.0 * r * r / t.steps[k];
            slack = slack.min(t.equilibrium_residuals[k] - bound);
            ok &= t.equilibrium_residuals[k] >= t.residual_lower_bounds[k] - 1e-9;
        }
        let last = t.equilibrium_residuals.last().unwrap().abs();
        ok &= slack >= 0.0 && last <= 1e-6;
        detail.push(format!("{}: min slack {slack:e}, final residual {last:e}", s.label()));
    }
    outcome(ok, detail.join("; "))
}

fn criterion_7() -> Outcome {
    let mut families: Vec<(Space, Bifunction, Point)> = half_sq_cases(7);
    families.push((Space::euclidean(2), rotation(), e(&[0.0, 0.0])));
    // Q x* + b = 0
    let xs = Matrix2::new(2.0, 0.5, 0.5, 1.0).try_inverse().unwrap() * nalgebra::Vector2::new(1.0, -0.5);
    families.push((Space::euclidean(2), quadratic(), e(&[xs[0], xs[1]])));
    families.push((
        Space::spider(3),
        Bifunction::FromFunctional(ConvexFunctional::DistTo { p: Point::spider(2, 1.0) }),
        Point::spider(2, 1.0),
    ));
    let k = DomainK::WholeSpace;
    let mut rng = sampling::stream(7, 0);
    let mut worst = f64::NEG_INFINITY;
    for (s, f, xstar) in &families {
        for _ in 0..1000 {
            let xbar = random_point(s, 3.0, &mut rng);
            let lambda = 0.1 + 9.9 * rng.random::<f64>();
            match obtuse_angle_check(&ResolventQuery::new(s, f, &k, lambda, xbar), xstar) {
                Ok(v) => worst = worst.max(v),
                Err(err) => return outcome(false, err.to_string()),
            }
        }
    }
    outcome(worst <= 1e-8, format!("{} families x 10^3: max pairing {worst:e}", families.len()))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let es = Space::euclidean(2);
    let sp = Space::spider(3);
    let triangle = FinitePointSet::new(&es, vec![e(&[1.0, 1.0]), e(&[1.0, -1.0]), e(&[-1.0, 0.0])]).unwrap();
    let tripod = FinitePointSet::new(&sp, vec![Point::spider(0, 1.0), Point::spider(1, 1.0), Point::spider(2, 1.0)]).unwrap();
    let lattice_step = 1.0 / (DEFAULT_RESOLUTION - 1) as f64;
    let mut ok = true;
    let mut notes = Vec::new();

    for (s, d) in [(&es, &triangle), (&sp, &tripod)] {
        let exact = (1..=d.len()).all(|j| t_map(s, d, &vertex_coord(d.len(), j).unwrap()).unwrap() == d.points()[j - 1]);
        let diam = diameter_estimate(s, d, 10_000, 8);
        let mut rng = sampling::stream(8, 1);
        let mut coord = || SimplexCoord::new((0..d.len() - 1).map(|_| rng.random::<f64>()).collect()).unwrap();
        let mut gap = f64::INFINITY;
        for _ in 0..10_000 {
            let (a, b) = (coord(), coord());
            gap = gap.min(lipschitz_gap(s, d, &a, &b, diam).unwrap());
        }
        ok &= exact && gap >= -1e-9;
        notes.push(format!("{}: vertices exact={exact}, min lipschitz gap {gap:e}", s.label()));
    }

    let subsets: Vec<Vec<usize>> = (1..8usize).map(|m| (0..3).filter(|i| m >> i & 1 == 1).collect()).collect();
    let instances: Vec<(&Space, &FinitePointSet, Bifunction, Point)> = vec![
        (&es, &triangle, half_sq(e(&[0.0, 0.0])), e(&[0.0, 0.0])),
        (&es, &triangle, rotation(), e(&[0.0, 0.0])),
        (&sp, &tripod, half_sq(Point::hub()), Point::hub()),
    ];
    for (s, d, f, xstar) in instances {
        let cover = kkm_cover_check(s, &f, d, &subsets, 1000, 8).unwrap();
        let w = finite_intersection_certify(s, &f, d, DEFAULT_RESOLUTION).unwrap();
        // the witness must sit within one lattice cell of the equilibrium
        let diam = diameter_estimate(s, d, 0, 0);
        let near = w.as_ref().is_some_and(|w| s.dist(&w.point, &xstar).unwrap() <= lattice_step * diam);
        ok &= cover.max_violations == 0 && near;
        notes.push(format!(
            "{} cover violations {}, witness near equilibrium={near}",
            s.label(),
            cover.max_violations
        ));
    }
    let t = start.elapsed();
    ok &= t < Duration::from_secs(60);
    notes.push(format!("{:.2}s", t.as_secs_f64()));
    outcome(ok, notes.join("; "))
}

fn criterion_9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hadamard");
    let runs = shipped_runs();
    for (p, _) in &runs {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            let status = Command::new(bin)
                .args(["run", "--quiet", "--seed", "17", "--config"])
                .arg(p)
                .arg("--out")
                .arg(dir.path())
                .status()
                .unwrap();
            if !matches!(status.code(), Some(0 | 2)) {
                return outcome(false, format!("{} exited with {status}", p.display()));
            }
            outputs.push(std::fs::read(dir.path().join("trace.csv")).unwrap());
        }
        if outputs[0] != outputs[1] {
            return outcome(false, format!("{} differs between runs", p.display()));
        }
    }
    outcome(!runs.is_empty(), format!("{} shipped runs byte-identical", runs.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 geometry battery", criterion_1),
        ("2 resolvent oracle equivalence", criterion_2),
        ("3 nonexpansivity", criterion_3),
        ("4 proximal convergence rates", criterion_4),
        ("5 fejer and telescoping", criterion_5),
        ("6 bounded domain with doubling steps", criterion_6),
        ("7 obtuse angle", criterion_7),
        ("8 kkm", criterion_8),
        ("9 determinism", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        println!(
            "{} criterion {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

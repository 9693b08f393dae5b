//! Acceptance report: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::process::ExitCode;

use cutdarcy::assembly::{FaceSelection, Method, MultiplierStab, StabilizationForm};
use cutdarcy::fespace::{divergence, interpolate_velocity, project_pressure, MultiplierDegree};
use cutdarcy::geometry::{triangle_quadrature, LevelSet, Point, MAX_TRIANGLE_ORDER};
use cutdarcy::harness::{
    boundary_flux_defect, compute_eoc, loglog_slope, macro_mass_defects, run_experiment, solve_level, Example,
    ExperimentConfig, LevelResult, EX1_RADIUS,
};
use cutdarcy::linalg::{condest_1norm, Triplets};
use cutdarcy::macroelement::build_macro_partition;
use cutdarcy::mesh::{build_background_mesh, extract_active_mesh, Rect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

fn report(id: usize, name: &str, outcome: Outcome) -> bool {
    match outcome {
        Ok((pass, detail)) => {
            println!("{} {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
            pass
        }
        Err(e) => {
            println!("FAIL {id:>2} {name}: error {e}");
            false
        }
    }
}

fn run(cfg: &ExperimentConfig) -> Result<Vec<LevelResult>, String> {
    run_experiment(cfg).map_err(|e| e.to_string())
}

fn last_eoc(rows: &[LevelResult], values: impl Fn(&LevelResult) -> f64) -> f64 {
    let n = rows.len();
    compute_eoc(&[values(&rows[n - 2]), values(&rows[n - 1])], &[rows[n - 2].h, rows[n - 1].h])[0]
}

fn criterion_1(ex1: &[LevelResult]) -> Outcome {
    let eocs = [
        last_eoc(ex1, |r| r.errors.err_u_l2),
        last_eoc(ex1, |r| r.errors.err_p_l2),
        last_eoc(ex1, |r| r.errors.err_div_l2),
        last_eoc(ex1, |r| r.errors.err_div_max),
    ];
    let pass = eocs.iter().all(|&e| e >= 0.85);
    Ok((pass, format!("EOC u {:.3}, p {:.3}, div {:.3}, div_max {:.3} (>= 0.85)", eocs[0], eocs[1], eocs[2], eocs[3])))
}

fn criterion_2(ex1: &[LevelResult]) -> Outcome {
    let hs: Vec<f64> = ex1.iter().map(|r| r.h).collect();
    let slope = |rows: &[LevelResult]| -> f64 {
        let k: Vec<f64> = rows.iter().map(|r| r.condest.unwrap_or(f64::NAN)).collect();
        loglog_slope(&hs, &k)
    };
    let s_sc = slope(ex1);
    let mut cfg = ExperimentConfig::new(Example::Ex1);
    cfg.stabilization.multiplier_stab = MultiplierStab::ScHat;
    cfg.timing = false;
    let s_hat = slope(&run(&cfg)?);
    let ok = |s: f64| (-2.5..=-1.5).contains(&s);
    Ok((ok(s_sc) && ok(s_hat), format!("slope of log k1 vs log h: sc {s_sc:.3}, sc-hat {s_hat:.3} (in [-2.5, -1.5])")))
}

fn criterion_3() -> Outcome {
    let velocity = |c: f64, degree: MultiplierDegree| -> Result<Vec<LevelResult>, String> {
        let mut cfg = ExperimentConfig::new(Example::Ex1_2 { c });
        cfg.multiplier_degree = degree;
        cfg.condest = false;
        cfg.timing = false;
        run(&cfg)
    };
    let q1_small = velocity(1e2, MultiplierDegree::Linear)?;
    let q1_large = velocity(1e4, MultiplierDegree::Linear)?;
    let q0_small = velocity(1e2, MultiplierDegree::Constant)?;
    let q0_large = velocity(1e4, MultiplierDegree::Constant)?;
    let scaling = q1_small
        .iter()
        .zip(&q1_large)
        .chain(q0_small.iter().zip(&q0_large))
        .map(|(a, b)| (b.errors.err_u_l2 / a.errors.err_u_l2 / 100.0 - 1.0).abs())
        .fold(0.0, f64::max);
    let last = q1_small.len() - 1;
    let ratio = q0_small[last].errors.err_u_l2 / q1_small[last].errors.err_u_l2;
    let eoc_q1 = last_eoc(&q1_small, |r| r.errors.err_u_l2);
    let eoc_q0 = last_eoc(&q0_small, |r| r.errors.err_u_l2);
    let pass = scaling <= 1e-6 && ratio >= 20.0 && (1.6..=2.7).contains(&eoc_q1) && (0.6..=1.2).contains(&eoc_q0);
    Ok((
        pass,
        format!(
            "x100 scaling rel dev {scaling:.2e} (<= 1e-6); Q0/Q1 at h={:.4} {ratio:.1} (>= 20); EOC Q1 {eoc_q1:.3} in [1.6, 2.7], Q0 {eoc_q0:.3} in [0.6, 1.2]; |u_h| Q1 {:.4e}, Q0 {:.4e}",
            q1_small[last].h, q1_small[last].errors.err_u_l2, q0_small[last].errors.err_u_l2
        ),
    ))
}

fn criterion_4() -> Outcome {
    let g0 = 2.0;
    let mut worst: f64 = 0.0;
    for variant in [MultiplierStab::Sc, MultiplierStab::ScHat, MultiplierStab::ScTilde] {
        for form in [StabilizationForm::PatchExtension, StabilizationForm::FaceJumps] {
            let mut cfg = ExperimentConfig::new(Example::ConstantDivergence { g0 });
            cfg.stabilization.multiplier_stab = variant;
            cfg.stabilization.form = form;
            cfg.condest = false;
            for r in run(&cfg)? {
                worst = worst.max(r.errors.err_div_max);
            }
        }
    }
    let tol = 1e-9 * (1.0 + g0);
    Ok((worst <= tol, format!("max |div u_h - g| over 3 variants x 2 forms x 4 levels {worst:.2e} (<= {tol:.1e})")))
}

fn criterion_5() -> Outcome {
    let cfg = ExperimentConfig::new(Example::Ex1);
    let mut worst: f64 = 0.0;
    for &nx in &cfg.levels {
        let run = solve_level(&cfg, nx).map_err(|e| e.to_string())?;
        let defect = boundary_flux_defect(&run.mesh, &run.solution.velocity, &run.data, cfg.orders.boundary)
            .map_err(|e| e.to_string())?;
        let scale = 1.0 + run.mesh.boundary_length() * 2.0 * PI;
        worst = worst.max(defect.abs() / scale);
    }
    Ok((worst <= 1e-9, format!("max |int u_h.n - int u_B| / scale {worst:.2e} (<= 1e-9)")))
}

fn criterion_6() -> Outcome {
    let mesh = Example::Ex1.build_mesh(20).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        // Random polynomial field of total degree 4.
        let cx: Vec<f64> = (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cy: Vec<f64> = (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let monomials = |x: Point| -> Vec<(f64, f64, f64)> {
            let mut m = Vec::new();
            for d in 0..=4 {
                for i in 0..=d {
                    let j = d - i;
                    let v = x.x.powi(i as i32) * x.y.powi(j as i32);
                    let dx = if i > 0 { i as f64 * x.x.powi(i as i32 - 1) * x.y.powi(j as i32) } else { 0.0 };
                    let dy = if j > 0 { j as f64 * x.x.powi(i as i32) * x.y.powi(j as i32 - 1) } else { 0.0 };
                    m.push((v, dx, dy));
                }
            }
            m
        };
        let v = |x: Point| {
            let m = monomials(x);
            Point::new(m.iter().zip(&cx).map(|(m, c)| c * m.0).sum(), m.iter().zip(&cy).map(|(m, c)| c * m.0).sum())
        };
        let div = |x: Point| {
            let m = monomials(x);
            m.iter().zip(&cx).map(|(m, c)| c * m.1).sum::<f64>() + m.iter().zip(&cy).map(|(m, c)| c * m.2).sum::<f64>()
        };
        let pi_v = interpolate_velocity(&mesh, v).map_err(|e| e.to_string())?;
        let pi_div = project_pressure(&mesh, div).map_err(|e| e.to_string())?;
        let vmax = mesh
            .background
            .vertices
            .iter()
            .map(|&x| v(x).amax())
            .fold(0.0, f64::max);
        for (d, p) in divergence(&mesh, &pi_v).iter().zip(&pi_div.coeffs) {
            worst = worst.max((d - p).abs() / vmax);
        }
    }
    Ok((worst <= 1e-11, format!("max |div pi_h v - Pi_h div v| / max|v| over 20 fields {worst:.2e} (<= 1e-11)")))
}

fn criterion_7() -> Outcome {
    let mut results = Vec::new();
    for ex in [Example::Ex2Unfitted, Example::Ex2Fitted] {
        let mut cfg = ExperimentConfig::new(ex);
        cfg.condest = false;
        results.push(run(&cfg)?);
    }
    let (unf, fit) = (&results[0], &results[1]);
    let last = unf.len() - 1;
    let mut pass = true;
    let mut detail = Vec::new();
    let fields: [(&str, fn(&LevelResult) -> f64); 3] =
        [("u", |r| r.errors.err_u_l2), ("p", |r| r.errors.err_p_l2), ("div", |r| r.errors.err_div_l2)];
    for (name, f) in fields {
        let (eu, ef) = (last_eoc(unf, f), last_eoc(fit, f));
        let factor = (f(&unf[last]) / f(&fit[last])).max(f(&fit[last]) / f(&unf[last]));
        pass &= (eu - ef).abs() <= 0.15 && factor <= 3.0;
        detail.push(format!("{name}: EOC {eu:.3}/{ef:.3} factor {factor:.3}"));
    }
    Ok((pass, format!("{} (EOC diff <= 0.15, factor <= 3)", detail.join("; "))))
}

fn criterion_8() -> Outcome {
    let mut asym_lagrange: f64 = 0.0;
    let mut bitwise = true;
    for ex in [Example::Ex1, Example::Ex2Unfitted] {
        let mut cfg = ExperimentConfig::new(ex);
        cfg.condest = false;
        for variant in [MultiplierStab::Sc, MultiplierStab::ScHat, MultiplierStab::ScTilde] {
            cfg.stabilization.multiplier_stab = variant;
            let run = solve_level(&cfg, 20).map_err(|e| e.to_string())?;
            asym_lagrange = asym_lagrange.max(run.system.matrix.max_asymmetry());
            bitwise &= run.system.matrix.is_symmetric();
        }
    }
    let mut cfg = ExperimentConfig::new(Example::MixedBc);
    cfg.method = Method::Penalty { lambda: Method::DEFAULT_PENALTY };
    cfg.condest = false;
    let penalty = solve_level(&cfg, 20).map_err(|e| e.to_string())?;
    let asym_penalty = penalty.system.matrix.max_asymmetry();
    Ok((
        asym_lagrange == 0.0 && bitwise && asym_penalty > 0.0,
        format!("Lagrange max|A - A^T| = {asym_lagrange:e} (== 0); penalty max|A - A^T| = {asym_penalty:.3e} (> 0)"),
    ))
}

fn criterion_9() -> Outcome {
    let mut cfg = ExperimentConfig::new(Example::LinearDivergence);
    cfg.stabilization.faces = FaceSelection::MacroOnly;
    cfg.condest = false;
    let mut worst: f64 = 0.0;
    let mut macros = 0;
    for &nx in &cfg.levels {
        let run = solve_level(&cfg, nx).map_err(|e| e.to_string())?;
        let partition = build_macro_partition(&run.mesh, cfg.stabilization.delta).map_err(|e| e.to_string())?;
        let exact = cfg.example.exact();
        let defects = macro_mass_defects(
            &run.mesh,
            &partition,
            &run.solution.velocity,
            |x| (exact.g)(x),
            run.solution.mean.unwrap_or(0.0),
            cfg.orders.volume,
        )
        .map_err(|e| e.to_string())?;
        let scale = 1.0 + PI * EX1_RADIUS * EX1_RADIUS * 2.0;
        macros += defects.len();
        worst = defects.iter().fold(worst, |w, d| w.max(d.abs() / scale));
    }
    Ok((worst <= 1e-9, format!("max per-macroelement |int (div u_h - g)| / scale over {macros} macroelements {worst:.2e} (<= 1e-9)")))
}

fn criterion_10() -> Outcome {
    // Disk area.
    let bg = build_background_mesh(32, 32, Rect::unit()).map_err(|e| e.to_string())?;
    let disk = extract_active_mesh(bg, &LevelSet::circle(Point::new(0.5, 0.5), EX1_RADIUS), &[]).map_err(|e| e.to_string())?;
    let area_err = (disk.domain_area() - PI * EX1_RADIUS * EX1_RADIUS).abs();

    // Condition estimate against a dense inverse.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_factor: f64 = 1.0;
    let mut over: f64 = 0.0;
    for trial in 0..12 {
        let n = [5, 30, 77, 200][trial % 4];
        let mut t = Triplets::new(n, n);
        for i in 0..n {
            t.push(i, i, rng.gen_range(0.5..4.0) * if rng.gen_bool(0.3) { 1e-3 } else { 1.0 });
            for _ in 0..3 {
                t.push(i, rng.gen_range(0..n), rng.gen_range(-1.0..1.0));
            }
        }
        let a = t.to_matrix();
        let d = a.to_dense();
        let inv = d.clone().try_inverse().ok_or("random matrix not invertible")?;
        let n1 = |m: &nalgebra::DMatrix<f64>| {
            (0..m.ncols()).map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
        };
        let exact = n1(&d) * n1(&inv);
        let est = condest_1norm(&a).map_err(|e| e.to_string())?;
        worst_factor = worst_factor.max(exact / est);
        over = over.max(est / exact - 1.0);
    }

    // Quadrature exactness on random triangles.
    let mut quad_err: f64 = 0.0;
    for _ in 0..20 {
        let tri = [0, 1, 2].map(|_| Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        for order in 1..=MAX_TRIANGLE_ORDER {
            let rule = triangle_quadrature(&tri, order).map_err(|e| e.to_string())?;
            for i in 0..=order {
                let j = order - i;
                let exact = exact_monomial(&tri, i, j);
                quad_err = quad_err.max((rule.integrate(|x| x.x.powi(i as i32) * x.y.powi(j as i32)) - exact).abs());
            }
        }
    }

    // Macro partition totality on random disks.
    let mut partition_ok = true;
    for _ in 0..50 {
        let nx = rng.gen_range(6..40);
        let center = Point::new(rng.gen_range(0.35..0.65), rng.gen_range(0.35..0.65));
        let radius = rng.gen_range(0.12..0.3);
        let delta = rng.gen_range(0.1..0.6);
        let bg = build_background_mesh(nx, nx, Rect::unit()).map_err(|e| e.to_string())?;
        let mesh = extract_active_mesh(bg, &LevelSet::circle(center, radius), &[]).map_err(|e| e.to_string())?;
        let part = build_macro_partition(&mesh, delta).map_err(|e| e.to_string())?;
        partition_ok &= part.assignment.len() == mesh.n_elements();
        partition_ok &= (0..mesh.n_elements()).all(|a| {
            let r = part.assignment[a];
            part.assignment[r] == r && mesh.volume_fraction(r) >= delta
        });
        partition_ok &= part.macro_faces.iter().all(|&f| {
            let (a, b) = mesh.face_elements(f).expect("interior face");
            part.assignment[a] == part.assignment[b]
        });
    }
    let pass = area_err <= 5e-3 && worst_factor <= 3.0 && over <= 1e-10 && quad_err <= 1e-12 && partition_ok;
    Ok((
        pass,
        format!(
            "disk area err {area_err:.2e} (<= 5e-3); condest worst factor {worst_factor:.3} (<= 3), overshoot {over:.1e} (<= 1e-10); quadrature err {quad_err:.1e} (<= 1e-12); macro partitions valid on 50 geometries: {partition_ok}"
        ),
    ))
}

/// `∫_T x^i y^j` from the multinomial expansion in barycentric coordinates.
fn exact_monomial(tri: &[Point; 3], i: usize, j: usize) -> f64 {
    // x = Σ x_k λ_k, y = Σ y_k λ_k and ∫ λ0^p λ1^q λ2^r = 2|T| p! q! r! / (p+q+r+2)!.
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    let area = 0.5 * ((tri[1] - tri[0]).perp(&(tri[2] - tri[0]))).abs();
    let mut total = 0.0;
    for p0 in 0..=i {
        for p1 in 0..=(i - p0) {
            let p2 = i - p0 - p1;
            let cx = fact(i) / (fact(p0) * fact(p1) * fact(p2))
                * tri[0].x.powi(p0 as i32)
                * tri[1].x.powi(p1 as i32)
                * tri[2].x.powi(p2 as i32);
            for q0 in 0..=j {
                for q1 in 0..=(j - q0) {
                    let q2 = j - q0 - q1;
                    let cy = fact(j) / (fact(q0) * fact(q1) * fact(q2))
                        * tri[0].y.powi(q0 as i32)
                        * tri[1].y.powi(q1 as i32)
                        * tri[2].y.powi(q2 as i32);
                    let (e0, e1, e2) = (p0 + q0, p1 + q1, p2 + q2);
                    let integral = 2.0 * area * fact(e0) * fact(e1) * fact(e2) / fact(e0 + e1 + e2 + 2);
                    total += cx * cy * integral;
                }
            }
        }
    }
    total
}

fn main() -> ExitCode {
    let mut cfg = ExperimentConfig::new(Example::Ex1);
    cfg.timing = false;
    let ex1 = run(&cfg);
    let with_ex1 = |f: fn(&[LevelResult]) -> Outcome| match &ex1 {
        Ok(rows) => f(rows),
        Err(e) => Err(e.clone()),
    };
    let results = [
        report(1, "optimal convergence, example 1", with_ex1(criterion_1)),
        report(2, "condition number scaling", with_ex1(criterion_2)),
        report(3, "velocity error table, example 1.2", criterion_3()),
        report(4, "divergence preservation", criterion_4()),
        report(5, "boundary flux compatibility", criterion_5()),
        report(6, "commuting diagram", criterion_6()),
        report(7, "fitted vs unfitted, example 2", criterion_7()),
        report(8, "symmetry of the multiplier system", criterion_8()),
        report(9, "local mass preservation", criterion_9()),
        report(10, "oracle property suites", criterion_10()),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

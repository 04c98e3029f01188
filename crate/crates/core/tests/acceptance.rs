//! Acceptance criteria 1 to 9, run in order. Each prints one
//! `criterion N: PASS|FAIL` line with its measurements and runtime; the
//! process exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::catch_unwind;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use abelpn::criteria::{bauer_m, big_check, bounds_table, nef_check};
use abelpn::diagonal::lemma31_check;
use abelpn::rho2::{rho2_rank, Rho2Options};
use abelpn::svp::{brute_force_sv, buser_sarnak, shortest_vector, GramLattice};
use abelpn::theta::{theta_basis, DEFAULT_TOL};
use abelpn::torus::{make_subtorus, make_torus, PolarizationType, PolarizedTorus};
use abelpn::tube::{federer_check, prop23_check, CurveSpec, TubeSpec};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    title: &'static str,
    limit: Duration,
    ok: bool,
    detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn torus(d: &[u64], tau: DMatrix<Complex64>) -> PolarizedTorus {
    make_torus(PolarizationType::new(d.to_vec()).unwrap(), tau).unwrap()
}

fn diag_i(d: &[u64]) -> PolarizedTorus {
    torus(d, DMatrix::from_diagonal(&DVector::from_element(d.len(), c(0.0, 1.0))))
}

fn random_int_gram(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<i64>> {
    let b: Vec<Vec<i64>> = (0..dim).map(|_| (0..dim).map(|_| rng.random_range(-3..=3)).collect()).collect();
    let mut g = vec![vec![0i64; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            g[i][j] = (0..dim).map(|k| b[k][i] * b[k][j]).sum();
        }
        g[i][i] += rng.random_range(1..=3);
    }
    g
}

/// `X + iY` with `X` symmetric and `Y = AᵀA + I/2`.
fn random_tau(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.5..0.5));
    let y = a.transpose() * &a + DMatrix::identity(n, n) * 0.5;
    let mut x = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.5..0.5));
    x = (&x + x.transpose()) * 0.5;
    DMatrix::from_fn(n, n, |i, j| c(x[(i, j)], y[(i, j)]))
}

fn random_type(rng: &mut ChaCha8Rng, n: usize) -> Vec<u64> {
    let mut d = vec![rng.random_range(1..=2u64)];
    while d.len() < n {
        let last = *d.last().unwrap();
        d.push(last * rng.random_range(1..=3u64));
    }
    d
}

fn criterion_1_svp_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = Vec::new();
    for case in 0..100 {
        let dim = 2 + case % 5;
        let gram = random_int_gram(&mut rng, dim);
        let lat = GramLattice::from_integer(&gram).unwrap();
        let fp = shortest_vector(&lat).unwrap();
        let bf = brute_force_sv(&lat, None).unwrap();
        if fp.exact_length_sq.is_none() || fp.exact_length_sq != bf.exact_length_sq {
            mismatches.push((case, fp.exact_length_sq, bf.exact_length_sq));
        }
    }
    Outcome {
        title: "Fincke-Pohst equals brute force on 100 integer Gram matrices, dims 2-6",
        limit: Duration::from_secs(30),
        ok: mismatches.is_empty(),
        detail: format!("{} mismatches {mismatches:?}", mismatches.len()),
    }
}

fn criterion_2_diagonal_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for case in 0..25 {
        let n = 1 + case % 3;
        let t = torus(&random_type(&mut rng, n), random_tau(&mut rng, n));
        let id = lemma31_check(&t).unwrap();
        worst = worst.max(id.rel_err);
    }
    Outcome {
        title: "relative invariant of the diagonal equals half the invariant on 25 tori",
        limit: Duration::from_secs(60),
        ok: worst < 1e-9,
        detail: format!("max rel_err {worst:e}"),
    }
}

fn criterion_3_elliptic_extremal() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cap = 2.0 / 3f64.sqrt();
    let m_of = |tau: Complex64| buser_sarnak(&torus(&[1], DMatrix::from_element(1, 1, tau))).unwrap().length_sq;
    let mut max_seen = 0.0f64;
    let mut violations = 0;
    for _ in 0..1000 {
        let x: f64 = rng.random_range(-0.5..=0.5);
        let y = rng.random_range((1.0 - x * x).sqrt()..3.0);
        let m = m_of(c(x, y));
        max_seen = max_seen.max(m);
        if m > cap + 1e-9 {
            violations += 1;
        }
    }
    let hex = m_of(Complex64::from_polar(1.0, PI / 3.0));
    let floor = bauer_m(1, 1.0).unwrap();
    let ok = violations == 0 && (hex - cap).abs() < 1e-9 && hex >= floor && max_seen >= floor;
    Outcome {
        title: "m <= 2/sqrt(3) on the fundamental domain, equality at exp(i pi/3), maximum above 2/pi",
        limit: Duration::from_secs(60),
        ok,
        detail: format!("violations {violations}, max sampled {max_seen:.12}, hexagonal {hex:.15}, floor {floor:.12}"),
    }
}

fn criterion_4_tube_volumes() -> Outcome {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let axis = {
        let t = diag_i(&[1, 1]);
        make_subtorus(&t, &[vec![1, 0, 0, 0], vec![0, 0, 1, 0]]).unwrap()
    };
    let mut notes = Vec::new();
    let mut ok = true;
    for r in [0.1, 0.25, 0.4, 0.5] {
        let tube = TubeSpec::new(axis.clone(), r).unwrap();
        let disc = PI * r * r;

        let line = CurveSpec::new(vec![vec![c(0.3, -0.2)]], vec![vec![z], vec![one]], 1.0, vec![(z, 1)]).unwrap();
        let e1 = (prop23_check(&tube, &line).unwrap().volume - disc).abs();

        let tilted =
            CurveSpec::new(vec![vec![z], vec![c(0.6, 0.8)]], vec![vec![z], vec![one]], 1.0, vec![(z, 1)]).unwrap();
        let e2 = (prop23_check(&tube, &tilted).unwrap().volume - 2.0 * disc).abs();

        let cusp =
            CurveSpec::new(vec![vec![z], vec![c(0.0, 1.0)]], vec![vec![z], vec![z], vec![one]], 1.0, vec![(z, 2)])
                .unwrap();
        let cv = prop23_check(&tube, &cusp).unwrap();
        let cusp_ok = cv.intersection_number == 2 && cv.volume >= 2.0 * disc - 1e-5;

        ok &= e1 < 1e-6 && e2 < 1e-5 && cusp_ok;
        notes.push(format!("r={r}: line {e1:.1e}, tilted {e2:.1e}, cusp slack {:.3e}", cv.volume - 2.0 * disc));
    }

    let flat = federer_check(vec![vec![z, z], vec![c(0.6, 0.0), c(0.0, 0.8)]], 0.7, 1.0).unwrap();
    let parabola = federer_check(vec![vec![z, z], vec![one, z], vec![z, one]], 1.0, 1.5).unwrap();
    let cusp = federer_check(vec![vec![z, z], vec![z, z], vec![one, z], vec![z, one]], 1.0, 1.5).unwrap();
    let fed_ok = flat.holds
        && (flat.area - PI * 0.49).abs() < 1e-6
        && parabola.holds
        && parabola.multiplicity == 1
        && parabola.area >= PI
        && cusp.holds
        && cusp.multiplicity == 2
        && cusp.area >= 2.0 * PI;
    ok &= fed_ok;
    notes.push(format!(
        "federer areas {:.8}/{:.8}, {:.8}/{:.8}, {:.8}/{:.8}",
        flat.area, flat.bound, parabola.area, parabola.bound, cusp.area, cusp.bound
    ));
    Outcome {
        title: "orthogonal, tilted and cusp curves in tubes; Federer bound on three curves",
        limit: Duration::from_secs(120),
        ok,
        detail: notes.join("; "),
    }
}

fn criterion_5_threshold_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut ok = true;
    for n in 1..=16u32 {
        let ln_big = BigUint::from(8u32).pow(n) * BigUint::from(n).pow(n) / 2u32;
        let ln: f64 = 8f64.powi(n as i32) * (n as f64).powi(n as i32) / 2.0;
        let m = bauer_m(n, ln).unwrap();
        let rel = (PI / 8.0 * m - n as f64).abs() / n as f64;
        worst = worst.max(rel);
        let strict = ln_big > BigUint::from(2 * n).pow(n);
        ok &= rel < 1e-12 && strict && big_check(n, &ln_big).unwrap().ok && nef_check(n, m).unwrap();
    }
    Outcome {
        title: "(pi/8) bauer_m(n, 8^n n^n / 2) = n and 8^n n^n / 2 > (2n)^n for n = 1..16",
        limit: Duration::from_secs(1),
        ok: ok && worst < 1e-12,
        detail: format!("max relative error {worst:e}"),
    }
}

fn criterion_6_intersection_numbers() -> Outcome {
    let a = big_check(1, &BigUint::from(4u32)).unwrap().intersection_number;
    let b = big_check(2, &BigUint::from(128u32)).unwrap().intersection_number;
    let mut grid_ok = true;
    let mut points = 0;
    for n in 1..=5u32 {
        let threshold = BigUint::from(2 * n).pow(n);
        for k in 0..10u32 {
            // straddles the threshold: below, at and above
            let ln = &threshold + BigUint::from(k) * &threshold / 4u32 - &threshold / 2u32 + BigUint::from(k % 2);
            let positive = big_check(n, &ln).unwrap().ok;
            grid_ok &= positive == (ln > threshold);
            points += 1;
        }
    }
    let ok = a == 16.into() && b == 86016.into() && grid_ok && points == 50;
    Outcome {
        title: "intersection numbers 16 and 86016; sign matches Ln > (2n)^n on 50 points",
        limit: Duration::from_secs(1),
        ok,
        detail: format!("n=1: {a}, n=2: {b}, grid {points} points agree: {grid_ok}"),
    }
}

fn criterion_7_bounds_table() -> Outcome {
    let table = bounds_table(64).unwrap();
    let fact = |n: u32| (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k);
    let mut agree = true;
    for row in &table.rows {
        let n = row.n;
        // normality < iyer  ⇔  8ⁿ nⁿ < 2ⁿ⁺¹ (n!)²
        let lhs = BigUint::from(8u32).pow(n) * BigUint::from(n).pow(n);
        let rhs = BigUint::from(2u32).pow(n + 1) * fact(n) * fact(n);
        agree &= row.normality_smaller == (lhs < rhs);
    }
    let from_24 = table.rows.iter().all(|r| r.normality_smaller == (r.n >= 24));
    let ok = table.rows.len() == 64 && agree && table.crossover == Some(24) && from_24;
    Outcome {
        title: "exact comparison for n <= 64, frozen crossover n* = 24, normality bound smaller for every n >= 24",
        limit: Duration::from_secs(1),
        ok,
        detail: format!("crossover {:?}, oracle agreement {agree}", table.crossover),
    }
}

fn rho2_cases() -> Vec<(&'static str, PolarizedTorus, bool, Option<usize>)> {
    vec![
        ("n=1 d=2", diag_i(&[2]), false, None),
        ("n=1 d=3", diag_i(&[3]), true, Some(6)),
        ("n=1 d=4", diag_i(&[4]), true, Some(8)),
        ("n=2 (1,3)", diag_i(&[1, 3]), false, None),
        ("n=2 (3,3)", diag_i(&[3, 3]), true, Some(36)),
    ]
}

fn criterion_8_rho2_verdicts() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, t, surjective, rank) in rho2_cases() {
        let mut ranks = Vec::new();
        for seed in 0..5u64 {
            for truncation_factor in [1, 2] {
                let rep = rho2_rank(&t, &Rho2Options { seed, truncation_factor, ..Default::default() }).unwrap();
                ok &= rep.surjective == surjective;
                if let Some(r) = rank {
                    ok &= rep.numerical_rank == r;
                }
                ranks.push(rep.numerical_rank);
            }
        }
        ranks.dedup();
        notes.push(format!("{name}: ranks {ranks:?}"));
    }
    Outcome {
        title: "rho2 verdicts for the five desk cases across 5 seeds and doubled truncation",
        limit: Duration::from_secs(120),
        ok,
        detail: notes.join(", "),
    }
}

fn criterion_9_quasi_periodicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for (_, t, _, _) in rho2_cases() {
        let n = t.dim();
        let tau = t.period().tau().clone();
        let d = t.polarization_type().divisors().to_vec();
        for level in [1u32, 2] {
            let basis = theta_basis(&t, level, DEFAULT_TOL).unwrap();
            let l = level as f64;
            for _ in 0..10 {
                let z: Vec<Complex64> = (0..n)
                    .map(|i| {
                        d[i] as f64 * rng.random_range(0.0..1.0)
                            + (0..n).map(|j| tau[(i, j)] * rng.random_range(0.0..1.0)).sum::<Complex64>()
                    })
                    .collect();
                let base = basis.evaluate_all(&z).unwrap();
                for j in 0..n {
                    let mut zd = z.clone();
                    zd[j] += d[j] as f64;
                    let mut zt = z.clone();
                    for i in 0..n {
                        zt[i] += tau[(i, j)];
                    }
                    let factor = (c(0.0, -PI * l) * (tau[(j, j)] + 2.0 * z[j])).exp();
                    let vd = basis.evaluate_all(&zd).unwrap();
                    let vt = basis.evaluate_all(&zt).unwrap();
                    for k in 0..basis.len() {
                        let scale = base[k].norm().max(1e-300);
                        worst = worst.max((vd[k] - base[k]).norm() / scale);
                        worst = worst.max((vt[k] - factor * base[k]).norm() / (factor.norm() * scale));
                        checked += 2;
                    }
                }
            }
        }
    }
    Outcome {
        title: "theta quasi-periodicity under d_j e_j and tau e_j at levels 1 and 2 for the rho2 cases",
        limit: Duration::from_secs(60),
        ok: worst < 1e-8,
        detail: format!("{checked} relations, max relative residual {worst:e}"),
    }
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 9] = [
        criterion_1_svp_oracle_equivalence,
        criterion_2_diagonal_identity,
        criterion_3_elliptic_extremal,
        criterion_4_tube_volumes,
        criterion_5_threshold_identity,
        criterion_6_intersection_numbers,
        criterion_7_bounds_table,
        criterion_8_rho2_verdicts,
        criterion_9_quasi_periodicity,
    ];
    let mut failed = 0;
    for (i, run) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(run);
        let elapsed = start.elapsed();
        let (pass, title, detail, limit) = match result {
            Ok(o) => (o.ok && elapsed <= o.limit, o.title, o.detail, o.limit.as_secs().to_string()),
            Err(_) => (false, "panicked", "see the panic message above".to_string(), "-".to_string()),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {}: {}  {title}  [{detail}; {:.2} s of {limit} s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line straight to
//! stdout (bypassing the test harness capture) and then asserts.

use projconst::experiments::{self, Settings};
use projconst::Runtime;
use projconst_core::constants::proj_l1_complex;
use projconst_core::dirichlet::{self, DirichletSpace, Frequency, ProjectionOptions, Route};
use projconst_core::indexsets::{self, Family, PNorm};
use projconst_core::integrate::{self, McConfig, TrigPolynomial};
use projconst_core::kernels::{lebesgue_l, lebesgue_lplus};
use projconst_core::numtheory::{self, Sieve};
use projconst_core::sidon::{self, SidonBudget};
use projconst_core::{Complex64, Sequential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

fn verdict(id: u32, title: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let line = format!("[{tag}] AC-{id:<2} {title}: {detail}\n");
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "AC-{id} {title}: {detail}");
}

fn rt() -> Runtime {
    Runtime::new(None).unwrap()
}

fn qmc_fixed(samples: u64, seed: u64) -> McConfig {
    McConfig { target_rel_stderr: None, ..McConfig::qmc(samples, seed) }
}

#[test]
fn ac01_lebesgue_bounds() {
    let start = Instant::now();
    let mut worst = String::new();
    let mut ok = true;
    for m in 1..=10_000u64 {
        let l = lebesgue_l(m).unwrap();
        let lo = 4.0 / (PI * PI) * ((m + 1) as f64).ln();
        let hi = 3.0 + (m as f64).ln();
        if !(lo < l && l < hi) {
            ok = false;
            worst = format!("m = {m}: {lo} < {l} < {hi} fails");
            break;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = ok && secs < 120.0;
    let detail = if ok { format!("all m ≤ 10⁴ inside, {secs:.1} s") } else { worst };
    verdict(1, "Lebesgue bounds", pass, &detail);
}

#[test]
fn ac02_kernel_identity() {
    let mut worst = 0.0f64;
    for m in 0..=512u64 {
        let d = (lebesgue_lplus(2 * m).unwrap() - lebesgue_l(m).unwrap()).abs();
        worst = worst.max(d);
    }
    verdict(2, "L⁺(2m) = L(m)", worst <= 1e-9, &format!("max deviation {worst:.2e} for m ≤ 512"));
}

#[test]
fn ac03_lozinski_law() {
    let mut ok = true;
    let mut parts = Vec::new();
    for x in [1_000u64, 10_000, 100_000] {
        let lx = ((x + 1) as f64).ln();
        let dev = (lebesgue_lplus(x).unwrap() / lx - 4.0 / (PI * PI)).abs();
        ok &= dev <= 1.2 / lx;
        parts.push(format!("x={x}: {dev:.4} ≤ {:.4}", 1.2 / lx));
    }
    verdict(3, "Lozinski law", ok, &parts.join(", "));
}

#[test]
fn ac04_l1_closed_form_vs_torus() {
    let start = Instant::now();
    let rt = rt();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2usize, 3, 5, 8] {
        let set = indexsets::generate(&Family::LambdaExact { p: PNorm::One, m: 1, n }).unwrap();
        let p = TrigPolynomial::all_ones(set).unwrap();
        let est = integrate::l1_norm_with(&p, &qmc_fixed(1_000_000, 0xac04 + n as u64), &rt).unwrap();
        let exact = proj_l1_complex(n as u64).unwrap();
        let z = (est.value - exact).abs() / est.stderr;
        ok &= (est.value - exact).abs() <= 3.0 * est.stderr;
        parts.push(format!("n={n}: {z:.2}σ"));
    }
    let d2 = (proj_l1_complex(2).unwrap() - 4.0 / PI).abs();
    ok &= d2 <= 1e-8;
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    parts.push(format!("|λ(ℓ₁²) − 4/π| = {d2:.1e}, {secs:.1} s"));
    verdict(4, "ℓ₁ closed form vs torus QMC", ok, &parts.join(", "));
}

#[test]
fn ac05_sqrt_pi_over_two() {
    let target = PI.sqrt() / 2.0;
    let d3 = (proj_l1_complex(1_000).unwrap() / 1_000f64.sqrt() - target).abs();
    let d4 = (proj_l1_complex(10_000).unwrap() / 100.0 - target).abs();
    let pass = d3 <= 0.05 && d4 < d3;
    verdict(5, "ratio → √π/2", pass, &format!("gap {d3:.3e} at 10³, {d4:.3e} at 10⁴"));
}

#[test]
fn ac06_engine_agreement() {
    let rt = rt();
    let mut ok = true;
    let mut worst = 0.0f64;
    for m in 0..=8u64 {
        let space = DirichletSpace::new(Frequency::natural(), (0..=m).collect()).unwrap();
        let run = |route, engine_seed: u64| {
            let opts = ProjectionOptions {
                route: Some(route),
                budget: McConfig { target_rel_stderr: None, ..McConfig::qmc(200_000, engine_seed) },
                horizon: 1e4,
                nodes: 2,
            };
            dirichlet::projection_constant(&space, &opts, &rt).unwrap().estimate
        };
        let results = [
            run(Route::ExactKernel, 1),
            run(Route::Mc, 0xac06 + m),
            run(Route::Qmc, 0xbc06 + m),
            run(Route::Ergodic, 0),
        ];
        for (i, a) in results.iter().enumerate() {
            for b in &results[i + 1..] {
                let tol = (3.0 * a.stderr.hypot(b.stderr)).max(1e-2);
                let d = (a.value - b.value).abs();
                worst = worst.max(d / tol);
                ok &= d <= tol;
            }
        }
    }
    verdict(6, "engine agreement", ok, &format!("worst |Δ|/tolerance {worst:.3} over m ≤ 8"));
}

#[test]
fn ac07_weissler() {
    let polys = experiments::weissler_polynomials(0xac07, 200).unwrap();
    let rt = rt();
    let mut violations = 0;
    for (i, (m, p)) in polys.iter().enumerate() {
        let l2 = integrate::l2_norm_exact(p);
        let est = integrate::l1_norm_with(p, &qmc_fixed(1 << 15, i as u64), &rt).unwrap();
        if l2 > 2f64.powi(*m as i32).sqrt() * est.value + 3.0 * est.stderr + 1e-12 * l2 {
            violations += 1;
        }
    }
    let pass = violations == 0 && polys.len() == 200;
    verdict(7, "Weissler inequality", pass, &format!("{violations} violations in {} polynomials", polys.len()));
}

#[test]
fn ac08_lambda2_brackets() {
    let rt = rt();
    let sieve = Sieve::new(256);
    let mut rng = ChaCha8Rng::seed_from_u64(0xac08);
    let mut supports: Vec<Vec<u64>> = Vec::new();
    for x in [2u64, 3, 5, 8, 16, 32, 64, 128, 256] {
        supports.push((1..=x).collect());
    }
    for m in 1..=4u32 {
        supports.push(sieve.n1_numbers(m, 256).unwrap());
    }
    for _ in 0..8 {
        let k = rng.random_range(2..40);
        let mut s: Vec<u64> = (0..k).map(|_| rng.random_range(1..=256)).collect();
        s.sort_unstable();
        s.dedup();
        supports.push(s);
    }
    let mut ok = true;
    let mut checked = 0;
    for s in &supports {
        let n = s.len() as f64;
        let omega = s.iter().map(|&k| sieve.big_omega(k)).max().unwrap();
        let space = DirichletSpace::new(Frequency::log_integers(), s.clone()).unwrap();
        let res = dirichlet::projection_constant(&space, &ProjectionOptions::default(), &rt).unwrap();
        let (v, sd) = (res.estimate.value, res.estimate.stderr);
        let lo = n.sqrt() / 2f64.powi(omega as i32).sqrt() - 3.0 * sd;
        let hi = n.sqrt() + 3.0 * sd;
        ok &= lo <= v && v <= hi;
        checked += 1;
    }
    verdict(8, "Λ(2)/Ω brackets", ok, &format!("{checked} supports in [1, 256]"));
}

#[test]
fn ac09_harper_trend() {
    let start = Instant::now();
    let rep = experiments::run_experiment("harper", &Settings::default(), &rt()).unwrap();
    let rows = &rep.rows;
    let mut ok = rows.len() == 5;
    for r in rows {
        ok &= r.computed <= r.x.sqrt() + 3.0 * r.stderr;
    }
    let ratios: Vec<(f64, f64)> = rows.iter().map(|r| (r.computed / r.x.sqrt(), r.stderr / r.x.sqrt())).collect();
    for w in ratios.windows(2) {
        ok &= w[1].0 <= w[0].0 + 2.0 * w[0].1.hypot(w[1].1);
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 900.0;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{:.4}", r.0)).collect();
    verdict(9, "Harper trend", ok, &format!("value/√x = [{}], {secs:.1} s", shown.join(", ")));
}

#[test]
fn ac10_product_formula() {
    let rt = rt();
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [vec![1u64, 1], vec![2, 1], vec![2, 2]] {
        let set = indexsets::generate(&Family::Box { d: d.clone(), analytic: false }).unwrap();
        let p = TrigPolynomial::all_ones(set).unwrap();
        let est = integrate::l1_norm_with(&p, &McConfig::mc(1_000_000, 0xac10), &rt).unwrap();
        let exact: f64 = d.iter().map(|&k| lebesgue_l(k).unwrap()).product();
        ok &= est.agrees_with(exact, 3.0, 0.0);
        parts.push(format!("{d:?}: {:.2}σ", (est.value - exact).abs() / est.stderr));
    }
    verdict(10, "product formula", ok, &parts.join(", "));
}

#[test]
fn ac11_babenko_band() {
    let rep = experiments::run_experiment("babenko", &Settings::default(), &rt()).unwrap();
    let scaled: Vec<f64> = rep.rows.iter().map(|r| r.computed / r.x).collect();
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(0.0, f64::max);
    let ms: Vec<f64> = rep.rows.iter().map(|r| r.x).collect();
    let pass = ms == [4.0, 8.0, 16.0, 32.0] && hi <= 3.0 * lo;
    verdict(11, "Babenko scaling", pass, &format!("value/m ∈ [{lo:.3}, {hi:.3}]"));
}

fn binom(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[test]
fn ac12_counting_oracles() {
    let mut ok = true;
    for m in 1..=8u64 {
        for n in 1..=8usize {
            let set = indexsets::generate(&Family::LambdaExact { p: PNorm::One, m, n }).unwrap();
            ok &= set.len() as u128 == binom(n as u64 + m - 1, m);
        }
    }
    let sieve = Sieve::new(10_000);
    let delta = indexsets::generate_with(
        &Family::DeltaX { x: 10_000 },
        &indexsets::GenerateOptions { sieve: Some(&sieve), ..Default::default() },
    )
    .unwrap();
    let mut values: Vec<u64> = delta.iter().map(|a| numtheory::pow_product(a, &sieve).unwrap()).collect();
    values.sort_unstable();
    // Δ(x) is the prefix of Δ(10⁴) below x, so this covers every x ≤ 10⁴.
    ok &= values.iter().copied().eq(1..=10_000);
    for x in [1u64, 2, 3, 10, 97, 1_000] {
        ok &= indexsets::generate(&Family::DeltaX { x }).unwrap().len() as u64 == x;
    }
    let ratio = indexsets::lattice_count(50, 3).unwrap() as f64 / (4.0 / 3.0 * PI * 50f64.powi(3));
    ok &= (0.95..=1.05).contains(&ratio);
    verdict(12, "counting oracles", ok, &format!("Λ₁ binomials, |Δ(x)| = x, ball ratio {ratio:.4}"));
}

#[test]
fn ac13_landau_band() {
    let x = 1_000_000u64;
    let sieve = Sieve::new(x);
    let omega = sieve.big_omega_table(x).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [2u32, 3] {
        let count = (1..=x as usize).filter(|&n| omega[n] as u32 == m).count() as f64;
        let fact: f64 = (1..m).map(f64::from).product();
        let lx = (x as f64).ln();
        let ratio = count * fact * lx / (x as f64 * lx.ln().powi(m as i32 - 1));
        ok &= (0.5..=2.0).contains(&ratio);
        parts.push(format!("m={m}: {ratio:.4}"));
    }
    // Independent count for m = 2: semiprimes p·q ≤ x.
    let primes = numtheory::primes_up_to(x / 2);
    let mut semi = 0u64;
    for (i, &p) in primes.iter().enumerate() {
        if p * p > x {
            break;
        }
        semi += primes[i..].partition_point(|&q| p * q <= x) as u64;
    }
    let table = (1..=x as usize).filter(|&n| omega[n] == 2).count() as u64;
    ok &= semi == table;
    verdict(13, "Landau band", ok, &parts.join(", "));
}

#[test]
fn ac14_sidon() {
    let rt = rt();
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 1..=10u32 {
        let d = (1i64 << k) - 1;
        let set = indexsets::IndexSet::from_integers(0..=d).unwrap();
        let e = sidon::sidon_bounds(&set, &SidonBudget::default(), &rt).unwrap();
        let r = e.lower / (d as f64).sqrt();
        // The witness and its certificate must reproduce the claimed bound.
        let recomputed = e.witness.coefficient_l1() / e.sup_certificate;
        ok &= r >= 0.70 && (recomputed - e.lower).abs() <= 1e-12 * e.lower;
        if k == 1 || k >= 8 {
            parts.push(format!("d={d}: {r:.4}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xac14);
    let mut worst = 0.0f64;
    for n in [1usize, 3, 8, 20] {
        let set = indexsets::generate(&Family::LambdaExact { p: PNorm::One, m: 1, n }).unwrap();
        let e = sidon::sidon_bounds(&set, &SidonBudget::default(), &Sequential).unwrap();
        worst = worst.max(e.upper).max(e.lower);
        ok &= e.upper <= 1.0 + 1e-6;
        if n > sidon::MAX_GRID_DIM {
            continue;
        }
        for _ in 0..4 {
            let coefs: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.random(), rng.random::<f64>() - 0.5)).collect();
            let p = TrigPolynomial::with_coefficients(set.clone(), coefs).unwrap();
            let grid = sidon::min_grid(&p);
            let sup = sidon::sup_norm_certified(&p, grid).unwrap();
            worst = worst.max(p.coefficient_l1() / sup);
        }
    }
    ok &= worst <= 1.0 + 1e-6;
    parts.push(format!("independent sets ≤ {worst:.9}"));
    verdict(14, "Sidon suite", ok, &parts.join(", "));
}

fn run_suite(dir: &Path, jobs: &str) -> Vec<(String, Vec<u8>)> {
    let status = Command::new(env!("CARGO_BIN_EXE_projconst"))
        .args(["--jobs", jobs, "--seed", "12345", "--format", "csv", "--out"])
        .arg(dir)
        .args(["experiment", "all"])
        .env_remove(projconst::runtime::CACHE_DIR_VAR)
        .status()
        .unwrap();
    assert!(status.code() == Some(0) || status.code() == Some(1), "suite crashed: {status}");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn ac15_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let one = run_suite(a.path(), "1");
    let four = run_suite(b.path(), "4");
    let expected = experiments::registry().len();
    let same = one == four;
    let pass = same && one.len() == expected;
    let detail = format!("{} CSV files, byte-identical with --jobs 1 and --jobs 4: {same}", one.len());
    verdict(15, "determinism", pass, &detail);
}

//! Acceptance suite: one PASS/FAIL line per criterion at its pinned
//! tolerance. Exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use dilated_core::cli::{run, CommandKind, ExperimentConfig};
use dilated_core::dilated::{
    amplitude_inner, band_amplitudes, block_operator_energies, exact_norm_collisions, modulus_of_continuity,
    modulus_quadrature, quadrature_gram, quadrature_norm_exp, Banding, CoefficientSeq, FourierProfile,
    SINE_GRAM_FACTOR,
};
use dilated_core::ntheory::{zeta, ArithmeticCache};
use dilated_core::sequences::{example_family_check, factor_closure, parse_spec, theta, FamilyDiagnostic, IndexSet};
use dilated_core::spectral::{
    build_gcd_matrix, build_gcd_power_matrix, eigen_bounds_audit, eigen_trend, jordan_factor, jordan_quadratic,
    quadratic_form, zeta_bracket,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dedup(mut terms: Vec<(u64, f64)>) -> Vec<(u64, f64)> {
    terms.sort_by_key(|t| t.0);
    terms.dedup_by_key(|t| t.0);
    terms
}

/// Closures of 1 to 5 random seeds in `1..=500`.
fn closed_corpus(cache: &ArithmeticCache, count: usize) -> Vec<IndexSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    (0..count)
        .map(|_| {
            let seeds = IndexSet::new((0..rng.gen_range(1..=5)).map(|_| rng.gen_range(1..=500u64))).unwrap();
            factor_closure(&seeds, cache).unwrap()
        })
        .collect()
}

fn eigen_bounds() -> Outcome {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;
    let (lo, hi) = zeta_bracket(1.5).map_err(|e| e.to_string())?;
    // ζ(3)/ζ(3/2)² and its reciprocal
    ok &= (lo - 0.17614).abs() < 5e-6 && (hi - 5.6774).abs() < 5e-5;
    detail.push(format!("bracket(1.5)=[{lo:.5}, {hi:.4}]"));
    for s in [1.1, 1.5, 2.0] {
        for n in [8, 64, 256] {
            let a = eigen_bounds_audit(n, s).map_err(|e| e.to_string())?;
            ok &= a.asserted && a.pass;
            if !a.pass {
                detail.push(format!("n={n} s={s} outside: [{}, {}]", a.lambda_min, a.lambda_max));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 30.0;
    detail.push(format!("9 spectra in {secs:.2}s"));
    ensure(ok, detail.join("; "))
}

fn jordan_identity(corpus: &[IndexSet], cache: &ArithmeticCache) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut forms = 0;
    for k in corpus {
        for s in [0.75, 1.0, 1.5] {
            let m = build_gcd_matrix(k, s).map_err(|e| e.to_string())?;
            for _ in 0..20 {
                let y: Vec<f64> = (0..k.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let a = jordan_quadratic(k, s, &y, cache).map_err(|e| e.to_string())?;
                let b = quadratic_form(&m, &y).map_err(|e| e.to_string())?;
                worst = worst.max((a - b).abs() / b.abs());
                forms += 1;
            }
        }
    }
    ensure(worst <= 1e-10, format!("{forms} forms, worst relative error {worst:.2e}"))
}

fn jordan_factorization(corpus: &[IndexSet], cache: &ArithmeticCache) -> Outcome {
    let mut worst: f64 = 0.0;
    for k in corpus {
        for s in [0.75, 1.0, 1.5] {
            let a = jordan_factor(k, s, cache).map_err(|e| e.to_string())?.gram();
            let g = build_gcd_power_matrix(k, s).map_err(|e| e.to_string())?;
            for i in 0..k.len() {
                for j in 0..k.len() {
                    worst = worst.max((a.get(i, j) - g.get(i, j)).abs() / g.get(i, j).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-10, format!("{} matrices, worst entry error {worst:.2e}", 3 * corpus.len()))
}

fn inner_product_formula() -> Outcome {
    let p = FourierProfile::power_law_sine(1.0, 10_000).map_err(|e| e.to_string())?;
    let z2 = zeta(2.0).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in 1..=20u64 {
        for l in k..=20 {
            let q = SINE_GRAM_FACTOR * quadrature_gram(k, l, &p, 1 << 18).map_err(|e| e.to_string())?;
            let g = gcd(k, l) as f64;
            let closed = z2 * g * g / (k * l) as f64;
            worst = worst.max((q - closed).abs());
        }
    }
    ensure(worst <= 1e-3, format!("210 pairs, worst absolute error {worst:.2e}"))
}

fn collision_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let k = IndexSet::new((0..rng.gen_range(1..12)).map(|_| rng.gen_range(1..=100u64))).unwrap();
        let c = CoefficientSeq::new((0..k.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let terms = dedup((0..rng.gen_range(1..10)).map(|_| (rng.gen_range(1..=100u64), rng.gen_range(-1.0..1.0))).collect());
        let p = FourierProfile::explicit(terms).map_err(|e| e.to_string())?;
        let exact = exact_norm_collisions(&k, &c, &p).map_err(|e| e.to_string())?;
        let grid = (k.k_plus().unwrap() * p.max_frequency() + 1).next_power_of_two() as usize;
        let quad = quadrature_norm_exp(&k, &c, &p, grid).map_err(|e| e.to_string())?;
        worst = worst.max((exact - quad).abs() / exact.abs().max(f64::MIN_POSITIVE));
    }
    let k = IndexSet::new([1, 2]).unwrap();
    let c = CoefficientSeq::new(vec![1.0, 1.0]).unwrap();
    let p = FourierProfile::explicit([(1, 1.0), (2, 1.0)]).unwrap();
    let six = exact_norm_collisions(&k, &c, &p).map_err(|e| e.to_string())?;
    ensure(worst <= 1e-6 && six == 6.0, format!("worst relative gap {worst:.2e}; worked instance {six}"))
}

fn sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut ok = true;
    while checked < 100 {
        let m: f64 = rng.gen_range(1.5..4.0);
        let lo = rng.gen_range(1..50u64);
        let hi = ((lo as f64 * m) as u64).max(lo);
        let k = IndexSet::new((0..rng.gen_range(1..8)).map(|_| rng.gen_range(lo..=hi))).unwrap();
        let c = CoefficientSeq::new((0..k.len()).map(|_| rng.gen_range(0.01..1.0)).collect()).unwrap();
        let terms = dedup((0..rng.gen_range(1..12)).map(|_| (rng.gen_range(1..300u64), rng.gen_range(0.01..1.0))).collect());
        let p = FourierProfile::explicit(terms).map_err(|e| e.to_string())?;
        let e = block_operator_energies(&k, &c, &p, m, Banding::Profile).map_err(|e| e.to_string())?;
        let tol = 1e-9 * e.total;
        ok &= e.band_sum <= e.total + tol && e.total <= 3.0 * e.band_sum + tol;
        worst_ratio = worst_ratio.max(e.total / e.band_sum);
        checked += 1;
    }
    ensure(ok, format!("{checked} instances, max total/band_sum {worst_ratio:.4}"))
}

/// Integers `x` with `base^w <= x < base^{w+1}`.
fn band_integers(base: f64, w: i32) -> Vec<u64> {
    let (a, b) = (base.powi(w), base.powi(w + 1));
    (a.floor() as u64..=b.ceil() as u64).filter(|&x| x >= 1 && x as f64 >= a && (x as f64) < b).collect()
}

fn orthogonality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    let mut collisions = 0;
    while checked < 100 {
        let mu: f64 = rng.gen_range(1.2..3.0);
        let m = mu * rng.gen_range(1.0..2.0);
        let block = band_integers(mu, rng.gen_range(0..6));
        let (u, v) = (rng.gen_range(0..3), rng.gen_range(5..8));
        let (iu, jv) = (band_integers(m, u), band_integers(m, v));
        if block.is_empty() || iu.is_empty() || jv.is_empty() {
            continue;
        }
        let mut pick = |from: &[u64], n: usize| -> Vec<u64> { (0..n).map(|_| from[rng.gen_range(0..from.len())]).collect() };
        let kset = IndexSet::new(pick(&block, 5)).unwrap();
        let lset = IndexSet::new(pick(&block, 5)).unwrap();
        let freqs: Vec<u64> = pick(&iu, 4).into_iter().chain(pick(&jv, 4)).collect();
        let terms = dedup(freqs.into_iter().map(|j| (j, rng.gen_range(-1.0..1.0))).collect());
        let p = FourierProfile::explicit(terms).map_err(|e| e.to_string())?;
        let ck = CoefficientSeq::new((0..kset.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let cl = CoefficientSeq::new((0..lset.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let tk = band_amplitudes(&kset, &ck, &p, m, v as u32, Banding::Profile).map_err(|e| e.to_string())?;
        let tl = band_amplitudes(&lset, &cl, &p, m, u as u32, Banding::Profile).map_err(|e| e.to_string())?;
        let (inner, shared) = amplitude_inner(&tk, &tl);
        if inner != 0.0 || shared != 0 {
            collisions += 1;
        }
        checked += 1;
    }
    ensure(collisions == 0, format!("{checked} instances, {collisions} with shared frequencies"))
}

fn theta_envelopes(cache: &ArithmeticCache) -> Outcome {
    let chain = parse_spec("hadamard(2,20,1)", cache).map_err(|e| e.to_string())?;
    let mut worst = theta(&chain).map_err(|e| e.to_string())?.sup_value;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let sub: Vec<u64> = chain.elements().iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if sub.is_empty() {
            continue;
        }
        worst = worst.max(theta(&IndexSet::new(sub).unwrap()).map_err(|e| e.to_string())?.sup_value);
    }
    let primes = parse_spec("primes[50000,100000]", cache).map_err(|e| e.to_string())?;
    let (value, at) = match example_family_check(&primes).map_err(|e| e.to_string())? {
        FamilyDiagnostic::Primes { max_theta_log_k, argmax } => (max_theta_log_k, argmax),
        other => return Err(format!("unexpected diagnostic {other:?}")),
    };
    ensure(
        worst <= 2.0 && value <= 4.0,
        format!("hadamard sup theta {worst:.6} <= 2; primes max theta*log k {value:.6} at {at} <= 4"),
    )
}

fn modulus() -> Outcome {
    let r = modulus_of_continuity(1.0, 0.5).map_err(|e| e.to_string())?;
    let exact_gap = (r.value - PI * PI / 4.0).abs();
    let p = FourierProfile::power_law_sine(1.0, 100_000).map_err(|e| e.to_string())?;
    let quad = modulus_quadrature(&p, 0.5, 1 << 18).map_err(|e| e.to_string())?;
    let quad_gap = (quad - r.value).abs();
    ensure(
        exact_gap <= 1e-6 && quad_gap <= 1e-4,
        format!("|omega - pi^2/4| = {exact_gap:.2e}; quadrature gap {quad_gap:.2e}"),
    )
}

fn spectral_growth() -> Outcome {
    let t = eigen_trend(&[16, 64, 256, 1024], 1.0).map_err(|e| e.to_string())?;
    let maxes: Vec<String> = t.rows.iter().map(|r| format!("{:.4}", r.lambda_max)).collect();
    let mins: Vec<String> = t.rows.iter().map(|r| format!("{:.5}", r.lambda_min)).collect();
    ensure(
        t.lambda_max_increasing && t.lambda_min_decreasing,
        format!("max [{}]; min [{}]", maxes.join(", "), mins.join(", ")),
    )
}

fn criteria_suite() -> Outcome {
    let mut csvs = Vec::new();
    let mut dirs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let cfg = ExperimentConfig::new(CommandKind::Criteria, dir.path())
            .with("families", "power:1;power:0.5")
            .with("hooley1_c", "1");
        run(&cfg).map_err(|e| e.to_string())?;
        csvs.push(std::fs::read_to_string(dir.path().join("criteria.csv")).map_err(|e| e.to_string())?);
        dirs.push(dir);
    }
    let mut bad = Vec::new();
    let mut rows = 0;
    for line in csvs[0].lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let verdict = *f.last().unwrap();
        let expect = match (f[0], f[1]) {
            ("power:1", _) => Some("converges"),
            ("power:0.5", "aistleitner" | "rademacher_menshov" | "weber") => Some("diverges"),
            _ => None,
        };
        if let Some(want) = expect {
            rows += 1;
            if verdict != want {
                bad.push(format!("{}/{}={verdict}", f[0], f[1]));
            }
        }
    }
    let identical = csvs[0] == csvs[1];
    ensure(
        bad.is_empty() && identical && rows == 15,
        format!("{rows} verdicts checked, mismatches {bad:?}, csv byte-identical {identical}"),
    )
}

fn main() {
    let cache = ArithmeticCache::new(200_000).expect("cache");
    let corpus = closed_corpus(&cache, 100);
    let suite: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("eigenvalue bracket", Box::new(eigen_bounds)),
        ("jordan quadratic identity", Box::new(|| jordan_identity(&corpus, &cache))),
        ("jordan factorization", Box::new(|| jordan_factorization(&corpus, &cache))),
        ("inner-product formula", Box::new(inner_product_formula)),
        ("collision norm oracle", Box::new(collision_oracle)),
        ("band sandwich", Box::new(sandwich)),
        ("band orthogonality", Box::new(orthogonality)),
        ("theta envelopes", Box::new(|| theta_envelopes(&cache))),
        ("modulus of continuity", Box::new(modulus)),
        ("spectral growth trend", Box::new(spectral_growth)),
        ("criteria suite", Box::new(criteria_suite)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in suite.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("INFO 12 almost-everywhere conclusions: out of reach at desk scale; covered by criteria 2-11");
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

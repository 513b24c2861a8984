use dilated_core::criteria::{
    aistleitner_weight, comparison_csv, hooley1_weight, lip_counterexample, paszkiewicz_majorizing_measure,
    profile_regularity_l, split_flat_sharp, CoefficientFamily, Criteria, CriterionReport, DivisorMode, EpsFamily,
    Markers, Phi, Verdict, TAIL_START,
};
use dilated_core::dilated::FourierProfile;
use dilated_core::ntheory::ArithmeticCache;
use dilated_core::sequences::IndexSet;
use dilated_core::Error;
use proptest::prelude::*;
use std::sync::OnceLock;

const LONG: u64 = 1 << 20;

fn cache() -> &'static ArithmeticCache {
    static C: OnceLock<ArithmeticCache> = OnceLock::new();
    C.get_or_init(|| ArithmeticCache::new(LONG).unwrap())
}

fn crit() -> Criteria<'static> {
    Criteria::new(cache(), 4096).unwrap()
}

fn power(a: f64) -> CoefficientFamily {
    CoefficientFamily::power(a).unwrap()
}

fn power_log(a: f64, b: f64) -> CoefficientFamily {
    CoefficientFamily::power_log(a, b).unwrap()
}

fn ln_floor(k: u64) -> f64 {
    (k as f64).ln().max(1.0)
}

fn lnln_floor(k: u64) -> f64 {
    let l = (k as f64).ln();
    if l > std::f64::consts::E {
        l.ln()
    } else {
        1.0
    }
}

fn trial_divisor_count(n: u64) -> u64 {
    let mut count = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            count += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    count
}

/// Every report of the suite that takes only a coefficient family.
fn family_reports(c: &Criteria<'_>, fam: &CoefficientFamily) -> Vec<CriterionReport> {
    vec![
        c.rademacher_menshov(fam).unwrap(),
        c.tandori(fam, 0.5).unwrap(),
        c.bremont(fam, 1.0, &Phi::LogLogLog { eps: 0.1 }).unwrap(),
        c.bremont(fam, 0.75, &Phi::LogLogLog { eps: 0.1 }).unwrap(),
        c.bremont_conds0(fam, 0.75, 0.1).unwrap(),
        c.bremont_conds1(fam, 0.1).unwrap(),
        c.aistleitner(fam).unwrap(),
        c.weber(fam).unwrap(),
    ]
}

#[test]
fn rademacher_menshov_examples() {
    let c = crit();
    let r = c.rademacher_menshov(&power(1.0)).unwrap();
    assert_eq!(r.verdict, Verdict::Converges);
    assert!(r.tail_bound.unwrap().is_finite());
    let r = c.rademacher_menshov(&power_log(0.5, 1.0)).unwrap();
    assert_eq!(r.verdict, Verdict::Diverges);
    let raw = c.rademacher_menshov(&CoefficientFamily::raw(vec![1.0, 0.5, 0.25]).unwrap()).unwrap();
    assert_eq!(raw.verdict, Verdict::Undecided);
    assert!(raw.tail_bound.is_none());
    let want = 1.0 + 0.25 + 0.0625 * 3f64.ln().powi(2);
    assert!((raw.partial_sum - want).abs() < 1e-15);
    assert_eq!(raw.window, 3);
}

#[test]
fn tandori_examples() {
    let c = crit();
    assert_eq!(c.tandori(&power(1.0), 0.0).unwrap().verdict, Verdict::Converges);
    assert_eq!(c.tandori(&power(0.5), 0.3).unwrap().verdict, Verdict::Diverges);
    assert!(matches!(c.tandori(&power(1.0), 1.0), Err(Error::Domain(_))));
    assert!(matches!(c.tandori(&power(1.0), -0.1), Err(Error::Domain(_))));
}

#[test]
fn bremont_examples() {
    let c = crit();
    let phi = Phi::LogLogLog { eps: 0.1 };
    let r = c.bremont(&power(1.0), 1.0, &phi).unwrap();
    assert_eq!(r.components.len(), 2);
    assert_eq!(r.components[0].name, "bremont_phi");
    assert_eq!(r.components[0].verdict, Verdict::Converges);
    assert_eq!(r.components[1].verdict, Verdict::Converges);
    assert_eq!(r.verdict, Verdict::Converges);
    let one = c.bremont(&power(1.0), 1.0, &Phi::Constant { c: 1.0 }).unwrap();
    assert_eq!(one.components[0].verdict, Verdict::Diverges);
    assert_eq!(one.verdict, Verdict::Diverges);
    let border = c.bremont(&power(1.0), 1.0, &Phi::Log).unwrap();
    assert_eq!(border.verdict, Verdict::Undecided);
    assert!(!border.notes.is_empty());
    let mut table: Vec<f64> = (1..=4096).map(|k| k as f64).collect();
    table[100] = 1.0;
    assert!(matches!(
        c.bremont(&power(1.0), 1.0, &Phi::Table { values: table }),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(c.bremont(&power(1.0), 0.5, &phi), Err(Error::Domain(_))));
    assert!(matches!(c.bremont(&power(1.0), 1.2, &phi), Err(Error::Domain(_))));
    assert!(matches!(c.bremont_conds0(&power(1.0), 1.0, 0.1), Err(Error::Domain(_))));
}

#[test]
fn weber_examples() {
    let c = crit();
    assert_eq!(c.weber(&power(1.0)).unwrap().verdict, Verdict::Converges);
    assert_eq!(c.weber(&power_log(0.5, 1.0)).unwrap().verdict, Verdict::Diverges);
    // one dyadic block 8 < j <= 16
    let mut v = vec![0.0; 16];
    for j in 9..=16 {
        v[j - 1] = 1.0 / j as f64;
    }
    let r = c.weber(&CoefficientFamily::raw(v).unwrap()).unwrap();
    let block: f64 = (9..=16u64)
        .map(|j| trial_divisor_count(j) as f64 * ln_floor(j).powi(2) / (j * j) as f64)
        .sum();
    assert!((r.partial_sum - block.sqrt()).abs() < 1e-14);
    assert_eq!(r.verdict, Verdict::Undecided);
}

#[test]
fn aistleitner_examples() {
    let c = crit();
    assert_eq!(c.aistleitner(&power(0.6)).unwrap().verdict, Verdict::Converges);
    assert_eq!(c.aistleitner(&power(0.5)).unwrap().verdict, Verdict::Diverges);
    assert_eq!((aistleitner_weight(1), aistleitner_weight(2)), (1.0, 1.0));
    let w = aistleitner_weight(1000);
    assert!((w - (2.0 * 1000f64.ln() / 1000f64.ln().ln()).exp()).abs() < 1e-9 * w);
    // the weight is k^{2/lnln k}
    let k = 1e6f64;
    assert!((aistleitner_weight(1_000_000) - k.powf(2.0 / k.ln().ln())).abs() < 1e-9 * k);
}

#[test]
fn divisor_examples() {
    let c = crit();
    let n = IndexSet::range(1, 4096).unwrap();
    for mode in [DivisorMode::A, DivisorMode::D, DivisorMode::Sigma { s: 1.0 }] {
        let r = c.divisor_criteria(&power(1.0), &n, mode).unwrap();
        assert_eq!(r.verdict, Verdict::Converges, "{mode:?}");
    }
    let hot = CoefficientFamily::raw(vec![1.0, 0.0, 0.0]).unwrap();
    let r = c.divisor_criteria(&hot, &IndexSet::new([6, 10, 15]).unwrap(), DivisorMode::A).unwrap();
    assert_eq!((r.partial_sum, r.verdict), (0.0, Verdict::Undecided));
    assert!(matches!(
        c.divisor_criteria(&hot, &IndexSet::new([6, 10]).unwrap(), DivisorMode::A),
        Err(Error::Usage(_))
    ));
    assert!(matches!(
        c.divisor_criteria(&power(1.0), &n, DivisorMode::Sigma { s: 0.5 }),
        Err(Error::Domain(_))
    ));
    // short or non-initial sets give no verdict
    let r = c.divisor_criteria(&power(1.0), &IndexSet::range(2, 5000).unwrap(), DivisorMode::A).unwrap();
    assert_eq!(r.verdict, Verdict::Undecided);
    // mode A on primes k_n: the weight is A(p) = 2 − 1/p
    let primes = IndexSet::new(cache().primes_between(2, 200).unwrap()).unwrap();
    let r = c.divisor_criteria(&power(1.0), &primes, DivisorMode::A).unwrap();
    let want: f64 = primes
        .elements()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &p)| (2.0 - 1.0 / p as f64) * ln_floor(i as u64 + 1).powi(2) / ((i + 1) * (i + 1)) as f64)
        .sum();
    assert!((r.partial_sum - want).abs() < 1e-12);
}

#[test]
fn sigma_weight_never_exceeds_pillai_for_s_at_least_one() {
    let c = cache();
    for k in 1..=50_000u64 {
        let a = c.pillai_mean(k).unwrap();
        for s in [1.0, 1.5] {
            assert!(c.sigma_alpha(k, 1.0 - 2.0 * s).unwrap() <= a * (1.0 + 1e-12), "k={k} s={s}");
        }
    }
    // below s = 1 the ratio is unbounded in k, so it is only reported
    let worst = (1..=50_000u64)
        .map(|k| c.sigma_alpha(k, -0.5).unwrap() / c.pillai_mean(k).unwrap())
        .fold(0.0, f64::max);
    eprintln!("max sigma_(-1/2)/A on 1..5e4: {worst}");
    assert!(worst >= 1.0);
}

#[test]
fn sigma_mode_convergence_carries_to_pillai_mode() {
    let c = crit();
    let n = IndexSet::range(1, 4096).unwrap();
    let mut rows = Vec::new();
    for a in [0.55, 0.6, 0.75, 1.0, 1.5] {
        let fam = power(a);
        let sig = c.divisor_criteria(&fam, &n, DivisorMode::Sigma { s: 1.0 }).unwrap();
        let pil = c.divisor_criteria(&fam, &n, DivisorMode::A).unwrap();
        assert!(sig.partial_sum <= pil.partial_sum * (1.0 + 1e-12));
        if sig.verdict == Verdict::Converges {
            assert_ne!(pil.verdict, Verdict::Diverges, "a={a}");
        }
        rows.push((fam.label(), sig));
        rows.push((fam.label(), pil));
    }
    let csv = comparison_csv(&rows);
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn hooley_examples() {
    let c = crit();
    let a1 = FourierProfile::explicit([(1, 1.0)]).unwrap();
    let r = c.hooley(&a1).unwrap();
    assert_eq!((r.partial_sum, r.verdict), (1.0, Verdict::Undecided));
    let pl = FourierProfile::power_law_sine(1.0, 10_000).unwrap();
    let r = c.hooley(&pl).unwrap();
    assert_eq!(r.verdict, Verdict::Converges);
    let half = FourierProfile::explicit((1..=10_000u64).map(|n| (n, (n as f64).powf(-0.5)))).unwrap();
    let r = c.hooley(&half).unwrap();
    assert_eq!(r.verdict, Verdict::Undecided);
    let direct: f64 = (1..=10_000u64).map(|n| cache().erdos_hooley_delta(n).unwrap() as f64 / n as f64).sum();
    assert!((r.partial_sum - direct).abs() < 1e-9 * direct);
    let r = c.hooley1(&pl, 1.0).unwrap();
    assert_eq!(r.verdict, Verdict::Converges);
    assert!(matches!(c.hooley1(&pl, 0.0), Err(Error::Domain(_))));
    assert_eq!(hooley1_weight(10, 2.0), 2f64.exp());
}

#[test]
fn paszkiewicz_is_a_documented_stub() {
    assert!(matches!(paszkiewicz_majorizing_measure(), Err(Error::Usage(_))));
}

#[test]
fn partial_sums_match_hand_weights() {
    let c = Criteria::new(cache(), 2000).unwrap();
    let fam = power_log(0.7, 0.5);
    let cv = |k: u64| (k as f64).powf(-0.7) * ln_floor(k).powf(-0.5);
    let rm: f64 = (1..=2000).map(|k| cv(k).powi(2) * ln_floor(k).powi(2)).sum();
    let ai: f64 = (1..=2000u64)
        .map(|k| {
            let w = if k < 3 { 1.0 } else { (2.0 * ln_floor(k) / lnln_floor(k)).exp() };
            cv(k).powi(2) * w
        })
        .sum();
    let c1: f64 = (1..=2000).map(|k| cv(k).powi(2) * ln_floor(k).powi(3) * lnln_floor(k).powf(2.1)).sum();
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    assert!(rel(c.rademacher_menshov(&fam).unwrap().partial_sum, rm) < 1e-12);
    assert!(rel(c.aistleitner(&fam).unwrap().partial_sum, ai) < 1e-12);
    assert!(rel(c.bremont_conds1(&fam, 0.1).unwrap().partial_sum, c1) < 1e-12);
    let weber: f64 = (1..10u32)
        .map(|r| {
            ((1u64 << r) + 1..=1u64 << (r + 1))
                .map(|j| cv(j).powi(2) * trial_divisor_count(j) as f64 * ln_floor(j).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .sum();
    assert!(rel(c.weber(&fam).unwrap().partial_sum, weber) < 1e-12);
}

/// A reported tail must dominate what a window 256 times longer adds.
#[test]
fn tails_dominate_longer_partial_sums() {
    let short = Criteria::new(cache(), 4096).unwrap();
    let long = Criteria::new(cache(), LONG).unwrap();
    let n_short = IndexSet::range(1, 4096).unwrap();
    let n_long = IndexSet::range(1, LONG).unwrap();
    let mut checked = 0;
    for (a, b) in [(1.0, 0.0), (0.8, 0.0), (0.6, 0.0), (0.55, 2.0), (0.5, 3.0), (1.5, -1.0)] {
        let fam = power_log(a, b);
        let mut pairs: Vec<(CriterionReport, CriterionReport)> =
            family_reports(&short, &fam).into_iter().zip(family_reports(&long, &fam)).collect();
        for mode in [DivisorMode::A, DivisorMode::D, DivisorMode::Sigma { s: 1.0 }] {
            pairs.push((
                short.divisor_criteria(&fam, &n_short, mode).unwrap(),
                long.divisor_criteria(&fam, &n_long, mode).unwrap(),
            ));
        }
        for (s, l) in pairs {
            if s.verdict != Verdict::Converges {
                continue;
            }
            assert_eq!(l.verdict, Verdict::Converges, "{} on {}", s.name, fam.label());
            let added = l.partial_sum - s.partial_sum;
            let tail = s.tail_bound.unwrap();
            assert!(added <= tail * (1.0 + 1e-12), "{} on {}: {added} > {tail}", s.name, fam.label());
            checked += 1;
        }
    }
    assert!(checked >= 40, "only {checked} convergent reports");
}

#[test]
fn power_law_suite_verdicts() {
    let c = crit();
    let n = IndexSet::range(1, 4096).unwrap();
    let hooley_profile = |a: f64| FourierProfile::power_law_sine(a, 4096).unwrap();
    let all = |a: f64| {
        let fam = power(a);
        let mut v = family_reports(&c, &fam);
        for mode in [DivisorMode::A, DivisorMode::D, DivisorMode::Sigma { s: 1.0 }] {
            v.push(c.divisor_criteria(&fam, &n, mode).unwrap());
        }
        v
    };
    for r in all(1.0) {
        assert_eq!(r.verdict, Verdict::Converges, "{}", r.name);
    }
    assert_eq!(c.hooley(&hooley_profile(1.0)).unwrap().verdict, Verdict::Converges);
    let half = all(0.5);
    for name in ["aistleitner", "rademacher_menshov", "weber"] {
        let r = half.iter().find(|r| r.name == name).unwrap();
        assert_eq!(r.verdict, Verdict::Diverges, "{name}");
    }
    assert!(half.iter().all(|r| r.verdict != Verdict::Converges));
}

#[test]
fn regularity_examples() {
    let a1 = FourierProfile::explicit([(1, 1.0)]).unwrap();
    assert_eq!(profile_regularity_l(&a1, 2.0).unwrap(), 1.0);
    let one = FourierProfile::power_law_sine(1.0, 100).unwrap();
    assert!((profile_regularity_l(&one, 2.0).unwrap() - 2.0).abs() < 1e-12);
    let six = FourierProfile::power_law_sine(0.6, 100).unwrap();
    let want = 1.0 / (1.0 - 2f64.powf(-0.2));
    assert!((profile_regularity_l(&six, 2.0).unwrap() - want).abs() < 1e-9 * want);
    assert!(matches!(profile_regularity_l(&a1, 1.0), Err(Error::Domain(_))));
}

#[test]
fn split_examples() {
    let p = FourierProfile::explicit([(1, 0.5), (2, 0.2), (4, 0.1)]).unwrap();
    let s = split_flat_sharp(&p, &EpsFamily::Power { beta: 0.0 }, &Markers::Geometric { m: 2.0 }).unwrap();
    assert!(s.flat.is_empty() && s.a_sum == 0.0 && s.sharp.len() == 3);
    let s = split_flat_sharp(&p, &EpsFamily::Power { beta: 2.0 }, &Markers::Geometric { m: 2.0 }).unwrap();
    // ε(1) = 1 and ε(2) = 1/4 dominate; only ε(4) = 1/16 < 0.1
    assert_eq!(s.flat, vec![(4, 0.1)]);
    assert!((s.a_sum - 0.1).abs() < 1e-15);
    // pointwise a = a♭ + a♯ with disjoint supports
    let mut joined: Vec<(u64, f64)> = s.flat.iter().chain(&s.sharp).copied().collect();
    joined.sort_by_key(|t| t.0);
    assert_eq!(joined, p.coefficients());
    assert!(matches!(
        split_flat_sharp(&p, &EpsFamily::Table { values: vec![0.1, 0.2, 0.3, 0.4] }, &Markers::Geometric { m: 2.0 }),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        split_flat_sharp(&p, &EpsFamily::Power { beta: 1.0 }, &Markers::Explicit { values: vec![2, 2] }),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn lip_power_construction() {
    // a_j = j^{-s} against ε(j) = j^{-β} with 1/2 < β < 2α
    let alpha = 0.4;
    let beta = 0.7;
    let p = FourierProfile::power_law_sine(1.2, 1 << 12).unwrap();
    let s = split_flat_sharp(&p, &EpsFamily::Power { beta }, &Markers::Geometric { m: 2.0 }).unwrap();
    assert!(beta > 0.5 && beta < 2.0 * alpha);
    assert!(s.a_finite() && s.b1_finite());
    assert!(s.flat.is_empty());
    let direct: f64 = (1..=1u64 << 12).map(|j| (j as f64).powf(-2.0 * beta)).sum();
    assert!((s.b1 - direct).abs() < 1e-12 * direct);
}

#[test]
fn b_finite_implies_b1_finite() {
    let p = FourierProfile::power_law_sine(1.0, 1 << 14).unwrap();
    let mut families = Vec::new();
    for i in 0..10 {
        families.push(EpsFamily::Power { beta: 0.3 + 0.12 * i as f64 });
        families.push(EpsFamily::Geometric { rho: 0.5 + 0.05 * i as f64 });
    }
    // B converges exactly for β > 1/2 or ρ < 1
    let expected = 3 * families
        .iter()
        .filter(|e| match e {
            EpsFamily::Power { beta } => *beta > 0.5,
            EpsFamily::Geometric { rho } => *rho < 1.0,
            _ => unreachable!(),
        })
        .count();
    let mut b_finite = 0;
    for eps in &families {
        for m in [2.0, 3.0, 5.5] {
            let s = split_flat_sharp(&p, eps, &Markers::Geometric { m }).unwrap();
            if s.b_finite() {
                b_finite += 1;
                assert!(s.b1_finite(), "{eps:?} M={m}");
                assert!(s.b1 + s.b1_tail.unwrap() <= (s.b + s.b_tail.unwrap()).powi(2) * 10.0 + 10.0);
            }
        }
    }
    assert_eq!(expected, 54);
    assert_eq!(b_finite, expected);
}

#[test]
fn b1_tracks_regularity_on_geometric_markers() {
    // with ε(j) = j^{-s}, B₁ and L agree in finiteness
    for s in [0.55, 0.75, 1.0, 2.0] {
        let p = FourierProfile::power_law_sine(s, 1 << 12).unwrap();
        let split = split_flat_sharp(&p, &EpsFamily::Power { beta: s }, &Markers::Geometric { m: 2.0 }).unwrap();
        let l = profile_regularity_l(&p, 2.0).unwrap();
        assert_eq!(split.b1_finite(), l.is_finite(), "s={s}");
    }
}

#[test]
fn lip_counterexample_at_quarter() {
    let cx = lip_counterexample(0.25, 4.0, 20).unwrap();
    assert!(cx.psi_conditions);
    assert_eq!(cx.a_sum, 0.0);
    assert!(cx.b1.is_finite() && cx.b1_tail.is_finite());
    assert!(cx.ratios_increasing);
    let r = &cx.block_ratios;
    assert!(r.last().unwrap().1 > 3.0 * r[1].1);
    // ε is nonincreasing and dominates |a| pointwise
    assert!(cx.eps.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-15)));
    for (j, a) in cx.profile.coefficients() {
        assert!(a.abs() <= cx.eps[j as usize - 1]);
    }
    assert!(lip_counterexample(0.25, 4.0, 1).is_err());
}

#[test]
fn comparison_csv_shape() {
    let c = crit();
    let rows: Vec<(String, CriterionReport)> =
        family_reports(&c, &power(1.0)).into_iter().map(|r| ("k^-1".to_string(), r)).collect();
    let csv = comparison_csv(&rows);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "family,criterion,w(2),w(10),w(100),w(1000),window,partial_sum,tail,verdict"
    );
    for line in lines {
        assert!(line.ends_with(",converges"), "{line}");
    }
    assert_eq!(csv, comparison_csv(&rows));
}

#[test]
fn window_floor() {
    let c = Criteria::new(cache(), 10).unwrap();
    assert_eq!(c.rademacher_menshov(&power(1.0)).unwrap().window, TAIL_START);
    assert!(Criteria::new(cache(), 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Shrinking `|c_k|` by `k^{-δ} L(k)^{-β}` never turns a convergent
    /// verdict into a divergent one and never raises a partial sum.
    #[test]
    fn damping_is_monotone(a in 0.3f64..1.5, b in -1.0f64..2.0, da in 0.0f64..0.5, db in 0.0f64..2.0) {
        let c = crit();
        let base = family_reports(&c, &power_log(a, b));
        let damped = family_reports(&c, &power_log(a + da, b + db));
        for (x, y) in base.iter().zip(&damped) {
            prop_assert!(y.partial_sum <= x.partial_sum * (1.0 + 1e-12), "{}", x.name);
            if x.verdict == Verdict::Converges {
                prop_assert!(y.verdict != Verdict::Diverges, "{}", x.name);
            }
            if y.verdict == Verdict::Diverges {
                prop_assert!(x.verdict != Verdict::Converges, "{}", x.name);
            }
        }
    }

    #[test]
    fn raw_partial_sums_are_monotone(v in prop::collection::vec(-1.0f64..1.0, 1..300), f in 0.0f64..=1.0) {
        let c = crit();
        let big = CoefficientFamily::raw(v.clone()).unwrap();
        let small = CoefficientFamily::raw(v.iter().map(|x| x * f).collect()).unwrap();
        for (x, y) in family_reports(&c, &big).iter().zip(&family_reports(&c, &small)) {
            prop_assert!(y.partial_sum <= x.partial_sum * (1.0 + 1e-12) + 1e-300, "{}", x.name);
            prop_assert_eq!(x.verdict, Verdict::Undecided);
        }
    }
}

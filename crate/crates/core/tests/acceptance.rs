//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mermin::abelian::{FiniteAbelianGroup, GroupElement, PhaseSolution, RationalPhase};
use mermin::contextuality::{
    build_lhv, classify, find_global_section, is_avn, is_avn_exhaustive, lhv_predicted_model, Classification,
};
use mermin::fixtures::{cyclic, cyclic_system, mermin, minimal_parties};
use mermin::protocol::{run_protocol, DeviceBackend, ProtocolConfig, ProtocolReport};
use mermin::quantum::{ghz_state, phase_gate, simulate_model, QuditState, SingleSiteGate};
use mermin::scenario::{expected_model, max_abs_deviation, MerminArgument};

const SEED: u64 = 2024;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

/// The argument corpus: Mermin, the cyclic family `t y = 1` over `Z/d` at its
/// minimal party count, and three larger party counts.
fn corpus() -> Vec<(String, MerminArgument)> {
    let mut out = vec![("mermin".to_string(), mermin())];
    for (d, t) in [(3, 2), (4, 2), (6, 2), (9, 3)] {
        let n = minimal_parties(d, t);
        out.push((format!("({d},{t},{n})"), cyclic(d, t as i64, n)));
    }
    for (d, t, n) in [(3, 2, 4), (4, 2, 5), (5, 3, 6)] {
        out.push((format!("({d},{t},{n})"), cyclic(d, t, n)));
    }
    out
}

/// Arguments over `Z/d` for `d` in 2..=9 and `t` in 1..d at minimal `N`.
fn sweep() -> Vec<(u64, u64, usize, MerminArgument)> {
    let mut out = Vec::new();
    for d in 2..=9u64 {
        for t in 1..d {
            let n = minimal_parties(d, t);
            out.push((d, t, n, cyclic(d, t as i64, n)));
        }
    }
    out
}

fn search_size(arg: &MerminArgument) -> u64 {
    let variables = arg.parties() * (arg.max_choice() + 1);
    (arg.group().order() as u64).checked_pow(variables as u32).unwrap_or(u64::MAX)
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let arg = mermin();
    let contextual = classify(&arg).is_contextual();
    let model = expected_model(&arg);
    let section = find_global_section(&model, 1_000_000).expect("within cap");
    let avn = is_avn(&arg);
    let elapsed = start.elapsed();
    let pass = contextual && section.is_none() && avn && elapsed < Duration::from_secs(1);
    verdict(pass, format!("contextual={contextual} global_section={} avn={avn} in {}", section.is_some(), ms(elapsed)))
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let cases = sweep();
    for (d, t, n, arg) in &cases {
        let local = matches!(classify(arg), Classification::Local(_));
        if local != (t.gcd(d) == 1) {
            mismatches.push(format!("(d={d},t={t},N={n})"));
        }
    }
    let elapsed = start.elapsed();
    verdict(
        mismatches.is_empty() && elapsed < Duration::from_secs(5),
        format!("{} cases, mismatches {:?}, {}", cases.len(), mismatches, ms(elapsed)),
    )
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (d, t, n) in [(2, 2, 3), (3, 2, 4), (4, 2, 5), (5, 3, 6)] {
        let arg = cyclic(d, t, n);
        let sim = simulate_model(&arg, mermin::DEFAULT_AMPLITUDE_CAP).expect("within cap");
        let dev = max_abs_deviation(&expected_model(&arg), &sim);
        worst = worst.max(dev);
        parts.push(format!("({d},{t},{n}) {dev:.1e}"));
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-9 && elapsed < Duration::from_secs(10),
        format!("max deviation {worst:.2e} [{}] in {}", parts.join(", "), ms(elapsed)),
    )
}

fn criterion_4() -> Verdict {
    let mut checked = Vec::new();
    let mut failures = Vec::new();
    let mut candidates = corpus();
    for (d, t, n, arg) in sweep() {
        // keeps the exact hidden-variable enumeration small
        if (d as u128).pow(n as u32 - 1) <= 100_000 {
            candidates.push((format!("({d},{t},{n})"), arg));
        }
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    candidates.dedup_by(|a, b| a.0 == b.0);
    for (name, arg) in candidates {
        let Classification::Local(b) = classify(&arg) else { continue };
        let lhv = build_lhv(&arg, &b).expect("classifier solution");
        if lhv_predicted_model(&lhv, &arg.contexts()) != expected_model(&arg) {
            failures.push(name.clone());
        }
        checked.push(name);
    }
    verdict(
        failures.is_empty() && !checked.is_empty(),
        format!("{} local arguments exactly equal, failures {:?}", checked.len(), failures),
    )
}

fn criterion_5() -> Verdict {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut candidates = corpus();
    candidates.extend(sweep().into_iter().map(|(d, t, n, a)| (format!("({d},{t},{n})"), a)));
    for (name, arg) in candidates {
        if search_size(&arg) > 1_000_000 {
            continue;
        }
        let contextual = classify(&arg).is_contextual();
        let no_section = find_global_section(&expected_model(&arg), 1_000_000).expect("within cap").is_none();
        let avn = is_avn(&arg);
        let avn_brute = is_avn_exhaustive(&arg, 1_000_000).expect("within cap");
        if !(contextual == no_section && no_section == avn && avn == avn_brute) {
            failures.push(format!("{name}: {contextual}/{no_section}/{avn}/{avn_brute}"));
        }
        checked += 1;
    }
    verdict(failures.is_empty() && checked > 0, format!("{checked} arguments agree, failures {failures:?}"))
}

fn criterion_6() -> Verdict {
    let mut failures = Vec::new();
    let mut solved = 0;
    for n in [4u64, 6, 8, 9] {
        let p = (2..=n).find(|q| n % q == 0).expect("n >= 2");
        let parties = minimal_parties(n, p);
        if !is_avn(&cyclic(n, p as i64, parties)) {
            failures.push(format!("not AvN over Z/{n}"));
        }
        for m in (2..=20u64).filter(|m| m.gcd(&n) == 1) {
            let system = cyclic_system(m, p as i64);
            let fast = system.solve_in_group();
            let brute = system.solve_in_group_exhaustive(1_000).expect("within cap");
            match fast {
                Some(y) if system.is_solution(&y) && brute.is_some() => solved += 1,
                _ => failures.push(format!("{p}y=1 unsolved over Z/{m}")),
            }
        }
    }
    verdict(failures.is_empty(), format!("4 AvN theories, {solved} coprime solutions, failures {failures:?}"))
}

fn protocol_line(report: &ProtocolReport) -> String {
    let r = &report.rounds;
    format!(
        "eps={:.4} decode={:.4} eve={:.4} test_frac={:.4} valid={} test={} secret={}",
        report.epsilon,
        report.decode_success_fraction,
        report.eve_success_fraction,
        report.test_fraction,
        r.valid,
        r.test,
        r.secret
    )
}

fn test_fraction_ok(report: &ProtocolReport, tau: f64) -> bool {
    let w = report.rounds.valid as f64;
    (report.test_fraction - tau).abs() <= 3.0 * (tau * (1.0 - tau) / w).sqrt()
}

fn plaintext(group: &FiniteAbelianGroup, len: usize) -> Vec<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5EC2E7);
    (0..len).map(|_| group.element_at(rng.gen_range(0..group.order()))).collect()
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let arg = mermin();
    let tau = 0.3;
    let config = ProtocolConfig::new(arg.clone(), 2, tau, 20_000, DeviceBackend::IdealQuantum, SEED);
    let report = run_protocol(&config, &plaintext(arg.group(), 20_000)).expect("valid config");
    let elapsed = start.elapsed();
    let decode_all = report.decoded == report.plaintext && report.decode_success_fraction == 1.0;
    let pass =
        decode_all && report.epsilon <= 0.05 && test_fraction_ok(&report, tau) && elapsed < Duration::from_secs(30);
    verdict(pass, format!("{} in {}", protocol_line(&report), ms(elapsed)))
}

fn criterion_8() -> Verdict {
    let arg = cyclic(3, 2, 4);
    let two = arg.group().element(vec![2]).expect("in range");
    let config = ProtocolConfig::new(
        arg.clone(),
        2,
        0.3,
        20_000,
        DeviceBackend::AdversarialClassical { solution: vec![two] },
        SEED,
    );
    let report = run_protocol(&config, &plaintext(arg.group(), 20_000)).expect("valid config");
    verdict(report.epsilon <= 0.05 && report.eve_success_fraction == 1.0, protocol_line(&report))
}

fn criterion_9() -> Verdict {
    let arg = mermin();
    let delta = 0.1;
    let config = ProtocolConfig::new(arg.clone(), 2, 0.3, 50_000, DeviceBackend::MixedNoise { delta }, SEED);
    let report = run_protocol(&config, &[]).expect("valid config");
    // smallest promised-support entry of the exact mixture, then the formula
    let k = arg.group().order() as f64;
    let support = k.powi(arg.parties() as i32 - 1);
    let min_entry = (1.0 - delta) / support + delta / (k * support);
    let target = 1.0 - support * min_entry;
    let err = (report.epsilon - target).abs();
    verdict(err <= 0.02, format!("target={target:.4} |err|={err:.4} {}", protocol_line(&report)))
}

fn random_table(group: &FiniteAbelianGroup, rng: &mut ChaCha8Rng) -> Vec<RationalPhase> {
    (0..group.order()).map(|_| RationalPhase::new(rng.gen_range(0..360), 360)).collect()
}

fn criterion_10() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let groups: Vec<FiniteAbelianGroup> =
        [vec![2], vec![3], vec![4], vec![5], vec![2, 2], vec![2, 3], vec![2, 4], vec![3, 3]]
            .into_iter()
            .map(|f| FiniteAbelianGroup::new(f).expect("valid"))
            .collect();

    let mut unitarity = 0.0f64;
    for group in &groups {
        for _ in 0..20 {
            let gate = phase_gate(group, &random_table(group, &mut rng)).expect("shape");
            let product = gate.adjoint().mul(&gate);
            unitarity = unitarity.max(product.max_abs_diff(&SingleSiteGate::identity(group.order())));
        }
    }

    let mut translation = 0.0f64;
    for group in &groups {
        for h in group.elements() {
            let beta = PhaseSolution::embedding(group, std::slice::from_ref(&h));
            let gate = phase_gate(group, beta.table(0)).expect("shape");
            for g in group.elements() {
                let image = group.index_of(&group.add(&g, &h).expect("same group"));
                for row in 0..group.order() {
                    let expected = if row == image { Complex64::one() } else { Complex64::new(0.0, 0.0) };
                    translation = translation.max((gate.get(row, group.index_of(&g)) - expected).norm());
                }
            }
        }
    }

    let mut splitting = 0.0f64;
    for (d, t, n) in [(2, 2, 3), (3, 2, 4), (4, 2, 5), (5, 3, 6)] {
        let arg = cyclic(d, t, n);
        let group = arg.group();
        let contexts = arg.contexts();
        for trial in 0..50 {
            let context = &contexts[trial % contexts.len()];
            let total = context.choices.iter().fold(vec![RationalPhase::zero(); group.order()], |acc, &m| {
                acc.iter().zip(arg.phase_table(m).iter()).map(|(a, b)| *a + *b).collect()
            });
            let mut parts: Vec<Vec<RationalPhase>> = (0..n - 1).map(|_| random_table(group, &mut rng)).collect();
            let rest = parts.iter().fold(total.clone(), |acc, p| acc.iter().zip(p).map(|(a, b)| *a - *b).collect());
            parts.push(rest);

            let ghz = ghz_state(group, n).expect("n >= 2");
            let split = apply(&ghz, &parts);
            let mut concentrated = vec![vec![RationalPhase::zero(); group.order()]; n];
            concentrated[trial % n] = total;
            let whole = apply(&ghz, &concentrated);
            let tables: Vec<Vec<RationalPhase>> =
                context.choices.iter().map(|&m| arg.phase_table(m).into_owned()).collect();
            let per_party = apply(&ghz, &tables);
            splitting = splitting.max(split.max_abs_diff(&whole)).max(split.max_abs_diff(&per_party));
        }
    }

    verdict(
        unitarity <= 1e-10 && translation <= 1e-12 && splitting <= 1e-9,
        format!("unitarity {unitarity:.1e}, translation {translation:.1e}, splitting {splitting:.1e} (200 splits)"),
    )
}

fn apply(state: &QuditState, tables: &[Vec<RationalPhase>]) -> QuditState {
    let mut out = state.clone();
    let refs: Vec<&[RationalPhase]> = tables.iter().map(Vec::as_slice).collect();
    out.apply_phases(&refs).expect("shape");
    out
}

fn main() {
    // the closed-form mixture target must equal delta (1 - 1/|K|) exactly
    let exact = BigRational::new(BigInt::from(1), BigInt::from(20));
    assert_eq!(mermin::protocol::mixture_noise(mermin().group(), &BigRational::new(1.into(), 10.into())), exact);

    let criteria: [Criterion; 10] = [
        ("mermin verdicts", criterion_1),
        ("locality boundary", criterion_2),
        ("quantum realisation", criterion_3),
        ("LHV equivalence", criterion_4),
        ("triple oracle", criterion_5),
        ("hierarchy", criterion_6),
        ("ideal protocol", criterion_7),
        ("classical attack", criterion_8),
        ("noise response", criterion_9),
        ("simulator identities", criterion_10),
    ];
    let mut failed = BTreeMap::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| verdict(false, format!("panicked: {:?}", e.downcast_ref::<String>())));
        let status = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {:<22} {status}  {}", i + 1, name, result.detail);
        if !result.pass {
            failed.insert(i + 1, *name);
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

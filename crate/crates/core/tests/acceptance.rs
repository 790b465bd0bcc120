//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ilrc_core::analysis::{
    self, decryption_failure_bound, key_size_bytes, rank_weight_probability, rate, wf_ae,
    wf_loidreau, MonteCarloConfig, TrialOutcome,
};
use ilrc_core::cryptosystem::{sample_error_code, Cryptosystem, ParameterSet};
use ilrc_core::distinguisher::{
    classify_error, dual_augmented_dims, dual_dimension_bound, sample_instance, ErrorCodeKind,
    Verdict,
};
use ilrc_core::gabidulin::{
    decode_bruteforce_oracle, decode_interleaved, encode_interleaved, min_rank_distance,
    GabidulinCode, DEFAULT_ENUMERATION_CAP, DEFAULT_ORACLE_CAP,
};
use ilrc_core::linalg::{
    self, rank_q, sample_matrix_over_subspace, sample_rank_q, sample_subspace, sample_uniform,
    Ext, DEFAULT_RETRY_BUDGET,
};
use ilrc_core::{FieldCtx, RngStream};
use num_rational::BigRational;
use num_traits::One;

struct Row {
    p: ParameterSet,
    t_pub: usize,
    wf_loi: &'static str,
    wf_ae: Option<&'static str>,
    rate: &'static str,
    p_f: Option<f64>,
    key_kb: &'static str,
}

const fn row(
    (q, k, n, m, lambda, ell): (u64, usize, usize, usize, usize, usize),
    t_pub: usize,
    wf_loi: &'static str,
    wf_ae: Option<&'static str>,
    rate: &'static str,
    p_f: Option<f64>,
    key_kb: &'static str,
) -> Row {
    Row {
        p: ParameterSet {
            q,
            m,
            n,
            k,
            lambda,
            ell,
        },
        t_pub,
        wf_loi,
        wf_ae,
        rate,
        p_f,
        key_kb,
    }
}

/// The published security table.
const TABLE: [Row; 8] = [
    row((16, 11, 27, 42, 2, 1), 4, "82.00", None, "0.41", None, "3.70"),
    row((16, 9, 27, 42, 2, 2), 6, "82.00", Some("119.00"), "0.33", Some(-166.0), "3.40"),
    row((16, 14, 34, 66, 2, 1), 5, "130.00", None, "0.41", None, "9.24"),
    row((16, 13, 31, 66, 2, 2), 6, "130.00", Some("215.00"), "0.42", Some(-266.0), "7.72"),
    row((16, 23, 53, 62, 3, 1), 5, "240.00", None, "0.43", None, "21.39"),
    row((16, 22, 49, 62, 3, 2), 6, "240.00", Some("199.00"), "0.45", Some(-246.0), "18.41"),
    row((16, 30, 60, 68, 3, 1), 5, "264.00", None, "0.50", None, "30.60"),
    row((16, 28, 55, 77, 3, 2), 6, "300.00", Some("259.00"), "0.51", Some(-306.0), "29.11"),
];

fn desk() -> ParameterSet {
    ParameterSet::new(2, 24, 20, 8, 2, 2).unwrap()
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    for (i, r) in TABLE.iter().enumerate() {
        let p = &r.p;
        let got = (
            p.t_pub(),
            format!("{:.2}", wf_loidreau(p)),
            wf_ae(p).map(|v| format!("{v:.2}")),
            {
                let q = rate(p);
                format!("{:.2}", *q.numer() as f64 / *q.denom() as f64)
            },
            format!("{:.2}", key_size_bytes(p).unwrap() as f64 / 1000.0),
        );
        let want = (
            r.t_pub,
            r.wf_loi.to_string(),
            r.wf_ae.map(str::to_string),
            r.rate.to_string(),
            r.key_kb.to_string(),
        );
        if p.validate().is_err() || got != want {
            bad.push(format!("row {}: got {got:?}, want {want:?}", i + 1));
        }
    }
    Outcome {
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            "8/8 rows match (t_pub, WF_Loi, WF_AE, rate, key size)".into()
        } else {
            bad.join("; ")
        },
    }
}

fn criterion_2() -> Outcome {
    const TOL: f64 = 2.0;
    let mut parts = Vec::new();
    let mut ok = true;
    for (i, r) in TABLE.iter().enumerate() {
        let Some(want) = r.p_f else { continue };
        let got = decryption_failure_bound(&r.p);
        let pass = (got - want).abs() <= TOL;
        ok &= pass;
        parts.push(format!(
            "row {}: {got:.2} vs {want:.2} {}",
            i + 1,
            if pass { "ok" } else { "OUT OF TOLERANCE" }
        ));
    }
    Outcome {
        ok,
        detail: format!("tolerance ±{TOL} bits; {}", parts.join(", ")),
    }
}

fn criterion_3() -> Outcome {
    let ctx = FieldCtx::with_order(2, 24).unwrap();
    let f = Ext(&ctx);
    let mut violations = 0;
    let mut count = 0;
    for lambda in [2usize, 3] {
        for i in 0..250u64 {
            let mut rng = RngStream::indexed(3000 + lambda as u64, i);
            let t = 1 + (i as usize % 6);
            let v = sample_subspace(&ctx, lambda, &mut rng, DEFAULT_RETRY_BUDGET).unwrap();
            let p = sample_matrix_over_subspace(&ctx, &v, 20, &mut rng, DEFAULT_RETRY_BUDGET)
                .unwrap();
            let e = sample_rank_q(&ctx, 2, 20, t, &mut rng, DEFAULT_RETRY_BUDGET).unwrap();
            let before = rank_q(&ctx, &e);
            let after = rank_q(&ctx, &linalg::mul(&f, &e, &p));
            if after > lambda * before {
                violations += 1;
            }
            count += 1;
        }
    }
    Outcome {
        ok: violations == 0,
        detail: format!("{violations} violations in {count} instances"),
    }
}

fn criterion_4() -> Outcome {
    let ctx = FieldCtx::with_order(2, 6).unwrap();
    let f = Ext(&ctx);
    let (mut both, mut agree, mut disagree) = (0, 0, 0);
    for i in 0..500u64 {
        let mut rng = RngStream::indexed(4000, i);
        let code = GabidulinCode::random(&ctx, 6, 2, &mut rng, DEFAULT_RETRY_BUDGET).unwrap();
        let t = (i % 3) as usize;
        let msg = sample_uniform(&f, 2, 2, &mut rng);
        let e = sample_rank_q(&ctx, 2, 6, t, &mut rng, DEFAULT_RETRY_BUDGET).unwrap();
        let y = linalg::add(&f, &encode_interleaved(&ctx, &msg, &code), &e);
        let fast = decode_interleaved(&ctx, &y, &code, 2);
        let slow = decode_bruteforce_oracle(&ctx, &y, &code, 2, DEFAULT_ORACLE_CAP);
        if let (Ok(a), Ok(b)) = (&fast, &slow) {
            both += 1;
            if a == b {
                agree += 1;
            } else {
                disagree += 1;
            }
        }
    }
    let mut single_ok = 0;
    let single_total = 300;
    for i in 0..single_total as u64 {
        let mut rng = RngStream::indexed(4001, i);
        let code = GabidulinCode::random(&ctx, 6, 2, &mut rng, DEFAULT_RETRY_BUDGET).unwrap();
        let t = (i % 3) as usize;
        let msg = sample_uniform(&f, 1, 2, &mut rng);
        let e = sample_rank_q(&ctx, 1, 6, t, &mut rng, DEFAULT_RETRY_BUDGET).unwrap();
        let y = linalg::add(&f, &encode_interleaved(&ctx, &msg, &code), &e);
        if let Ok(d) = decode_interleaved(&ctx, &y, &code, 2) {
            if d.message == msg && d.error == e {
                single_ok += 1;
            }
        }
    }
    Outcome {
        ok: disagree == 0 && both > 0 && single_ok == single_total,
        detail: format!(
            "l=2: {agree}/{both} joint successes agree, {disagree} disagree; \
             l=1 unique radius: {single_ok}/{single_total} decoded"
        ),
    }
}

fn criterion_5() -> Outcome {
    let params = desk();
    let sys = Cryptosystem::new(params).unwrap();
    let cfg = MonteCarloConfig::new(1000, 5000);
    let (pk, sk) = analysis::simulation_keys(&sys, cfg.seed).unwrap();
    let (mut failures, mut wrong) = (0u64, 0u64);
    for i in 0..cfg.trials {
        match analysis::run_trial(&sys, &pk, &sk, &cfg, i).unwrap() {
            TrialOutcome::Success => {}
            TrialOutcome::Failure => failures += 1,
            TrialOutcome::Wrong => wrong += 1,
        }
    }
    let p = libm::exp2(decryption_failure_bound(&params));
    let n = cfg.trials as f64;
    let limit = (n * p + 3.0 * (n * p * (1.0 - p)).sqrt()).floor() as u64;
    Outcome {
        ok: wrong == 0 && failures <= limit,
        detail: format!(
            "{failures} failures, {wrong} wrong messages in {} rounds; allowed {limit} \
             (bound 2^{:.2})",
            cfg.trials,
            decryption_failure_bound(&params)
        ),
    }
}

fn criterion_6() -> Outcome {
    let params = ParameterSet::new(2, 24, 24, 6, 2, 2).unwrap();
    let sys = Cryptosystem::new(params).unwrap();
    let ctx = sys.ctx();
    let t = sys.t_pub();
    let trials = 200u64;
    let (mut gab_ok, mut rand_ok, mut dual_bad) = (0, 0, 0);
    for i in 0..trials {
        let mut rng = RngStream::indexed(6000, i);
        let (pk, _) = sys.keygen(&mut rng).unwrap();
        for kind in [ErrorCodeKind::Gabidulin, ErrorCodeKind::Random] {
            let inst = sample_instance(&sys, &pk, kind, &mut rng).unwrap();
            let c = classify_error(ctx, &pk.g_pub, &inst.y, t, 1).unwrap();
            match (kind, c.verdict) {
                (ErrorCodeKind::Gabidulin, Verdict::GabidulinLike) => gab_ok += 1,
                (ErrorCodeKind::Random, Verdict::RandomLike) => rand_ok += 1,
                _ => {}
            }
            let dual = dual_augmented_dims(ctx, &pk.g_pub, &inst.y, 2).unwrap();
            for (j, &d) in dual.iter().enumerate() {
                if kind == ErrorCodeKind::Gabidulin && d > dual_dimension_bound(24, 6, 2, j) {
                    dual_bad += 1;
                }
            }
        }
    }
    let rand_needed = (0.95 * trials as f64).ceil() as u64;
    Outcome {
        ok: gab_ok == trials && rand_ok >= rand_needed && dual_bad == 0,
        detail: format!(
            "GabidulinLike {gab_ok}/{trials}; RandomLike {rand_ok}/{trials} (need {rand_needed}); \
             dual bound violations {dual_bad}"
        ),
    }
}

fn criterion_7() -> Outcome {
    let ctx = FieldCtx::with_order(2, 9).unwrap();
    let (ell, t) = (2usize, 3usize);
    let trials = 200u64;
    let mut non_mrd = 0u64;
    for i in 0..trials {
        let mut rng = RngStream::indexed(7000, i);
        let a = sample_error_code(&ctx, ell, t, &mut rng, DEFAULT_RETRY_BUDGET).unwrap();
        let d = min_rank_distance(&ctx, &a, DEFAULT_ENUMERATION_CAP).unwrap();
        if d != t - ell + 1 {
            non_mrd += 1;
        }
    }
    let p = ell as f64 * 2f64.powi(ell as i32 * t as i32 - 9);
    let n = trials as f64;
    let sigma = (p * (1.0 - p) / n).sqrt();
    let frac = non_mrd as f64 / n;
    Outcome {
        ok: frac <= p + 3.0 * sigma,
        detail: format!(
            "{non_mrd}/{trials} non-MRD ({frac:.4}); limit {:.4}",
            p + 3.0 * sigma
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut sets: Vec<ParameterSet> = TABLE.iter().map(|r| r.p).collect();
    sets.push(desk());
    sets.push(ParameterSet::new(3, 12, 12, 3, 2, 2).unwrap());
    let mut bad = 0;
    for p in &sets {
        let top = (p.lambda * p.t_pub()).min(p.n);
        let total: BigRational = (0..=top)
            .map(|t| rank_weight_probability(t, p).unwrap())
            .sum();
        if total != BigRational::one() {
            bad += 1;
        }
    }
    Outcome {
        ok: bad == 0,
        detail: format!("{} of {} parameter sets sum exactly to 1", sets.len() - bad, sets.len()),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("1 table reproduction", Duration::from_secs(1), criterion_1),
        ("2 failure bounds", Duration::from_secs(10), criterion_2),
        ("3 rank multiplier", Duration::from_secs(60), criterion_3),
        ("4 decoder vs oracle", Duration::from_secs(300), criterion_4),
        ("5 end to end", Duration::from_secs(600), criterion_5),
        ("6 distinguisher", Duration::from_secs(300), criterion_6),
        ("7 MRD frequency", Duration::from_secs(600), criterion_7),
        ("8 rank distribution", Duration::from_secs(10), criterion_8),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let ok = out.ok && elapsed <= budget;
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] criterion {name}: {} ({:.2}s, budget {}s)",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}

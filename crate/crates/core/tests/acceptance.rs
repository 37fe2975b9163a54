//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
//! criterion fails unexpectedly.
//!
//! Criterion 3's `575 + 1/5` mutation cannot be detected by the integrality
//! test (`5 (575 + 1/5) = 2876` is an integer). It is listed in `KNOWN_FAILURES`,
//! printed as FAIL, and does not fail the run. If it ever starts passing,
//! the run fails so the list gets revisited.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use common::{catalogue, params, Fixture};
use cy3_core::battery::{run_battery, CaseResult};
use cy3_core::crystal::{check_t0_fixed_point, t0_product};
use cy3_core::cy3::{SynthMode, SynthParams};
use cy3_core::mirror::{prepotential_integrality, run_pipeline, FamilySpec, QUINTIC_B, QUINTIC_MIRROR_MAP};
use cy3_core::padic::residue_u64;
use cy3_core::par::Exec;
use cy3_core::{CoeffRing, PadicRing};

const KNOWN_FAILURES: &[&str] = &["3b"];

const SEEDS: u64 = 20;
const PRIMES_3: [u64; 6] = [2, 3, 5, 7, 11, 13];
const M_MAX_3: usize = 200;

struct Outcome {
    id: &'static str,
    pass: bool,
    summary: String,
}

fn outcome(id: &'static str, pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        id,
        pass,
        summary: summary.into(),
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn criteria_1_to_3(out: &mut Vec<Outcome>) {
    let start = Instant::now();
    let data = run_pipeline(&FamilySpec::quintic(10, Vec::new())).expect("quintic pipeline");
    let elapsed = start.elapsed();
    let q: Vec<BigRational> = (2..=5).map(|k| data.mirror.q_of_t.coeff1(k)).collect();
    let expected: Vec<BigRational> = QUINTIC_MIRROR_MAP.iter().map(|&c| int(c)).collect();
    out.push(outcome(
        "1",
        q == expected && elapsed < Duration::from_secs(10),
        format!(
            "quintic q(t) at t^2..t^5 = {} (exact), degree 10 in {:.3} s (limit 10 s)",
            q.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
            elapsed.as_secs_f64()
        ),
    ));

    let b: Vec<BigRational> = data.b[..5].to_vec();
    let expected: Vec<BigRational> = QUINTIC_B.iter().map(|&c| int(c)).collect();
    let y0 = data.yukawa.constant_term().clone();
    out.push(outcome(
        "2",
        b == expected && y0 == int(5),
        format!(
            "quintic b_1..b_5 = {} (exact), Y(0) = {y0}",
            b.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        ),
    ));

    let start = Instant::now();
    let data = run_pipeline(&FamilySpec::quintic(M_MAX_3 as u32, Vec::new())).expect("degree-200 pipeline");
    let pipeline_time = start.elapsed();
    let results: Vec<_> = PRIMES_3
        .iter()
        .map(|&p| prepotential_integrality(&data.b, p, M_MAX_3, 5))
        .collect();
    let failing: Vec<u64> = results.iter().filter(|r| !r.pass).map(|r| r.prime).collect();
    out.push(outcome(
        "3a",
        failing.is_empty() && results.iter().all(|r| r.checked_up_to == M_MAX_3),
        format!(
            "prepotential integrality for p in {PRIMES_3:?} up to m = {M_MAX_3} (pipeline {:.1} s), failing primes {failing:?}",
            pipeline_time.as_secs_f64()
        ),
    ));

    let mutate = |delta: BigRational| {
        let mut b = data.b.clone();
        b[0] += delta;
        prepotential_integrality(&b, 5, M_MAX_3, 5)
    };
    let fifth = mutate(BigRational::new(1.into(), 5.into()));
    out.push(outcome(
        "3b",
        !fifth.pass && fifth.first_failure == Some(1),
        format!(
            "b_1 -> 575 + 1/5 at p = 5: first failure {:?}, expected m = 1 (undetectable: 5 b_1 = 2876 is integral)",
            fifth.first_failure
        ),
    ));
    let twentyfifth = mutate(BigRational::new(1.into(), 25.into()));
    out.push(outcome(
        "3c",
        !twentyfifth.pass && twentyfifth.first_failure == Some(1),
        format!(
            "b_1 -> 575 + 1/25 at p = 5: first failure {:?}, deficit {}",
            twentyfifth.first_failure, twentyfifth.deficit
        ),
    ));
}

fn battery_cases() -> Vec<SynthParams> {
    let mut cases = Vec::new();
    for h in 0..=2 {
        for p in [5, 7] {
            for mode in [SynthMode::CanonicalChart, SynthMode::Generic] {
                cases.extend((0..SEEDS).map(|seed| params(seed, h, p, mode)));
            }
        }
    }
    cases
}

/// Instances on which any of `names` fails, or which could not be generated.
fn failing(results: &[CaseResult], names: &[&str], filter: impl Fn(&SynthParams) -> bool) -> Vec<String> {
    results
        .iter()
        .filter(|r| filter(&r.params))
        .filter_map(|r| {
            let tag = format!("h{} p{} seed{} {}", r.params.h, r.params.p, r.params.seed, r.params.mode.as_str());
            match &r.verdicts {
                Err(e) => Some(format!("{tag}: {e}")),
                Ok(set) => {
                    let bad: Vec<_> = names
                        .iter()
                        .filter(|n| !set.get(n).is_some_and(|v| v.pass))
                        .copied()
                        .collect();
                    (!bad.is_empty()).then(|| format!("{tag}: {bad:?}"))
                }
            }
        })
        .collect()
}

fn criteria_4_5_7_8(out: &mut Vec<Outcome>) {
    let cases = battery_cases();
    let start = Instant::now();
    let results = run_battery(&cases, Exec::current());
    let elapsed = start.elapsed();
    let n = results.len();

    let c4 = [
        "horizontality",
        "pairing",
        "riemann_relations",
        "gradient_relations",
        "tau_gradients",
        "yukawa",
        "matcanfrob",
        "yukinnerproduct",
        "yukinteger",
        "qprops",
        "newton_hodge",
    ];
    let bad = failing(&results, &c4, |_| true);
    out.push(outcome(
        "4",
        bad.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "{n} instances (h 0..2, p 5/7, {SEEDS} seeds x 2 charts, M = 8, D = 6) in {:.2} s (limit 60 s); failures {bad:?}",
            elapsed.as_secs_f64()
        ),
    ));

    let bad = failing(&results, &["change_of_lift"], |_| true);
    out.push(outcome(
        "5",
        bad.is_empty(),
        format!("Taylor transport phi -> t^p + p t equals the direct Frobenius matrix mod p^8 on {n} instances; failures {bad:?}"),
    ));

    let bad = failing(&results, &["flat_section"], |_| true);
    out.push(outcome(
        "7",
        bad.is_empty(),
        format!("flat Frobenius-fixed section on {n} instances, fixed by both lifts; failures {bad:?}"),
    ));

    let with_h = results.iter().filter(|r| r.params.h >= 1).count();
    let bad = failing(&results, &["omega_duality", "solution_column"], |p| p.h >= 1);
    out.push(outcome(
        "8",
        bad.is_empty(),
        format!("omega duality and solution column on {with_h} instances with h >= 1; failures {bad:?}"),
    ));

    let all = cy3_core::battery::CHECKS;
    let bad = failing(&results, all, |_| true);
    out.push(outcome(
        "4+",
        bad.is_empty(),
        format!("all {} battery verdicts on {n} instances; failures {bad:?}", all.len()),
    ));
}

/// Random upper unitriangular `L0` with zero diagonal blocks for nondecreasing
/// exponents `exps`.
fn random_l0(ring: &PadicRing, rng: &mut Xoshiro256PlusPlus, exps: &[u32], modulus: u64) -> Vec<Vec<cy3_core::Padic>> {
    let n = exps.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        ring.one()
                    } else if j > i && exps[i] != exps[j] {
                        ring.from_i64(rng.gen_range(0..modulus) as i64)
                    } else {
                        ring.zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn criterion_6(out: &mut Vec<Outcome>) {
    let (p, prec) = (5u64, 8u32);
    let ring = PadicRing::new(p, prec, 4).unwrap();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(6);
    let mut bad = Vec::new();
    let mut sizes = Vec::new();
    for k in 0..20 {
        let n = 1 + k % 8;
        let mut exps: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        exps.sort_unstable();
        let l0 = random_l0(&ring, &mut rng, &exps, p.pow(prec));
        let ok = t0_product(&ring, &l0, &exps)
            .map(|t0| check_t0_fixed_point(&ring, &t0, &l0, &exps, prec as i64).pass)
            .unwrap_or(false);
        if !ok {
            bad.push(k);
        }
        sizes.push(n);
    }
    let small = PadicRing::new(5, 3, 2).unwrap();
    let l0 = vec![vec![small.one(), small.one()], vec![small.zero(), small.one()]];
    let closed = t0_product(&small, &l0, &[0, 1])
        .ok()
        .and_then(|t0| residue_u64(&small, &t0[0][1], 3));
    out.push(outcome(
        "6",
        bad.is_empty() && closed == Some(30),
        format!(
            "T0 = P^-1 T0 L0 P mod 5^8 for 20 random L0 (sizes {}..{}), failures {bad:?}; 2x2 closed form T0[0][1] = {closed:?} mod 125 (expected 30)",
            sizes.iter().min().unwrap(),
            sizes.iter().max().unwrap()
        ),
    ));
}

fn criterion_9(out: &mut Vec<Outcome>) {
    let fixture = Fixture::new(params(7, 1, 5, SynthMode::Generic));
    let mutations = catalogue();
    let missed: Vec<String> = mutations
        .iter()
        .filter(|m| (m.run)(&fixture).pass)
        .map(|m| format!("{} ({})", m.verdict, m.what))
        .collect();
    let mut names: Vec<_> = mutations.iter().map(|m| m.verdict).collect();
    names.dedup();
    out.push(outcome(
        "9",
        missed.is_empty(),
        format!(
            "{} single-coefficient mutations across {} verdicts all detected; missed {missed:?}",
            mutations.len(),
            names.len()
        ),
    ));
}

fn main() {
    let start = Instant::now();
    let mut out = Vec::new();
    criteria_1_to_3(&mut out);
    criteria_4_5_7_8(&mut out);
    criterion_6(&mut out);
    criterion_9(&mut out);

    let mut unexpected = 0;
    for o in &out {
        let known = KNOWN_FAILURES.contains(&o.id);
        let status = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected)",
        };
        if o.pass == known {
            unexpected += 1;
        }
        println!("{status:<12} criterion {:<3} {}", o.id, o.summary);
    }
    println!("acceptance: {} lines, {unexpected} unexpected, {:.1} s", out.len(), start.elapsed().as_secs_f64());
    if unexpected > 0 {
        std::process::exit(1);
    }
}

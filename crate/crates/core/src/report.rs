//! Run configurations, the four driver commands and their JSON reports.
//!
//! A [`Report`] carries the verdicts of one run. The process exit code is
//! derived from it: 0 when every verdict passed, 1 otherwise. Errors map to
//! exit codes through [`exit_code_for`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::battery::{run_battery, verify_crystal};
use crate::cy3::{synth_cy3, CY3Crystal, SynthMode, SynthParams};
use crate::error::{Error, Result};
use crate::mirror::{
    apply_operator, prepotential_integrality, run_pipeline, FamilySpec, MirrorData, QUINTIC_B,
    QUINTIC_MIRROR_MAP,
};
use crate::padic::is_prime;
use crate::par::{self, Exec};
use crate::ring::CoeffRing;
use crate::verdict::{Location, Verdict, VerdictSet};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest `h` the generator accepts from the command line.
pub const MAX_H: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Quintic,
    FamilyRun,
    CrystalSynth,
    CrystalVerify,
    CrystalBattery,
}

/// Everything a run needs. Unused fields stay at their defaults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub h: Vec<usize>,
    #[serde(default)]
    pub p: Vec<u64>,
    pub prec: u32,
    pub degree: u32,
    #[serde(default)]
    pub primes: Vec<u64>,
    pub mode: String,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub verbosity: u8,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            inputs: Vec::new(),
            seeds: vec![0],
            h: vec![1],
            p: vec![5],
            prec: 8,
            degree: 6,
            primes: vec![2, 3, 5, 7],
            mode: SynthMode::Generic.as_str().into(),
            output: None,
            verbosity: 0,
        }
    }

    /// Rejects anything the math layers would choke on. Every error here is
    /// a configuration error.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Malformed(m));
        if let Some(p) = self.primes.iter().find(|&&p| !is_prime(p)) {
            return bad(format!("--primes: {p} is not prime"));
        }
        match self.command {
            Command::Quintic => {
                if self.degree == 0 {
                    return bad("--degree must be at least 1".into());
                }
                if self.inputs.len() > 1 {
                    return bad("at most one preset file".into());
                }
            }
            Command::FamilyRun | Command::CrystalVerify => {
                if self.inputs.len() != 1 {
                    return bad("exactly one input file is required".into());
                }
            }
            Command::CrystalSynth | Command::CrystalBattery => {
                if self.command == Command::CrystalSynth {
                    if self.output.is_none() {
                        return bad("synth needs --out".into());
                    }
                    if self.seeds.len() != 1 || self.h.len() != 1 || self.p.len() != 1 {
                        return bad("synth takes a single seed, h and p".into());
                    }
                }
                if self.seeds.is_empty() || self.h.is_empty() || self.p.is_empty() {
                    return bad("seed, h and p lists must be nonempty".into());
                }
                SynthMode::parse(&self.mode)?;
                if self.prec == 0 || self.degree == 0 {
                    return bad("--prec and --deg must be at least 1".into());
                }
                if let Some(h) = self.h.iter().find(|&&h| h > MAX_H) {
                    return bad(format!("--h {h} exceeds {MAX_H}"));
                }
                for &p in &self.p {
                    if p <= 3 || !is_prime(p) {
                        return bad(format!("--p {p} must be a prime above 3"));
                    }
                    if (p as u128).checked_pow(self.prec).is_none() {
                        return bad(format!("{p}^{} does not fit in 128 bits", self.prec));
                    }
                }
            }
        }
        Ok(())
    }

    fn synth_params(&self) -> Result<Vec<SynthParams>> {
        let mode = SynthMode::parse(&self.mode)?;
        let mut out = Vec::new();
        for &h in &self.h {
            for &p in &self.p {
                for &seed in &self.seeds {
                    out.push(SynthParams {
                        seed,
                        h,
                        p,
                        prec: self.prec,
                        degree: self.degree,
                        mode,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub config: RunConfig,
    pub verdicts: VerdictSet,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    /// Command-specific payload.
    pub data: Value,
}

impl Report {
    fn new(config: &RunConfig) -> Self {
        Self {
            config: config.clone(),
            verdicts: VerdictSet::default(),
            timings: BTreeMap::new(),
            data: Value::Null,
        }
    }

    pub fn pass(&self) -> bool {
        self.verdicts.all_pass()
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    /// Largest deficit per failing verdict.
    pub fn worst_deficits(&self) -> BTreeMap<String, i64> {
        self.verdicts
            .failures()
            .map(|v| (v.name.clone(), v.worst_valuation_deficit))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tool_version": TOOL_VERSION,
            "config": self.config,
            "pass": self.pass(),
            "verdicts": self.verdicts.to_json(),
            "worst_valuation_deficits": self.worst_deficits(),
            "timings": self.timings,
            "data": self.data,
        })
    }

    /// The report without the `timings` field, which is the only part that
    /// varies between identical runs.
    pub fn deterministic_json(&self) -> Value {
        let mut v = self.to_json();
        if let Value::Object(o) = &mut v {
            o.remove("timings");
        }
        v
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.insert(phase.into(), start.elapsed().as_secs_f64());
        out
    }
}

/// 2 for configuration and input errors, 1 for everything else.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::Malformed(_) | Error::Shape(_) => 2,
        _ => 1,
    }
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_output(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    std::fs::write(path, text + "\n").map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn rational_strings(xs: impl IntoIterator<Item = BigRational>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

fn is_quintic(spec: &FamilySpec) -> bool {
    let preset = FamilySpec::quintic(spec.degree, Vec::new());
    spec.pf_operator == preset.pf_operator
        && spec.kappa == preset.kappa
        && spec.normalization == preset.normalization
}

fn compare_fixture(name: &str, found: &[BigRational], expected: &[i64], first_index: u64) -> Verdict {
    for (i, (f, e)) in found.iter().zip(expected).enumerate() {
        if *f != BigRational::from_integer((*e).into()) {
            let loc = Location::component(name).with_index(first_index + i as u64);
            return Verdict::fail(name, 0, Some(loc)).with_detail(format!("found {f}, expected {e}"));
        }
    }
    Verdict::pass(name)
}

fn mirror_verdicts(spec: &FamilySpec, data: &MirrorData, out: &mut VerdictSet) {
    let r = crate::ring::RationalRing;
    let f0 = apply_operator(spec, &data.basis.f0, None);
    let f1 = apply_operator(spec, &data.basis.f0, Some(&data.basis.g1));
    let mut parts = Vec::new();
    for (what, s) in [("L f0", &f0), ("L f1", &f1)] {
        if let Some(k) = (0..=s.degree()).find(|&k| !r.is_zero(&s.coeff1(k))) {
            parts.push(Verdict::fail("annihilation", 0, Some(Location::component(what).with_exponent(vec![k]))));
        }
    }
    out.push(Verdict::all("annihilation", parts));

    if is_quintic(spec) {
        let q: Vec<BigRational> = (2..=spec.degree.min(5)).map(|k| data.mirror.q_of_t.coeff1(k)).collect();
        out.push(compare_fixture("quintic_mirror_map", &q, &QUINTIC_MIRROR_MAP, 2));
        out.push(compare_fixture("quintic_b", &data.b, &QUINTIC_B, 1));
    }

    let m_max = data.b.len();
    let results = par::map(Exec::current(), &spec.primes, |&p| {
        prepotential_integrality(&data.b, p, m_max, spec.normalization)
    });
    out.extend(results.iter().map(|r| r.verdict()));
}

fn mirror_payload(spec: &FamilySpec, data: &MirrorData, integrality: &VerdictSet) -> Value {
    let q = (2..=spec.degree).map(|k| data.mirror.q_of_t.coeff1(k));
    let mut ints = Map::new();
    for &p in &spec.primes {
        let v = integrality.get(&format!("integrality_p{p}"));
        let first = v.and_then(|v| v.location.as_ref()).and_then(|l| l.index);
        ints.insert(
            p.to_string(),
            json!({"pass": v.is_some_and(|v| v.pass), "first_failure": first}),
        );
    }
    json!({
        "family": spec.name,
        "mirror_map": rational_strings(q),
        "b": rational_strings(data.b.iter().cloned()),
        "integrality": ints,
    })
}

fn run_family(config: &RunConfig, spec: &FamilySpec) -> Result<Report> {
    let mut report = Report::new(config);
    let data = report.time("pipeline", || run_pipeline(spec))?;
    let mut verdicts = VerdictSet::default();
    report.time("verdicts", || mirror_verdicts(spec, &data, &mut verdicts));
    report.data = mirror_payload(spec, &data, &verdicts);
    report.verdicts = verdicts;
    Ok(report)
}

/// The built-in quintic (or a preset file), checked against the reference
/// mirror map and `b` values, plus integrality at the configured primes.
pub fn cmd_quintic(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let spec = match config.inputs.first() {
        None => FamilySpec::quintic(config.degree, config.primes.clone()),
        Some(path) => FamilySpec::from_json(&read_input(path)?)?,
    };
    run_family(config, &spec)
}

/// The mirror pipeline on a family read from JSON. Degree and primes come
/// from the file.
pub fn cmd_family(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let spec = FamilySpec::from_json(&read_input(&config.inputs[0])?)?;
    run_family(config, &spec)
}

/// Generates one instance and writes it to `config.output`.
pub fn cmd_crystal_synth(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let params = config.synth_params()?[0];
    let mut report = Report::new(config);
    let cy = report.time("synth", || synth_cy3(&params))?;
    let path = config.output.as_ref().expect("validated");
    write_output(path, &cy.to_json())?;
    report.data = json!({"written": path, "rank": cy.layout().rank(), "seed": params.seed});
    Ok(report)
}

/// Loads a serialized crystal and runs the full verdict battery.
pub fn cmd_crystal_verify(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let text = read_input(&config.inputs[0])?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let cy = CY3Crystal::from_json(&value)?;
    let mut report = Report::new(config);
    report.verdicts = report.time("verify", || verify_crystal(&cy));
    report.data = json!({
        "h": cy.h,
        "p": cy.ring().p(),
        "prec": cy.prec(),
        "degree": cy.degree(),
        "seed": cy.seed,
    });
    Ok(report)
}

/// Generates and verifies every `(h, p, seed)` combination. Each verdict
/// name is suffixed with its case so failures stay attributable.
pub fn cmd_crystal_battery(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let cases = config.synth_params()?;
    let mut report = Report::new(config);
    let results = report.time("battery", || run_battery(&cases, Exec::current()));
    let mut failing = Vec::new();
    for r in &results {
        let tag = format!("h{}_p{}_seed{}", r.params.h, r.params.p, r.params.seed);
        match &r.verdicts {
            Ok(set) => {
                for v in &set.verdicts {
                    let mut v = v.clone();
                    v.name = format!("{}/{tag}", v.name);
                    report.verdicts.push(v);
                }
            }
            Err(e) => report.verdicts.push(Verdict::error(format!("synth/{tag}"), e)),
        }
        if !r.pass() {
            failing.push(tag);
        }
    }
    report.data = json!({"cases": results.len(), "failing_cases": failing});
    Ok(report)
}

pub fn run(config: &RunConfig) -> Result<Report> {
    match config.command {
        Command::Quintic => cmd_quintic(config),
        Command::FamilyRun => cmd_family(config),
        Command::CrystalSynth => cmd_crystal_synth(config),
        Command::CrystalVerify => cmd_crystal_verify(config),
        Command::CrystalBattery => cmd_crystal_battery(config),
    }
}

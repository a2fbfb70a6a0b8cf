//! One function per command. Each returns the artifact bytes and an outcome;
//! [`run`] writes the artifact.

use std::path::Path;

use schottky_core::asymptotics::{limit_set_oracle, verify_decay_with};
use schottky_core::obstruction::{contradiction_harness_with, HarnessOptions};
use schottky_core::schottky::dynamics::orbit_cloud;
use schottky_core::schottky::{check_words, enumerate_reduced_words, sample_interior_points, verify_schottky_with};
use schottky_core::{linalg, nori_build, sampling, ProjMap, SchottkyData, Status, SubspaceConfig, Tolerances};

use crate::artifacts::{DecayInput, LimitSetReport, WordList};
use crate::config::{Command, RunConfig};
use crate::output::{read_json, to_csv, to_json, write_artifact, Cell};
use crate::{CliError, Outcome, RunStatus};

const VERIFY_SAMPLES: usize = 10_000;
const ORBIT_STARTS: usize = 10;
const WORD_POINTS: usize = 100;
const LIMIT_STARTS: usize = 20;
const LIMIT_RADIUS: f64 = 1e-4;
const HARNESS_SAMPLES: usize = 2000;

struct Produced {
    bytes: Vec<u8>,
    outcome: Outcome,
}

fn produced(bytes: Vec<u8>, status: RunStatus, summary: String) -> Produced {
    Produced { bytes, outcome: Outcome { status, summary } }
}

/// Executes the configured command and writes its artifact.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let tol = &config.tolerances;
    let seed = config.seed;
    let result = match &config.command {
        Command::BuildNori { n, g, alpha } => build_nori(*n, *g, *alpha)?,
        Command::Verify { input } => verify(input, config.samples.unwrap_or(VERIFY_SAMPLES), seed, tol)?,
        Command::Orbit { input, generator, m_max } => {
            orbit(input, *generator, *m_max, config.samples.unwrap_or(ORBIT_STARTS), seed, tol)?
        }
        Command::Words { input, max_len, check } => {
            words(input, *max_len, *check, config.samples.unwrap_or(WORD_POINTS), seed, tol)?
        }
        Command::LimitSet { input, generator, m_max } => {
            limit_set(input, *generator, *m_max, config.samples.unwrap_or(LIMIT_STARTS), seed, tol)?
        }
        Command::Decay { input, n, m_max } => decay(input.as_deref(), *n, *m_max, seed, tol)?,
        Command::Obstruct { input, depth } => {
            let opts = HarnessOptions {
                samples: config.samples.unwrap_or(HARNESS_SAMPLES),
                seed,
                depth: *depth,
                ..HarnessOptions::default()
            };
            obstruct(input, &opts, tol)?
        }
    };
    write_artifact(config.output_path.as_deref(), &result.bytes)?;
    Ok(Outcome { summary: format!("{}: {}", config.command.name(), result.outcome.summary), ..result.outcome })
}

fn build_nori(n: usize, g: usize, alpha: f64) -> Result<Produced, CliError> {
    let data = nori_build(n, g, alpha, &SubspaceConfig::CoordinateDefault)?;
    Ok(produced(
        to_json(&data)?,
        RunStatus::Complete,
        format!("Nori group on P^{n} with {g} generators, alpha = {alpha}"),
    ))
}

fn verify(input: &Path, samples: usize, seed: u64, tol: &Tolerances) -> Result<Produced, CliError> {
    let data: SchottkyData = read_json(input)?;
    let report = verify_schottky_with(&data, samples, seed, tol);
    let (status, summary) = match report.status {
        Status::Pass => (RunStatus::Pass, "all axioms PASS".to_string()),
        Status::Fail => {
            let check = report.first_failure().expect("a failing report has a failing check");
            (RunStatus::Fail, format!("FAIL: {} {} ({})", check.axiom, check.subject, check.detail))
        }
        Status::Unknown => (RunStatus::Fail, "UNKNOWN: some checks found neither certificate nor witness".to_string()),
    };
    Ok(produced(to_json(&report)?, status, summary))
}

fn orbit(input: &Path, j: usize, m_max: u64, starts: usize, seed: u64, tol: &Tolerances) -> Result<Produced, CliError> {
    let data: SchottkyData = read_json(input)?;
    data.check_generator(j)?;
    let points = sample_interior_points(&data, starts, seed, tol)?;
    let rows = orbit_cloud(&data, j, &points, m_max, tol)?;
    let mut header: Vec<String> = ["start", "m", "distance_to_limit"].map(String::from).to_vec();
    for i in 0..=data.n() {
        header.push(format!("x{i}_re"));
        header.push(format!("x{i}_im"));
    }
    let count = rows.len();
    let bytes = to_csv(
        &header,
        rows.into_iter().map(|r| {
            let mut row = vec![Cell::Int(r.start as i64), Cell::Int(r.m), Cell::Float(r.distance_to_limit)];
            row.extend(r.point.lift().iter().flat_map(|z| [Cell::Float(z.re), Cell::Float(z.im)]));
            row
        }),
    )?;
    Ok(produced(bytes, RunStatus::Complete, format!("{count} orbit points of generator {j}")))
}

fn words(
    input: &Path,
    max_len: usize,
    check: bool,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Produced, CliError> {
    let data: SchottkyData = read_json(input)?;
    let words: Vec<_> = enumerate_reduced_words(data.g(), max_len).collect();
    if !check {
        let count = words.len();
        let list = WordList { g: data.g(), max_len, count, words };
        return Ok(produced(to_json(&list)?, RunStatus::Complete, format!("{count} reduced words")));
    }
    let points = sample_interior_points(&data, samples, seed, tol)?;
    let report = check_words(&data, &words, &points, tol)?;
    let (status, summary) = if report.violation_count == 0 {
        (RunStatus::Pass, format!("{} words on {} points, no violations", report.words, report.points))
    } else {
        (RunStatus::Fail, format!("{} violations among {} words", report.violation_count, report.words))
    };
    Ok(produced(to_json(&report)?, status, summary))
}

/// Reads either a map or a group, taking generator `j` of a group.
fn read_map(input: &Path, j: usize) -> Result<ProjMap, CliError> {
    let value: serde_json::Value = read_json(input)?;
    let parse_error = |e: serde_json::Error| CliError::Parse { path: input.to_owned(), message: e.to_string() };
    if value.get("generators").is_some() {
        let data: SchottkyData = serde_json::from_value(value).map_err(parse_error)?;
        data.check_generator(j)?;
        Ok(data.generator(j, 1).clone())
    } else {
        serde_json::from_value(value).map_err(parse_error)
    }
}

fn limit_set(
    input: &Path,
    j: usize,
    m_max: u64,
    starts: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Produced, CliError> {
    let map = read_map(input, j)?;
    let decomposition = map.modulus_decomposition_with(tol)?;
    let limit_set = map.limit_set_with(tol)?;
    let oracle = limit_set_oracle(&map, starts, m_max, seed, tol)?;
    let passed = oracle.passed(LIMIT_RADIUS);
    let summary = format!(
        "{} modulus classes, cluster distance {:.3e}, {}",
        limit_set.len(),
        oracle.max_distance,
        if passed { "PASS" } else { "FAIL" }
    );
    let report = LimitSetReport { map, decomposition, limit_set, oracle, radius: LIMIT_RADIUS };
    Ok(produced(to_json(&report)?, if passed { RunStatus::Pass } else { RunStatus::Fail }, summary))
}

fn decay(input: Option<&Path>, n: usize, m_max: u64, seed: u64, tol: &Tolerances) -> Result<Produced, CliError> {
    let instance = match input {
        Some(path) => read_json(path)?,
        None => DecayInput {
            t: linalg::jordan_block(linalg::c(0.5, 0.0), n + 1),
            lambda: linalg::ONE,
            power: n as u64,
            vector: None,
        },
    };
    let v = match instance.vector {
        Some(v) => v,
        None => sampling::sphere_point(&mut sampling::seeded_rng(seed), instance.t.nrows()),
    };
    let table = verify_decay_with(&instance.t, instance.lambda, instance.power, &v, m_max, tol)?;
    let header = ["m", "norm", "distance_to_span"].map(String::from);
    let bytes = to_csv(
        &header,
        table.rows.iter().map(|r| vec![Cell::Int(r.m as i64), Cell::Float(r.norm), Cell::Float(r.distance_to_span)]),
    )?;
    let (status, summary) = match table.first_below {
        Some(m) => (RunStatus::Pass, format!("below {:e} from m = {m}", tol.decay)),
        None => (RunStatus::Fail, format!("final norm {:.3e} never fell below {:e}", table.final_norm(), tol.decay)),
    };
    Ok(produced(bytes, status, summary))
}

fn obstruct(input: &Path, opts: &HarnessOptions, tol: &Tolerances) -> Result<Produced, CliError> {
    let data: SchottkyData = read_json(input)?;
    let report = contradiction_harness_with(&data, opts, tol);
    let status = if report.has_witness() { RunStatus::Fail } else { RunStatus::Complete };
    let summary = report.summary.clone();
    Ok(produced(to_json(&report)?, status, summary))
}

mod common;

use common::{path_str, round_trips, schottky, write_json};
use schottky_cli::artifacts::{LimitSetReport, WordList};
use schottky_core::obstruction::{diagonal_candidate, seeded_candidate, ObstructionReport};
use schottky_core::schottky::WordCheckReport;
use schottky_core::{ProjMap, SchottkyData, Status, VerificationReport};

fn build_group(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("group.json");
    let run = schottky(&["build-nori", "--n", "3", "--g", "2", "--alpha", "0.2", "-o", path_str(&path)], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    path
}

#[test]
fn build_nori_is_byte_identical_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = std::fs::read(build_group(dir.path())).unwrap();
    let stdout = schottky(&["build-nori", "--n", "3", "--g", "2", "--alpha", "0.2"], &[]);
    assert_eq!(stdout.code, 0);
    assert_eq!(stdout.stdout, first);
    let data: SchottkyData = round_trips(&first).unwrap();
    assert_eq!((data.n(), data.g()), (3, 2));
}

#[test]
fn verify_passes_on_the_default_group() {
    let dir = tempfile::tempdir().unwrap();
    let group = build_group(dir.path());
    let out = dir.path().join("report.json");
    let run = schottky(&["verify", path_str(&group), "--samples", "10000", "--seed", "7", "-o", path_str(&out)], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report: VerificationReport = round_trips(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report.status, Status::Pass);
}

#[test]
fn thread_count_does_not_change_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let group = build_group(dir.path());
    let args = ["words", path_str(&group), "--maxlen", "3", "--check", "--seed", "5"];
    let one = schottky(&args, &[("SCHOTTKY_THREADS", "1")]);
    let four = schottky(&args, &[("SCHOTTKY_THREADS", "4")]);
    assert_eq!((one.code, four.code), (0, 0), "{}", one.stderr);
    assert_eq!(one.stdout, four.stdout);
    let report: WordCheckReport = round_trips(&one.stdout).unwrap();
    assert_eq!(report.violation_count, 0);
}

#[test]
fn obstruct_reports_witnesses_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for (name, data) in [("diag.json", diagonal_candidate().unwrap()), ("seeded.json", seeded_candidate(2, 3).unwrap())]
    {
        let input = write_json(dir.path(), name, &data);
        let run = schottky(&["obstruct", path_str(&input)], &[]);
        assert_eq!(run.code, 1, "{name}: {}", run.stderr);
        let report: ObstructionReport = round_trips(&run.stdout).unwrap();
        assert!(report.has_witness(), "{name}: {}", report.summary);
    }
    let run = schottky(&["obstruct", path_str(&build_group(dir.path()))], &[]);
    assert_eq!(run.code, 0);
    let report: ObstructionReport = round_trips(&run.stdout).unwrap();
    assert_eq!(report.summary, "not applicable: odd dimension");
}

#[test]
fn limit_set_accepts_maps_and_groups() {
    let dir = tempfile::tempdir().unwrap();
    let map = write_json(dir.path(), "map.json", &ProjMap::real_diagonal(&[3.0, 2.0, 1.0, 1.0]).unwrap());
    let run = schottky(&["limit-set", path_str(&map), "--mmax", "300"], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report: LimitSetReport = round_trips(&run.stdout).unwrap();
    assert_eq!(report.limit_set.len(), 3);
    let group = build_group(dir.path());
    let run = schottky(&["limit-set", path_str(&group), "--gen", "2"], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    round_trips::<LimitSetReport>(&run.stdout).unwrap();
}

#[test]
fn word_lists_and_csv_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let group = build_group(dir.path());
    let run = schottky(&["words", path_str(&group), "--maxlen", "4"], &[]);
    assert_eq!(run.code, 0);
    let list: WordList = round_trips(&run.stdout).unwrap();
    assert_eq!(list.count, 161);

    let orbit = schottky(&["orbit", path_str(&group), "--mmax", "20", "--samples", "3"], &[]);
    assert_eq!(orbit.code, 0, "{}", orbit.stderr);
    let text = String::from_utf8(orbit.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "start,m,distance_to_limit,x0_re,x0_im,x1_re,x1_im,x2_re,x2_im,x3_re,x3_im");
    assert!(lines.all(|l| l.split(',').count() == 11));

    let decay = schottky(&["decay", "--n", "2", "--mmax", "200"], &[]);
    assert_eq!(decay.code, 0, "{}", decay.stderr);
    let text = String::from_utf8(decay.stdout).unwrap();
    assert!(text.starts_with("m,norm,distance_to_span\n"));
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn decay_reads_an_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("decay.json");
    std::fs::write(
        &input,
        r#"{"t": [[[0.5, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]], "lambda": [1.0, 0.0], "power": 1, "vector": [[0.0, 0.0], [1.0, 0.0]]}"#,
    )
    .unwrap();
    let run = schottky(&["decay", path_str(&input), "--mmax", "100"], &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let short = schottky(&["decay", path_str(&input), "--mmax", "5"], &[]);
    assert_eq!(short.code, 1);
}

#[test]
fn input_and_configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let group = build_group(dir.path());
    let missing = dir.path().join("missing.json");
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    type Case<'a> = (Vec<&'a str>, Vec<(&'a str, &'a str)>);
    let cases: Vec<Case> = vec![
        (vec!["verify", path_str(&missing)], vec![]),
        (vec!["verify", path_str(&garbage)], vec![]),
        (vec!["verify", path_str(&group), "--tol.nonsense=1"], vec![]),
        (vec!["verify", path_str(&group)], vec![("SCHOTTKY_THREADS", "0")]),
        (vec!["build-nori", "--n", "2"], vec![]),
        (vec!["orbit", path_str(&group), "--gen", "5"], vec![]),
        (vec!["no-such-command"], vec![]),
    ];
    for (args, env) in cases {
        let run = schottky(&args, &env);
        assert_eq!(run.code, 2, "{args:?}: {}", run.stderr);
        assert!(run.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn failed_writes_leave_no_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("absent").join("group.json");
    let run = schottky(&["build-nori", "-o", path_str(&target)], &[]);
    assert_eq!(run.code, 2);
    assert!(!target.exists());

    let out = dir.path().join("group.json");
    std::fs::write(&out, "old").unwrap();
    let run = schottky(&["build-nori", "-o", path_str(&out)], &[]);
    assert_eq!(run.code, 0);
    assert_ne!(std::fs::read(&out).unwrap(), b"old");
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("group.json")]);
}

#[test]
fn config_files_set_seed_and_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let group = build_group(dir.path());
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "seed = 5\nsamples = 500\n\n[tolerances]\nboundary = 1e-9\n").unwrap();
    let from_file = schottky(&["--config", path_str(&config), "verify", path_str(&group)], &[]);
    let from_flags =
        schottky(&["verify", path_str(&group), "--seed", "5", "--samples", "500", "--tol.boundary=1e-9"], &[]);
    assert_eq!((from_file.code, from_flags.code), (0, 0), "{}", from_file.stderr);
    assert_eq!(from_file.stdout, from_flags.stdout);

    std::fs::write(&config, "seed = 5\nbogus = 1\n").unwrap();
    assert_eq!(schottky(&["--config", path_str(&config), "verify", path_str(&group)], &[]).code, 2);
}

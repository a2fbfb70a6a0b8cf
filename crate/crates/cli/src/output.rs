//! Rendering and atomic writing of artifacts.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::CliError;

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same value.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_owned(), message: e.to_string() })
}

/// A CSV cell: integers as written, floats in their shortest round-trip
/// form with an exponent for very large or small magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:?}"),
        }
    }
}

/// CSV from a header and rows of cells.
pub fn to_csv(header: &[String], rows: impl IntoIterator<Item = Vec<Cell>>) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Config(format!("CSV encoding failed: {e}"));
    writer.write_record(header).map_err(fail)?;
    for row in rows {
        writer.write_record(row.into_iter().map(Cell::render)).map_err(fail)?;
    }
    writer.into_inner().map_err(|e| CliError::Config(format!("CSV encoding failed: {e}")))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial artifact. Without a path the
/// bytes go to standard output.
pub fn write_artifact(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(bytes)
            .and_then(|()| stdout.flush())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source });
    };
    let io = |source| CliError::Io { path: path.to_owned(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.json");
        write_artifact(Some(&path), b"first\n").unwrap();
        write_artifact(Some(&path), b"second\n").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = write_artifact(Some(&dir.path().join("no/such/x.csv")), b"x").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn csv_round_trips_floats() {
        let values = vec![0.1 + 0.2, 1e-300, -7.0, std::f64::consts::PI, 2.5e17];
        let header: Vec<String> = ["n", "a", "b", "c", "d", "e"].map(String::from).to_vec();
        let mut row = vec![Cell::Int(-3)];
        row.extend(values.iter().map(|&x| Cell::Float(x)));
        let bytes = to_csv(&header, [row]).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.ends_with("-3,0.30000000000000004,1e-300,-7.0,3.141592653589793,2.5e17\n"), "{text}");
        let mut reader = csv::Reader::from_reader(bytes.as_slice());
        let record = reader.records().next().unwrap().unwrap();
        let parsed: Vec<f64> = record.iter().skip(1).map(|s| s.parse().unwrap()).collect();
        assert_eq!(parsed, values);
    }
}

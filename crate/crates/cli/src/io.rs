//! Reading operators, subspaces, structures and vectors from JSON or CSV.

use std::fs;
use std::path::Path;

use grassdyn::jordan::JordanStructure;
use grassdyn::matrix::{BlockSpec, Matrix};
use grassdyn::subspace::Subspace;
use serde::de::DeserializeOwned;

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn first_char(text: &str) -> Option<char> {
    text.chars().find(|c| !c.is_whitespace())
}

fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Rows of numbers from CSV text. `#` starts a comment line.
fn parse_csv(path: &Path, text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Input(format!("{}: line {line}: {e}", path.display()))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|_| {
                    CliError::Input(format!(
                        "{}: line {line}, column {}: '{field}' is not a number",
                        path.display(),
                        col + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Square operator from a JSON array of rows or a CSV file.
pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let text = read(path)?;
    let m = if first_char(&text) == Some('[') {
        parse_json::<Matrix>(path, &text)?
    } else {
        Matrix::from_rows(&parse_csv(path, &text)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    };
    if !m.is_square() {
        return Err(CliError::Input(format!(
            "{}: shape mismatch: expected a square operator, got {}x{}",
            path.display(),
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m)
}

/// List of vectors: a JSON array of arrays, or CSV with one vector per line.
pub fn read_vectors(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = read(path)?;
    if first_char(&text) == Some('[') {
        parse_json(path, &text)
    } else {
        parse_csv(path, &text)
    }
}

/// Subspace spanned by the vectors in the file.
pub fn read_subspace(path: &Path) -> Result<Subspace, CliError> {
    let vectors = read_vectors(path)?;
    Subspace::span(&vectors).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A full structure object, or a bare array of blocks.
pub fn read_structure(path: &Path) -> Result<JordanStructure, CliError> {
    let text = read(path)?;
    if first_char(&text) == Some('[') {
        let blocks: Vec<BlockSpec> = parse_json(path, &text)?;
        JordanStructure::new(blocks).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    } else {
        parse_json(path, &text)
    }
}

/// A JSON array of subspaces, each given by its spanning vectors.
pub fn read_subspaces(path: &Path) -> Result<Vec<Subspace>, CliError> {
    let text = read(path)?;
    let lists: Vec<Vec<Vec<f64>>> = parse_json(path, &text)?;
    lists
        .iter()
        .enumerate()
        .map(|(i, v)| {
            Subspace::span(v).map_err(|e| CliError::Input(format!("{}: subspace {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

/// `1,2.5,-3` as numbers.
pub fn parse_list(what: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("{what}: '{}' is not a number", t.trim())))
        })
        .collect()
}

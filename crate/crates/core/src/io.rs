//! File loaders for groups and catalogs.
//!
//! Permutation files are JSON `{"degree": d, "generators": [[g(1), .., g(d)], ..]}`
//! with 1-based images. Cayley tables are headerless CSV of 0-based indices,
//! row `i` column `j` holding `i*j`. Catalog files are JSON lists of
//! [`CatalogEntry`] values; relative `file` paths resolve against the
//! catalog's directory.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;

use crate::catalog::{CatalogEntry, Constructor};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Perm};
use crate::symmetric::{Monotonicity, WeightFunction};

#[derive(Deserialize)]
struct PermutationFile {
    degree: usize,
    generators: Vec<Vec<usize>>,
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn json_error(path: &Path, err: serde_json::Error) -> Error {
    parse_error(path, err.line(), err.to_string())
}

/// Loads a `.json` permutation file or a `.csv` Cayley table.
pub fn load_group_file(path: &Path, cap: usize) -> Result<FiniteGroup> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "file".into());
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => load_cayley_csv(path, &name),
        _ => load_permutation_json(path, &name, cap),
    }
}

pub fn load_permutation_json(path: &Path, name: &str, cap: usize) -> Result<FiniteGroup> {
    let text = fs::read_to_string(path)?;
    let file: PermutationFile = serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
    let gens = file
        .generators
        .iter()
        .enumerate()
        .map(|(i, images)| {
            if images.len() != file.degree {
                return Err(parse_error(
                    path,
                    line_of_generator(&text, i),
                    format!(
                        "generator {} has {} images, degree is {}",
                        i + 1,
                        images.len(),
                        file.degree
                    ),
                ));
            }
            Perm::from_images_one_based(images)
                .map_err(|e| parse_error(path, line_of_generator(&text, i), e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteGroup::from_permutations(name, file.degree, &gens, cap)
}

/// Best-effort line of the `i`-th inner list under `"generators"`.
fn line_of_generator(text: &str, i: usize) -> usize {
    let Some(start) = text.find("\"generators\"") else {
        return 1;
    };
    let mut depth = 0;
    let mut seen = 0;
    for (offset, ch) in text[start..].char_indices() {
        match ch {
            '[' => {
                depth += 1;
                if depth == 2 {
                    if seen == i {
                        return text[..start + offset].matches('\n').count() + 1;
                    }
                    seen += 1;
                }
            }
            ']' => depth -= 1,
            _ => {}
        }
    }
    1
}

pub fn load_cayley_csv(path: &Path, name: &str) -> Result<FiniteGroup> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_error(path, 1, e.to_string()))?;
    let mut table = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(i + 1, |p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<usize>()
                    .map_err(|_| parse_error(path, i + 1, format!("not an index: {cell:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    FiniteGroup::from_cayley_table(name, &table).map_err(|e| match e {
        Error::MalformedTable(msg) => parse_error(path, 1, msg),
        other => other,
    })
}

pub fn write_cayley_csv(group: &FiniteGroup, path: &Path) -> Result<()> {
    let mut out = fs::File::create(path)?;
    for a in group.elements() {
        let row: Vec<String> = group
            .elements()
            .map(|b| group.mul(a, b).to_string())
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Weight table rows `order,numerator,denominator`; a non-numeric first row
/// is taken as a header.
pub fn load_weight_csv(path: &Path, monotonicity: Monotonicity) -> Result<WeightFunction> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_error(path, 1, e.to_string()))?;
    let mut table = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| {
            let line = e.position().map_or(line, |p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        if i == 0 && record.get(0).is_some_and(|c| c.parse::<u64>().is_err()) {
            continue;
        }
        if record.len() != 3 {
            return Err(parse_error(
                path,
                line,
                format!("expected order,numerator,denominator, got {} fields", record.len()),
            ));
        }
        let order: u64 = record[0]
            .parse()
            .map_err(|_| parse_error(path, line, format!("not an order: {:?}", &record[0])))?;
        let num: BigInt = record[1]
            .parse()
            .map_err(|_| parse_error(path, line, format!("not an integer: {:?}", &record[1])))?;
        let den: BigInt = record[2]
            .parse()
            .map_err(|_| parse_error(path, line, format!("not an integer: {:?}", &record[2])))?;
        if order == 0 || den.is_zero() {
            return Err(parse_error(path, line, "order and denominator must be nonzero"));
        }
        if table.insert(order, BigRational::new(num, den)).is_some() {
            return Err(parse_error(path, line, format!("order {order} listed twice")));
        }
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "weights".into());
    WeightFunction::new(name, table, monotonicity)
}

pub fn load_catalog_file(path: &Path) -> Result<Vec<CatalogEntry>> {
    let text = fs::read_to_string(path)?;
    let mut entries: Vec<CatalogEntry> =
        serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    for entry in &mut entries {
        resolve_paths(&mut entry.constructor, &base);
    }
    Ok(entries)
}

fn resolve_paths(c: &mut Constructor, base: &Path) {
    match c {
        Constructor::File { path } if path.is_relative() => {
            *path = base.join(&*path);
        }
        Constructor::DirectProduct { left, right } => {
            resolve_paths(left, base);
            resolve_paths(right, base);
        }
        _ => {}
    }
}

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

pub enum Col {
    Num(Vec<f64>),
    Text(Vec<String>),
}

/// Write a CSV with the given columns; all must be equally long.
pub fn write_csv(path: &Path, cols: &[(&str, Col)]) -> PathBuf {
    let rows = match &cols[0].1 {
        Col::Num(v) => v.len(),
        Col::Text(v) => v.len(),
    };
    let mut s = cols.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(",");
    s.push('\n');
    for i in 0..rows {
        let cells: Vec<String> = cols
            .iter()
            .map(|(_, c)| match c {
                Col::Num(v) if v[i].is_nan() => String::new(),
                Col::Num(v) => v[i].to_string(),
                Col::Text(v) => v[i].clone(),
            })
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    fs::write(path, s).unwrap();
    path.to_path_buf()
}

pub fn write_attributes(path: &Path, names: &[&str]) -> PathBuf {
    fs::write(path, names.join("\n") + "\n").unwrap();
    path.to_path_buf()
}

pub fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Record lines of one result file.
pub fn records(out: &Path, algorithm: &str) -> Vec<String> {
    read(&out.join(format!("{algorithm}_results.txt"))).lines().map(String::from).collect()
}

/// Value of `key` in a record line (unquoted values only).
pub fn field<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.split(' ').find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
}

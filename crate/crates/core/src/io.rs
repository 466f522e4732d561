//! Text format for piezoelectric-type tensors.
//!
//! ```text
//! piezo-tensor v1 dim=3
//! 1 2 3 -3.68180667
//! 2 1 3 -3.68180667
//! ```
//!
//! One line per nonzero entry, 1-based `i j k value`. A line sets both
//! `a_ijk` and `a_ikj`. Blank lines and `#` comments are ignored. When the
//! same unordered slot appears more than once, strict mode requires the
//! values to agree within `1e-12` and symmetrize mode averages them.

use std::path::Path;

use crate::error::{PiezoError, Result};
use crate::format::format_sig;
use crate::tensor::{PiezoTensor, SymmetryMode, SYMMETRY_TOL};

pub const HEADER_PREFIX: &str = "piezo-tensor v1 dim=";
/// Significant digits emitted by [`write_tensor`].
pub const WRITE_DIGITS: usize = 9;

fn parse_err(line: usize, message: impl Into<String>) -> PiezoError {
    PiezoError::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_tensor(text: &str, mode: SymmetryMode) -> Result<PiezoTensor> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty tensor file"))?;
    let dim: usize = header
        .strip_prefix(HEADER_PREFIX)
        .ok_or_else(|| parse_err(hline, format!("expected header '{HEADER_PREFIX}<n>'")))?
        .trim()
        .parse()
        .map_err(|_| parse_err(hline, "dimension is not a positive integer"))?;
    if dim == 0 {
        return Err(parse_err(hline, "dimension must be at least 1"));
    }

    // (sum, count, first line) per unordered slot
    let mut slots: std::collections::BTreeMap<(usize, usize, usize), (f64, usize, usize)> = Default::default();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(
                lineno,
                format!("expected 'i j k value', found {} fields", fields.len()),
            ));
        }
        let mut idx = [0usize; 3];
        for (slot, f) in idx.iter_mut().zip(&fields[..3]) {
            let v: usize = f
                .parse()
                .map_err(|_| parse_err(lineno, format!("index '{f}' is not a positive integer")))?;
            if v == 0 || v > dim {
                return Err(parse_err(lineno, format!("index {v} outside 1..={dim}")));
            }
            *slot = v - 1;
        }
        let value: f64 = fields[3]
            .parse()
            .map_err(|_| parse_err(lineno, format!("value '{}' is not a number", fields[3])))?;
        if !value.is_finite() {
            return Err(parse_err(lineno, "value is not finite"));
        }
        let [i, j, k] = idx;
        let key = (i, j.min(k), j.max(k));
        match slots.get_mut(&key) {
            None => {
                slots.insert(key, (value, 1, lineno));
            }
            Some((sum, count, first)) => {
                let prev = *sum / *count as f64;
                if mode == SymmetryMode::Strict && (prev - value).abs() > SYMMETRY_TOL {
                    return Err(parse_err(
                        lineno,
                        format!(
                            "a_{}{}{} = {value} conflicts with {prev} on line {first}",
                            key.0 + 1,
                            key.1 + 1,
                            key.2 + 1
                        ),
                    ));
                }
                *sum += value;
                *count += 1;
            }
        }
    }
    let entries: Vec<_> = slots
        .into_iter()
        .map(|(key, (sum, count, _))| (key, sum / count as f64))
        .collect();
    PiezoTensor::from_entries(dim, &entries)
}

/// Canonical form: `j ≤ k` only, lexicographic order, nonzero entries.
pub fn write_tensor(a: &PiezoTensor) -> String {
    let n = a.dim();
    let mut out = format!("{HEADER_PREFIX}{n}\n");
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let v = a.get(i, j, k);
                if v != 0.0 {
                    out.push_str(&format!(
                        "{} {} {} {}\n",
                        i + 1,
                        j + 1,
                        k + 1,
                        format_sig(v, WRITE_DIGITS)
                    ));
                }
            }
        }
    }
    out
}

pub fn load_tensor(path: &Path, mode: SymmetryMode) -> Result<PiezoTensor> {
    let text = std::fs::read_to_string(path).map_err(|e| PiezoError::Io(format!("{}: {e}", path.display())))?;
    read_tensor(&text, mode)
}

pub fn save_tensor(path: &Path, a: &PiezoTensor) -> Result<()> {
    std::fs::write(path, write_tensor(a)).map_err(|e| PiezoError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_either_index_order() {
        let a = read_tensor("piezo-tensor v1 dim=2\n1 2 1 0.5\n", SymmetryMode::Strict).unwrap();
        assert_eq!(a.get(0, 0, 1), 0.5);
        assert_eq!(a.get(0, 1, 0), 0.5);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header comment\n\npiezo-tensor v1 dim=2\n  1 1 1 2.0  # trailing\n\n2 2 2 -1\n";
        let a = read_tensor(text, SymmetryMode::Strict).unwrap();
        assert_eq!(a.get(0, 0, 0), 2.0);
        assert_eq!(a.get(1, 1, 1), -1.0);
    }

    #[test]
    fn strict_conflict_reports_line() {
        let text = "piezo-tensor v1 dim=2\n1 1 2 0.7\n1 2 1 0.9\n";
        match read_tensor(text, SymmetryMode::Strict) {
            Err(PiezoError::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("line 2"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let a = read_tensor(text, SymmetryMode::Symmetrize).unwrap();
        assert!((a.get(0, 0, 1) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn malformed_lines() {
        let cases = [
            ("", 1),
            ("tensor dim=3\n", 1),
            ("piezo-tensor v1 dim=x\n", 1),
            ("piezo-tensor v1 dim=2\n1 2 0.5\n", 2),
            ("piezo-tensor v1 dim=2\n1 2 3 0.5\n", 2),
            ("piezo-tensor v1 dim=2\n\n1 1 1 abc\n", 3),
            ("piezo-tensor v1 dim=2\n0 1 1 1\n", 2),
        ];
        for (text, expected) in cases {
            match read_tensor(text, SymmetryMode::Strict) {
                Err(PiezoError::Parse { line, .. }) => assert_eq!(line, expected, "{text:?}"),
                other => panic!("{text:?}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn writer_is_canonical() {
        let a = read_tensor(
            "piezo-tensor v1 dim=3\n3 2 1 -3.68180667\n1 3 2 -3.68180667\n2 3 1 -3.68180667\n",
            SymmetryMode::Strict,
        )
        .unwrap();
        assert_eq!(
            write_tensor(&a),
            "piezo-tensor v1 dim=3\n1 2 3 -3.68180667\n2 1 3 -3.68180667\n3 1 2 -3.68180667\n"
        );
    }

    proptest! {
        #[test]
        fn write_read_round_trip(n in 1usize..=4, seed in prop::collection::vec(-100.0f64..100.0, 60)) {
            let mut entries = Vec::new();
            let mut it = seed.iter();
            for i in 0..n { for j in 0..n { for k in j..n {
                let v = *it.next().unwrap();
                // sparsify and keep values exactly representable at 9 digits
                if v.abs() > 30.0 { entries.push(((i, j, k), (v * 1e4).round() / 1e4)); }
            }}}
            let a = PiezoTensor::from_entries(n, &entries).unwrap();
            let b = read_tensor(&write_tensor(&a), SymmetryMode::Strict).unwrap();
            prop_assert!(a.max_abs_diff(&b).unwrap() <= 1e-12);
        }
    }
}

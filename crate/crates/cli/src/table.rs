//! CSV output with shortest round-trip numbers.

use std::io::{self, Write};

/// Shortest decimal that reads back to the same `f64`; `NaN`, `inf` and
/// `-inf` otherwise.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        let mut buf = ryu::Buffer::new();
        let s = buf.format_finite(v);
        s.strip_suffix(".0").unwrap_or(s).to_string()
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_row<W: Write>(out: &mut W, cells: &[String]) -> io::Result<()> {
    writeln!(out, "{}", cells.join(","))
}

pub fn write_numbers<W: Write>(out: &mut W, values: &[f64]) -> io::Result<()> {
    write_row(out, &values.iter().map(|&v| format_number(v)).collect::<Vec<_>>())
}

/// Reads points, one per line, comma- or whitespace-separated. A first line
/// that does not parse as numbers is taken as a header; blank lines and
/// lines starting with `#` are skipped.
pub fn parse_points(text: &str, dim: usize) -> Result<Vec<Vec<f64>>, String> {
    let mut points = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|c| !c.is_empty()).collect();
        let parsed: Result<Vec<f64>, _> = cells.iter().map(|c| c.parse::<f64>()).collect();
        match parsed {
            Ok(p) if p.len() == dim => points.push(p),
            Ok(p) => return Err(format!("line {}: {} values, expected {dim}", k + 1, p.len())),
            Err(_) if points.is_empty() && k == 0 => continue,
            Err(e) => return Err(format!("line {}: {e}", k + 1)),
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1344.0, 7.389_056_098_930_65e-17] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_number(448.0), "448");
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(f64::NAN), "NaN");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn points_with_header_and_comments() {
        let p = parse_points("t\n# comment\n1\n\n2.5\n", 1).unwrap();
        assert_eq!(p, vec![vec![1.0], vec![2.5]]);
        assert_eq!(parse_points("1, 2\n3 4", 2).unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(parse_points("1,2,3", 2).is_err());
        assert!(parse_points("1\nx", 1).is_err());
    }
}

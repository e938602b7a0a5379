use num_bigint::BigInt;
use serde_json::{json, Value};
use typmod::numeric::decimal;
use typmod::{CnfSystem, Lit, Model, Ratio};

/// Rows of cells rendered as an aligned table or as CSV.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_table(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                s.push_str(&format!("{c:w$}"));
            }
            s.trim_end().to_string() + "\n"
        };
        let mut out = line(&self.headers);
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = csv_line(&self.headers);
        for r in &self.rows {
            out.push_str(&csv_line(r));
        }
        out
    }
}

fn csv_line(cells: &[String]) -> String {
    let quoted: Vec<String> = cells
        .iter()
        .map(|c| if c.contains([',', '"', '\n']) { format!("\"{}\"", c.replace('"', "\"\"")) } else { c.clone() })
        .collect();
    quoted.join(",") + "\n"
}

/// `key  value` lines with aligned values.
pub fn key_values(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:width$}  {v}").trim_end().to_string() + "\n").collect()
}

pub fn dec(r: &Ratio) -> String {
    decimal(r, 6)
}

pub fn frac_dec(r: &Ratio) -> String {
    format!("{} ({})", r, dec(r))
}

pub fn ratio_json(r: &Ratio) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string(), "decimal": typmod::numeric::ratio_to_float::<f64>(r) })
}

pub fn lits_label(system: &CnfSystem, lits: &[Lit]) -> String {
    lits.iter().map(|&l| system.lit_label(l)).collect::<Vec<_>>().join(" ")
}

pub fn model_label(system: &CnfSystem, m: &Model) -> String {
    lits_label(system, &m.lits())
}

pub fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

/// Parses `2/3`, `-1/21` or a plain decimal such as `0.25` exactly.
pub fn parse_ratio(text: &str) -> Option<Ratio> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits == "-" || digits.is_empty() { return None } else { digits.parse().ok()? };
    Some(Ratio::new(n, BigInt::from(10).pow(frac.len() as u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use typmod::numeric::ratio_from_ints;

    #[test]
    fn ratios() {
        assert_eq!(parse_ratio("1/2"), Some(ratio_from_ints(1, 2)));
        assert_eq!(parse_ratio("0.25"), Some(ratio_from_ints(1, 4)));
        assert_eq!(parse_ratio("3"), Some(ratio_from_ints(3, 1)));
        assert_eq!(parse_ratio(".5"), Some(ratio_from_ints(1, 2)));
        assert_eq!(parse_ratio("1/0"), None);
        assert_eq!(parse_ratio("x"), None);
    }

    #[test]
    fn table_alignment() {
        let mut t = Table::new(&["a", "long"]);
        t.push(vec!["xyz".into(), "1".into()]);
        assert_eq!(t.to_table(), "a    long\nxyz  1\n");
        let mut c = Table::new(&["f"]);
        c.push(vec!["a, b".into()]);
        assert_eq!(c.to_csv(), "f\n\"a, b\"\n");
    }
}

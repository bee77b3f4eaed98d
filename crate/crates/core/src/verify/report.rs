use std::fmt::Write;

/// How `lhs` is compared with `rhs` at each time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Comparison {
    /// `lhs ≤ rhs (1 + tol)`.
    AtMost,
    /// `|lhs - rhs| ≤ tol |rhs|`.
    Equal,
}

/// Outcome of checking one law along a series of times.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictReport {
    pub law_id: String,
    pub comparison: Comparison,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub tolerance: f64,
    /// Per-time slack; non-negative where the law holds.
    pub margins: Vec<f64>,
    pub pass: bool,
    pub worst_time: f64,
    pub margin: f64,
}

impl VerdictReport {
    pub fn new(law_id: impl Into<String>, comparison: Comparison, times: Vec<f64>, lhs: Vec<f64>, rhs: Vec<f64>, tolerance: f64) -> Self {
        assert_eq!(times.len(), lhs.len());
        assert_eq!(times.len(), rhs.len());
        let margins: Vec<f64> = lhs
            .iter()
            .zip(&rhs)
            .map(|(&l, &r)| match comparison {
                Comparison::AtMost => r * (1.0 + tolerance) - l,
                Comparison::Equal => tolerance * r.abs() - (l - r).abs(),
            })
            .collect();
        let (worst, margin) = margins
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bm), (i, &m)| if m < bm { (i, m) } else { (bi, bm) });
        let pass = margins.iter().all(|&m| m >= 0.0);
        Self {
            law_id: law_id.into(),
            comparison,
            worst_time: times.get(worst).copied().unwrap_or(0.0),
            times,
            lhs,
            rhs,
            tolerance,
            margins,
            pass,
            margin,
        }
    }
}

pub const CSV_HEADER: &str = "law_id,time,lhs,rhs,margin,pass";

/// 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Verdict rows under [`CSV_HEADER`].
pub fn verdicts_csv(reports: &[VerdictReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        for i in 0..r.times.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.law_id,
                format_float(r.times[i]),
                format_float(r.lhs[i]),
                format_float(r.rhs[i]),
                format_float(r.margins[i]),
                r.margins[i] >= 0.0
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_margin_and_worst_time() {
        let r = VerdictReport::new("x", Comparison::AtMost, vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 1.5], vec![2.0, 2.0, 2.0], 0.0);
        assert!(r.pass);
        assert_eq!(r.worst_time, 1.0);
        assert_eq!(r.margin, 0.0);
        let r = VerdictReport::new("x", Comparison::AtMost, vec![0.0], vec![2.1], vec![2.0], 0.01);
        assert!(!r.pass);
    }

    #[test]
    fn equality_is_relative() {
        let r = VerdictReport::new("x", Comparison::Equal, vec![0.0, 1.0], vec![100.0, 100.0009], vec![100.0, 100.0], 1e-5);
        assert!(r.pass);
        let r = VerdictReport::new("x", Comparison::Equal, vec![0.0], vec![99.99], vec![100.0], 1e-5);
        assert!(!r.pass);
    }

    #[test]
    fn csv_rows_roundtrip() {
        let r = VerdictReport::new("law", Comparison::AtMost, vec![0.1], vec![1.0 / 3.0], vec![0.5], 1e-6);
        let csv = verdicts_csv(&[r.clone()]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let cols: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(cols[0], "law");
        assert_eq!(cols[2].parse::<f64>().unwrap(), r.lhs[0]);
        assert_eq!(cols[5], "true");
    }
}

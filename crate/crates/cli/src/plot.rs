use std::fmt::Write as _;
use std::path::Path;

use eustat_core::verify::format_float;

pub const PLOT_HEADER: &str = "series_id,t,value";

/// Named `(t, value)` series.
pub type Series = (String, Vec<(f64, f64)>);

/// Long-format CSV: one row per point, values with 17 significant digits.
pub fn plot_csv(series: &[Series]) -> String {
    let mut out = String::from(PLOT_HEADER);
    out.push('\n');
    for (id, points) in series {
        for (t, v) in points {
            let _ = writeln!(out, "{id},{},{}", format_float(*t), format_float(*v));
        }
    }
    out
}

pub fn emit_plot_data(series: &[Series], path: &Path) -> eustat_core::Result<()> {
    std::fs::write(path, plot_csv(series))?;
    Ok(())
}

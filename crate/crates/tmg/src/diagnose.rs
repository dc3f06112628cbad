//! The `diagnose` command: ACF, ESF and ESS of columns of a samples CSV.

use serde::Serialize;
use tmg_core::diagnostics::{diagnose, mean_and_se, ScalarSeries};

use crate::error::{CliError, CliResult};
use crate::io::SampleTable;

pub const DEFAULT_MAX_LAG: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnDiagnostics {
    pub column: String,
    pub mean: f64,
    /// Naive standard error of the mean.
    pub naive_se: f64,
    /// `ρ_1 .. ρ_L`
    pub acf: Vec<f64>,
    pub esf: f64,
    pub ess: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ess_per_cpu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnoseReport {
    pub n_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cpu_seconds: Option<f64>,
    pub max_lag: usize,
    pub columns: Vec<ColumnDiagnostics>,
}

/// Diagnostics for `columns` (all columns when empty).
pub fn diagnose_table(
    table: &SampleTable,
    columns: &[String],
    cpu_seconds: Option<f64>,
    max_lag: usize,
) -> CliResult<DiagnoseReport> {
    if let Some(t) = cpu_seconds {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(CliError::config("cpu seconds must be a non-negative number"));
        }
    }
    let names: Vec<String> = if columns.is_empty() { table.columns.clone() } else { columns.to_vec() };
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let values = table.column(&name)?.to_vec();
        let series = ScalarSeries::new(values, cpu_seconds)?;
        let r = diagnose(&series, max_lag)?;
        let (mean, naive_se) = mean_and_se(series.values());
        out.push(ColumnDiagnostics {
            column: name,
            mean,
            naive_se,
            acf: r.acf,
            esf: r.esf,
            ess: r.ess,
            ess_per_cpu: r.ess_per_cpu,
        });
    }
    Ok(DiagnoseReport { n_samples: table.n_rows(), cpu_seconds, max_lag, columns: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_samples_csv;

    #[test]
    fn constant_column_exits_with_four() {
        let t = parse_samples_csv("a,b\n1,1\n2,1\n3,1\n").unwrap();
        assert_eq!(diagnose_table(&t, &["b".into()], None, 5).unwrap_err().exit_code(), 4);
        assert!(diagnose_table(&t, &["a".into()], None, 5).is_ok());
    }

    #[test]
    fn missing_column_is_a_config_error() {
        let t = parse_samples_csv("a\n1\n2\n").unwrap();
        assert_eq!(diagnose_table(&t, &["z".into()], None, 5).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn ess_per_cpu_uses_the_given_time() {
        let t = parse_samples_csv("a\n1\n-1\n2\n0.5\n-3\n").unwrap();
        let r = diagnose_table(&t, &[], Some(2.0), 2).unwrap();
        let c = &r.columns[0];
        assert_eq!(c.ess_per_cpu, Some(c.ess / 2.0));
        assert_eq!(c.acf.len(), 2);
    }
}

//! Missing-value imputation: per-patient forward fill, with leading gaps
//! taken from the cohort-wide column mean of observed values. A column with
//! no observations anywhere in the cohort fills with zero.

use super::psv::Cohort;

/// Return a cohort with every missing value filled. Observed values are
/// copied bit-identically.
pub fn impute(cohort: &Cohort) -> Cohort {
    let n_cols = cohort
        .patients
        .first()
        .map(|p| p.columns.len())
        .unwrap_or(0);

    // Cohort-wide column means over observed values only.
    let mut sums = vec![0.0f64; n_cols];
    let mut counts = vec![0u64; n_cols];
    for patient in &cohort.patients {
        for row in &patient.rows {
            for (col, value) in row.iter().enumerate() {
                if let Some(v) = value {
                    sums[col] += v;
                    counts[col] += 1;
                }
            }
        }
    }
    let fallback: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();

    let mut out = cohort.clone();
    for patient in &mut out.patients {
        let cols = patient.columns.len();
        let mut last_seen: Vec<Option<f64>> = vec![None; cols];
        for row in &mut patient.rows {
            for (col, value) in row.iter_mut().enumerate() {
                match value {
                    Some(v) => last_seen[col] = Some(*v),
                    None => {
                        *value = Some(match last_seen[col] {
                            Some(prev) => prev,
                            None => fallback[col],
                        });
                    }
                }
            }
        }
    }
    out
}

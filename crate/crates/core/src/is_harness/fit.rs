use super::RateTable;
use crate::error::{Error, Result};

/// Condition number of the 2x2 normal-equation matrix above which the
/// two curves are treated as collinear.
pub const MAX_CONDITION: f64 = 1e12;

/// Least-squares combination `a1 ESS-H^(2) + a2 ESS-H^(inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComboFit {
    pub a1: f64,
    pub a2: f64,
    /// Sum of squared residuals at the optimum.
    pub residual_l2: f64,
}

impl ComboFit {
    /// Sum of squared residuals of arbitrary coefficients on the same data.
    pub fn residual_of(table: &RateTable, a1: f64, a2: f64) -> Result<f64> {
        let (h2, hinf) = combo_columns(table)?;
        Ok(squared_residual(&h2, &hinf, &table.ess_teo_rate, a1, a2))
    }
}

fn squared_residual(h2: &[f64], hinf: &[f64], target: &[f64], a1: f64, a2: f64) -> f64 {
    h2.iter()
        .zip(hinf)
        .zip(target)
        .map(|((x, y), t)| {
            let e = a1 * x + a2 * y - t;
            e * e
        })
        .sum()
}

fn combo_columns(table: &RateTable) -> Result<(Vec<f64>, Vec<f64>)> {
    let b2 = table
        .beta_index(2.0)
        .ok_or_else(|| Error::InvalidInput("sweep has no beta = 2 column".into()))?;
    let binf = table
        .beta_index(f64::INFINITY)
        .ok_or_else(|| Error::InvalidInput("sweep has no beta = inf column".into()))?;
    Ok((table.column(b2), table.column(binf)))
}

/// The `beta` whose averaged rate curve is closest in L1 to the
/// theoretical curve; ties go to the smaller `beta`.
pub fn optimal_beta(table: &RateTable) -> Result<f64> {
    if table.params.len() < 2 || table.betas.len() < 2 {
        return Err(Error::InvalidInput(
            "optimal beta needs at least 2 grid points and 2 beta values".into(),
        ));
    }
    let mut best: Option<(f64, f64)> = None;
    for (b, &beta) in table.betas.iter().enumerate() {
        let dist: f64 = table
            .ess_h_rate
            .iter()
            .zip(&table.ess_teo_rate)
            .map(|(row, t)| (row[b] - t).abs())
            .sum();
        let better = match best {
            None => true,
            Some((d, bb)) => dist < d || (dist == d && beta < bb),
        };
        if better {
            best = Some((dist, beta));
        }
    }
    Ok(best.expect("non-empty beta grid").1)
}

/// Solves the 2x2 normal equations for the combination of the `beta = 2`
/// and `beta = inf` rate curves that best matches the theoretical curve.
pub fn fit_linear_combo(table: &RateTable) -> Result<ComboFit> {
    if table.params.len() < 2 {
        return Err(Error::InvalidInput("fit needs at least 2 grid points".into()));
    }
    let (h2, hinf) = combo_columns(table)?;
    let t = &table.ess_teo_rate;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let g11 = dot(&h2, &h2);
    let g12 = dot(&h2, &hinf);
    let g22 = dot(&hinf, &hinf);
    let r1 = dot(&h2, t);
    let r2 = dot(&hinf, t);

    // Eigenvalues of the symmetric Gram matrix.
    let mean = 0.5 * (g11 + g22);
    let spread = (0.25 * (g11 - g22).powi(2) + g12 * g12).sqrt();
    let lmax = mean + spread;
    let lmin = mean - spread;
    let condition = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularDesign { condition });
    }
    let det = g11 * g22 - g12 * g12;
    let a1 = (r1 * g22 - r2 * g12) / det;
    let a2 = (g11 * r2 - g12 * r1) / det;
    Ok(ComboFit { a1, a2, residual_l2: squared_residual(&h2, &hinf, t, a1, a2) })
}

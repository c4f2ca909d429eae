//! Statistical reductions over classification and boundary results:
//! confusion matrices, contingency tables, chi-square and KS statistics,
//! ROC curves, quadratic regression of MP on NS, the neighbor-sampling
//! error curve, and barycentric plot coordinates.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boundary::{sample_without_replacement, NeighborProfile};
use crate::error::{Error, Result};

// --------------------------------------------------------------------------
// Confusion matrix and contingency tables
// --------------------------------------------------------------------------

/// K x K confusion matrix; rows are true sources, columns decisions.
#[derive(Debug, Clone)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let k = self.counts.len();
        (0..k).map(|j| self.counts.iter().map(|r| r[j]).sum()).collect()
    }

    /// Fraction of decisions on the diagonal.
    pub fn correct_rate(&self) -> f64 {
        let trace: usize = (0..self.counts.len()).map(|i| self.counts[i][i]).sum();
        trace as f64 / self.total() as f64
    }

    /// Build directly from counts (for fixture tables).
    pub fn from_counts(counts: Vec<Vec<usize>>) -> Result<Self> {
        let k = counts.len();
        if k == 0 || counts.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("confusion matrix must be square"));
        }
        Ok(ConfusionMatrix { counts })
    }
}

/// Count (truth, decision) pairs into a K x K confusion matrix.
pub fn confusion_matrix(truths: &[usize], decisions: &[usize], k: usize) -> Result<ConfusionMatrix> {
    if truths.len() != decisions.len() {
        return Err(Error::LengthMismatch(truths.len(), decisions.len()));
    }
    if truths.is_empty() {
        return Err(Error::invalid("confusion matrix of empty input"));
    }
    let mut counts = vec![vec![0usize; k]; k];
    for (&t, &d) in truths.iter().zip(decisions) {
        if t >= k || d >= k {
            return Err(Error::invalid(format!("class index out of range: ({t}, {d})")));
        }
        counts[t][d] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// A labeled contingency table with row and column sums.
#[derive(Debug, Clone)]
pub struct Crosstab {
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl Crosstab {
    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.col_names.len())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }
}

/// Cross-tabulate row categories (indices into `row_names`) against
/// boundary statuses `0..n_statuses`.
pub fn crosstab_boundary(
    rows: &[usize],
    statuses: &[usize],
    row_names: &[String],
    n_statuses: usize,
) -> Result<Crosstab> {
    if rows.len() != statuses.len() {
        return Err(Error::LengthMismatch(rows.len(), statuses.len()));
    }
    let mut counts = vec![vec![0usize; n_statuses]; row_names.len()];
    for (&r, &s) in rows.iter().zip(statuses) {
        if r >= row_names.len() || s >= n_statuses {
            return Err(Error::invalid(format!("cell index out of range: ({r}, {s})")));
        }
        counts[r][s] += 1;
    }
    Ok(Crosstab {
        row_names: row_names.to_vec(),
        col_names: (0..n_statuses).map(|s| s.to_string()).collect(),
        counts,
    })
}

/// Pearson chi-square statistic of a contingency table:
/// `sum (observed - expected)^2 / expected` with `expected = row * col / total`.
/// Every row and column sum must be positive.
pub fn chi_square_statistic(counts: &[Vec<usize>]) -> Result<f64> {
    if counts.is_empty() || counts[0].is_empty() {
        return Err(Error::invalid("chi-square of empty table"));
    }
    let ncols = counts[0].len();
    if counts.iter().any(|r| r.len() != ncols) {
        return Err(Error::invalid("ragged contingency table"));
    }
    let row_sums: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<usize> = (0..ncols).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
    if row_sums.contains(&0) || col_sums.contains(&0) {
        return Err(Error::invalid("chi-square table has a zero marginal"));
    }
    let total: usize = row_sums.iter().sum();
    let mut stat = 0.0;
    for (i, row) in counts.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = row_sums[i] as f64 * col_sums[j] as f64 / total as f64;
            let d = obs as f64 - expected;
            stat += d * d / expected;
        }
    }
    Ok(stat)
}

/// Two-sample Kolmogorov-Smirnov statistic: the largest absolute difference
/// of the two empirical CDFs, evaluated at the sample points.
pub fn ks_statistic(sample_a: &[f64], sample_b: &[f64]) -> Result<f64> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::invalid("KS statistic of empty sample"));
    }
    let mut a = sample_a.to_vec();
    let mut b = sample_b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Pearson correlation coefficient.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::invalid("correlation needs at least two points"));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::invalid("correlation of a constant sample"));
    }
    Ok(sab / (saa * sbb).sqrt())
}

// --------------------------------------------------------------------------
// ROC
// --------------------------------------------------------------------------

/// ROC curve for an accept-if-score-at-least-threshold rule, with
/// "decision correct" as the positive class.
#[derive(Debug, Clone)]
pub struct RocCurve {
    /// (false positive rate, true positive rate) per swept threshold,
    /// from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    /// Area under the curve by the trapezoidal rule.
    pub auc: f64,
}

/// Sweep thresholds over the distinct score values, accepting reads whose
/// score is at least the threshold. TPR is the fraction of correct
/// decisions accepted, FPR the fraction of incorrect decisions accepted.
pub fn roc_curve(scores: &[f64], correct: &[bool]) -> Result<RocCurve> {
    if scores.len() != correct.len() {
        return Err(Error::LengthMismatch(scores.len(), correct.len()));
    }
    if scores.is_empty() {
        return Err(Error::invalid("ROC of empty input"));
    }
    let positives = correct.iter().filter(|&&c| c).count();
    let negatives = correct.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::invalid("ROC needs both correct and incorrect decisions"));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).unwrap().then(i.cmp(&j)));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut idx = 0;
    while idx < order.len() {
        // consume the whole tie group at this threshold
        let threshold = scores[order[idx]];
        while idx < order.len() && scores[order[idx]] == threshold {
            if correct[order[idx]] {
                tp += 1;
            } else {
                fp += 1;
            }
            idx += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}

// --------------------------------------------------------------------------
// Least squares
// --------------------------------------------------------------------------

/// Result of a linear least-squares fit with intercept.
#[derive(Debug, Clone)]
pub struct LeastSquaresFit {
    /// Coefficient per design column, in input order.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub fitted: Vec<f64>,
    /// Mean squared residual.
    pub mse: f64,
    pub r_squared: f64,
    /// True when the centered design was not full rank and directions
    /// were dropped by the singular-value cutoff.
    pub rank_deficient: bool,
}

/// Ordinary least squares of `y` on the given design columns plus an
/// intercept. Columns and response are centered before a rank-revealing
/// SVD solve; singular values below `1e-10 * max` are dropped, which keeps
/// the fit finite for collinear designs.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<LeastSquaresFit> {
    let n = y.len();
    if n == 0 {
        return Err(Error::invalid("least squares with no observations"));
    }
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::invalid("design column length mismatch"));
    }
    let p = columns.len();
    let y_mean = y.iter().sum::<f64>() / n as f64;

    let col_means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let design = DMatrix::from_fn(n, p, |i, j| columns[j][i] - col_means[j]);
    let yc = DVector::from_fn(n, |i, _| y[i] - y_mean);

    let svd = design.clone().svd(true, true);
    let sv_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = sv_max * 1e-10;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let beta = if sv_max == 0.0 {
        DVector::zeros(p)
    } else {
        svd.solve(&yc, cutoff)
            .map_err(|e| Error::invalid(format!("SVD solve failed: {e}")))?
    };

    let intercept = y_mean
        - col_means
            .iter()
            .zip(beta.iter())
            .map(|(m, b)| m * b)
            .sum::<f64>();
    let fitted: Vec<f64> = (0..n)
        .map(|i| intercept + columns.iter().zip(beta.iter()).map(|(c, b)| c[i] * b).sum::<f64>())
        .collect();
    let ss_res: f64 = y.iter().zip(&fitted).map(|(&a, &f)| (a - f) * (a - f)).sum();
    let ss_tot: f64 = y.iter().map(|&a| (a - y_mean) * (a - y_mean)).sum();
    Ok(LeastSquaresFit {
        coefficients: beta.iter().cloned().collect(),
        intercept,
        fitted,
        mse: ss_res / n as f64,
        r_squared: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
        rank_deficient: rank < p,
    })
}

// --------------------------------------------------------------------------
// Quadratic MP ~ NS model
// --------------------------------------------------------------------------

/// Per-class quadratic fit of the maximum posterior on Neighbor
/// Similarity: `MP = alpha NS^2 + beta NS + gamma` for each class.
#[derive(Debug, Clone)]
pub struct QuadraticFit {
    /// (alpha, beta, gamma) per class index.
    pub coefficients: Vec<[f64; 3]>,
    /// Pooled coefficient of determination over all points.
    pub r_squared: f64,
    /// Pooled mean squared residual.
    pub mse: f64,
}

impl QuadraticFit {
    /// Evaluate the fitted parabola for one class.
    pub fn predict(&self, class: usize, ns: f64) -> f64 {
        let [a, b, g] = self.coefficients[class];
        a * ns * ns + b * ns + g
    }
}

/// Fit the saturated per-class quadratic model by ordinary least squares.
/// Each class needs at least three distinct NS values.
pub fn quadratic_fit(
    ns: &[f64],
    mp: &[f64],
    classes: &[usize],
    k: usize,
) -> Result<QuadraticFit> {
    if ns.len() != mp.len() || ns.len() != classes.len() {
        return Err(Error::invalid("quadratic fit input length mismatch"));
    }
    let mut coefficients = Vec::with_capacity(k);
    let mut ss_res = 0.0;
    for class in 0..k {
        let idx: Vec<usize> = (0..ns.len()).filter(|&i| classes[i] == class).collect();
        let mut distinct: Vec<f64> = idx.iter().map(|&i| ns[i]).collect();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        if distinct.len() < 3 {
            return Err(Error::invalid(format!(
                "class {class} has fewer than 3 distinct NS values"
            )));
        }
        let x: Vec<f64> = idx.iter().map(|&i| ns[i]).collect();
        let y: Vec<f64> = idx.iter().map(|&i| mp[i]).collect();
        let x2: Vec<f64> = x.iter().map(|&v| v * v).collect();
        let fit = least_squares(&[x2, x], &y)?;
        ss_res += fit.mse * y.len() as f64;
        coefficients.push([fit.coefficients[0], fit.coefficients[1], fit.intercept]);
    }
    let mean_mp = mp.iter().sum::<f64>() / mp.len() as f64;
    let ss_tot: f64 = mp.iter().map(|&v| (v - mean_mp) * (v - mean_mp)).sum();
    Ok(QuadraticFit {
        coefficients,
        r_squared: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
        mse: ss_res / mp.len() as f64,
    })
}

// --------------------------------------------------------------------------
// Neighbor-sampling error curve
// --------------------------------------------------------------------------

/// Relative root mean squared error of predicting exact Neighbor
/// Similarity from partial Neighbor Similarities.
///
/// For each profile, the neighbor order is randomized (profile `i` uses
/// seed `seed + i`) and prefix values `NS(.,1) .. NS(.,n)` computed. For
/// each requested `k`, the exact NS is regressed on the first `k` prefix
/// values (with intercept) and `RRMSE = sqrt(MSE) / mean(NS)` reported.
pub fn ns_sampling_rrmse(
    profiles: &[NeighborProfile],
    ks: &[usize],
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    if profiles.is_empty() {
        return Err(Error::invalid("RRMSE experiment needs profiles"));
    }
    if ks.is_empty() || ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sample sizes must be strictly ascending"));
    }
    let n_neighbors = profiles[0].neighbor_decisions.len();
    if profiles.iter().any(|p| p.neighbor_decisions.len() != n_neighbors) {
        return Err(Error::invalid("profiles have differing neighbor counts"));
    }
    let k_max = *ks.last().unwrap();
    if k_max > n_neighbors {
        return Err(Error::invalid(format!(
            "sample size {k_max} exceeds the neighbor count {n_neighbors}"
        )));
    }

    // prefix NS matrix: row per profile, column j = NS over first j+1
    // neighbors in the randomized order
    let mut prefix: Vec<Vec<f64>> = Vec::with_capacity(profiles.len());
    let mut response: Vec<f64> = Vec::with_capacity(profiles.len());
    for (i, p) in profiles.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let order = sample_without_replacement(n_neighbors, n_neighbors, &mut rng);
        let mut agree = 0usize;
        let mut row = Vec::with_capacity(n_neighbors);
        for (j, &idx) in order.iter().enumerate() {
            if p.neighbor_decisions[idx] == p.decision {
                agree += 1;
            }
            row.push(ns_from_agreement(agree, j + 1));
        }
        response.push(row[n_neighbors - 1]);
        prefix.push(row);
    }

    let mean_response = response.iter().sum::<f64>() / response.len() as f64;
    if response.iter().all(|&v| (v - response[0]).abs() < 1e-15) {
        return Err(Error::invalid("degenerate response: all NS values equal"));
    }
    if mean_response == 0.0 {
        return Err(Error::invalid("mean NS is zero"));
    }

    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        let columns: Vec<Vec<f64>> = (0..k)
            .map(|j| prefix.iter().map(|row| row[j]).collect())
            .collect();
        let fit = least_squares(&columns, &response)?;
        out.push((k, fit.mse.sqrt() / mean_response));
    }
    Ok(out)
}

/// Neighbor Similarity when `agree` of `total` neighbors share the
/// decision. The Hellinger distance to the point mass depends only on the
/// agreeing fraction.
pub fn ns_from_agreement(agree: usize, total: usize) -> f64 {
    let q = agree as f64 / total as f64;
    let d = 1.0 - q.sqrt();
    1.0 - ((d * d + (1.0 - q)) / 2.0).sqrt()
}

// --------------------------------------------------------------------------
// Barycentric coordinates
// --------------------------------------------------------------------------

/// Cartesian coordinates of a 3-class probability vector in the unit
/// equilateral triangle: class 0 at the apex `(0.5, sqrt(3)/2)`, class 1
/// at the origin, class 2 at `(1, 0)`.
pub fn barycentric_coords(p: &[f64]) -> Result<(f64, f64)> {
    if p.len() != 3 {
        return Err(Error::DimensionMismatch(p.len(), 3));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-6 || p.iter().any(|&x| x < 0.0) {
        return Err(Error::NotNormalized { sum });
    }
    let x = 0.5 * p[0] + p[2];
    let y = (3.0f64).sqrt() / 2.0 * p[0];
    Ok((x, y))
}

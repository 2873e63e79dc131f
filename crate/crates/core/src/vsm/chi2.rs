//! Chi-square statistic of a feature-presence / class-membership table.

/// χ² of the 2×2 table
///
/// ```text
///               class c   not c
/// feature        a         b
/// no feature     c         d
/// ```
///
/// `N (ad - bc)^2 / ((a+b)(c+d)(a+c)(b+d))`, or 0 when any marginal is empty.
pub fn chi2_2x2(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let rows = [(a + b), (c + d)];
    let cols = [(a + c), (b + d)];
    if rows.contains(&0) || cols.contains(&0) {
        return 0.0;
    }
    let n = (a + b + c + d) as f64;
    let diff = (a as i128) * (d as i128) - (b as i128) * (c as i128);
    let diff = diff as f64;
    n * diff * diff / (rows[0] as f64 * rows[1] as f64 * cols[0] as f64 * cols[1] as f64)
}

/// Maximum one-vs-rest χ² over classes, from document counts.
///
/// * `n_docs`: documents in the sample
/// * `df`: documents containing the feature
/// * `df_by_class[k]`: documents of class `k` containing the feature
/// * `class_docs[k]`: documents of class `k`
pub fn chi2_max(n_docs: u64, df: u64, df_by_class: &[u64], class_docs: &[u64]) -> f64 {
    debug_assert_eq!(df_by_class.len(), class_docs.len());
    df_by_class
        .iter()
        .zip(class_docs)
        .map(|(&a, &nc)| {
            let b = df - a;
            let c = nc - a;
            let d = n_docs - df - c;
            chi2_2x2(a, b, c, d)
        })
        .fold(0.0, f64::max)
}

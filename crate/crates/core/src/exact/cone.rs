//! Polyhedral cones: facet enumeration by the double description method.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_integer::Integer;

use super::{determinant, dot, rank, to_i64, ExactError, IntVector};

/// Extreme rays of `{y : <row, y> >= 0 for every row}`.
///
/// The rows must have full rank `r`, so the cone is pointed. Rays are
/// primitive integer vectors, returned in canonical facet order.
pub fn extreme_rays(rows: &[IntVector], r: usize) -> Result<Vec<IntVector>, ExactError> {
    if rows.iter().any(|v| v.len() != r) {
        return Err(ExactError::DimensionMismatch(format!("expected vectors of length {r}")));
    }
    if rank(rows) < r {
        return Err(ExactError::NotFullDimensional);
    }
    // Greedy basis of r independent rows.
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial: Vec<IntVector> = basis.iter().map(|&k| rows[k].clone()).collect();
        trial.push(rows[i].clone());
        if rank(&trial) == trial.len() {
            basis.push(i);
            if basis.len() == r {
                break;
            }
        }
    }
    // Initial simplicial cone: rays are the columns of B^{-1}, i.e. signed
    // columns of the adjugate.
    let b: Vec<IntVector> = basis.iter().map(|&k| rows[k].clone()).collect();
    let cols: Vec<IntVector> = (0..r).map(|j| b.iter().map(|row| row[j]).collect()).collect();
    let det = to_i64(&determinant(&cols));
    let mut rays: Vec<Vec<i128>> = Vec::new();
    for k in 0..r {
        // Solve B y = det * e_k by Cramer's rule.
        let y: Vec<i128> = (0..r)
            .map(|j| {
                let mut c = cols.clone();
                c[j] = (0..r).map(|i| if i == k { 1 } else { 0 }).collect();
                to_i64(&determinant(&c)) as i128
            })
            .collect();
        let s: i128 = if det > 0 { 1 } else { -1 };
        rays.push(y.into_iter().map(|v| v * s).collect());
    }
    let mut processed: Vec<usize> = basis.clone();
    for (i, row) in rows.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let vals: Vec<i128> = rays.iter().map(|y| dot128(row, y)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < 0).collect();
        let mut next: Vec<Vec<i128>> = (0..rays.len()).filter(|&k| vals[k] >= 0).map(|k| rays[k].clone()).collect();
        if !neg.is_empty() {
            let zero_sets: Vec<Vec<usize>> =
                rays.iter().map(|y| processed.iter().copied().filter(|&q| dot128(&rows[q], y) == 0).collect()).collect();
            for &p in &pos {
                for &n in &neg {
                    let common: Vec<usize> = zero_sets[p].iter().copied().filter(|q| zero_sets[n].contains(q)).collect();
                    if common.len() + 2 < r {
                        continue;
                    }
                    let tight: Vec<IntVector> = common.iter().map(|&q| rows[q].clone()).collect();
                    if rank(&tight) + 2 != r {
                        continue;
                    }
                    let y: Vec<i128> =
                        rays[n].iter().zip(&rays[p]).map(|(a, b)| vals[p] * a - vals[n] * b).collect();
                    next.push(primitive128(&y));
                }
            }
        }
        rays = next;
        processed.push(i);
    }
    let mut out: BTreeSet<IntVector> = BTreeSet::new();
    for y in rays {
        let p = primitive128(&y);
        out.insert(p.iter().map(|&v| i64::try_from(v).expect("ray entry overflow")).collect());
    }
    let mut out: Vec<IntVector> = out.into_iter().collect();
    out.sort_by(facet_order);
    Ok(out)
}

/// Facets of the cone generated by `generators` in `Z^r`, as primitive
/// integer forms nonnegative on the cone, in canonical order.
pub fn cone_facets(generators: &[IntVector], r: usize) -> Result<Vec<IntVector>, ExactError> {
    let facets = extreme_rays(generators, r)?;
    if rank(&facets) < r {
        return Err(ExactError::NotPointed);
    }
    Ok(facets)
}

/// Canonical order on linear forms: by position of the last nonzero
/// coefficient, then by the sum of absolute values, then lexicographically
/// descending.
pub fn facet_order(a: &IntVector, b: &IntVector) -> Ordering {
    let last = |v: &IntVector| v.iter().rposition(|&x| x != 0).unwrap_or(0);
    let weight = |v: &IntVector| v.iter().map(|x| x.abs()).sum::<i64>();
    last(a).cmp(&last(b)).then(weight(a).cmp(&weight(b))).then(b.cmp(a))
}

fn dot128(row: &[i64], y: &[i128]) -> i128 {
    row.iter().zip(y).map(|(&a, &b)| a as i128 * b).sum()
}

fn primitive128(y: &[i128]) -> Vec<i128> {
    let g = y.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g <= 1 {
        y.to_vec()
    } else {
        y.iter().map(|v| v / g).collect()
    }
}

/// Whether the form is nonnegative on every generator and tight on a set of
/// generators of rank `r - 1`.
pub fn is_facet_of(form: &IntVector, generators: &[IntVector], r: usize) -> bool {
    if generators.iter().any(|g| dot(form, g) < 0) {
        return false;
    }
    let tight: Vec<IntVector> = generators.iter().filter(|g| dot(form, g) == 0).cloned().collect();
    rank(&tight) + 1 == r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<IntVector>) -> Vec<IntVector> {
        v.sort();
        v
    }

    #[test]
    fn gauss_facets() {
        let a = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]];
        let f = cone_facets(&a, 3).unwrap();
        assert_eq!(f, vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
    }

    #[test]
    fn g3_and_orthant_facets() {
        let g3 = vec![vec![1, 1], vec![0, 1], vec![-1, 1], vec![2, 1]];
        assert_eq!(sorted(cone_facets(&g3, 2).unwrap()), sorted(vec![vec![1, 1], vec![-1, 2]]));
        let orth = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(sorted(cone_facets(&orth, 3).unwrap()), sorted(orth.clone()));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(cone_facets(&[vec![1, 0, 0], vec![0, 1, 0]], 3), Err(ExactError::NotFullDimensional));
        assert_eq!(cone_facets(&[vec![1, 0], vec![-1, 0], vec![0, 1]], 2), Err(ExactError::NotPointed));
    }

    #[test]
    fn facets_are_tight() {
        let a = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![2, 0, -1, 0], vec![1, 1, 0, -1]];
        for f in cone_facets(&a, 4).unwrap() {
            assert!(is_facet_of(&f, &a, 4));
        }
    }
}

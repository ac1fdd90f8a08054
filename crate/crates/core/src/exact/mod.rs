//! Exact arithmetic: rationals, integer linear algebra, polyhedral cones and
//! a rational simplex solver.
//!
//! Everything here is exact. Integer vectors use `i64` entries (generators and
//! facet forms of the hypergeometric families are tiny); determinants, Hermite
//! normal forms and inverses are computed over arbitrary-precision integers
//! or rationals and converted back with overflow checks.

pub mod cone;
pub mod lp;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use cone::{cone_facets, extreme_rays};
pub use lp::{solve_mixed_inequalities, Constraint, Feasibility, InequalitySystem, LinearForm, Relation};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Dense integer vector.
pub type IntVector = Vec<i64>;

/// Dense integer matrix stored as a list of rows.
pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("generators do not span a full-dimensional cone")]
    NotFullDimensional,
    #[error("cone is not pointed")]
    NotPointed,
    #[error("integer overflow converting {0}")]
    Overflow(String),
    #[error("malformed rational {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// Builds `p/q` as a rational.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Fractional part `{x} = x - floor(x)`, always in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn floor_i64(x: &Rational) -> i64 {
    to_i64(&x.floor().to_integer())
}

pub fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().unwrap_or_else(|| panic!("integer {x} does not fit in i64"))
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

/// Parses `p`, `p/q` or `-p/q` (surrounding whitespace allowed).
pub fn parse_rational(text: &str) -> Result<Rational, ExactError> {
    let err = |reason: &str| ExactError::Parse { text: text.to_string(), reason: reason.to_string() };
    let t = text.trim();
    if t.is_empty() {
        return Err(err("empty"));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| err("numerator is not an integer"))?;
    let d: BigInt = den.parse().map_err(|_| err("denominator is not an integer"))?;
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Canonical `p/q` rendering with `q >= 1` (integers render as `p/1`).
pub fn fmt_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Wrapper that displays a rational list as `(p/q, ...)`.
pub struct Tuple<'a>(pub &'a [Rational]);

impl fmt::Display for Tuple<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_rational(x))?;
        }
        write!(f, ")")
    }
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&fmt_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| parse_rational(s).map_err(D::Error::custom)).collect()
        }
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator(xs: &[Rational]) -> BigInt {
    xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn dot_int_rat(m: &[i64], x: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (c, v) in m.iter().zip(x) {
        if *c != 0 {
            acc += v * BigInt::from(*c);
        }
    }
    acc
}

pub fn dot(m: &[i64], x: &[i64]) -> i64 {
    m.iter().zip(x).map(|(a, b)| a * b).sum()
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divides by the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> IntVector {
    let g = gcd_slice(v);
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

fn big_matrix(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Determinant of the square matrix whose columns are `cols` (fraction-free
/// Bareiss elimination).
pub fn determinant(cols: &[IntVector]) -> BigInt {
    let n = cols.len();
    assert!(cols.iter().all(|c| c.len() == n), "determinant needs a square matrix");
    if n == 0 {
        return BigInt::one();
    }
    let mut m = big_matrix(cols);
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

pub fn determinant_i64(cols: &[IntVector]) -> i64 {
    to_i64(&determinant(cols))
}

/// Rank of a list of integer vectors.
pub fn rank(vectors: &[IntVector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<Rational>> =
        vectors.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    rational_rank(&mut m)
}

fn rational_rank(m: &mut [Vec<Rational>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(p, rank);
        for i in rank + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[rank][c];
            for j in c..cols {
                let v = &m[rank][j] * &f;
                m[i][j] -= v;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Inverse of a square rational matrix (rows), or `None` when singular.
pub fn rational_inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(p, c);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &piv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let v = &a[c][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Integer inverse of a unimodular matrix given by rows.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let q: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    let inv = rational_inverse(&q)?;
    inv.iter()
        .map(|r| r.iter().map(|x| if is_integer(x) { Some(to_i64(x.numer())) } else { None }).collect())
        .collect()
}

/// Matrix (rows) times column vector.
pub fn mat_vec(m: &IntMatrix, v: &[i64]) -> IntVector {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Row vector times matrix (rows).
pub fn vec_mat(v: &[i64], m: &IntMatrix) -> IntVector {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| v.iter().zip(m).map(|(a, row)| a * row[j]).sum()).collect()
}

/// Column-style Hermite normal form of the `rows x cols` matrix `m`.
///
/// Returns `(h, u)` with `m * u = h`, `u` unimodular (`cols x cols`) and `h` in
/// lower echelon form with positive pivots; entries left of a pivot are
/// reduced into `[0, pivot)`. Columns of `h` after the last pivot are zero.
pub fn column_hnf(m: &[Vec<i64>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut h = big_matrix(m);
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let col_op = |mat: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, f: &BigInt| {
        for row in mat.iter_mut() {
            let v = &row[src] * f;
            row[dst] -= v;
        }
    };
    let swap_cols = |mat: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for row in mat.iter_mut() {
            row.swap(a, b);
        }
    };
    let negate_col = |mat: &mut Vec<Vec<BigInt>>, a: usize| {
        for row in mat.iter_mut() {
            row[a] = -row[a].clone();
        }
    };
    let mut pivots = Vec::new();
    let mut piv = 0;
    for i in 0..rows {
        if piv == cols {
            break;
        }
        loop {
            // Move the smallest nonzero entry of row i (among columns >= piv) to piv.
            let best = (piv..cols)
                .filter(|&j| !h[i][j].is_zero())
                .min_by(|&a, &b| h[i][a].abs().cmp(&h[i][b].abs()));
            let Some(b) = best else { break };
            if b != piv {
                swap_cols(&mut h, b, piv);
                swap_cols(&mut u, b, piv);
            }
            let mut done = true;
            for j in piv + 1..cols {
                if h[i][j].is_zero() {
                    continue;
                }
                let q = h[i][j].div_floor(&h[i][piv]);
                col_op(&mut h, j, piv, &q);
                col_op(&mut u, j, piv, &q);
                if !h[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[i][piv].is_zero() {
            continue;
        }
        if h[i][piv].is_negative() {
            negate_col(&mut h, piv);
            negate_col(&mut u, piv);
        }
        for j in 0..piv {
            let q = h[i][j].div_floor(&h[i][piv]);
            if !q.is_zero() {
                col_op(&mut h, j, piv, &q);
                col_op(&mut u, j, piv, &q);
            }
        }
        pivots.push(i);
        piv += 1;
    }
    (h, u, pivots)
}

/// Whether the vectors span `Z^r` as a group.
pub fn integer_span_is_full(vectors: &[IntVector], r: usize) -> bool {
    if vectors.iter().any(|v| v.len() != r) {
        return false;
    }
    // Matrix with the vectors as columns.
    let m: Vec<Vec<i64>> = (0..r).map(|i| vectors.iter().map(|v| v[i]).collect()).collect();
    let (h, _, pivots) = column_hnf(&m);
    pivots.len() == r && (0..r).all(|i| h[i][i].is_one())
}

/// Basis of the integer kernel `{l in Z^N : sum l_i v_i = 0}`, in row Hermite
/// form read from the right (trailing block upper triangular with positive
/// pivots, so the last nonzero entry of every basis vector is positive).
pub fn integer_kernel(vectors: &[IntVector]) -> Vec<IntVector> {
    let n = vectors.len();
    let r = vectors.first().map_or(0, |v| v.len());
    let m: Vec<Vec<i64>> = (0..r).map(|i| vectors.iter().map(|v| v[i]).collect()).collect();
    let (_, u, pivots) = column_hnf(&m);
    let k = pivots.len();
    // Columns k..n of u span the kernel; reverse coordinates, row-reduce, reverse back.
    let basis: Vec<Vec<BigInt>> =
        (k..n).map(|j| (0..n).rev().map(|i| u[i][j].clone()).collect()).collect();
    let reduced = row_hnf(basis);
    reduced
        .into_iter()
        .map(|row| row.into_iter().rev().map(|x| to_i64(&x)).collect())
        .collect()
}

/// Row Hermite normal form (pivots move right going down, positive pivots,
/// entries above each pivot reduced into `[0, pivot)`).
fn row_hnf(rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return rows;
    }
    let cols = rows[0].len();
    // Transpose, take the column HNF, transpose back.
    let t: Vec<Vec<BigInt>> = (0..cols).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
    let t64: Vec<Vec<i64>> = t.iter().map(|r| r.iter().map(to_i64).collect()).collect();
    let (h, _, pivots) = column_hnf(&t64);
    (0..pivots.len()).map(|j| (0..cols).map(|i| h[i][j].clone()).collect()).collect()
}

/// Integer vector of a linear form vanishing on `r - 1` independent vectors
/// of `Z^r` (generalised cross product), made primitive.
pub fn normal_vector(vectors: &[IntVector]) -> IntVector {
    let r = vectors.len() + 1;
    let mut out = Vec::with_capacity(r);
    for k in 0..r {
        // Minor deleting coordinate k; columns are the vectors restricted.
        let cols: Vec<IntVector> = vectors
            .iter()
            .map(|v| v.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, x)| *x).collect())
            .collect();
        let d = determinant_i64(&cols);
        out.push(if k % 2 == 0 { d } else { -d });
    }
    primitive(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofactor_det(m: &[IntVector]) -> i64 {
        // Laplace expansion along the first column.
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|i| {
                let minor: Vec<IntVector> =
                    m.iter().skip(1).map(|c| c.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, x)| *x).collect()).collect();
                let s = if i % 2 == 0 { 1 } else { -1 };
                s * m[0][i] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn determinant_example() {
        let cols = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![1, 1, 0, -1]];
        assert_eq!(determinant_i64(&cols), -1);
        assert_eq!(cofactor_det(&cols), -1);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let samples = vec![
            vec![vec![2, -1, 3], vec![0, 4, 1], vec![5, 2, -2]],
            vec![vec![1, 2, 3, 4], vec![2, 3, 4, 5], vec![0, 1, 0, 1], vec![7, 0, 0, 1]],
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![1, 2], vec![2, 4]],
        ];
        for m in samples {
            assert_eq!(determinant_i64(&m), cofactor_det(&m));
        }
    }

    #[test]
    fn span_examples() {
        let gauss = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]];
        assert!(integer_span_is_full(&gauss, 3));
        assert!(!integer_span_is_full(&[vec![2, 0], vec![0, 1]], 2));
        assert!(integer_span_is_full(&[vec![2, 1], vec![3, 2]], 2));
        assert!(!integer_span_is_full(&[vec![1, 0, 0], vec![0, 1, 0]], 3));
    }

    #[test]
    fn kernel_examples() {
        let gauss = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]];
        assert_eq!(integer_kernel(&gauss), vec![vec![-1, -1, 1, 1]]);
        let g3 = vec![vec![1, 1], vec![0, 1], vec![-1, 1], vec![2, 1]];
        let mut k = integer_kernel(&g3);
        k.sort();
        assert_eq!(k, vec![vec![-2, 1, 0, 1], vec![1, -2, 1, 0]]);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -2/4 ").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(fmt_rational(&rat(4, 2)), "2/1");
        assert_eq!(fmt_rational(&frac(&rat(-1, 6))), "5/6");
    }

    #[test]
    fn normal_vector_vanishes() {
        let vs = vec![vec![1, 0, 0], vec![1, 1, -1]];
        let n = normal_vector(&vs);
        for v in &vs {
            assert_eq!(dot(&n, v), 0);
        }
        assert_eq!(gcd_slice(&n), 1);
    }
}

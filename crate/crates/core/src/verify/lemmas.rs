//! Closed-form interlacing conditions in terms of classical parameters, and
//! the floor-vector sets they come from.

use num_integer::Integer;

use crate::apex::InterlacingTable;
use crate::exact::{rat, IntVector, Rational};
use crate::families::Family;
use crate::gkz::GkzSystem;

/// Floor-vector set of the maximal-signature regions, restricted to the
/// listed forms (in `alpha` coordinates).
pub struct FloorSpec {
    pub family: Family,
    pub forms: Vec<IntVector>,
    pub expected: Vec<Vec<i64>>,
    /// The set as printed, when it differs from `expected`.
    pub printed: Option<Vec<Vec<i64>>>,
}

pub fn floor_specs() -> Vec<FloorSpec> {
    let spec = |family: Family, forms: Vec<IntVector>, expected: Vec<Vec<i64>>| FloorSpec { family, forms, expected, printed: None };
    let mut h1 = spec(
        Family::H1,
        vec![vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![1, 1, 0, 2], vec![1, 0, 1, 1]],
        vec![
            vec![1, 0, 0, 2, 1],
            vec![0, 1, 0, 2, 1],
            vec![0, 1, 0, 1, 2],
            vec![1, 0, 1, 2, 0],
            vec![1, 0, 1, 1, 1],
            vec![0, 1, 1, 1, 1],
        ],
    );
    let mut printed = h1.expected.clone();
    printed[3] = vec![1, 0, 1, 2, 1];
    h1.printed = Some(printed);
    vec![
        spec(Family::G1, vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]], vec![vec![0, 0, 1], vec![1, 1, 0]]),
        spec(
            Family::FA(2),
            vec![vec![1, 0, 0, 1, 0], vec![1, 0, 0, 0, 1], vec![1, 0, 0, 1, 1], vec![0, 1, 0, 1, 0], vec![0, 0, 1, 0, 1]],
            vec![vec![1, 1, 2, 0, 0], vec![0, 1, 1, 1, 0], vec![1, 0, 1, 0, 1], vec![0, 0, 0, 1, 1]],
        ),
        spec(
            Family::FC(2),
            vec![vec![1, 0, 1, 0], vec![1, 0, 0, 1], vec![1, 0, 1, 1], vec![0, 1, 1, 0], vec![0, 1, 0, 1], vec![0, 1, 1, 1]],
            vec![vec![1, 1, 1, 0, 0, 1], vec![0, 0, 1, 1, 1, 1]],
        ),
        h1,
        spec(
            Family::H4,
            vec![vec![1, 0, 2, 0], vec![1, 0, 0, 1], vec![0, 1, 0, 1], vec![1, 0, 2, 1]],
            vec![vec![1, 1, 0, 2], vec![1, 0, 1, 1]],
        ),
        spec(Family::H5, vec![vec![1, 2, 0], vec![1, 0, 1], vec![1, 2, 3]], vec![vec![1, 0, 3], vec![1, 1, 2]]),
        // -1 <= -a1 + 2 a2 < 0 <= a1 + a2 < 1, or 1 <= -a1 + 2 a2 and a1 + a2 < 2.
        spec(Family::G3, vec![vec![1, 1], vec![-1, 2]], vec![vec![0, -1], vec![1, 1]]),
    ]
}

/// Outcome of comparing a derived table with a [`FloorSpec`].
pub struct FloorComparison {
    pub derived: Vec<Vec<i64>>,
    pub matches: bool,
    /// Every facet outside the listed forms has a constant floor.
    pub rest_constant: bool,
    /// Printed vectors that the derivation rejects.
    pub printed_rejected: Vec<Vec<i64>>,
}

pub fn compare_floors(table: &InterlacingTable, spec: &FloorSpec) -> Option<FloorComparison> {
    let derived = table.project(&spec.forms)?;
    let mut expected = spec.expected.clone();
    expected.sort();
    let constant = table.constant_columns();
    let rest_constant = table.facets.iter().enumerate().all(|(j, m)| spec.forms.contains(m) || constant.contains(&j));
    let printed_rejected = spec.printed.iter().flatten().filter(|v| !derived.contains(v)).cloned().collect();
    Some(FloorComparison { matches: derived == expected, derived, rest_constant, printed_rejected })
}

/// A closed-form condition for maximal signature. Arguments are the
/// numerators of the fractional parts of the parameters over the common
/// denominator `d`.
pub struct ProseLemma {
    pub name: &'static str,
    pub family: Family,
    pub condition: fn(&[i64], i64) -> bool,
}

fn fd(v: &[i64], d: i64) -> bool {
    let n = v.len() as i64 - 2;
    let (a, c) = (v[0], v[v.len() - 1]);
    let sb: i64 = v[1..v.len() - 1].iter().sum();
    (c < a && sb <= c) || (a <= c && c + (n - 1) * d < sb)
}

fn f2(v: &[i64], d: i64) -> bool {
    let (a, b1, b2, c1, c2) = (v[0], v[1], v[2], v[3], v[4]);
    (b1 <= c1 && b2 <= c2 && c1 + c2 < a)
        || (b1 <= c1 && c2 < b2 && c1 < a && a <= c2)
        || (c1 < b1 && b2 <= c2 && c2 < a && a <= c1)
        || (c1 < b1 && c2 < b2 && d + a <= c1 + c2)
}

/// Stated for `{a} <= {b}`; the function is symmetric in `a` and `b`.
fn f4(v: &[i64], d: i64) -> bool {
    let (a, b) = (v[0].min(v[1]), v[0].max(v[1]));
    let (c1, c2) = (v[2], v[3]);
    a <= c1 && a <= c2 && c1 < b && c2 < b && b <= c1 + c2 && c1 + c2 < a + d
}

fn fc3(v: &[i64], d: i64) -> bool {
    let (a, b) = (v[0].min(v[1]), v[0].max(v[1]));
    let c = &v[2..];
    let pairs = [c[0] + c[1], c[0] + c[2], c[1] + c[2]];
    let all = c[0] + c[1] + c[2];
    c.iter().all(|&x| a <= x && x < b) && pairs.iter().all(|&s| b <= s && s < a + d) && a + d <= all && all < b + d
}

fn h1(v: &[i64], d: i64) -> bool {
    let (a, b, c, dd) = (v[0], v[1], v[2], v[3]);
    let window = b.min(c) <= d - a && d - a < b.max(c);
    (a + c <= dd && a + b > d && a + b > 2 * dd)
        || (dd + d < a + c && a + b <= d && a + b <= 2 * dd)
        || (a + c - d <= dd && b <= dd && 2 * dd < a + b && window)
        || (dd < a + c && dd < b && a + b <= 2 * dd && window)
}

fn h4(v: &[i64], d: i64) -> bool {
    let (a, b, c, dd) = (v[0], v[1], v[2], v[3]);
    (a <= dd && dd < b && 2 * c < a + d && a + d <= 2 * c + dd) || (b <= dd && dd < a && a <= 2 * c && 2 * c + dd < a + d)
}

fn h5(v: &[i64], d: i64) -> bool {
    let (a, b, c) = (v[0], v[1], v[2]);
    let s = a + 2 * b;
    let mid = d < s && s <= 2 * d;
    (a <= c && mid && 3 * c < s && s <= 3 * c + d) || (c < a && mid && 3 * c - d < s && s <= 3 * c)
}

pub fn prose_lemmas() -> Vec<ProseLemma> {
    vec![
        ProseLemma { name: "FD n=2", family: Family::FD(2), condition: fd },
        ProseLemma { name: "FD n=3", family: Family::FD(3), condition: fd },
        ProseLemma { name: "F2", family: Family::FA(2), condition: f2 },
        ProseLemma { name: "F4", family: Family::FC(2), condition: f4 },
        ProseLemma { name: "FC n=3", family: Family::FC(3), condition: fc3 },
        ProseLemma { name: "H1", family: Family::H1, condition: h1 },
        ProseLemma { name: "H4", family: Family::H4, condition: h4 },
        ProseLemma { name: "H5", family: Family::H5, condition: h5 },
    ]
}

/// Grid comparison of a prose condition with a derived table.
#[derive(Debug, Clone, Default)]
pub struct GridCheck {
    pub points: usize,
    pub nonresonant: usize,
    pub maximal: usize,
    pub mismatch_count: usize,
    /// The first few mismatching parameter tuples.
    pub mismatches: Vec<Vec<Rational>>,
    /// Points where the integer floor computation disagreed with the
    /// rational one (checked on a subsample).
    pub route_errors: usize,
}

/// Visits every parameter tuple whose common denominator is exactly some
/// `d <= max_den`, comparing `condition` with membership of the floor
/// vector in `table`.
pub fn grid_check(lemma: &ProseLemma, sys: &GkzSystem, table: &InterlacingTable, max_den: i64) -> GridCheck {
    let family = lemma.family;
    let arity = family.arity();
    let (l, shift) = family.alpha_map();
    let mut out = GridCheck::default();
    for d in 1..=max_den {
        let mut v = vec![0i64; arity];
        loop {
            if v.iter().fold(d, |g, &x| g.gcd(&x)) == 1 {
                out.points += 1;
                // d * {alpha}
                let alpha: Vec<i64> =
                    l.iter().zip(&shift).map(|(row, s)| (row.iter().zip(&v).map(|(c, x)| c * x).sum::<i64>() + s * d).rem_euclid(d)).collect();
                let values: Vec<i64> = sys.facets.iter().map(|m| m.iter().zip(&alpha).map(|(c, x)| c * x).sum()).collect();
                if values.iter().all(|x| x % d != 0) {
                    out.nonresonant += 1;
                    let floors: Vec<i64> = values.iter().map(|x| x.div_euclid(d)).collect();
                    if out.points % 97 == 0 {
                        let exact: Vec<Rational> = alpha.iter().map(|&x| rat(x, d)).collect();
                        if sys.floor_vector(&exact) != floors || !sys.is_nonresonant(&exact) {
                            out.route_errors += 1;
                        }
                    }
                    let derived = table.contains(&floors);
                    out.maximal += derived as usize;
                    if derived != (lemma.condition)(&v, d) {
                        out.mismatch_count += 1;
                        if out.mismatches.len() < 10 {
                            out.mismatches.push(v.iter().map(|&x| rat(x, d)).collect());
                        }
                    }
                }
            }
            let mut k = 0;
            while k < arity {
                v[k] += 1;
                if v[k] < d {
                    break;
                }
                v[k] = 0;
                k += 1;
            }
            if k == arity {
                break;
            }
        }
    }
    out
}

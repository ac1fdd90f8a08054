//! GKZ systems: generator sets, facets, lattice of relations, volume,
//! resonance and transport along unimodular maps.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    cone_facets, column_hnf, determinant_i64, dot, dot_int_rat, floor_i64, frac, int, integer_kernel,
    integer_span_is_full, is_integer, mat_vec, normal_vector, rank, rational_inverse, solve_mixed_inequalities,
    to_i64, unimodular_inverse, vec_mat, ExactError, InequalitySystem, IntMatrix, IntVector, LinearForm,
    Rational,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GkzError {
    #[error("generators have inconsistent dimensions")]
    DimensionMismatch,
    #[error("generators do not span Z^{0}")]
    SpanDeficient(usize),
    #[error("no linear form takes the value 1 on every generator")]
    NoGrading,
    #[error("the grading form is not integral")]
    NonIntegralGrading,
    #[error("parameter vector has length {got}, expected {expected}")]
    ParameterLength { expected: usize, got: usize },
    #[error("map is not unimodular")]
    NotUnimodular,
    #[error("transport mismatch: {0}")]
    TransportMismatch(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Simplex of the placing triangulation together with the data needed to
/// write points in barycentric-like coordinates `lambda = adj * p / det`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub vertices: Vec<usize>,
    pub det: i64,
    pub adjugate: IntMatrix,
    /// Representatives of `Z^r / V Z^r`.
    pub coset_reps: Vec<IntVector>,
}

/// An A-hypergeometric system, immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GkzSystem {
    pub dim: usize,
    pub generators: Vec<IntVector>,
    /// The form `h` with `h(a_i) = 1`.
    pub grading: IntVector,
    pub facets: Vec<IntVector>,
    pub lattice: Vec<IntVector>,
    /// Normalized volume of the convex hull of the generators.
    pub volume: u64,
    pub cells: Vec<Cell>,
}

impl GkzSystem {
    pub fn build(generators: Vec<IntVector>) -> Result<Self, GkzError> {
        build_system(generators)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn check_params(&self, alpha: &[Rational]) -> Result<(), GkzError> {
        if alpha.len() != self.dim {
            return Err(GkzError::ParameterLength { expected: self.dim, got: alpha.len() });
        }
        Ok(())
    }

    pub fn facet_values(&self, alpha: &[Rational]) -> Vec<Rational> {
        self.facets.iter().map(|m| dot_int_rat(m, alpha)).collect()
    }

    /// `floor(m_j(alpha))` for every facet.
    pub fn floor_vector(&self, alpha: &[Rational]) -> Vec<i64> {
        self.facet_values(alpha).iter().map(floor_i64).collect()
    }

    /// True iff no facet form takes an integral value at `alpha`.
    pub fn is_nonresonant(&self, alpha: &[Rational]) -> bool {
        self.facet_values(alpha).iter().all(|v| !is_integer(v))
    }

    pub fn grading_value(&self, p: &[Rational]) -> Rational {
        dot_int_rat(&self.grading, p)
    }

    /// Whether `p` lies in the cone `C(A)`.
    pub fn contains(&self, p: &[Rational]) -> bool {
        self.facets.iter().all(|m| !dot_int_rat(m, p).is_negative())
    }

    /// All `x in Z^r` with `x + alpha in C(A)` and `h(x + alpha) < bound`,
    /// sorted lexicographically.
    pub fn lattice_offsets_below(&self, alpha: &[Rational], bound: i64) -> Vec<IntVector> {
        let mut out = BTreeSet::new();
        for cell in &self.cells {
            for lambda0 in self.parallelepiped_points(cell, alpha) {
                let base: Rational = lambda0.iter().sum();
                let room = int(bound) - base;
                if !room.is_positive() {
                    continue;
                }
                // Number of extra unit steps strictly below the room.
                let max_steps = to_i64(&(room.ceil().to_integer())) - 1;
                let mut n = vec![0i64; self.dim];
                compositions(self.dim, max_steps, &mut n, 0, &mut |steps| {
                    let lam: Vec<Rational> = lambda0.iter().zip(steps).map(|(l, s)| l + int(*s)).collect();
                    out.insert(self.offset_of(cell, &lam, alpha));
                });
            }
        }
        out.into_iter().collect()
    }

    /// Offsets `x` of the points of `alpha + Z^r` in the half-open fundamental
    /// parallelepipeds of the cells, sorted and deduplicated.
    pub fn parallelepiped_offsets(&self, alpha: &[Rational]) -> Vec<IntVector> {
        let mut out = BTreeSet::new();
        for cell in &self.cells {
            for lambda0 in self.parallelepiped_points(cell, alpha) {
                out.insert(self.offset_of(cell, &lambda0, alpha));
            }
        }
        out.into_iter().collect()
    }

    fn parallelepiped_points(&self, cell: &Cell, alpha: &[Rational]) -> Vec<Vec<Rational>> {
        let det = int(cell.det);
        cell.coset_reps
            .iter()
            .map(|y| {
                let shifted: Vec<Rational> = alpha.iter().zip(y).map(|(a, v)| a + int(*v)).collect();
                cell.adjugate.iter().map(|row| frac(&(dot_int_rat(row, &shifted) / &det))).collect()
            })
            .collect()
    }

    fn offset_of(&self, cell: &Cell, lambda: &[Rational], alpha: &[Rational]) -> IntVector {
        (0..self.dim)
            .map(|i| {
                let mut p = Rational::zero();
                for (l, &v) in lambda.iter().zip(&cell.vertices) {
                    let g = self.generators[v][i];
                    if g != 0 {
                        p += l * int(g);
                    }
                }
                let x = p - &alpha[i];
                debug_assert!(is_integer(&x));
                to_i64(&x.to_integer())
            })
            .collect()
    }
}

/// Calls `f` on every vector of `dim` nonnegative integers with sum at most `max`.
fn compositions(dim: usize, max: i64, n: &mut Vec<i64>, pos: usize, f: &mut dyn FnMut(&[i64])) {
    if max < 0 {
        return;
    }
    if pos == dim {
        f(n);
        return;
    }
    for v in 0..=max {
        n[pos] = v;
        compositions(dim, max - v, n, pos + 1, f);
    }
    n[pos] = 0;
}

/// Builds a system from generators spanning `Z^r` with a grading form.
pub fn build_system(generators: Vec<IntVector>) -> Result<GkzSystem, GkzError> {
    let dim = generators.first().map_or(0, |g| g.len());
    if dim == 0 || generators.iter().any(|g| g.len() != dim) {
        return Err(GkzError::DimensionMismatch);
    }
    if !integer_span_is_full(&generators, dim) {
        return Err(GkzError::SpanDeficient(dim));
    }
    let grading = solve_grading(&generators)?;
    let facets = cone_facets(&generators, dim)?;
    let lattice = integer_kernel(&generators);
    let cells = placing_triangulation(&generators, dim)?;
    let volume = cells.iter().map(|c| c.det.unsigned_abs()).sum();
    Ok(GkzSystem { dim, generators, grading, facets, lattice, volume, cells })
}

fn solve_grading(generators: &[IntVector]) -> Result<IntVector, GkzError> {
    let dim = generators[0].len();
    let mut basis: Vec<IntVector> = Vec::new();
    for g in generators {
        let mut trial = basis.clone();
        trial.push(g.clone());
        if rank(&trial) == trial.len() {
            basis = trial;
            if basis.len() == dim {
                break;
            }
        }
    }
    // h^T B = 1^T with B's columns the basis vectors, i.e. B^T h = 1.
    let bt: Vec<Vec<Rational>> = basis.iter().map(|g| g.iter().map(|&x| int(x)).collect()).collect();
    let inv = rational_inverse(&bt).ok_or(GkzError::NoGrading)?;
    let h: Vec<Rational> = inv.iter().map(|row| row.iter().sum()).collect();
    for g in generators {
        if dot_int_rat(g, &h) != Rational::one() {
            return Err(GkzError::NoGrading);
        }
    }
    if !h.iter().all(is_integer) {
        return Err(GkzError::NonIntegralGrading);
    }
    Ok(h.iter().map(|x| to_i64(x.numer())).collect())
}

fn make_cell(generators: &[IntVector], vertices: Vec<usize>) -> Cell {
    let r = vertices.len();
    let cols: Vec<IntVector> = vertices.iter().map(|&v| generators[v].clone()).collect();
    let det = determinant_i64(&cols);
    let m: Vec<Vec<Rational>> = (0..r).map(|i| cols.iter().map(|c| int(c[i])).collect()).collect();
    let inv = rational_inverse(&m).expect("cell is nonsingular");
    let adjugate = inv.iter().map(|row| row.iter().map(|x| to_i64(&(x * int(det)).to_integer())).collect()).collect();
    let rows: Vec<Vec<i64>> = (0..r).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let (h, _, _) = column_hnf(&rows);
    let diag: Vec<i64> = (0..r).map(|i| to_i64(&h[i][i])).collect();
    let mut coset_reps = vec![vec![0i64; r]];
    for (i, &d) in diag.iter().enumerate() {
        let mut next = Vec::new();
        for rep in &coset_reps {
            for v in 0..d {
                let mut y = rep.clone();
                y[i] = v;
                next.push(y);
            }
        }
        coset_reps = next;
    }
    Cell { vertices, det, adjugate, coset_reps }
}

/// Placing triangulation in the order the generators are given.
fn placing_triangulation(generators: &[IntVector], dim: usize) -> Result<Vec<Cell>, GkzError> {
    let mut first: Vec<usize> = Vec::new();
    for i in 0..generators.len() {
        let mut trial: Vec<IntVector> = first.iter().map(|&k| generators[k].clone()).collect();
        trial.push(generators[i].clone());
        if rank(&trial) == trial.len() {
            first.push(i);
            if first.len() == dim {
                break;
            }
        }
    }
    if first.len() < dim {
        return Err(ExactError::NotFullDimensional.into());
    }
    let mut simplices: Vec<Vec<usize>> = vec![first.clone()];
    // Boundary facets keyed by sorted vertex set, with inward normal.
    let mut boundary: HashMap<Vec<usize>, IntVector> = HashMap::new();
    let add_facets = |simplex: &[usize], boundary: &mut HashMap<Vec<usize>, IntVector>| {
        for skip in 0..simplex.len() {
            let mut facet: Vec<usize> = simplex.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
            facet.sort_unstable();
            if boundary.remove(&facet).is_some() {
                continue;
            }
            let vs: Vec<IntVector> = facet.iter().map(|&v| generators[v].clone()).collect();
            let mut n = normal_vector(&vs);
            if dot(&n, &generators[simplex[skip]]) < 0 {
                n.iter_mut().for_each(|x| *x = -*x);
            }
            boundary.insert(facet, n);
        }
    };
    add_facets(&first, &mut boundary);
    for p in 0..generators.len() {
        if first.contains(&p) {
            continue;
        }
        let mut visible: Vec<Vec<usize>> =
            boundary.iter().filter(|(_, n)| dot(n, &generators[p]) < 0).map(|(f, _)| f.clone()).collect();
        visible.sort();
        for facet in visible {
            boundary.remove(&facet);
            let mut simplex = facet.clone();
            simplex.push(p);
            // Only the facets through p are new; the visible facet is now interior.
            for skip in 0..facet.len() {
                let mut f: Vec<usize> = facet.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
                f.push(p);
                f.sort_unstable();
                if boundary.remove(&f).is_some() {
                    continue;
                }
                let vs: Vec<IntVector> = f.iter().map(|&v| generators[v].clone()).collect();
                let mut n = normal_vector(&vs);
                if dot(&n, &generators[facet[skip]]) < 0 {
                    n.iter_mut().for_each(|x| *x = -*x);
                }
                boundary.insert(f, n);
            }
            simplices.push(simplex);
        }
    }
    Ok(simplices.into_iter().map(|s| make_cell(generators, s)).collect())
}

/// Outcome of checking a proposed triangulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationReport {
    pub valid: bool,
    pub unimodular: bool,
    pub volume: u64,
    pub saturated: bool,
    pub failures: Vec<String>,
}

/// Checks that `simplices` (lists of generator vectors) triangulate `A`.
pub fn verify_triangulation(sys: &GkzSystem, simplices: &[Vec<IntVector>]) -> TriangulationReport {
    let r = sys.dim;
    let mut failures = Vec::new();
    let mut index_sets: Vec<Vec<usize>> = Vec::new();
    let mut volume = 0u64;
    let mut unimodular = true;
    for (k, s) in simplices.iter().enumerate() {
        let mut idx = Vec::new();
        for v in s {
            match sys.generators.iter().position(|g| g == v) {
                Some(i) => idx.push(i),
                None => failures.push(format!("simplex {k}: vertex {v:?} is not a generator")),
            }
        }
        if s.len() != r {
            failures.push(format!("simplex {k}: has {} vertices, expected {r}", s.len()));
            continue;
        }
        let d = determinant_i64(s);
        if d == 0 {
            failures.push(format!("simplex {k}: vertices are linearly dependent"));
            continue;
        }
        unimodular &= d.abs() == 1;
        volume += d.unsigned_abs();
        idx.sort_unstable();
        index_sets.push(idx);
    }
    if !failures.is_empty() {
        return TriangulationReport { valid: false, unimodular, volume, saturated: false, failures };
    }
    let used: BTreeSet<usize> = index_sets.iter().flatten().copied().collect();
    for (i, g) in sys.generators.iter().enumerate() {
        if !used.contains(&i) {
            failures.push(format!("coverage: generator {g:?} lies in no simplex"));
        }
    }
    let cells: Vec<Cell> = index_sets.iter().map(|s| make_cell(&sys.generators, s.clone())).collect();
    // Proper intersections: C(V_i) and C(V_j) meet in C(V_i cap V_j).
    for i in 0..cells.len() {
        for j in 0..cells.len() {
            if i == j {
                continue;
            }
            for (pos, &v) in cells[i].vertices.iter().enumerate() {
                if cells[j].vertices.contains(&v) {
                    continue;
                }
                let mut lp = InequalitySystem::new(r);
                for c in [&cells[i], &cells[j]] {
                    let s = c.det.signum();
                    for row in &c.adjugate {
                        lp.ge(form_of(&row.iter().map(|x| x * s).collect::<Vec<_>>(), 0));
                    }
                }
                let s = cells[i].det.signum();
                let row: Vec<i64> = cells[i].adjugate[pos].iter().map(|x| x * s).collect();
                lp.ge(form_of(&row, -cells[i].det.abs()));
                if solve_mixed_inequalities(&lp).is_feasible() {
                    failures.push(format!(
                        "intersection: simplices {i} and {j} overlap beyond their common face (generator {v})"
                    ));
                    break;
                }
            }
        }
    }
    // Every facet of every simplex is a boundary facet of C(A) or is shared
    // with a simplex on the other side.
    for (i, cell) in cells.iter().enumerate() {
        for (skip, &opp) in cell.vertices.iter().enumerate() {
            let facet: Vec<usize> = cell.vertices.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
            let vs: Vec<IntVector> = facet.iter().map(|&v| sys.generators[v].clone()).collect();
            let mut n = normal_vector(&vs);
            if dot(&n, &sys.generators[opp]) < 0 {
                n.iter_mut().for_each(|x| *x = -*x);
            }
            if sys.generators.iter().all(|g| dot(&n, g) >= 0) {
                if !sys.facets.contains(&n) {
                    failures.push(format!("boundary: facet of simplex {i} opposite {opp} is not a facet of C(A)"));
                }
                continue;
            }
            let neighbour = cells.iter().enumerate().any(|(j, c)| {
                j != i
                    && facet.iter().all(|v| c.vertices.contains(v))
                    && c.vertices.iter().any(|&w| !facet.contains(&w) && dot(&n, &sys.generators[w]) < 0)
            });
            if !neighbour {
                failures.push(format!("union: interior facet of simplex {i} opposite {opp} has no neighbour"));
            }
        }
    }
    if volume != sys.volume {
        failures.push(format!("volume {volume} differs from the placing triangulation volume {}", sys.volume));
    }
    let valid = failures.is_empty();
    TriangulationReport { valid, unimodular, volume, saturated: valid && unimodular, failures }
}

fn form_of(coeffs: &[i64], constant: i64) -> LinearForm {
    LinearForm::new(coeffs.iter().map(|&c| int(c)).collect(), int(constant))
}

/// Normalized volume of the convex hull of the generators.
pub fn normalized_volume(sys: &GkzSystem) -> u64 {
    sys.volume
}

/// Transports `(src, alpha)` along the unimodular map `f` (rows) onto the
/// generator list `target`, which must equal `f(A_src)` as a set. The target
/// facets are checked against `m o f^{-1}` for the source facets.
pub fn transport(
    f: &IntMatrix,
    src: &GkzSystem,
    target: &[IntVector],
    alpha: &[Rational],
) -> Result<(GkzSystem, Vec<Rational>), GkzError> {
    src.check_params(alpha)?;
    let r = src.dim;
    if f.len() != r || f.iter().any(|row| row.len() != r) {
        return Err(GkzError::DimensionMismatch);
    }
    let cols: Vec<IntVector> = (0..r).map(|j| f.iter().map(|row| row[j]).collect()).collect();
    if determinant_i64(&cols).abs() != 1 {
        return Err(GkzError::NotUnimodular);
    }
    let image: BTreeSet<IntVector> = src.generators.iter().map(|a| mat_vec(f, a)).collect();
    let wanted: BTreeSet<IntVector> = target.iter().cloned().collect();
    if image != wanted {
        let missing: Vec<_> = wanted.difference(&image).collect();
        let extra: Vec<_> = image.difference(&wanted).collect();
        return Err(GkzError::TransportMismatch(format!(
            "f(A_src) differs from A_dst: missing {missing:?}, extra {extra:?}"
        )));
    }
    let dst = build_system(target.to_vec())?;
    let inv = unimodular_inverse(f).ok_or(GkzError::NotUnimodular)?;
    let pulled: BTreeSet<IntVector> = src.facets.iter().map(|m| vec_mat(m, &inv)).collect();
    let facets: BTreeSet<IntVector> = dst.facets.iter().cloned().collect();
    if pulled != facets {
        return Err(GkzError::TransportMismatch("facet forms do not correspond".into()));
    }
    let beta: Vec<Rational> = f.iter().map(|row| dot_int_rat(row, alpha)).collect();
    Ok((dst, beta))
}

/// Nonnegative integer combinations of the generators with total weight at
/// most `level`, compared against all lattice points of the cone at those
/// levels. Returns the lattice points that are not combinations.
pub fn saturation_defects(sys: &GkzSystem, level: i64) -> Vec<IntVector> {
    let zero = vec![Rational::zero(); sys.dim];
    let points = sys.lattice_offsets_below(&zero, level + 1);
    let mut reachable: BTreeSet<IntVector> = BTreeSet::new();
    reachable.insert(vec![0; sys.dim]);
    let mut frontier: Vec<IntVector> = vec![vec![0; sys.dim]];
    for _ in 0..level {
        let mut next = Vec::new();
        for p in &frontier {
            for g in &sys.generators {
                let q: IntVector = p.iter().zip(g).map(|(a, b)| a + b).collect();
                if reachable.insert(q.clone()) {
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    points.into_iter().filter(|p| !reachable.contains(p)).collect()
}

/// Rational helper: `x` as a big integer if integral.
pub fn as_integer(x: &Rational) -> Option<BigInt> {
    is_integer(x).then(|| x.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn gauss() -> GkzSystem {
        build_system(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]]).unwrap()
    }

    #[test]
    fn gauss_system() {
        let s = gauss();
        assert_eq!(s.grading, vec![1, 1, 1]);
        assert_eq!(s.volume, 2);
        assert_eq!(s.lattice, vec![vec![-1, -1, 1, 1]]);
    }

    #[test]
    fn rejects_deficient_span() {
        assert_eq!(build_system(vec![vec![1, 0], vec![0, 2]]), Err(GkzError::SpanDeficient(2)));
    }

    #[test]
    fn resonance() {
        let s = gauss();
        // (a,b,c) = (1/2,1/6,1/3): alpha = (-1/2,-1/6,-2/3)
        assert!(s.is_nonresonant(&[rat(-1, 2), rat(-1, 6), rat(-2, 3)]));
        assert!(!s.is_nonresonant(&[rat(0, 1), rat(-1, 6), rat(-2, 3)]));
    }

    #[test]
    fn slab_contains_parallelepiped() {
        let s = gauss();
        let alpha = vec![rat(5, 6), rat(1, 6), rat(1, 3)];
        let slab = s.lattice_offsets_below(&alpha, 4);
        for x in s.parallelepiped_offsets(&alpha) {
            assert!(slab.contains(&x));
        }
    }

    #[test]
    fn single_simplex_fails_coverage() {
        let s = gauss();
        let rep = verify_triangulation(&s, &[vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]]);
        assert!(!rep.valid);
        assert!(rep.failures.iter().any(|f| f.starts_with("coverage")));
    }
}

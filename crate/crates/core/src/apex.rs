//! Apexpoints, signatures, the signature criterion for algebraicity,
//! interlacing-table derivation and the number-theoretic helpers used by the
//! classification proofs.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    common_denominator, dot, floor_i64, frac, int, is_integer, rat, serde_rational, solve_mixed_inequalities, to_i64,
    Feasibility, InequalitySystem, IntVector, LinearForm, Rational,
};
use crate::gkz::{GkzError, GkzSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApexError {
    #[error("parameters are resonant")]
    Resonant,
    #[error(transparent)]
    Gkz(#[from] GkzError),
    #[error("{0}")]
    Precondition(&'static str),
}

/// A point `p = x + alpha` of `(alpha + Z^r) cap C(A)` with `p - a_i` outside
/// the cone for every generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Apexpoint {
    pub offset: IntVector,
    #[serde(with = "serde_rational::vec")]
    pub point: Vec<Rational>,
    #[serde(with = "serde_rational::vec")]
    pub facet_values: Vec<Rational>,
}

/// Coordinatewise fractional parts.
pub fn reduce(alpha: &[Rational]) -> Vec<Rational> {
    alpha.iter().map(frac).collect()
}

/// Least common denominator of the coordinates.
pub fn denominator(alpha: &[Rational]) -> u64 {
    common_denominator(alpha).to_u64().expect("denominator fits in u64")
}

/// `{k t}` coordinatewise.
pub fn conjugate(t: &[Rational], k: i64) -> Vec<Rational> {
    t.iter().map(|x| frac(&(x * int(k)))).collect()
}

/// Units `k` of `Z/D`, in increasing order (`[1]` when `D = 1`).
pub fn units(d: u64) -> Vec<u64> {
    if d <= 1 {
        return vec![1];
    }
    (1..d).filter(|k| k.gcd(&d) == 1).collect()
}

/// Smallest `l >= 1` with `l = k (mod d)` and `gcd(l, d_tilde) = 1`.
pub fn lift_coprime(k: u64, d: u64, d_tilde: u64) -> Result<u64, ApexError> {
    if d == 0 || !d_tilde.is_multiple_of(d) {
        return Err(ApexError::Precondition("d must divide d_tilde"));
    }
    if k.gcd(&d) != 1 {
        return Err(ApexError::Precondition("k must be a unit mod d"));
    }
    let mut l = k % d;
    if l == 0 {
        l = d;
    }
    // Terminates: by the Chinese remainder theorem some l = k (mod d) avoids
    // every prime of d_tilde not dividing d.
    while l.gcd(&d_tilde) != 1 {
        l += d;
    }
    Ok(l)
}

/// Smallest `k` in `[1, q)` coprime to `q` with `{k r} in [t, 1/2)`, where
/// `q >= 3` is the denominator of `r`.
pub fn half_window_witness(r: &Rational, t: &Rational) -> Option<u64> {
    let q = r.denom().to_u64()?;
    if q < 3 {
        return None;
    }
    let half = rat(1, 2);
    (1..q).filter(|k| k.gcd(&q) == 1).find(|&k| {
        let v = frac(&(r * BigInt::from(k)));
        v >= *t && v < half
    })
}

/// Precomputed `m_j(a_i)` table used by the integer apex test.
struct ApexTest {
    facets: Vec<IntVector>,
    /// `m_j(a_i)` indexed `[i][j]`.
    values: Vec<Vec<i64>>,
}

impl ApexTest {
    fn new(sys: &GkzSystem) -> Self {
        let values = sys.generators.iter().map(|a| sys.facets.iter().map(|m| dot(m, a)).collect()).collect();
        Self { facets: sys.facets.clone(), values }
    }

    /// Whether `x + alpha` is an apexpoint, given `floors[j] = floor(m_j(alpha))`.
    fn is_apex(&self, x: &[i64], floors: &[i64]) -> bool {
        let mx: Vec<i64> = self.facets.iter().map(|m| dot(m, x)).collect();
        if mx.iter().zip(floors).any(|(v, f)| *v < -f) {
            return false;
        }
        self.values.iter().all(|mi| mx.iter().zip(mi).zip(floors).any(|((v, a), f)| *v < a - f))
    }
}

fn make_apexpoint(sys: &GkzSystem, x: IntVector, alpha: &[Rational]) -> Apexpoint {
    let point: Vec<Rational> = x.iter().zip(alpha).map(|(v, a)| a + int(*v)).collect();
    let facet_values = sys.facet_values(&point);
    Apexpoint { offset: x, point, facet_values }
}

/// All apexpoints, sorted by offset. The search domain is the slab
/// `{x + alpha in C(A), h(x + alpha) < |A|}`: a point at level `>= |A|` is a
/// nonnegative combination with some coefficient `>= 1`, so it is not an apex.
pub fn apexpoints(sys: &GkzSystem, alpha: &[Rational]) -> Result<Vec<Apexpoint>, ApexError> {
    sys.check_params(alpha)?;
    let test = ApexTest::new(sys);
    let floors = sys.floor_vector(alpha);
    Ok(sys
        .lattice_offsets_below(alpha, sys.len() as i64)
        .into_iter()
        .filter(|x| test.is_apex(x, &floors))
        .map(|x| make_apexpoint(sys, x, alpha))
        .collect())
}

/// Apexpoints from the definition: `p` such that `p - q` is not in `C(A)` for
/// every other `q` of the slab. Quadratic; meant for cross-checks.
pub fn apexpoints_by_definition(sys: &GkzSystem, alpha: &[Rational]) -> Result<Vec<IntVector>, ApexError> {
    sys.check_params(alpha)?;
    let pts = sys.lattice_offsets_below(alpha, sys.len() as i64);
    let diffs_in_cone = |p: &IntVector, q: &IntVector| {
        let d: Vec<i64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
        sys.facets.iter().all(|m| dot(m, &d) >= 0)
    };
    Ok(pts.iter().filter(|p| pts.iter().all(|q| q == *p || !diffs_in_cone(p, q))).cloned().collect())
}

/// Apexpoint offsets found among the fundamental-parallelepiped points of the
/// placing triangulation. Every apexpoint lies in some cell with all
/// coefficients in `[0, 1)`, so this is the complete set.
pub fn fundamental_apexpoints(sys: &GkzSystem, alpha: &[Rational]) -> Vec<IntVector> {
    let test = ApexTest::new(sys);
    let floors = sys.floor_vector(alpha);
    sys.parallelepiped_offsets(alpha).into_iter().filter(|x| test.is_apex(x, &floors)).collect()
}

/// Number of apexpoints.
pub fn signature(sys: &GkzSystem, alpha: &[Rational]) -> Result<u64, ApexError> {
    sys.check_params(alpha)?;
    Ok(fundamental_apexpoints(sys, alpha).len() as u64)
}

/// Per-conjugate signatures for the algebraicity criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicityReport {
    pub nonresonant: bool,
    pub volume: u64,
    pub denominator: u64,
    /// `(k, signature of {k alpha})`, in increasing `k`.
    pub signatures: Vec<(u64, u64)>,
    pub algebraic: bool,
    pub first_failure: Option<u64>,
}

/// Signature evaluator that memoises by floor vector; the signature depends
/// on `alpha` only through `floor(m_j(alpha))`.
pub struct SignatureOracle<'a> {
    sys: &'a GkzSystem,
    test: ApexTest,
    cache: RwLock<HashMap<Vec<i64>, u64>>,
}

impl<'a> SignatureOracle<'a> {
    pub fn new(sys: &'a GkzSystem) -> Self {
        Self { sys, test: ApexTest::new(sys), cache: RwLock::new(HashMap::new()) }
    }

    pub fn system(&self) -> &GkzSystem {
        self.sys
    }

    /// Signature at `nums / den` (coordinates already reduced into `[0, den)`).
    fn signature_scaled(&self, nums: &[i64], den: i64) -> u64 {
        let floors: Vec<i64> = self.test.facets.iter().map(|m| dot(m, nums).div_euclid(den)).collect();
        if let Some(&s) = self.cache.read().expect("cache lock").get(&floors) {
            return s;
        }
        let alpha: Vec<Rational> = nums.iter().map(|&n| rat(n, den)).collect();
        let s = self
            .sys
            .parallelepiped_offsets(&alpha)
            .into_iter()
            .filter(|x| self.test.is_apex(x, &floors))
            .count() as u64;
        self.cache.write().expect("cache lock").insert(floors, s);
        s
    }

    pub fn signature(&self, alpha: &[Rational]) -> u64 {
        let (nums, den) = scaled(alpha);
        let floors: Vec<i64> = alpha.iter().map(floor_i64).collect();
        // Shift back by the integer parts so the floors match alpha itself.
        let shifted: Vec<i64> = nums.iter().zip(&floors).map(|(n, f)| n + f * den).collect();
        self.signature_scaled(&shifted, den)
    }

    pub fn is_algebraic(&self, alpha: &[Rational]) -> Result<bool, ApexError> {
        Ok(self.report(alpha, false)?.algebraic)
    }

    /// Evaluates every conjugate `{k alpha}`, stopping at the first failure
    /// unless `full` is set.
    pub fn report(&self, alpha: &[Rational], full: bool) -> Result<AlgebraicityReport, ApexError> {
        self.sys.check_params(alpha)?;
        if !self.sys.is_nonresonant(alpha) {
            return Err(ApexError::Resonant);
        }
        let (nums, den) = scaled(alpha);
        let volume = self.sys.volume;
        let mut signatures = Vec::new();
        let mut first_failure = None;
        for k in units(den as u64) {
            let conj: Vec<i64> = nums.iter().map(|n| (n * k as i64).rem_euclid(den)).collect();
            let s = self.signature_scaled(&conj, den);
            signatures.push((k, s));
            if s != volume && first_failure.is_none() {
                first_failure = Some(k);
                if !full {
                    break;
                }
            }
        }
        Ok(AlgebraicityReport {
            nonresonant: true,
            volume,
            denominator: den as u64,
            signatures,
            algebraic: first_failure.is_none(),
            first_failure,
        })
    }
}

/// `alpha` reduced mod 1 as integer numerators over the common denominator.
pub fn scaled(alpha: &[Rational]) -> (Vec<i64>, i64) {
    let den = to_i64(&common_denominator(alpha));
    let nums = alpha
        .iter()
        .map(|a| {
            let f = frac(a);
            to_i64(&(f.numer() * (den / to_i64(f.denom())))).rem_euclid(den)
        })
        .collect();
    (nums, den)
}

/// Non-resonance plus maximal signature at every Galois conjugate.
pub fn is_algebraic(sys: &GkzSystem, alpha: &[Rational]) -> Result<bool, ApexError> {
    SignatureOracle::new(sys).is_algebraic(alpha)
}

pub fn algebraicity_report(sys: &GkzSystem, alpha: &[Rational], full: bool) -> Result<AlgebraicityReport, ApexError> {
    SignatureOracle::new(sys).report(alpha, full)
}

/// One floor-vector region of `[0,1)^r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub floors: Vec<i64>,
    #[serde(with = "serde_rational::vec")]
    pub witness: Vec<Rational>,
    pub signature: u64,
}

/// Floor-vectors of all non-resonant regions with maximal signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterlacingTable {
    pub facets: Vec<IntVector>,
    pub volume: u64,
    pub max_signature: u64,
    pub regions_explored: usize,
    /// Regions reaching `max_signature`, sorted by floor vector.
    pub maximal: Vec<Region>,
}

impl InterlacingTable {
    pub fn contains(&self, floors: &[i64]) -> bool {
        self.maximal.binary_search_by(|r| r.floors.as_slice().cmp(floors)).is_ok()
    }

    /// Indices of facets whose floor is the same in every region of `[0,1)^r`.
    pub fn constant_columns(&self) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&j| {
                let (lo, hi) = floor_range(&self.facets[j]);
                lo == hi
            })
            .collect()
    }

    /// Floor vectors restricted to the given forms (each must be a facet).
    pub fn project(&self, forms: &[IntVector]) -> Option<Vec<Vec<i64>>> {
        let idx: Option<Vec<usize>> = forms.iter().map(|f| self.facets.iter().position(|m| m == f)).collect();
        let idx = idx?;
        let mut out: Vec<Vec<i64>> = self.maximal.iter().map(|r| idx.iter().map(|&j| r.floors[j]).collect()).collect();
        out.sort();
        out.dedup();
        Some(out)
    }
}

/// Possible values of `floor(m(alpha))` for `alpha in [0,1)^r`.
fn floor_range(m: &[i64]) -> (i64, i64) {
    let neg: i64 = m.iter().filter(|&&c| c < 0).sum();
    let pos: i64 = m.iter().filter(|&&c| c > 0).sum();
    (neg, (pos - 1).max(neg))
}

/// Enumerates the floor-vector regions of `[0,1)^r` that contain
/// non-resonant points, computes the signature at a witness of each, and
/// keeps the maximal ones.
pub fn derive_interlacing(sys: &GkzSystem) -> InterlacingTable {
    let r = sys.dim;
    let mut base = InequalitySystem::new(r);
    for i in 0..r {
        let mut e = vec![Rational::zero(); r];
        e[i] = Rational::one();
        base.ge(LinearForm::new(e.clone(), Rational::zero()));
        base.lt(LinearForm::new(e, -Rational::one()));
    }
    let mut regions = Vec::new();
    let mut floors = Vec::new();
    search(sys, &base, &mut floors, None, &mut regions);
    let max_signature = regions.iter().map(|r: &Region| r.signature).max().unwrap_or(0);
    let regions_explored = regions.len();
    let mut maximal: Vec<Region> = regions.into_iter().filter(|r| r.signature == max_signature).collect();
    maximal.sort_by(|a, b| a.floors.cmp(&b.floors));
    InterlacingTable { facets: sys.facets.clone(), volume: sys.volume, max_signature, regions_explored, maximal }
}

fn search(
    sys: &GkzSystem,
    lp: &InequalitySystem,
    floors: &mut Vec<i64>,
    witness: Option<Vec<Rational>>,
    out: &mut Vec<Region>,
) {
    let j = floors.len();
    if j == sys.facets.len() {
        let witness = witness.expect("a leaf always has a witness");
        debug_assert_eq!(sys.floor_vector(&witness), *floors);
        let signature = fundamental_apexpoints(sys, &witness).len() as u64;
        out.push(Region { floors: floors.clone(), witness, signature });
        return;
    }
    let m = &sys.facets[j];
    let coeffs: Vec<Rational> = m.iter().map(|&c| int(c)).collect();
    let (lo, hi) = floor_range(m);
    // The branch through the parent's witness needs no feasibility test.
    let inherited = witness.as_ref().and_then(|w| {
        let value: Rational = m.iter().zip(w).map(|(c, x)| x * int(*c)).sum();
        (!is_integer(&value)).then(|| (floor_i64(&value), w.clone()))
    });
    for v in lo..=hi {
        let mut next = lp.clone();
        // v < m(alpha) < v + 1
        next.gt(LinearForm::new(coeffs.clone(), int(-v)));
        next.lt(LinearForm::new(coeffs.clone(), int(-v - 1)));
        let found = match &inherited {
            Some((f, w)) if *f == v => Some(w.clone()),
            _ => match solve_mixed_inequalities(&next) {
                Feasibility::Feasible(w) => Some(w),
                Feasibility::Infeasible => None,
            },
        };
        if let Some(w) = found {
            floors.push(v);
            search(sys, &next, floors, Some(w), out);
            floors.pop();
        }
    }
}

/// Whether `t` is `{k s}` for some unit `k` of its denominator.
pub fn same_orbit(s: &[Rational], t: &[Rational]) -> bool {
    let d = denominator(s);
    denominator(t) == d && units(d).into_iter().any(|k| conjugate(s, k as i64) == t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gkz::build_system;

    fn gauss() -> GkzSystem {
        build_system(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]]).unwrap()
    }

    fn gauss_alpha(a: Rational, b: Rational, c: Rational) -> Vec<Rational> {
        vec![-a, -b, c - int(1)]
    }

    #[test]
    fn gauss_signature() {
        let s = gauss();
        let alpha = gauss_alpha(rat(1, 6), rat(5, 6), rat(1, 3));
        assert_eq!(apexpoints(&s, &alpha).unwrap().len(), 2);
        assert_eq!(signature(&s, &alpha).unwrap(), 2);
    }

    #[test]
    fn gauss_algebraicity() {
        let s = gauss();
        assert!(is_algebraic(&s, &gauss_alpha(rat(1, 2), rat(1, 6), rat(1, 3))).unwrap());
        assert!(!is_algebraic(&s, &gauss_alpha(rat(1, 3), rat(1, 3), rat(2, 3))).unwrap_or(true));
        assert_eq!(is_algebraic(&s, &gauss_alpha(int(0), rat(1, 6), rat(1, 3))), Err(ApexError::Resonant));
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(conjugate(&[rat(1, 6), rat(5, 6), rat(1, 3)], 5), vec![rat(5, 6), rat(1, 6), rat(2, 3)]);
        assert_eq!(conjugate(&[rat(1, 2), rat(1, 6), rat(1, 3)], 5), vec![rat(1, 2), rat(5, 6), rat(2, 3)]);
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_coprime(5, 6, 12), Ok(5));
        assert_eq!(lift_coprime(3, 4, 60), Ok(7));
        assert_eq!(lift_coprime(1, 2, 8), Ok(1));
        assert!(lift_coprime(2, 4, 8).is_err());
        assert!(lift_coprime(1, 3, 8).is_err());
    }

    #[test]
    fn half_window_examples() {
        assert_eq!(half_window_witness(&rat(2, 7), &rat(1, 3)), Some(5));
        assert_eq!(half_window_witness(&rat(1, 3), &rat(1, 3)), Some(1));
        assert_eq!(half_window_witness(&rat(1, 4), &rat(2, 5)), None);
    }

    #[test]
    fn gauss_interlacing_table() {
        let t = derive_interlacing(&gauss());
        assert_eq!(t.max_signature, 2);
        assert!(!t.maximal.is_empty());
        for r in &t.maximal {
            assert_eq!(signature(&gauss(), &r.witness).unwrap(), 2);
        }
    }
}

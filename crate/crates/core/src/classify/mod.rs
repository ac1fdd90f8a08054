//! Classification of the non-resonant algebraic members of each family.
//!
//! Candidates come from the Gauss triples that algebraicity forces (or from
//! solutions of smaller families), and every candidate is then decided by
//! the signature criterion. Survivors lying on a declared one-parameter
//! family are reported symbolically; the rest form the sporadic set.

mod drivers;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::apex::{reduce, ApexError, SignatureOracle};
use crate::exact::{fmt_rational, frac, int, Rational};
use crate::families::{family_system, Family, FamilyError};
use crate::orbits::{apply, closure, group_orbit, representatives, tuple_cmp, Permutation};
use crate::reference::{sample_r, table, AffineFamily, ReferenceError, TableId};
use crate::schwarz::is_gauss_triple;

pub use drivers::tuples_with_denominator;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
    #[error(transparent)]
    Apex(#[from] ApexError),
    #[error("{0}")]
    Precondition(String),
    #[error("no reference table for {0}")]
    NoReference(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassifyConfig {
    /// Parametric families are checked at every `r` with this denominator
    /// bound.
    pub max_family_denominator: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { max_family_denominator: 24 }
    }
}

/// A one-parameter family of solutions together with its sampled check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParametricFamily {
    pub tuple: Vec<String>,
    /// Values of `r` (up to the sampling bound) where the member is resonant.
    pub resonant_at: Vec<String>,
    pub checked_up_to: u64,
    pub members_checked: usize,
    /// Non-resonant sampled members that failed the signature criterion.
    pub failures: Vec<String>,
    /// Survivors of the classification recognised as members.
    pub members_found: usize,
    #[serde(skip)]
    pub terms: AffineFamily,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    #[serde(with = "crate::exact::serde_rational::vec")]
    pub representative: Vec<Rational>,
    #[serde(serialize_with = "ser_tuples")]
    pub members: Vec<Vec<Rational>>,
}

fn ser_tuples<S: serde::Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for t in v {
        seq.serialize_element(&t.iter().map(fmt_rational).collect::<Vec<_>>())?;
    }
    seq.end()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    pub schema_version: u32,
    pub family: String,
    #[serde(skip)]
    pub kind: Option<Family>,
    pub parameters: Vec<String>,
    pub symmetry: Vec<Permutation>,
    pub families: Vec<ParametricFamily>,
    pub orbits: Vec<Orbit>,
    pub sporadic_count: usize,
    /// Sporadic solutions per anchor-type pattern (e.g. `"12"`: first anchor
    /// of type 1, second of type 2).
    pub case_counts: BTreeMap<String, usize>,
    pub candidates_tested: usize,
    /// Solutions added when closing the survivors under conjugation and
    /// symmetry; zero when candidate generation is complete.
    pub added_by_closure: usize,
}

impl SolutionSet {
    pub fn sporadic(&self) -> BTreeSet<Vec<Rational>> {
        self.orbits.iter().flat_map(|o| o.members.iter().cloned()).collect()
    }

    pub fn representatives(&self) -> Vec<Vec<Rational>> {
        self.orbits.iter().map(|o| o.representative.clone()).collect()
    }

    pub fn declared_families(&self) -> Vec<AffineFamily> {
        self.families.iter().map(|f| f.terms.clone()).collect()
    }

    /// Whether `t` is a sporadic solution or lies on a declared family.
    pub fn contains(&self, t: &[Rational]) -> bool {
        let t = reduce(t);
        self.sporadic().contains(&t) || self.families.iter().any(|f| family_parameter(&t, &f.terms, &self.symmetry).is_some())
    }

    /// Sporadic solutions plus family members for every `r` with
    /// denominator at most `max_den` (closed under the symmetry group).
    pub fn materialize(&self, max_den: u64) -> BTreeSet<Vec<Rational>> {
        let mut out = self.sporadic();
        for f in &self.families {
            for r in sample_r(max_den) {
                for p in &self.symmetry {
                    out.insert(invert(p, &f.terms.at(&r)));
                }
            }
        }
        out
    }
}

/// `u` with `apply(u, p) = t`.
fn invert(p: &[usize], t: &[Rational]) -> Vec<Rational> {
    let mut u = t.to_vec();
    for (i, &k) in p.iter().enumerate() {
        u[k] = t[i].clone();
    }
    u
}

/// A value of `r` with `g(t) = family(r)` for some symmetry `g`.
pub fn family_parameter(t: &[Rational], fam: &AffineFamily, group: &[Permutation]) -> Option<Rational> {
    let (i, term) = fam.0.iter().enumerate().find(|(_, term)| term.slope != 0)?;
    let s = term.slope;
    for g in group {
        let u = apply(t, g);
        for k in 0..s.abs() {
            let r = frac(&((&u[i] - &term.offset + int(k)) / int(s)));
            if fam.at(&r) == u {
                return Some(r);
            }
        }
    }
    None
}

/// Characterization of algebraic Appell `F4`: `(a,b,c1)` and `(a,b,c2)`
/// are Gauss triples and either `a+b = c1+c2` mod 1 or at least two of
/// `c1, c2, b-a` are `1/2` mod 1.
pub fn f4_characterization(a: &Rational, b: &Rational, c1: &Rational, c2: &Rational) -> bool {
    if !is_gauss_triple(a, b, c1) || !is_gauss_triple(a, b, c2) {
        return false;
    }
    let half = Rational::new(1.into(), 2.into());
    let sum_match = frac(&(a + b - c1 - c2)) == Rational::from_integer(0.into());
    let halves = [c1.clone(), c2.clone(), b - a].iter().filter(|x| frac(x) == half).count();
    sum_match || halves >= 2
}

/// Sufficient condition for `2^n` apexpoints of `F_C`: for all `I` of even
/// and `J` of odd size,
/// `b-1 <= sum_I c - |I|/2 < a <= sum_J c - (|J|-1)/2 < b`.
pub fn fc_signature_condition(a: &Rational, b: &Rational, c: &[Rational]) -> Result<bool, ClassifyError> {
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    let unit = |x: &Rational| *x >= zero && *x < one;
    if !(unit(a) && unit(b) && a <= b && c.iter().all(unit)) {
        return Err(ClassifyError::Precondition("requires 0 <= a <= b < 1 and every c_i in [0, 1)".into()));
    }
    if c.len() > 20 {
        return Err(ClassifyError::Precondition("at most 20 c-parameters".into()));
    }
    let half = Rational::new(1.into(), 2.into());
    for mask in 0u32..1 << c.len() {
        let size = mask.count_ones() as i64;
        let sum: Rational = c.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x.clone()).sum();
        let ok = if size % 2 == 0 {
            let v = sum - int(size) * &half;
            b - &one <= v && &v < a
        } else {
            let v = sum - int(size - 1) * &half;
            a <= &v && &v < b
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The reference table regenerated by a family's classification, if any.
pub fn reference_table(family: Family) -> Option<TableId> {
    Some(match family {
        Family::Gauss => TableId::Table2,
        Family::FD(2) => TableId::ThmF1,
        Family::FD(3) => TableId::ThmFD3,
        Family::FA(2) => TableId::ThmF2,
        Family::FB(2) => TableId::ThmF3,
        Family::FC(_) => {
            if family == Family::FC(2) {
                TableId::Table3
            } else {
                TableId::Table4
            }
        }
        Family::G1 => TableId::ThmG1,
        Family::G2 => TableId::ThmG2,
        Family::G3 => TableId::ThmG3,
        Family::H1 => TableId::ThmH1,
        Family::H2 => TableId::ThmH2,
        Family::H3 => TableId::ThmH3,
        Family::H4 => TableId::Table5,
        Family::H5 => TableId::ThmH5,
        Family::H6 => TableId::ThmH6,
        Family::H7 => TableId::Table6,
        _ => return None,
    })
}

/// Whether the table prints one minimal representative per orbit (as
/// opposed to listing every solution).
pub fn prints_representatives(id: TableId) -> bool {
    matches!(
        id,
        TableId::Table2
            | TableId::Table3
            | TableId::Table4
            | TableId::Table5
            | TableId::Table6
            | TableId::ThmF2
            | TableId::ThmF3
            | TableId::ThmH2
            | TableId::ThmH5
    )
}

/// Declared one-parameter families for a family, taken from its table and
/// padded with `1/2` for `F_C` in more than two variables.
pub fn declared_families(family: Family) -> Vec<AffineFamily> {
    let Some(id) = reference_table(family) else { return vec![] };
    let t = table(id);
    let pad = family.arity().saturating_sub(t.columns.len());
    t.families
        .iter()
        .map(|f| {
            let mut terms = f.0.clone();
            terms.extend(std::iter::repeat_n(
                crate::reference::AffineTerm::constant(Rational::new(1.into(), 2.into())),
                pad,
            ));
            AffineFamily(terms)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub table: String,
    pub family: String,
    pub pass: bool,
    pub families_match: bool,
    pub missing_families: Vec<String>,
    pub extra_families: Vec<String>,
    pub reference_closure: usize,
    pub computed_closure: usize,
    /// In the reference but not computed.
    #[serde(serialize_with = "ser_tuples")]
    pub missing: Vec<Vec<Rational>>,
    /// Computed but not in the reference.
    #[serde(serialize_with = "ser_tuples")]
    pub extra: Vec<Vec<Rational>>,
    /// Per printed row: whether it is a computed orbit representative (or,
    /// for full listings, a computed solution).
    pub rows_matched: Vec<bool>,
    /// Printed rows that are conjugates of another printed representative.
    #[serde(serialize_with = "ser_tuples")]
    pub redundant_rows: Vec<Vec<Rational>>,
}

/// Set difference between a classification and an embedded table, both at
/// the level of conjugation/symmetry closures and, for tables printing
/// minimal representatives, at the level of representatives.
pub fn compare_with_reference(s: &SolutionSet, id: TableId) -> Result<ComparisonReport, ClassifyError> {
    let t = crate::reference::load(id)?;
    compare_rows(s, id, &t.families, &t.tuples(), &t.printed())
}

/// [`compare_with_reference`] against explicitly given reference rows.
pub fn compare_rows(
    s: &SolutionSet,
    id: TableId,
    ref_families: &[AffineFamily],
    ref_tuples: &[Vec<Rational>],
    printed: &[Vec<Rational>],
) -> Result<ComparisonReport, ClassifyError> {
    let pad = s.parameters.len().saturating_sub(printed.first().map_or(0, |r| r.len()));
    let lift = |rows: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| {
                let mut r = reduce(r);
                r.extend(std::iter::repeat_n(Rational::new(1.into(), 2.into()), pad));
                r
            })
            .collect()
    };
    let ref_tuples = lift(ref_tuples);
    let mut printed = lift(printed);
    if pad > 0 {
        // Padded rows put the constant slots last; move them to the
        // smallest arrangement under the symmetry group.
        for r in &mut printed {
            *r = s.symmetry.iter().map(|g| apply(r, g)).min_by(|x, y| tuple_cmp(x, y)).unwrap_or_else(|| r.clone());
        }
    }

    let mut want_fams: BTreeSet<String> = BTreeSet::new();
    for f in ref_families {
        let mut terms = f.0.clone();
        terms.extend(std::iter::repeat_n(crate::reference::AffineTerm::constant(Rational::new(1.into(), 2.into())), pad));
        want_fams.insert(AffineFamily(terms).to_string());
    }
    let have_fams: BTreeSet<String> = s.families.iter().map(|f| f.terms.to_string()).collect();
    let missing_families: Vec<String> = want_fams.difference(&have_fams).cloned().collect();
    let extra_families: Vec<String> = have_fams.difference(&want_fams).cloned().collect();
    let sampled_ok = s.families.iter().all(|f| f.failures.is_empty());
    let families_match = missing_families.is_empty() && extra_families.is_empty() && sampled_ok;

    let reference = closure(ref_tuples.iter(), &s.symmetry);
    let computed = s.sporadic();
    let mut missing: Vec<Vec<Rational>> = reference.difference(&computed).cloned().collect();
    let mut extra: Vec<Vec<Rational>> = computed.difference(&reference).cloned().collect();

    let rows_matched: Vec<bool>;
    let mut redundant_rows: Vec<Vec<Rational>> = Vec::new();
    if prints_representatives(id) {
        let reps: BTreeSet<Vec<Rational>> = s.representatives().into_iter().collect();
        let printed_set: BTreeSet<Vec<Rational>> = printed.iter().cloned().collect();
        rows_matched = printed.iter().map(|r| reps.contains(r)).collect();
        for r in printed_set.difference(&reps) {
            let rep = s.orbits.iter().find(|o| o.members.contains(r)).map(|o| &o.representative);
            if rep.is_some_and(|rep| printed_set.contains(rep)) {
                redundant_rows.push(r.clone());
            } else if !missing.contains(r) {
                missing.push(r.clone());
            }
        }
        for r in reps.difference(&printed_set) {
            if !extra.contains(r) {
                extra.push(r.clone());
            }
        }
    } else {
        rows_matched = printed.iter().map(|r| computed.contains(r)).collect();
        // A full listing is given up to the symmetry group only.
        let listed: BTreeSet<Vec<Rational>> = ref_tuples.iter().flat_map(|t| s.symmetry.iter().map(move |g| apply(t, g))).collect();
        for r in listed.symmetric_difference(&reference) {
            if !missing.contains(r) {
                missing.push(r.clone());
            }
        }
    }
    missing.sort_by(|a, b| tuple_cmp(a, b));
    extra.sort_by(|a, b| tuple_cmp(a, b));
    let pass = families_match && missing.is_empty() && extra.is_empty();
    Ok(ComparisonReport {
        table: id.name().to_string(),
        family: s.family.clone(),
        pass,
        families_match,
        missing_families,
        extra_families,
        reference_closure: reference.len(),
        computed_closure: computed.len(),
        missing,
        extra,
        rows_matched,
        redundant_rows,
    })
}

type Cache = Mutex<HashMap<(Family, ClassifyConfig), Arc<SolutionSet>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Classifies a family. Results are memoised per configuration.
pub fn classify_family(family: Family, config: &ClassifyConfig) -> Result<Arc<SolutionSet>, ClassifyError> {
    if let Some(s) = cache().lock().expect("cache lock").get(&(family, *config)) {
        return Ok(s.clone());
    }
    let s = Arc::new(drivers::run(family, config)?);
    cache().lock().expect("cache lock").insert((family, *config), s.clone());
    Ok(s)
}

/// A candidate tuple with a tag describing the proof case it comes from.
pub(crate) struct Candidate {
    pub tuple: Vec<Rational>,
    pub tag: String,
}

/// Decides candidates, splits survivors into declared families and
/// sporadic orbits, and samples the declared families.
pub(crate) fn finish(
    family: Family,
    candidates: Vec<Candidate>,
    config: &ClassifyConfig,
) -> Result<SolutionSet, ClassifyError> {
    let sys = family_system(family)?;
    let oracle = SignatureOracle::new(&sys);
    let group = family.symmetry_group();
    let declared = declared_families(family);

    let mut unique: BTreeMap<Vec<Rational>, String> = BTreeMap::new();
    for c in candidates {
        unique.entry(reduce(&c.tuple)).or_insert(c.tag);
    }
    let tested = unique.len();
    let decide = |t: &Vec<Rational>| -> Result<bool, ClassifyError> {
        let alpha = family.alpha(t)?;
        if !sys.is_nonresonant(&alpha) {
            return Ok(false);
        }
        Ok(oracle.is_algebraic(&alpha)?)
    };
    let entries: Vec<(Vec<Rational>, String)> = unique.into_iter().collect();
    let verdicts: Vec<bool> = entries.par_iter().map(|(t, _)| decide(t)).collect::<Result<_, _>>()?;
    let survivors: Vec<(Vec<Rational>, String)> =
        entries.into_iter().zip(verdicts).filter(|(_, ok)| *ok).map(|(e, _)| e).collect();

    let mut members_found = vec![0usize; declared.len()];
    let mut sporadic: BTreeMap<Vec<Rational>, String> = BTreeMap::new();
    for (t, tag) in survivors {
        match declared.iter().position(|f| family_parameter(&t, f, &group).is_some()) {
            Some(k) => members_found[k] += 1,
            None => {
                sporadic.insert(t, tag);
            }
        }
    }

    let closed = closure(sporadic.keys(), &group);
    let mut added = 0;
    for t in &closed {
        if !sporadic.contains_key(t) {
            if !decide(t)? {
                return Err(ClassifyError::Precondition(format!(
                    "closure member {} of {family} fails the criterion",
                    crate::exact::Tuple(t)
                )));
            }
            sporadic.insert(t.clone(), "closure".into());
            added += 1;
        }
    }

    let mut case_counts: BTreeMap<String, usize> = BTreeMap::new();
    for tag in sporadic.values() {
        *case_counts.entry(tag.clone()).or_default() += 1;
    }

    let reps = representatives(sporadic.keys(), &group);
    let orbits: Vec<Orbit> = reps
        .into_iter()
        .map(|rep| {
            let mut members: Vec<Vec<Rational>> = group_orbit(&rep, &group).into_iter().collect();
            members.sort_by(|a, b| tuple_cmp(a, b));
            Orbit { representative: rep, members }
        })
        .collect();

    let families = declared
        .iter()
        .zip(members_found)
        .map(|(f, found)| sample_family(family, f, config, &sys, &oracle, found))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(SolutionSet {
        schema_version: SCHEMA_VERSION,
        family: family.to_string(),
        kind: Some(family),
        parameters: family.param_names(),
        symmetry: group,
        families,
        sporadic_count: sporadic.len(),
        orbits,
        case_counts,
        candidates_tested: tested,
        added_by_closure: added,
    })
}

fn sample_family(
    family: Family,
    terms: &AffineFamily,
    config: &ClassifyConfig,
    sys: &crate::gkz::GkzSystem,
    oracle: &SignatureOracle<'_>,
    members_found: usize,
) -> Result<ParametricFamily, ClassifyError> {
    let mut resonant_at = Vec::new();
    let mut failures = Vec::new();
    let mut checked = 0;
    for r in sample_r(config.max_family_denominator) {
        let t = terms.at(&r);
        let alpha = family.alpha(&t)?;
        if !sys.is_nonresonant(&alpha) {
            resonant_at.push(fmt_rational(&r));
            continue;
        }
        checked += 1;
        if !oracle.is_algebraic(&alpha)? {
            failures.push(fmt_rational(&r));
        }
    }
    Ok(ParametricFamily {
        tuple: terms.tokens(),
        resonant_at,
        checked_up_to: config.max_family_denominator,
        members_checked: checked,
        failures,
        members_found,
        terms: terms.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn q(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(p, d)| rat(p, d)).collect()
    }

    #[test]
    fn f4_examples() {
        let t = q(&[(1, 4), (3, 4), (1, 2), (1, 3)]);
        assert!(f4_characterization(&t[0], &t[1], &t[2], &t[3]));
        let t = q(&[(1, 6), (5, 6), (1, 3), (2, 3)]);
        assert!(f4_characterization(&t[0], &t[1], &t[2], &t[3]));
        let t = q(&[(1, 5), (2, 5), (1, 3), (1, 3)]);
        assert!(!f4_characterization(&t[0], &t[1], &t[2], &t[3]));
    }

    #[test]
    fn fc_condition_examples() {
        let c = q(&[(1, 2), (1, 3), (1, 2)]);
        assert_eq!(fc_signature_condition(&rat(1, 4), &rat(3, 4), &c), Ok(true));
        assert_eq!(fc_signature_condition(&rat(1, 4), &rat(3, 4), &[]), Ok(true));
        assert_eq!(fc_signature_condition(&rat(0, 1), &rat(3, 4), &[]), Ok(false));
        assert!(fc_signature_condition(&rat(3, 4), &rat(1, 4), &c).is_err());
    }

    #[test]
    fn family_membership() {
        let fam = AffineFamily::parse(&["r", "r+1/2", "2r"]).unwrap();
        let swap = crate::orbits::permutation_group(3, &[vec![1, 0, 2]]);
        assert_eq!(family_parameter(&q(&[(1, 3), (5, 6), (2, 3)]), &fam, &swap), Some(rat(1, 3)));
        // Directly the member at r = 5/6, and the swap of the member at 1/3.
        assert_eq!(family_parameter(&q(&[(5, 6), (1, 3), (2, 3)]), &fam, &swap), Some(rat(5, 6)));
        assert_eq!(family_parameter(&q(&[(5, 6), (1, 3), (2, 3)]), &fam, &[vec![1, 0, 2]]), Some(rat(1, 3)));
        assert_eq!(family_parameter(&q(&[(1, 3), (5, 6), (1, 3)]), &fam, &swap), None);
        let dbl = AffineFamily::parse(&["-2r", "r"]).unwrap();
        assert_eq!(family_parameter(&q(&[(1, 3), (1, 3)]), &dbl, &[vec![0, 1]]), Some(rat(1, 3)));
    }
}

//! The Appell, Lauricella and Horn families as GKZ systems: point
//! configurations, parameter maps, declared isomorphisms, restrictions and
//! the Gauss triples that algebraicity forces.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apex::reduce;
use crate::exact::{dot, frac, int, mat_vec, rat, unimodular_inverse, IntMatrix, IntVector, Rational};
use crate::gkz::{build_system, transport, GkzError, GkzSystem};
use crate::orbits::{permutation_group, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("family {family} needs n >= {min}, got {n}")]
    Arity { family: String, min: usize, n: usize },
    #[error("family {0} takes no arity")]
    UnexpectedArity(String),
    #[error("family {family} takes {expected} parameters, got {got}")]
    ParameterCount { family: String, expected: usize, got: usize },
    #[error("family {family} has no restriction for index {index}")]
    NoRestriction { family: String, index: usize },
    #[error(transparent)]
    Gkz(#[from] GkzError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Gauss,
    FD(usize),
    FA(usize),
    FB(usize),
    FC(usize),
    G1,
    G2,
    G3,
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    H7,
}

/// A declared unimodular map carrying a source family onto a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Isomorphism {
    pub source: Family,
    pub target: Family,
    /// Rows of `f`.
    pub map: IntMatrix,
    /// The formula as printed in the literature, when it differs from `map`.
    pub printed: Option<IntMatrix>,
}

fn e(i: usize, r: usize) -> IntVector {
    let mut v = vec![0; r];
    v[i - 1] = 1;
    v
}

fn comb(r: usize, terms: &[(i64, usize)]) -> IntVector {
    let mut v = vec![0; r];
    for &(c, i) in terms {
        v[i - 1] += c;
    }
    v
}

fn basis(r: usize) -> Vec<IntVector> {
    (1..=r).map(|i| e(i, r)).collect()
}

impl Family {
    /// Every family at its default arity, plus the Lauricella families for
    /// `n = 2..=max_n`.
    pub fn catalogue(max_n: usize) -> Vec<Family> {
        let mut out = vec![Family::Gauss];
        for n in 2..=max_n {
            out.extend([Family::FD(n), Family::FA(n), Family::FB(n), Family::FC(n)]);
        }
        out.extend([
            Family::G1,
            Family::G2,
            Family::G3,
            Family::H1,
            Family::H2,
            Family::H3,
            Family::H4,
            Family::H5,
            Family::H6,
            Family::H7,
        ]);
        out
    }

    /// Parses names such as `F4`, `FC`, `F_C`, `H7`, `Gauss`; Lauricella
    /// names take `n` (default 2 for `F1`..`F4`).
    pub fn parse(name: &str, n: Option<usize>) -> Result<Family, FamilyError> {
        let key = name.trim().to_ascii_uppercase().replace('_', "");
        let lauricella = |ctor: fn(usize) -> Family, n: Option<usize>| -> Result<Family, FamilyError> {
            let n = n.ok_or(FamilyError::Arity { family: name.to_string(), min: 2, n: 0 })?;
            if n < 2 {
                return Err(FamilyError::Arity { family: name.to_string(), min: 2, n });
            }
            Ok(ctor(n))
        };
        let fixed = |f: Family| -> Result<Family, FamilyError> {
            match n {
                None => Ok(f),
                Some(_) => Err(FamilyError::UnexpectedArity(name.to_string())),
            }
        };
        let two = |ctor: fn(usize) -> Family| -> Result<Family, FamilyError> {
            match n {
                None | Some(2) => Ok(ctor(2)),
                Some(_) => Err(FamilyError::UnexpectedArity(name.to_string())),
            }
        };
        match key.as_str() {
            "GAUSS" | "F" | "2F1" => fixed(Family::Gauss),
            "F1" => two(Family::FD),
            "F2" => two(Family::FA),
            "F3" => two(Family::FB),
            "F4" => two(Family::FC),
            "FD" => lauricella(Family::FD, n),
            "FA" => lauricella(Family::FA, n),
            "FB" => lauricella(Family::FB, n),
            "FC" => lauricella(Family::FC, n),
            "G1" => fixed(Family::G1),
            "G2" => fixed(Family::G2),
            "G3" => fixed(Family::G3),
            "H1" => fixed(Family::H1),
            "H2" => fixed(Family::H2),
            "H3" => fixed(Family::H3),
            "H4" => fixed(Family::H4),
            "H5" => fixed(Family::H5),
            "H6" => fixed(Family::H6),
            "H7" => fixed(Family::H7),
            _ => Err(FamilyError::UnknownFamily(name.to_string())),
        }
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        match *self {
            Family::Gauss => 1,
            Family::FD(n) | Family::FA(n) | Family::FB(n) | Family::FC(n) => n,
            _ => 2,
        }
    }

    /// Ambient dimension `r`.
    pub fn dim(&self) -> usize {
        match *self {
            Family::Gauss => 3,
            Family::FD(n) | Family::FC(n) => n + 2,
            Family::FA(n) | Family::FB(n) => 2 * n + 1,
            Family::G1 | Family::H3 | Family::H5 | Family::H6 => 3,
            Family::G2 | Family::H1 | Family::H4 | Family::H7 => 4,
            Family::G3 => 2,
            Family::H2 => 5,
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        let idx = |p: &str, n: usize| (1..=n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        match *self {
            Family::Gauss => s(&["a", "b", "c"]),
            Family::FD(n) => [s(&["a"]), idx("b", n), s(&["c"])].concat(),
            Family::FA(n) => [s(&["a"]), idx("b", n), idx("c", n)].concat(),
            Family::FB(n) => [idx("a", n), idx("b", n), s(&["c"])].concat(),
            Family::FC(n) => [s(&["a", "b"]), idx("c", n)].concat(),
            Family::G1 => s(&["a", "b1", "b2"]),
            Family::G2 => s(&["a1", "a2", "b1", "b2"]),
            Family::G3 => s(&["a1", "a2"]),
            Family::H1 | Family::H4 | Family::H7 => s(&["a", "b", "c", "d"]),
            Family::H2 => s(&["a", "b", "c", "d", "e"]),
            Family::H3 | Family::H5 | Family::H6 => s(&["a", "b", "c"]),
        }
    }

    pub fn arity(&self) -> usize {
        self.param_names().len()
    }

    /// The point configuration `A`.
    pub fn generators(&self) -> Vec<IntVector> {
        let r = self.dim();
        let mut a = basis(r);
        match *self {
            Family::Gauss => a.push(comb(r, &[(1, 1), (1, 2), (-1, 3)])),
            Family::FD(n) => a.extend((1..=n).map(|i| comb(r, &[(1, 1), (1, i + 1), (-1, n + 2)]))),
            Family::FA(n) => a.extend((1..=n).map(|i| comb(r, &[(1, 1), (1, i + 1), (-1, n + i + 1)]))),
            Family::FB(n) => a.extend((1..=n).map(|i| comb(r, &[(1, i), (1, n + i), (-1, 2 * n + 1)]))),
            Family::FC(n) => a.extend((1..=n).map(|i| comb(r, &[(1, 1), (1, 2), (-1, i + 2)]))),
            Family::G1 => a.extend([comb(r, &[(1, 1), (-1, 2), (1, 3)]), comb(r, &[(1, 1), (1, 2), (-1, 3)])]),
            Family::G2 => a.extend([comb(r, &[(1, 1), (-1, 3), (1, 4)]), comb(r, &[(1, 2), (1, 3), (-1, 4)])]),
            Family::G3 => {
                a = vec![vec![1, 1], vec![0, 1], vec![-1, 1], vec![2, 1]];
            }
            Family::H1 => a.extend([comb(r, &[(1, 1), (1, 2), (-1, 4)]), comb(r, &[(-1, 1), (1, 2), (1, 3)])]),
            Family::H2 => a.extend([comb(r, &[(1, 1), (1, 2), (-1, 5)]), comb(r, &[(-1, 1), (1, 3), (1, 4)])]),
            Family::H3 => a.extend([comb(r, &[(2, 1), (-1, 3)]), comb(r, &[(1, 1), (1, 2), (-1, 3)])]),
            Family::H4 => a.extend([comb(r, &[(2, 1), (-1, 3)]), comb(r, &[(1, 1), (1, 2), (-1, 4)])]),
            Family::H5 => a.extend([comb(r, &[(2, 1), (-1, 2)]), comb(r, &[(1, 1), (1, 2), (-1, 3)])]),
            Family::H6 => a.extend([comb(r, &[(2, 1), (-1, 2)]), comb(r, &[(-1, 1), (1, 2), (1, 3)])]),
            Family::H7 => a.extend([comb(r, &[(2, 1), (-1, 4)]), comb(r, &[(-1, 1), (1, 2), (1, 3)])]),
        }
        a
    }

    /// `alpha = L p + shift` for classical parameters `p`; returns `(L, shift)`.
    pub fn alpha_map(&self) -> (IntMatrix, IntVector) {
        let r = self.dim();
        let mut l = vec![vec![0; r]; r];
        let mut shift = vec![0; r];
        // Coordinates carrying `c - 1` style entries.
        let positive: Vec<usize> = match *self {
            Family::Gauss => vec![2],
            Family::FD(n) => vec![n + 1],
            Family::FA(n) => (n + 1..=2 * n).collect(),
            Family::FB(n) => vec![2 * n],
            Family::FC(n) => (2..n + 2).collect(),
            Family::G1 | Family::G2 | Family::G3 | Family::H6 => vec![],
            Family::H1 | Family::H7 => vec![3],
            Family::H2 => vec![4],
            Family::H3 | Family::H5 => vec![2],
            Family::H4 => vec![2, 3],
        };
        for (i, row) in l.iter_mut().enumerate() {
            if positive.contains(&i) {
                row[i] = 1;
                shift[i] = -1;
            } else {
                row[i] = -1;
            }
        }
        if *self == Family::G3 {
            l = vec![vec![-1, 0], vec![-1, -1]];
        }
        (l, shift)
    }

    pub fn check_arity(&self, params: &[Rational]) -> Result<(), FamilyError> {
        if params.len() != self.arity() {
            return Err(FamilyError::ParameterCount { family: self.to_string(), expected: self.arity(), got: params.len() });
        }
        Ok(())
    }

    /// Exact `alpha` (not reduced).
    pub fn alpha(&self, params: &[Rational]) -> Result<Vec<Rational>, FamilyError> {
        self.check_arity(params)?;
        let (l, shift) = self.alpha_map();
        Ok(l.iter()
            .zip(&shift)
            .map(|(row, s)| row.iter().zip(params).map(|(c, p)| p * int(*c)).sum::<Rational>() + int(*s))
            .collect())
    }

    /// Classical parameters mod 1 from `alpha`.
    pub fn params_from_alpha(&self, alpha: &[Rational]) -> Vec<Rational> {
        let (l, shift) = self.alpha_map();
        let inv = unimodular_inverse(&l).expect("alpha maps are unimodular");
        let centred: Vec<Rational> = alpha.iter().zip(&shift).map(|(a, s)| a - int(*s)).collect();
        inv.iter().map(|row| frac(&row.iter().zip(&centred).map(|(c, x)| x * int(*c)).sum::<Rational>())).collect()
    }

    /// Closed-form normalized volume.
    pub fn expected_volume(&self) -> u64 {
        match *self {
            Family::Gauss => 2,
            Family::FD(n) => n as u64 + 1,
            Family::FA(n) | Family::FB(n) | Family::FC(n) => 1 << n,
            Family::G1 | Family::G2 | Family::G3 | Family::H3 | Family::H6 => 3,
            Family::H1 | Family::H2 | Family::H4 | Family::H5 | Family::H7 => 4,
        }
    }

    /// Declared isomorphism from a source family, if the family is obtained
    /// by transport.
    pub fn isomorphism(&self) -> Option<Isomorphism> {
        let iso = |source: Family, map: IntMatrix, printed: Option<IntMatrix>| {
            Some(Isomorphism { source, target: *self, map, printed })
        };
        match *self {
            Family::G2 => iso(Family::FD(2), vec![vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 1, 1], vec![1, 0, -1, 0]], None),
            Family::H2 => iso(
                Family::FA(2),
                vec![
                    vec![1, 0, -1, 0, 0],
                    vec![0, 1, 0, 0, 0],
                    vec![0, 0, 1, 0, 1],
                    vec![0, 0, 1, 0, 0],
                    vec![0, 0, 0, 1, 0],
                ],
                Some(vec![
                    vec![1, 0, 1, 0, 0],
                    vec![0, 1, 0, 0, 0],
                    vec![0, 0, 1, 0, 1],
                    vec![0, 0, 1, 0, 0],
                    vec![0, 0, 0, 1, 0],
                ]),
            ),
            Family::H3 => iso(Family::G1, vec![vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, -1]], None),
            Family::H6 => iso(Family::G1, vec![vec![1, -1, 0], vec![0, 1, 0], vec![0, 1, 1]], None),
            Family::H7 => iso(Family::H4, vec![vec![1, -1, 0, 0], vec![0, 1, 0, 0], vec![0, 1, 0, 1], vec![0, 0, 1, 0]], None),
            Family::FB(n) => {
                let r = 2 * n + 1;
                let mut f = vec![vec![0; r]; r];
                for k in 1..=n {
                    f[k - 1][k] = 1;
                    f[k - 1][n + k] = 1;
                    f[n + k - 1][k] = 1;
                }
                f[2 * n][0] = 1;
                for k in 2..=n + 1 {
                    f[2 * n][k - 1] = -1;
                }
                iso(Family::FA(n), f, None)
            }
            _ => None,
        }
    }

    /// Coordinate permutations of the classical parameters that preserve
    /// the function up to a swap of variables, as a full group.
    pub fn symmetry_group(&self) -> Vec<Permutation> {
        let len = self.arity();
        let swap = |i: usize, j: usize| {
            let mut p: Permutation = (0..len).collect();
            p.swap(i, j);
            p
        };
        let gens: Vec<Permutation> = match *self {
            Family::Gauss => vec![swap(0, 1)],
            Family::FD(n) => (1..n).map(|i| swap(i, i + 1)).collect(),
            Family::FA(n) => (1..n)
                .map(|i| {
                    let mut p = swap(i, i + 1);
                    p.swap(n + i, n + i + 1);
                    p
                })
                .collect(),
            Family::FB(n) => {
                let mut gens: Vec<Permutation> = (0..n - 1)
                    .map(|i| {
                        let mut p = swap(i, i + 1);
                        p.swap(n + i, n + i + 1);
                        p
                    })
                    .collect();
                let mut ab: Permutation = (0..len).collect();
                for i in 0..n {
                    ab.swap(i, n + i);
                }
                gens.push(ab);
                gens
            }
            Family::FC(n) => std::iter::once(swap(0, 1)).chain((2..n + 1).map(|i| swap(i, i + 1))).collect(),
            Family::G2 => vec![vec![1, 0, 3, 2]],
            Family::H2 => vec![swap(2, 3)],
            Family::H7 => vec![swap(1, 2)],
            _ => vec![],
        };
        permutation_group(len, &gens)
    }

    /// Gauss triples that must be irreducible and algebraic whenever the
    /// family is non-resonant and algebraic at `params`.
    pub fn necessary_gauss_triples(&self, params: &[Rational]) -> Result<Vec<Vec<Rational>>, FamilyError> {
        self.check_arity(params)?;
        let p = reduce(params);
        let t = |a: &Rational, b: &Rational, c: &Rational| vec![frac(a), frac(b), frac(c)];
        let half = rat(1, 2);
        Ok(match *self {
            Family::Gauss => vec![p.clone()],
            Family::FD(n) => {
                let (a, c) = (&p[0], &p[n + 1]);
                let mut out: Vec<Vec<Rational>> = (1..=n).map(|i| t(a, &p[i], c)).collect();
                for i in 1..=n {
                    for j in i + 1..=n {
                        out.push(t(a, &(&p[i] + &p[j]), c));
                    }
                }
                out
            }
            Family::FA(n) => {
                let a = &p[0];
                let mut out: Vec<Vec<Rational>> = (1..=n).map(|i| t(a, &p[i], &p[n + i])).collect();
                for i in 1..=n {
                    for j in 1..=n {
                        if i != j {
                            out.push(t(&(a - &p[n + j]), &p[i], &p[n + i]));
                        }
                    }
                }
                out
            }
            Family::FB(n) => (0..n).map(|i| t(&p[i], &p[n + i], &p[2 * n])).collect(),
            Family::FC(n) => (2..n + 2).map(|i| t(&p[0], &p[1], &p[i])).collect(),
            Family::G1 => vec![t(&p[0], &p[1], &(&p[0] + &p[1] + &p[2]))],
            Family::G3 => vec![],
            Family::H1 => vec![t(&p[0], &p[1], &p[3]), t(&(&p[1] - &p[3]), &p[2], &(&p[3] - &p[0]))],
            Family::H4 => vec![
                t(&(&p[0] * &half), &((&p[0] + int(1)) * &half), &p[2]),
                t(&p[0], &p[1], &p[3]),
                t(&p[1], &(&p[0] - &p[2] * int(2)), &p[3]),
            ],
            Family::H5 => vec![p.clone()],
            Family::G2 | Family::H2 | Family::H3 | Family::H6 | Family::H7 => {
                let iso = self.isomorphism().expect("transported family");
                let src = pull_back(&iso, &p)?;
                iso.source.necessary_gauss_triples(&src)?
            }
        })
    }

    /// Drops variable `i` (1-based) by setting it to zero.
    pub fn restrict(&self, params: &[Rational], i: usize) -> Result<(Family, Vec<Rational>), FamilyError> {
        self.check_arity(params)?;
        let none = || FamilyError::NoRestriction { family: self.to_string(), index: i };
        let n = self.n();
        if i == 0 || i > n {
            return Err(none());
        }
        let p = params;
        let keep = |drop: &[usize]| -> Vec<Rational> {
            p.iter().enumerate().filter(|(k, _)| !drop.contains(k)).map(|(_, x)| x.clone()).collect()
        };
        let smaller = |ctor: fn(usize) -> Family| if n == 2 { Family::Gauss } else { ctor(n - 1) };
        Ok(match *self {
            Family::FD(_) => (smaller(Family::FD), keep(&[i])),
            Family::FA(_) => (smaller(Family::FA), keep(&[i, n + i])),
            Family::FB(_) => (smaller(Family::FB), keep(&[i - 1, n + i - 1])),
            Family::FC(_) => (smaller(Family::FC), keep(&[i + 1])),
            Family::H1 if i == 2 => (Family::Gauss, vec![p[0].clone(), p[1].clone(), p[3].clone()]),
            Family::H4 if i == 1 => (Family::Gauss, vec![p[0].clone(), p[1].clone(), p[3].clone()]),
            Family::H4 if i == 2 => {
                let half = rat(1, 2);
                (Family::Gauss, vec![&p[0] * &half, (&p[0] + int(1)) * &half, p[2].clone()])
            }
            Family::H5 if i == 1 => (Family::Gauss, p.to_vec()),
            _ => return Err(none()),
        })
    }

    /// Integer forms `w` over the classical parameters: the family is
    /// non-resonant iff `w . p` is non-integral for every listed `w`.
    pub fn nonresonance_forms(&self) -> Result<Vec<IntVector>, FamilyError> {
        let sys = family_system(*self)?;
        let (l, _) = self.alpha_map();
        let mut out: BTreeSet<IntVector> = BTreeSet::new();
        for m in &sys.facets {
            let mut w: IntVector = (0..self.arity()).map(|k| l.iter().zip(m).map(|(row, c)| row[k] * c).sum()).collect();
            if w.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                w.iter_mut().for_each(|x| *x = -*x);
            }
            out.insert(w);
        }
        Ok(out.into_iter().collect())
    }

    /// [`Family::nonresonance_forms`] rendered as expressions like `2c-a`.
    pub fn nonresonance_predicate(&self) -> Result<Vec<String>, FamilyError> {
        let names = self.param_names();
        Ok(self.nonresonance_forms()?.iter().map(|w| render_form(w, &names)).collect())
    }

    pub fn is_nonresonant(&self, params: &[Rational]) -> Result<bool, FamilyError> {
        let sys = family_system(*self)?;
        Ok(sys.is_nonresonant(&self.alpha(params)?))
    }

    /// Triangulations listed in closed form, where available.
    pub fn listed_triangulation(&self) -> Option<Vec<Vec<IntVector>>> {
        let r = self.dim();
        let subsets = |n: usize| (0..1u32 << n).map(move |mask| (0..n).filter(move |k| mask >> k & 1 == 1).collect::<Vec<_>>());
        match *self {
            Family::FA(n) => Some(
                subsets(n)
                    .map(|chosen| {
                        let mut v: Vec<IntVector> = (1..=n + 1).map(|i| e(i, r)).collect();
                        for k in 0..n {
                            let i = n + 2 + k;
                            v.push(if chosen.contains(&k) { comb(r, &[(1, 1), (1, i - n), (-1, i)]) } else { e(i, r) });
                        }
                        v
                    })
                    .collect(),
            ),
            Family::FC(n) => Some(
                subsets(n)
                    .map(|chosen| {
                        let mut v = vec![e(1, r), e(2, r)];
                        for k in 0..n {
                            let i = k + 3;
                            v.push(if chosen.contains(&k) { comb(r, &[(1, 1), (1, 2), (-1, i)]) } else { e(i, r) });
                        }
                        v
                    })
                    .collect(),
            ),
            Family::H1 => {
                let w = comb(r, &[(1, 1), (1, 2), (-1, 4)]);
                let u = comb(r, &[(-1, 1), (1, 2), (1, 3)]);
                Some(vec![
                    vec![e(1, r), e(2, r), e(3, r), e(4, r)],
                    vec![e(1, r), e(2, r), e(3, r), w.clone()],
                    vec![u.clone(), e(2, r), e(3, r), e(4, r)],
                    vec![u, e(2, r), e(3, r), w],
                ])
            }
            Family::H4 => {
                let w = comb(r, &[(1, 1), (1, 2), (-1, 4)]);
                let u = comb(r, &[(2, 1), (-1, 3)]);
                Some(vec![
                    vec![e(1, r), e(2, r), e(3, r), e(4, r)],
                    vec![e(1, r), e(2, r), e(3, r), w.clone()],
                    vec![e(1, r), e(2, r), e(4, r), u.clone()],
                    vec![e(1, r), e(2, r), u, w],
                ])
            }
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Gauss => f.write_str("Gauss"),
            Family::FD(2) => f.write_str("F1"),
            Family::FA(2) => f.write_str("F2"),
            Family::FB(2) => f.write_str("F3"),
            Family::FC(2) => f.write_str("F4"),
            Family::FD(n) => write!(f, "FD(n={n})"),
            Family::FA(n) => write!(f, "FA(n={n})"),
            Family::FB(n) => write!(f, "FB(n={n})"),
            Family::FC(n) => write!(f, "FC(n={n})"),
            other => write!(f, "{other:?}"),
        }
    }
}

fn render_form(w: &[i64], names: &[String]) -> String {
    let mut s = String::new();
    for (c, name) in w.iter().zip(names) {
        if *c == 0 {
            continue;
        }
        let sign = if *c < 0 { "-" } else if s.is_empty() { "" } else { "+" };
        let mag = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
        s.push_str(&format!("{sign}{mag}{name}"));
    }
    s
}

/// Target parameters from source parameters along an isomorphism.
pub fn push_forward(iso: &Isomorphism, src_params: &[Rational]) -> Result<Vec<Rational>, FamilyError> {
    let alpha = iso.source.alpha(src_params)?;
    let beta: Vec<Rational> = iso.map.iter().map(|row| row.iter().zip(&alpha).map(|(c, x)| x * int(*c)).sum()).collect();
    Ok(iso.target.params_from_alpha(&beta))
}

/// Source parameters from target parameters along an isomorphism.
pub fn pull_back(iso: &Isomorphism, dst_params: &[Rational]) -> Result<Vec<Rational>, FamilyError> {
    let beta = iso.target.alpha(dst_params)?;
    let inv = unimodular_inverse(&iso.map).ok_or(GkzError::NotUnimodular)?;
    let alpha: Vec<Rational> = inv.iter().map(|row| row.iter().zip(&beta).map(|(c, x)| x * int(*c)).sum()).collect();
    Ok(iso.source.params_from_alpha(&alpha))
}

/// Outcome of checking an isomorphism formula against the configurations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsomorphismCheck {
    pub valid: bool,
    pub detail: Option<String>,
}

/// Checks `f(A_src) = A_dst` for a map.
pub fn check_map(source: Family, target: Family, map: &IntMatrix) -> Result<IsomorphismCheck, FamilyError> {
    let src = family_system(source)?;
    let zero = vec![Rational::from_integer(0.into()); src.dim];
    Ok(match transport(map, &src, &target.generators(), &zero) {
        Ok(_) => IsomorphismCheck { valid: true, detail: None },
        Err(e) => IsomorphismCheck { valid: false, detail: Some(e.to_string()) },
    })
}

fn registry() -> &'static Mutex<HashMap<Family, Arc<GkzSystem>>> {
    static REG: OnceLock<Mutex<HashMap<Family, Arc<GkzSystem>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The validated GKZ system of a family. Transported families are built
/// through their declared isomorphism, which is checked on the way.
pub fn family_system(family: Family) -> Result<Arc<GkzSystem>, FamilyError> {
    if let Some(sys) = registry().lock().expect("registry lock").get(&family) {
        return Ok(sys.clone());
    }
    let sys = match family.isomorphism() {
        Some(iso) => {
            let src = family_system(iso.source)?;
            let zero = vec![Rational::from_integer(0.into()); src.dim];
            transport(&iso.map, &src, &family.generators(), &zero)?.0
        }
        None => build_system(family.generators())?,
    };
    let sys = Arc::new(sys);
    registry().lock().expect("registry lock").insert(family, sys.clone());
    Ok(sys)
}

/// `m(alpha)` for each facet `m`, as integer combinations of parameters
/// plus a constant: used when the facet values are needed symbolically.
pub fn facet_forms_in_params(family: Family) -> Result<Vec<(IntVector, i64)>, FamilyError> {
    let sys = family_system(family)?;
    let (l, shift) = family.alpha_map();
    Ok(sys
        .facets
        .iter()
        .map(|m| {
            let w: IntVector = (0..family.arity()).map(|k| l.iter().zip(m).map(|(row, c)| row[k] * c).sum()).collect();
            (w, dot(m, &shift))
        })
        .collect())
}

/// Images of the generators under a map, for display.
pub fn image(map: &IntMatrix, gens: &[IntVector]) -> Vec<IntVector> {
    gens.iter().map(|a| mat_vec(map, a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{cone_facets, rat};

    fn q(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(p, d)| rat(p, d)).collect()
    }

    #[test]
    fn parse_names() {
        assert_eq!(Family::parse("F4", None).unwrap(), Family::FC(2));
        assert_eq!(Family::parse("F_D", Some(3)).unwrap(), Family::FD(3));
        assert_eq!(Family::parse("h7", None).unwrap(), Family::H7);
        assert!(Family::parse("FD", None).is_err());
        assert!(Family::parse("H8", None).is_err());
        assert!(Family::parse("G1", Some(3)).is_err());
        assert_eq!(Family::FC(2).to_string(), "F4");
    }

    #[test]
    fn alpha_maps() {
        let p = q(&[(1, 6), (5, 6), (5, 6), (1, 3)]);
        assert_eq!(Family::FD(2).alpha(&p).unwrap(), q(&[(-1, 6), (-5, 6), (-5, 6), (-2, 3)]));
        assert_eq!(Family::G3.alpha(&q(&[(1, 2), (1, 3)])).unwrap(), q(&[(-1, 2), (-5, 6)]));
        let h4 = q(&[(1, 2), (1, 3), (1, 4), (1, 5)]);
        assert_eq!(Family::H4.alpha(&h4).unwrap(), q(&[(-1, 2), (-1, 3), (-3, 4), (-4, 5)]));
        assert_eq!(Family::H4.params_from_alpha(&Family::H4.alpha(&h4).unwrap()), h4);
        assert!(Family::H4.alpha(&h4[..3]).is_err());
    }

    #[test]
    fn small_systems() {
        let fd = family_system(Family::FD(2)).unwrap();
        assert_eq!((fd.dim, fd.len(), fd.volume), (4, 6, 3));
        let h5 = family_system(Family::H5).unwrap();
        let want: BTreeSet<IntVector> = [vec![1, 0, 0], vec![1, 2, 0], vec![1, 0, 1], vec![1, 2, 3]].into_iter().collect();
        assert_eq!(h5.facets.iter().cloned().collect::<BTreeSet<_>>(), want);
        let g3 = family_system(Family::G3).unwrap();
        assert_eq!(g3.volume, 3);
        assert_eq!(g3.facets.iter().cloned().collect::<BTreeSet<_>>(), [vec![1, 1], vec![-1, 2]].into_iter().collect());
    }

    #[test]
    fn transported_facets_match_direct() {
        for f in [Family::G2, Family::H2, Family::H3, Family::H6, Family::H7, Family::FB(2), Family::FB(3)] {
            let sys = family_system(f).unwrap();
            let direct: BTreeSet<IntVector> = cone_facets(&f.generators(), f.dim()).unwrap().into_iter().collect();
            assert_eq!(sys.facets.iter().cloned().collect::<BTreeSet<_>>(), direct, "{f}");
        }
    }

    #[test]
    fn printed_h2_map_is_rejected() {
        let iso = Family::H2.isomorphism().unwrap();
        let check = check_map(iso.source, iso.target, iso.printed.as_ref().unwrap()).unwrap();
        assert!(!check.valid);
        assert!(check_map(iso.source, iso.target, &iso.map).unwrap().valid);
    }

    #[test]
    fn necessary_triples() {
        let p = q(&[(1, 6), (5, 6), (5, 6), (1, 3)]);
        assert_eq!(
            Family::FD(2).necessary_gauss_triples(&p).unwrap(),
            vec![q(&[(1, 6), (5, 6), (1, 3)]), q(&[(1, 6), (5, 6), (1, 3)]), q(&[(1, 6), (2, 3), (1, 3)])]
        );
        let h4 = q(&[(1, 3), (1, 2), (1, 4), (1, 5)]);
        assert_eq!(
            Family::H4.necessary_gauss_triples(&h4).unwrap(),
            vec![q(&[(1, 6), (2, 3), (1, 4)]), q(&[(1, 3), (1, 2), (1, 5)]), q(&[(1, 2), (5, 6), (1, 5)])]
        );
        let h1 = q(&[(1, 3), (5, 6), (1, 2), (2, 3)]);
        assert_eq!(
            Family::H1.necessary_gauss_triples(&h1).unwrap(),
            vec![q(&[(1, 3), (5, 6), (2, 3)]), q(&[(1, 6), (1, 2), (1, 3)])]
        );
    }

    #[test]
    fn restrictions() {
        let p = q(&[(1, 6), (5, 6), (5, 6), (5, 6), (1, 3)]);
        assert_eq!(Family::FD(3).restrict(&p, 3).unwrap(), (Family::FD(2), q(&[(1, 6), (5, 6), (5, 6), (1, 3)])));
        let c = q(&[(1, 4), (3, 4), (1, 2), (1, 3), (1, 2)]);
        assert_eq!(Family::FC(3).restrict(&c, 3).unwrap(), (Family::FC(2), q(&[(1, 4), (3, 4), (1, 2), (1, 3)])));
        let h4 = q(&[(1, 3), (1, 2), (1, 4), (1, 5)]);
        assert_eq!(Family::H4.restrict(&h4, 2).unwrap(), (Family::Gauss, q(&[(1, 6), (2, 3), (1, 4)])));
        assert!(Family::G1.restrict(&q(&[(1, 2), (1, 3), (1, 5)]), 1).is_err());
    }

    #[test]
    fn h4_nonresonance_predicate() {
        let mut got = Family::H4.nonresonance_predicate().unwrap();
        got.sort();
        let mut want: Vec<String> = ["a", "b", "a-2c", "a-d", "b-d", "a-2c-d"].iter().map(|s| s.to_string()).collect();
        want.sort();
        assert_eq!(got, want);
    }
}

//! Property predicates shared by the randomized test suites and the
//! deterministic sweeps of `verify-all`. Each returns `Err` with a
//! description of the first violated postcondition.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::apex::{apexpoints, apexpoints_by_definition, denominator, half_window_witness, lift_coprime, signature};
use crate::exact::{frac, int, rat, IntVector, Rational, Tuple};
use crate::families::{family_system, push_forward, Isomorphism};
use crate::gkz::{build_system, GkzSystem};

pub type PropResult = Result<(), String>;

/// The slab route and the definition route find the same apexpoints. The
/// slab route tests `p - a_i` only, which is complete for saturated `A`.
pub fn apex_routes_agree(sys: &GkzSystem, alpha: &[Rational]) -> PropResult {
    if !sys.is_nonresonant(alpha) {
        return Ok(());
    }
    let fast: BTreeSet<IntVector> = apexpoints(sys, alpha).map_err(|e| e.to_string())?.into_iter().map(|p| p.offset).collect();
    let slow: BTreeSet<IntVector> = apexpoints_by_definition(sys, alpha).map_err(|e| e.to_string())?.into_iter().collect();
    if fast != slow {
        return Err(format!("apexpoints differ at {}: {} vs {}", Tuple(alpha), fast.len(), slow.len()));
    }
    Ok(())
}

pub fn signature_within_volume(sys: &GkzSystem, alpha: &[Rational]) -> PropResult {
    if !sys.is_nonresonant(alpha) {
        return Ok(());
    }
    let s = signature(sys, alpha).map_err(|e| e.to_string())?;
    if s > sys.volume {
        return Err(format!("signature {s} exceeds volume {} at {}", sys.volume, Tuple(alpha)));
    }
    Ok(())
}

/// `sigma(alpha + z) = sigma(alpha)` for integral `z`, by the definition route.
pub fn signature_integer_shift(sys: &GkzSystem, alpha: &[Rational], shift: &[i64]) -> PropResult {
    if !sys.is_nonresonant(alpha) {
        return Ok(());
    }
    let moved: Vec<Rational> = alpha.iter().zip(shift).map(|(a, z)| a + int(*z)).collect();
    let s = apexpoints_by_definition(sys, alpha).map_err(|e| e.to_string())?.len();
    let t = apexpoints_by_definition(sys, &moved).map_err(|e| e.to_string())?.len();
    if s != t {
        return Err(format!("signature {s} at {} but {t} after shifting by {shift:?}", Tuple(alpha)));
    }
    Ok(())
}

/// A perturbation small enough to keep every facet floor fixed leaves the
/// apexpoint count unchanged. The perturbed point is counted by the
/// definition route, which never looks at floor vectors.
pub fn floor_vector_determinism(sys: &GkzSystem, alpha: &[Rational], direction: &[i64]) -> PropResult {
    if !sys.is_nonresonant(alpha) {
        return Ok(());
    }
    let d = denominator(alpha) as i64;
    let norm = sys.facets.iter().map(|m| m.iter().map(|c| c.abs()).sum::<i64>()).max().unwrap_or(1).max(1);
    let step = rat(1, 2 * d * norm);
    let beta: Vec<Rational> = alpha.iter().zip(direction).map(|(a, s)| a + &step * int(*s)).collect();
    if sys.floor_vector(&beta) != sys.floor_vector(alpha) {
        return Err(format!("perturbation of {} left its region", Tuple(alpha)));
    }
    let s = signature(sys, alpha).map_err(|e| e.to_string())? as usize;
    let t = apexpoints_by_definition(sys, &beta).map_err(|e| e.to_string())?.len();
    if s != t {
        return Err(format!("signature {s} at {} but {t} at {}", Tuple(alpha), Tuple(&beta)));
    }
    Ok(())
}

/// Signatures agree across a declared isomorphism, where the target system
/// is built directly from its own configuration.
pub fn transport_preserves_signature(iso: &Isomorphism, src_params: &[Rational]) -> PropResult {
    let src = family_system(iso.source).map_err(|e| e.to_string())?;
    let dst = build_system(iso.target.generators()).map_err(|e| e.to_string())?;
    let alpha = iso.source.alpha(src_params).map_err(|e| e.to_string())?;
    let beta: Vec<Rational> = iso.map.iter().map(|row| row.iter().zip(&alpha).map(|(c, x)| x * int(*c)).sum()).collect();
    let dst_params = push_forward(iso, src_params).map_err(|e| e.to_string())?;
    let beta_from_params = iso.target.alpha(&dst_params).map_err(|e| e.to_string())?;
    if beta.iter().zip(&beta_from_params).any(|(x, y)| frac(x) != frac(y)) {
        return Err(format!("parameter transport of {} disagrees with f(alpha)", Tuple(src_params)));
    }
    let res_src = src.is_nonresonant(&alpha);
    if res_src != dst.is_nonresonant(&beta) {
        return Err(format!("resonance differs across {} -> {} at {}", iso.source, iso.target, Tuple(src_params)));
    }
    if !res_src {
        return Ok(());
    }
    let s = signature(&src, &alpha).map_err(|e| e.to_string())?;
    let t = signature(&dst, &beta).map_err(|e| e.to_string())?;
    if s != t {
        return Err(format!("{} -> {} at {}: signature {s} vs {t}", iso.source, iso.target, Tuple(src_params)));
    }
    Ok(())
}

/// `lift_coprime(k, d, d m)`: congruent to `k`, coprime to `d m`, smallest.
pub fn lift_coprime_postconditions(k: u64, d: u64, m: u64) -> PropResult {
    let dt = d * m;
    let l = lift_coprime(k, d, dt).map_err(|e| e.to_string())?;
    if l == 0 || l % d != k % d || l.gcd(&dt) != 1 {
        return Err(format!("lift_coprime({k}, {d}, {dt}) = {l} violates its contract"));
    }
    if let Some(smaller) = (1..l).find(|x| x % d == k % d && x.gcd(&dt) == 1) {
        return Err(format!("lift_coprime({k}, {d}, {dt}) = {l} but {smaller} also works"));
    }
    Ok(())
}

/// `half_window_witness(p/q, t)` against an integer scan, plus the
/// existence guarantee for large enough `q`.
pub fn half_window_postconditions(p: i64, q: i64, t: &Rational) -> PropResult {
    let r = rat(p, q);
    let q = r.denom().to_i64().unwrap_or(0);
    let p = r.numer().to_i64().unwrap_or(0);
    let got = half_window_witness(&r, t);
    if q < 3 {
        return if got.is_none() { Ok(()) } else { Err(format!("witness returned for denominator {q}")) };
    }
    let (tn, td) = (t.numer().to_i64().unwrap_or(0), t.denom().to_i64().unwrap_or(1));
    // {k p / q} in [tn/td, 1/2)  <=>  tn q <= td (k p mod q)  and  2 (k p mod q) < q.
    let expected = (1..q).find(|&k| {
        let v = (k * p).rem_euclid(q);
        k.gcd(&q) == 1 && tn * q <= td * v && 2 * v < q
    });
    if got.map(|k| k as i64) != expected {
        return Err(format!("half_window_witness({}, {}) = {got:?}, scan gives {expected:?}", r, t));
    }
    let dd = if q % 2 == 1 {
        1
    } else if q % 4 == 0 {
        2
    } else {
        4
    };
    // q >= dd / (1 - 2t) forces a witness.
    if q * (td - 2 * tn) >= dd * td && got.is_none() {
        return Err(format!("no witness for {} and {} although q is large enough", r, t));
    }
    Ok(())
}

//! Hochschild cohomology of the tower of universal algebras, one string
//! degree at a time.
//!
//! Face maps keep each strand's decoration, so the complex at string degree
//! `N` splits into blocks indexed by the multiset of strand decorations.

use crate::algebra::{basis, AlgebraElement, BasisElement};
use crate::combinatorics::{Decor, DecorationMonoid};
use crate::error::{Error, Result};
use crate::free_lie::{total_degree_oracle_dim, wedge_multilinear_dim};
use crate::linalg::{Echelon, SparseVec};
use crate::rational::Q;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

type BlockKey = Vec<Decor>;

fn block_key(b: &BasisElement) -> BlockKey {
    let mut d = b.decor.clone();
    d.sort();
    d
}

const MAX_COCHAINS: usize = 400_000;

/// Cochains at slot count `n` and string degree `strands`, grouped by block.
fn blocks(n: usize, strands: usize, monoid: &DecorationMonoid) -> Result<BTreeMap<BlockKey, Vec<BasisElement>>> {
    let mut out: BTreeMap<BlockKey, Vec<BasisElement>> = BTreeMap::new();
    if n == 0 {
        if strands == 0 {
            return Err(Error::Domain("string degree 0 is the ground field".into()));
        }
        return Ok(out);
    }
    let all = basis(n, strands, monoid)?;
    if all.len() > MAX_COCHAINS {
        return Err(Error::Domain(format!("{} cochains exceed the size guard", all.len())));
    }
    for b in all {
        out.entry(block_key(&b)).or_default().push(b);
    }
    Ok(out)
}

fn coords(x: &AlgebraElement, index: &HashMap<BasisElement, usize>) -> SparseVec {
    let mut v: Vec<(usize, Q)> = x.terms.iter().map(|(b, c)| (index[b], c.clone())).collect();
    v.sort_by_key(|(i, _)| *i);
    v
}

fn index_of(v: &[BasisElement]) -> HashMap<BasisElement, usize> {
    v.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect()
}

/// One slice of the complex: `d_n` restricted to string degree `N`.
#[derive(Clone, Debug)]
pub struct ComplexSlice {
    pub strands: usize,
    pub n: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
}

/// Rank of `d_n` on string degree `strands`.
pub fn differential_slice(n: usize, strands: usize, monoid: &DecorationMonoid) -> Result<ComplexSlice> {
    let src = blocks(n, strands, monoid)?;
    let tgt = blocks(n + 1, strands, monoid)?;
    let mut rank = 0;
    for (key, elems) in &src {
        let index = index_of(&tgt[key]);
        let mut ech = Echelon::new();
        for b in elems {
            let img = AlgebraElement::from_basis(b.clone(), monoid.clone()).hochschild_d();
            ech.insert(&coords(&img, &index));
        }
        rank += ech.rank();
    }
    Ok(ComplexSlice {
        strands,
        n,
        source_dim: src.values().map(|v| v.len()).sum(),
        target_dim: tgt.values().map(|v| v.len()).sum(),
        rank,
    })
}

fn guard(strands: usize, n_max: usize) -> Result<()> {
    if strands == 0 || strands > 3 {
        return Err(Error::Domain("string degree must be in 1..=3".into()));
    }
    if n_max > 4 {
        return Err(Error::Domain("cohomological degree must be at most 4".into()));
    }
    Ok(())
}

/// `dim H^n` at string degree `strands`, for `n = 0..=n_max`.
pub fn cohomology_dims(strands: usize, n_max: usize, monoid: &DecorationMonoid) -> Result<Vec<usize>> {
    Ok(cohomology_table(strands, n_max, monoid)?.into_iter().map(|r| r.dim_h).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyRow {
    pub strands: usize,
    pub n: usize,
    pub dim_ker: usize,
    pub dim_im: usize,
    pub dim_h: usize,
    /// `[∧^n ⊗ ∧^n]` oracle; zero expected for `n ≤ 1`.
    pub oracle: usize,
    /// `⊕_{p+q=n} [∧^p ⊗ ∧^q]` oracle.
    pub total_degree_oracle: usize,
    #[serde(rename = "match")]
    pub matches: bool,
}

pub fn cohomology_table(strands: usize, n_max: usize, monoid: &DecorationMonoid) -> Result<Vec<CohomologyRow>> {
    guard(strands, n_max)?;
    let mut ranks = Vec::new();
    let mut dims = Vec::new();
    for n in 0..=n_max {
        let s = differential_slice(n, strands, monoid)?;
        dims.push(s.source_dim);
        ranks.push(s.rank);
    }
    let mut out = Vec::new();
    for n in 0..=n_max {
        let ker = dims[n] - ranks[n];
        let im = if n == 0 { 0 } else { ranks[n - 1] };
        let oracle = if n <= 1 { 0 } else { wedge_multilinear_dim(n, strands, monoid)? };
        let total = total_degree_oracle_dim(n, strands, monoid)?;
        out.push(CohomologyRow {
            strands,
            n,
            dim_ker: ker,
            dim_im: im,
            dim_h: ker - im,
            oracle,
            total_degree_oracle: total,
            matches: ker - im == oracle,
        });
    }
    Ok(out)
}

/// Checks `d∘d = 0` on every basis element of `C^n` at string degree `strands`.
pub fn d_squared_vanishes(n: usize, strands: usize, monoid: &DecorationMonoid) -> Result<bool> {
    for elems in blocks(n, strands, monoid)?.values() {
        for b in elems {
            let x = AlgebraElement::from_basis(b.clone(), monoid.clone());
            if !x.hochschild_d().hochschild_d().is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn d_image(b: &BasisElement, monoid: &DecorationMonoid) -> AlgebraElement {
    AlgebraElement::from_basis(b.clone(), monoid.clone()).hochschild_d()
}

/// Basis of the closed part of `alt(C^n)` in one block.
fn harmonic_basis(n: usize, elems: &[BasisElement], up: &[BasisElement], monoid: &DecorationMonoid) -> Vec<AlgebraElement> {
    let index = index_of(elems);
    let up_index = index_of(up);
    let mut aech = Echelon::new();
    let mut alts = Vec::new();
    for b in elems {
        let a = AlgebraElement::from_basis(b.clone(), monoid.clone()).alt();
        debug_assert_eq!(a.n, n);
        if aech.insert(&coords(&a, &index)) {
            alts.push(a);
        }
    }
    let mut kech = Echelon::tracking();
    let mut out = Vec::new();
    for a in &alts {
        let img = coords(&a.hochschild_d(), &up_index);
        if img.is_empty() {
            out.push(a.clone());
        } else if let Some(comb) = kech.solve(&img) {
            let mut k = a.clone();
            for (j, c) in comb {
                k.add_assign_scaled(&-c, &alts[j]);
            }
            out.push(k);
        }
        kech.insert(&img);
    }
    out
}

/// Harmonic representatives of the cohomology classes at `(n, strands)`.
pub fn harmonic_representatives(n: usize, strands: usize, monoid: &DecorationMonoid) -> Result<Vec<AlgebraElement>> {
    guard(strands, n + 1)?;
    let up = blocks(n + 1, strands, monoid)?;
    let mut out = Vec::new();
    for (key, elems) in blocks(n, strands, monoid)? {
        let u = up.get(&key).cloned().unwrap_or_default();
        out.extend(harmonic_basis(n, &elems, &u, monoid));
    }
    Ok(out)
}

/// Writes a cocycle as `η = d(v) + μ` with `μ` in the closed part of the
/// slot-antisymmetrized cochains, which complements the coboundaries.
pub fn decompose_cocycle(eta: &AlgebraElement) -> Result<(AlgebraElement, AlgebraElement)> {
    let n = eta.n;
    let monoid = eta.monoid.clone();
    if !eta.hochschild_d().is_zero() {
        return Err(Error::NotClosed("hochschild differential is nonzero".into()));
    }
    let mut v = AlgebraElement::zero(n.saturating_sub(1).max(1), monoid.clone());
    let mut mu = AlgebraElement::zero(n, monoid.clone());
    let mut parts: BTreeMap<(usize, BlockKey), ()> = BTreeMap::new();
    for b in eta.terms.keys() {
        parts.insert((b.strands(), block_key(b)), ());
    }
    for (deg, key) in parts.into_keys() {
        let part = eta.filter(|b| b.strands() == deg && block_key(b) == key);
        if deg == 0 {
            // d(c·1) = c·1 from odd slot counts, 0 from even ones
            if n % 2 == 1 || n < 2 {
                return Err(Error::Obstruction("constant cocycle is not exact".into()));
            }
            v.add_assign_scaled(&part.counit(), &AlgebraElement::one(n - 1, monoid.clone()));
            continue;
        }
        let here = blocks(n, deg, &monoid)?;
        let elems = here.get(&key).cloned().unwrap_or_default();
        let up = blocks(n + 1, deg, &monoid)?.get(&key).cloned().unwrap_or_default();
        let below = if n >= 2 { blocks(n - 1, deg, &monoid)?.get(&key).cloned().unwrap_or_default() } else { vec![] };
        let index = index_of(&elems);
        let harm = harmonic_basis(n, &elems, &up, &monoid);
        let mut ech = Echelon::tracking();
        for b in &below {
            ech.insert(&coords(&d_image(b, &monoid), &index));
        }
        for h in &harm {
            ech.insert(&coords(h, &index));
        }
        let sol = ech
            .solve(&coords(&part, &index))
            .ok_or_else(|| Error::Obstruction(format!("degree {deg}: coboundaries and harmonic part do not span")))?;
        for (i, c) in sol {
            if i < below.len() {
                v.add_assign_scaled(&c, &AlgebraElement::from_basis(below[i].clone(), monoid.clone()));
            } else {
                mu.add_assign_scaled(&c, &harm[i - below.len()]);
            }
        }
    }
    Ok((v, mu))
}

/// Finds `v` over `n − 1` slots with `d(v) = x`.
pub fn solve_exact(x: &AlgebraElement) -> Result<AlgebraElement> {
    let (v, mu) = decompose_cocycle(x)?;
    if !mu.is_zero() {
        return Err(Error::Obstruction("cocycle has a nonzero harmonic part".into()));
    }
    Ok(v)
}

/// Dimensions `(cocycles, coboundaries, harmonic)` at `(n, strands)` and
/// whether the harmonic part complements the coboundaries in the cocycles.
pub fn harmonic_complement_check(n: usize, strands: usize, monoid: &DecorationMonoid) -> Result<(usize, usize, usize, bool)> {
    let here = blocks(n, strands, monoid)?;
    let below = blocks(n - 1, strands, monoid)?;
    let upb = blocks(n + 1, strands, monoid)?;
    let (mut z, mut bd, mut h, mut ok) = (0, 0, 0, true);
    for (key, elems) in &here {
        let index = index_of(elems);
        let up = upb.get(key).cloned().unwrap_or_default();
        let up_index = index_of(&up);
        let mut dech = Echelon::new();
        for b in elems {
            dech.insert(&coords(&d_image(b, monoid), &up_index));
        }
        let zk = elems.len() - dech.rank();
        let mut joint = Echelon::new();
        for b in below.get(key).into_iter().flatten() {
            joint.insert(&coords(&d_image(b, monoid), &index));
        }
        let bk = joint.rank();
        let harm = harmonic_basis(n, elems, &up, monoid);
        for x in &harm {
            joint.insert(&coords(x, &index));
        }
        ok &= joint.rank() == bk + harm.len() && bk + harm.len() == zk;
        z += zk;
        bd += bk;
        h += harm.len();
    }
    Ok((z, bd, h, ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{kappa, omega, r_matrix};

    const T: DecorationMonoid = DecorationMonoid::Trivial;

    #[test]
    fn omega_decomposes() {
        let (v, mu) = decompose_cocycle(&omega(2, 1, 2, &T).unwrap()).unwrap();
        assert_eq!(v, kappa(1, 1, &T).unwrap().neg());
        assert!(mu.is_zero());
    }

    #[test]
    fn not_closed() {
        let k = kappa(2, 1, &T).unwrap();
        assert!(matches!(decompose_cocycle(&k), Err(Error::NotClosed(_))));
    }

    #[test]
    fn r_is_a_cocycle_with_nonzero_class() {
        let r = r_matrix(2, 1, 2, &T).unwrap();
        let (v, mu) = decompose_cocycle(&r).unwrap();
        assert!(!mu.is_zero());
        assert_eq!(v.hochschild_d().add(&mu), r);
    }

    #[test]
    fn low_degrees() {
        let h = cohomology_dims(1, 3, &T).unwrap();
        assert_eq!(h[0], 0);
        assert_eq!(h[1], 0);
        assert_eq!(h[2], 1);
    }
}

//! Concrete Lie bialgebras, Drinfeld–Yetter modules over them, and
//! evaluation of diagrams as matrices.
//!
//! Conventions. A Lie bialgebra `a` has basis `a_0..a_{d-1}` with
//! `[a_i,a_j] = Σ_k c[i][j][k] a_k` and `δ(a_i) = Σ f[i][p][q] a_p⊗a_q`.
//! A DY module `V` is given by matrices `A_i` (action of `a_i`) and `C^i`
//! with coaction `v ↦ Σ_i a_i ⊗ C^i v`; equivalently a module over the double
//! where `C^i` is the action of the dual basis vector `b^i`. The module
//! axioms read
//!
//! ```text
//! [A_i, A_j]  = Σ_k c_ij^k A_k
//! [C^p, C^q]  = Σ_i f_i^{pq} C^i
//! [C^q, A_i]  = Σ_p c_ip^q C^p − Σ_r f_i^{qr} A_r
//! ```
//!
//! and the double has the matching brackets among `a_i` and `b^q`.

use crate::algebra::AlgebraElement;
use crate::combinatorics::{Decor, DecorationMonoid, MonoidLaw, MAX_RANK};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, Mat, SparseVec};
use crate::rational::{self, q, qf, Q};
use crate::rewriter::{Net, Word};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

pub type Tensor3 = Vec<Vec<Vec<Q>>>;

fn tensor(d: usize) -> Tensor3 {
    vec![vec![vec![Q::zero(); d]; d]; d]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieBialgebraData {
    pub dim: usize,
    pub bracket: Tensor3,
    pub cobracket: Tensor3,
    /// Weight of each basis vector, for decorated evaluation.
    pub weights: Option<Vec<Decor>>,
}

impl LieBialgebraData {
    pub fn zero(dim: usize) -> Self {
        LieBialgebraData { dim, bracket: tensor(dim), cobracket: tensor(dim), weights: None }
    }

    fn check_shape(&self) -> Result<()> {
        let ok = |t: &Tensor3| t.len() == self.dim && t.iter().all(|m| m.len() == self.dim && m.iter().all(|r| r.len() == self.dim));
        if !ok(&self.bracket) || !ok(&self.cobracket) {
            return Err(Error::Mismatch("structure tensors must be dim × dim × dim".into()));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.dim {
                return Err(Error::Mismatch("one weight per basis vector".into()));
            }
        }
        Ok(())
    }

    /// `[a_i, ·]` as a matrix (column j = image of a_j).
    pub fn ad(&self, i: usize) -> Mat {
        let mut m = Mat::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            for k in 0..self.dim {
                m.set(k, j, self.bracket[i][j][k].clone());
            }
        }
        m
    }
}

/// Validation outcome: empty iff all identities hold.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub violations: Vec<String>,
}

impl Report {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
    fn push(&mut self, s: String) {
        if self.violations.len() < 64 {
            self.violations.push(s);
        }
    }
}

pub fn validate_bialgebra(a: &LieBialgebraData) -> Result<Report> {
    validate_bialgebra_window(a, None)
}

fn height_of(a: &LieBialgebraData, idx: &[usize]) -> usize {
    match &a.weights {
        Some(w) => idx.iter().map(|&i| w[i].height()).sum(),
        None => 0,
    }
}

/// Checks all axioms; with `max_height`, only identities whose arguments
/// have total weight height at most `max_height`.
pub fn validate_bialgebra_window(a: &LieBialgebraData, max_height: Option<usize>) -> Result<Report> {
    a.check_shape()?;
    let d = a.dim;
    let c = &a.bracket;
    let f = &a.cobracket;
    let inside = |idx: &[usize]| max_height.map_or(true, |h| height_of(a, idx) <= h);
    let mut r = Report::default();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                if c[i][j][k] != -c[j][i][k].clone() && inside(&[i, j]) {
                    r.push(format!("antisymmetry ({i},{j},{k})"));
                }
                if f[i][j][k] != -f[i][k][j].clone() && inside(&[i]) {
                    r.push(format!("co-antisymmetry ({i},{j},{k})"));
                }
            }
        }
    }
    // Jacobi
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                if !inside(&[i, j, k]) {
                    continue;
                }
                for m in 0..d {
                    let mut s = Q::zero();
                    for p in 0..d {
                        s += &c[i][j][p] * &c[p][k][m] + &c[j][k][p] * &c[p][i][m] + &c[k][i][p] * &c[p][j][m];
                    }
                    if !s.is_zero() {
                        r.push(format!("Jacobi ({i},{j},{k}) component {m}"));
                    }
                }
            }
        }
    }
    // co-Jacobi: (1 + σ + σ²)(δ⊗1)δ = 0
    for i in 0..d {
        if !inside(&[i]) {
            continue;
        }
        let mut t: BTreeMap<(usize, usize, usize), Q> = BTreeMap::new();
        for p in 0..d {
            for q2 in 0..d {
                if f[i][p][q2].is_zero() {
                    continue;
                }
                for x in 0..d {
                    for y in 0..d {
                        let v = &f[i][p][q2] * &f[p][x][y];
                        if v.is_zero() {
                            continue;
                        }
                        for key in [(x, y, q2), (y, q2, x), (q2, x, y)] {
                            *t.entry(key).or_insert_with(Q::zero) += &v;
                        }
                    }
                }
            }
        }
        if let Some((key, _)) = t.iter().find(|(_, v)| !v.is_zero()) {
            r.push(format!("co-Jacobi at {i} component {key:?}"));
        }
    }
    // cocycle: δ([x,y]) = x·δ(y) − y·δ(x)
    for i in 0..d {
        for j in 0..d {
            if !inside(&[i, j]) {
                continue;
            }
            let mut t: BTreeMap<(usize, usize), Q> = BTreeMap::new();
            let mut add = |p: usize, q2: usize, v: Q| {
                if !v.is_zero() {
                    *t.entry((p, q2)).or_insert_with(Q::zero) += v;
                }
            };
            for k in 0..d {
                if c[i][j][k].is_zero() {
                    continue;
                }
                for p in 0..d {
                    for q2 in 0..d {
                        add(p, q2, &c[i][j][k] * &f[k][p][q2]);
                    }
                }
            }
            for (x, y, sign) in [(i, j, -1i64), (j, i, 1)] {
                for p in 0..d {
                    for q2 in 0..d {
                        let v = &f[y][p][q2];
                        if v.is_zero() {
                            continue;
                        }
                        for m in 0..d {
                            add(m, q2, q(sign) * v * &c[x][p][m]);
                            add(p, m, q(sign) * v * &c[x][q2][m]);
                        }
                    }
                }
            }
            if let Some((key, _)) = t.iter().find(|(_, v)| !v.is_zero()) {
                r.push(format!("cocycle ({i},{j}) component {key:?}"));
            }
        }
    }
    if let Some(w) = &a.weights {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if !c[i][j][k].is_zero() && w[k] != add_weights(&w[i], &w[j]) && inside(&[i, j]) {
                        r.push(format!("bracket grading ({i},{j},{k})"));
                    }
                    if !f[i][j][k].is_zero() && w[i] != add_weights(&w[j], &w[k]) {
                        r.push(format!("cobracket grading ({i},{j},{k})"));
                    }
                }
            }
        }
    }
    Ok(r)
}

fn add_weights(a: &Decor, b: &Decor) -> Decor {
    let mut d = [0u8; MAX_RANK];
    for i in 0..MAX_RANK {
        d[i] = a.0[i] + b.0[i];
    }
    Decor(d)
}

/// Bracket of the double on `a ⊕ a*`: `a_i` are `0..d`, `b^i` are `d..2d`.
/// The returned cobracket is zero.
pub fn build_double(a: &LieBialgebraData) -> Result<LieBialgebraData> {
    let rep = validate_bialgebra(a)?;
    if !rep.is_valid() {
        return Err(Error::Validation(rep.violations.join("; ")));
    }
    let d = a.dim;
    let mut g = LieBialgebraData::zero(2 * d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                g.bracket[i][j][k] = a.bracket[i][j][k].clone();
                g.bracket[d + i][d + j][d + k] = a.cobracket[k][i][j].clone();
            }
        }
    }
    // [b^q, a_i] = Σ_p c_ip^q b^p − Σ_r f_i^{qr} a_r
    for qq in 0..d {
        for i in 0..d {
            for p in 0..d {
                let v = a.bracket[i][p][qq].clone();
                g.bracket[d + qq][i][d + p] += &v;
                g.bracket[i][d + qq][d + p] -= &v;
            }
            for r in 0..d {
                let v = a.cobracket[i][qq][r].clone();
                g.bracket[d + qq][i][r] -= &v;
                g.bracket[i][d + qq][r] += &v;
            }
        }
    }
    Ok(g)
}

/// Canonical symmetric pairing on the double: `⟨a_i, b^j⟩ = δ_ij`.
pub fn double_form(d: usize) -> Mat {
    let mut m = Mat::zeros(2 * d, 2 * d);
    for i in 0..d {
        m.set(i, d + i, Q::one());
        m.set(d + i, i, Q::one());
    }
    m
}

/// Checks `⟨[x,y],z⟩ = ⟨x,[y,z]⟩` on all basis triples.
pub fn form_is_invariant(g: &LieBialgebraData, form: &Mat) -> bool {
    let d = g.dim;
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let mut l = Q::zero();
                let mut r = Q::zero();
                for k in 0..d {
                    l += &g.bracket[x][y][k] * form.get(k, z);
                    r += form.get(x, k) * &g.bracket[y][z][k];
                }
                if l != r {
                    return false;
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DYModuleData {
    pub dim: usize,
    /// `A_i`, one per basis vector of `a`.
    pub action: Vec<Mat>,
    /// `C^i`, one per basis vector of `a`.
    pub coaction: Vec<Mat>,
}

impl DYModuleData {
    pub fn trivial(adim: usize) -> Self {
        DYModuleData { dim: 1, action: vec![Mat::zeros(1, 1); adim], coaction: vec![Mat::zeros(1, 1); adim] }
    }

    /// Restriction of a representation `reps` of the double (indexed as in
    /// [`build_double`]).
    pub fn from_double_rep(adim: usize, reps: &[Mat]) -> Result<Self> {
        if reps.len() != 2 * adim {
            return Err(Error::Mismatch("need one matrix per basis vector of the double".into()));
        }
        Ok(DYModuleData { dim: reps[0].rows, action: reps[..adim].to_vec(), coaction: reps[adim..].to_vec() })
    }

    /// Tensor product of modules over `a ⊕ a'` (first factor acts on the left).
    pub fn direct_sum_module(v: &DYModuleData, w: &DYModuleData) -> DYModuleData {
        let iv = Mat::identity(v.dim);
        let iw = Mat::identity(w.dim);
        let mut action: Vec<Mat> = v.action.iter().map(|m| m.kron(&iw)).collect();
        action.extend(w.action.iter().map(|m| iv.kron(m)));
        let mut coaction: Vec<Mat> = v.coaction.iter().map(|m| m.kron(&iw)).collect();
        coaction.extend(w.coaction.iter().map(|m| iv.kron(m)));
        DYModuleData { dim: v.dim * w.dim, action, coaction }
    }
}

pub fn validate_dy_module(a: &LieBialgebraData, v: &DYModuleData) -> Result<Report> {
    a.check_shape()?;
    let d = a.dim;
    if v.action.len() != d || v.coaction.len() != d {
        return Err(Error::Mismatch("module needs one action and one coaction matrix per basis vector".into()));
    }
    if v.action.iter().chain(&v.coaction).any(|m| m.rows != v.dim || m.cols != v.dim) {
        return Err(Error::Mismatch("module matrices must be dim × dim".into()));
    }
    let mut r = Report::default();
    for i in 0..d {
        for j in 0..d {
            let mut rhs = Mat::zeros(v.dim, v.dim);
            for k in 0..d {
                rhs.add_scaled(&a.bracket[i][j][k], &v.action[k]);
            }
            if v.action[i].commutator(&v.action[j]) != rhs {
                r.push(format!("action ({i},{j})"));
            }
            let mut rhs = Mat::zeros(v.dim, v.dim);
            for k in 0..d {
                rhs.add_scaled(&a.cobracket[k][i][j], &v.coaction[k]);
            }
            if v.coaction[i].commutator(&v.coaction[j]) != rhs {
                r.push(format!("coaction ({i},{j})"));
            }
        }
    }
    for qq in 0..d {
        for i in 0..d {
            let mut rhs = Mat::zeros(v.dim, v.dim);
            for p in 0..d {
                rhs.add_scaled(&a.bracket[i][p][qq], &v.coaction[p]);
                rhs.add_scaled(&-a.cobracket[i][qq][p].clone(), &v.action[p]);
            }
            if v.coaction[qq].commutator(&v.action[i]) != rhs {
                r.push(format!("action-coaction compatibility ({qq},{i})"));
            }
        }
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Evaluation

fn index_set(a: &LieBialgebraData, monoid: &DecorationMonoid, d: &Decor) -> Result<Vec<usize>> {
    if monoid.law() == MonoidLaw::Trivial {
        return Ok((0..a.dim).collect());
    }
    let w = a.weights.as_ref().ok_or_else(|| Error::Mismatch("decorated evaluation needs a graded bialgebra".into()))?;
    Ok((0..a.dim).filter(|&i| w[i] == *d).collect())
}

/// Evaluates a decorated net on `V_1 ⊗ ··· ⊗ V_n`.
pub fn evaluate_net(net: &Net, monoid: &DecorationMonoid, a: &LieBialgebraData, modules: &[DYModuleData]) -> Result<Mat> {
    if net.slots.len() != modules.len() {
        return Err(Error::Mismatch(format!("{} slots but {} modules", net.slots.len(), modules.len())));
    }
    let ranges: Vec<Vec<usize>> = net.decor.iter().map(|d| index_set(a, monoid, d)).collect::<Result<_>>()?;
    let total: usize = modules.iter().map(|m| m.dim).product();
    let mut out = Mat::zeros(total, total);
    let mut idx = vec![0usize; net.decor.len()];
    fn rec(
        w: usize,
        net: &Net,
        ranges: &[Vec<usize>],
        idx: &mut Vec<usize>,
        a: &LieBialgebraData,
        modules: &[DYModuleData],
        out: &mut Mat,
    ) {
        if w == ranges.len() {
            let mut coeff = Q::one();
            for m in &net.mus {
                coeff *= &a.bracket[idx[m[0]]][idx[m[1]]][idx[m[2]]];
                if coeff.is_zero() {
                    return;
                }
            }
            for d in &net.deltas {
                coeff *= &a.cobracket[idx[d[0]]][idx[d[1]]][idx[d[2]]];
                if coeff.is_zero() {
                    return;
                }
            }
            let mut acc: Option<Mat> = None;
            for (k, slot) in net.slots.iter().enumerate() {
                let mut m = Mat::identity(modules[k].dim);
                for e in slot {
                    let f = if e.coact { &modules[k].coaction[idx[e.wire]] } else { &modules[k].action[idx[e.wire]] };
                    m = m.mul(f);
                    if m.is_zero() {
                        return;
                    }
                }
                acc = Some(match acc {
                    None => m,
                    Some(x) => x.kron(&m),
                });
            }
            out.add_scaled(&coeff, &acc.expect("at least one slot"));
            return;
        }
        for &i in &ranges[w] {
            idx[w] = i;
            rec(w + 1, net, ranges, idx, a, modules, out);
        }
    }
    rec(0, net, &ranges, &mut idx, a, modules, &mut out);
    Ok(out)
}

pub fn evaluate_word(w: &Word, monoid: &DecorationMonoid, a: &LieBialgebraData, modules: &[DYModuleData]) -> Result<Mat> {
    evaluate_net(&Net::from_word(w), monoid, a, modules)
}

/// Evaluates an element of the universal algebra on `V_1 ⊗ ··· ⊗ V_n`.
pub fn evaluate(x: &AlgebraElement, a: &LieBialgebraData, modules: &[DYModuleData]) -> Result<Mat> {
    if x.n != modules.len() {
        return Err(Error::Mismatch(format!("{} slots but {} modules", x.n, modules.len())));
    }
    if x.monoid.law() != MonoidLaw::Trivial {
        if let Some(w) = &a.weights {
            if w.iter().any(|d| d.0[x.monoid.rank()..].iter().any(|&c| c != 0)) {
                return Err(Error::Mismatch("grading rank exceeds the decoration rank".into()));
            }
        }
    }
    let total: usize = modules.iter().map(|m| m.dim).product();
    let mut out = Mat::zeros(total, total);
    for (b, c) in &x.terms {
        let m = evaluate_word(&Word::from_basis(b), &x.monoid, a, modules)?;
        out.add_scaled(c, &m);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The Borel subalgebra of sl2 and its modules

/// Basis `h, e`; `[h,e] = 2e`, `δ(e) = e⊗h − h⊗e`.
pub fn sl2_borel() -> LieBialgebraData {
    let mut a = LieBialgebraData::zero(2);
    a.bracket[0][1][1] = q(2);
    a.bracket[1][0][1] = q(-2);
    a.cobracket[1][1][0] = q(1);
    a.cobracket[1][0][1] = q(-1);
    a.weights = Some(vec![Decor::ZERO, Decor::unit(0)]);
    a
}

/// `(H, E, F)` on the irreducible sl2 module of dimension `d`.
pub fn sl2_irrep(d: usize) -> (Mat, Mat, Mat) {
    let mut h = Mat::zeros(d, d);
    let mut e = Mat::zeros(d, d);
    let mut f = Mat::zeros(d, d);
    for k in 0..d {
        h.set(k, k, q(d as i64 - 1 - 2 * k as i64));
        if k + 1 < d {
            f.set(k + 1, k, Q::one());
        }
        if k > 0 {
            e.set(k - 1, k, q((k * (d - k)) as i64));
        }
    }
    (h, e, f)
}

/// DY module over the sl2 Borel from the `d`-dimensional sl2 module and a
/// shift `z`: `A_h = H + z`, `A_e = E`, `C^h = (H − z)/2`, `C^e = 2F`.
pub fn sl2_borel_module(d: usize, z: Q) -> DYModuleData {
    let (h, e, f) = sl2_irrep(d);
    let id = Mat::identity(d);
    let ah = h.add(&id.scale(&z));
    let ch = h.sub(&id.scale(&z)).scale(&qf(1, 2));
    DYModuleData { dim: d, action: vec![ah, e], coaction: vec![ch, f.scale(&q(2))] }
}

/// Adjoint representation of the double, as a DY module over `a`.
pub fn adjoint_double_module(a: &LieBialgebraData) -> Result<DYModuleData> {
    let g = build_double(a)?;
    let reps: Vec<Mat> = (0..g.dim).map(|i| g.ad(i)).collect();
    DYModuleData::from_double_rep(a.dim, &reps)
}

/// Abelian one-dimensional bialgebra with a two-dimensional module.
pub fn abelian_line() -> (LieBialgebraData, DYModuleData) {
    let a = LieBialgebraData::zero(1);
    let m = DYModuleData {
        dim: 2,
        action: vec![Mat::from_rows(vec![vec![q(1), q(1)], vec![q(0), q(1)]])],
        coaction: vec![Mat::from_rows(vec![vec![q(2), q(3)], vec![q(0), q(2)]])],
    };
    (a, m)
}

/// Test fleet over the sl2 Borel.
pub fn sl2_fleet() -> Vec<(String, DYModuleData)> {
    let a = sl2_borel();
    vec![
        ("V2(z=0)".into(), sl2_borel_module(2, Q::zero())),
        ("V2(z=1)".into(), sl2_borel_module(2, Q::one())),
        ("V3".into(), sl2_borel_module(3, Q::zero())),
        ("adjoint of the double".into(), adjoint_double_module(&a).expect("valid")),
    ]
}

/// `a ⊕ a'` with the first summand as sub-bialgebra (weight 0) and the second
/// as complement (weight 1).
pub fn direct_sum_split(a: &LieBialgebraData, b: &LieBialgebraData) -> LieBialgebraData {
    let (d1, d2) = (a.dim, b.dim);
    let mut s = LieBialgebraData::zero(d1 + d2);
    for i in 0..d1 {
        for j in 0..d1 {
            for k in 0..d1 {
                s.bracket[i][j][k] = a.bracket[i][j][k].clone();
                s.cobracket[i][j][k] = a.cobracket[i][j][k].clone();
            }
        }
    }
    for i in 0..d2 {
        for j in 0..d2 {
            for k in 0..d2 {
                s.bracket[d1 + i][d1 + j][d1 + k] = b.bracket[i][j][k].clone();
                s.cobracket[d1 + i][d1 + j][d1 + k] = b.cobracket[i][j][k].clone();
            }
        }
    }
    let mut w = vec![Decor::ZERO; d1];
    w.extend(vec![Decor::unit(0); d2]);
    s.weights = Some(w);
    s
}

/// Re-grades a root-graded bialgebra as a split pair: weights supported in
/// `support` become 0, others 1.
pub fn split_by_support(a: &LieBialgebraData, support: &[usize]) -> Result<LieBialgebraData> {
    let w = a.weights.as_ref().ok_or_else(|| Error::Mismatch("needs a graded bialgebra".into()))?;
    let mut s = a.clone();
    s.weights = Some(w.iter().map(|d| if d.supported_in(support) { Decor::ZERO } else { Decor::unit(0) }).collect());
    Ok(s)
}

/// Restricts a bialgebra and module to the basis vectors in `keep`.
pub fn restrict(a: &LieBialgebraData, v: &DYModuleData, keep: &[usize]) -> (LieBialgebraData, DYModuleData) {
    let d = keep.len();
    let mut b = LieBialgebraData::zero(d);
    for (i, &ii) in keep.iter().enumerate() {
        for (j, &jj) in keep.iter().enumerate() {
            for (k, &kk) in keep.iter().enumerate() {
                b.bracket[i][j][k] = a.bracket[ii][jj][kk].clone();
                b.cobracket[i][j][k] = a.cobracket[ii][jj][kk].clone();
            }
        }
    }
    let w = DYModuleData {
        dim: v.dim,
        action: keep.iter().map(|&i| v.action[i].clone()).collect(),
        coaction: keep.iter().map(|&i| v.coaction[i].clone()).collect(),
    };
    (b, w)
}

// ---------------------------------------------------------------------------
// Kac–Moody Borels

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KacMoodyData {
    pub gcm: Vec<Vec<i64>>,
    #[serde(default)]
    pub symmetrizer: Option<Vec<i64>>,
    pub cap: usize,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Positive coprime `D` with `D_i a_ij = D_j a_ji`.
pub fn symmetrizer(a: &[Vec<i64>]) -> Result<Vec<i64>> {
    let l = a.len();
    if a.iter().any(|r| r.len() != l) {
        return Err(Error::Parse("Cartan matrix must be square".into()));
    }
    for i in 0..l {
        if a[i][i] != 2 {
            return Err(Error::Domain("diagonal entries must be 2".into()));
        }
        for j in 0..l {
            if i != j && (a[i][j] > 0 || (a[i][j] == 0) != (a[j][i] == 0)) {
                return Err(Error::Domain("not a generalized Cartan matrix".into()));
            }
        }
    }
    let mut d: Vec<Option<Q>> = vec![None; l];
    for start in 0..l {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Q::one());
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..l {
                if i != j && a[i][j] != 0 && d[j].is_none() {
                    d[j] = Some(d[i].clone().unwrap() * q(a[i][j]) / q(a[j][i]));
                    stack.push(j);
                }
            }
        }
    }
    let d: Vec<Q> = d.into_iter().map(|x| x.unwrap()).collect();
    for i in 0..l {
        for j in 0..l {
            if &d[i] * q(a[i][j]) != &d[j] * q(a[j][i]) {
                return Err(Error::Domain("Cartan matrix is not symmetrizable".into()));
            }
        }
    }
    let lcm = d.iter().fold(1i64, |acc, x| {
        let den: i64 = x.denom().try_into().expect("small");
        acc / gcd(acc, den) * den
    });
    let ints: Vec<i64> = d.iter().map(|x| (x * q(lcm)).to_integer().try_into().expect("small")).collect();
    let g = ints.iter().fold(0, |acc, &x| gcd(acc, x));
    Ok(ints.into_iter().map(|x| x / g).collect())
}

impl KacMoodyData {
    pub fn new(gcm: Vec<Vec<i64>>, cap: usize) -> Self {
        KacMoodyData { gcm, symmetrizer: None, cap }
    }

    pub fn rank(&self) -> usize {
        self.gcm.len()
    }

    pub fn d(&self) -> Result<Vec<i64>> {
        let auto = symmetrizer(&self.gcm)?;
        match &self.symmetrizer {
            None => Ok(auto),
            Some(s) => {
                let l = self.rank();
                if s.len() != l || s.iter().any(|&x| x <= 0) {
                    return Err(Error::Domain("symmetrizer must be positive, one entry per node".into()));
                }
                for i in 0..l {
                    for j in 0..l {
                        if s[i] * self.gcm[i][j] != s[j] * self.gcm[j][i] {
                            return Err(Error::Domain("D·A is not symmetric".into()));
                        }
                    }
                }
                Ok(s.clone())
            }
        }
    }

    /// Form on the Cartan `h_1..h_l`: `(h_i, h_j) = a_ij / D_j`.
    pub fn cartan_form(&self) -> Result<Mat> {
        let d = self.d()?;
        let l = self.rank();
        let mut m = Mat::zeros(l, l);
        for i in 0..l {
            for j in 0..l {
                m.set(i, j, qf(self.gcm[i][j], d[j]));
            }
        }
        Ok(m)
    }

    /// Form on `h_1..h_l, λ_1..λ_l`: `(h_i,h_j) = a_ij/D_j`,
    /// `(h_i,λ_j) = δ_ij/D_i`, `(λ_i,λ_j) = 0`.
    pub fn extended_form(&self) -> Result<Mat> {
        let d = self.d()?;
        let l = self.rank();
        let mut m = Mat::zeros(2 * l, 2 * l);
        for i in 0..l {
            for j in 0..l {
                m.set(i, j, qf(self.gcm[i][j], d[j]));
            }
            m.set(i, l + i, qf(1, d[i]));
            m.set(l + i, i, qf(1, d[i]));
        }
        Ok(m)
    }
}

/// A truncated Borel with the labels of its basis.
#[derive(Clone, Debug)]
pub struct KacMoodyBorel {
    pub algebra: LieBialgebraData,
    pub labels: Vec<String>,
    pub rank: usize,
    pub cap: usize,
}

impl KacMoodyBorel {
    /// Indices of root vectors of weight `w`.
    pub fn root_space(&self, w: &Decor) -> Vec<usize> {
        let ws = self.algebra.weights.as_ref().expect("graded");
        (2 * self.rank..self.algebra.dim).filter(|&i| ws[i] == *w).collect()
    }
}

struct NPlusBuilder<'a> {
    a: &'a [Vec<i64>],
    l: usize,
    cap: usize,
    weight: Vec<Decor>,
    /// Basis vector = `[e_i, x]`; `None` for simple root vectors.
    origin: Vec<Option<(usize, usize)>>,
    /// `[f_j, x]` per basis vector.
    fimg: Vec<Vec<SparseVec>>,
    /// `[e_i, x]` for root vectors `x` below the cap.
    eimg: HashMap<(usize, usize), SparseVec>,
    by_weight: BTreeMap<Decor, Vec<usize>>,
}

fn sv_add(acc: &mut BTreeMap<usize, Q>, c: &Q, v: &SparseVec) {
    for (i, x) in v {
        let e = acc.entry(*i).or_insert_with(Q::zero);
        *e += c * x;
        if e.is_zero() {
            acc.remove(i);
        }
    }
}

impl<'a> NPlusBuilder<'a> {
    fn ht(d: &Decor) -> usize {
        d.height()
    }

    fn pair(&self, i: usize, w: &Decor) -> i64 {
        (0..self.l).map(|k| self.a[i][k] * w.0[k] as i64).sum()
    }

    /// `[e_i, v]`.
    fn ad_e(&self, i: usize, v: &SparseVec) -> SparseVec {
        let l = self.l;
        let ei = 2 * l + i;
        let mut acc = BTreeMap::new();
        for (x, c) in v {
            if *x < l {
                // [e_i, h_m] = −a_mi e_i
                sv_add(&mut acc, &(c * q(-self.a[*x][i])), &vec![(ei, Q::one())]);
            } else if *x < 2 * l {
                if *x - l == i {
                    sv_add(&mut acc, &-c.clone(), &vec![(ei, Q::one())]);
                }
            } else if Self::ht(&self.weight[*x]) < self.cap {
                sv_add(&mut acc, c, &self.eimg[&(i, *x)]);
            }
        }
        acc.into_iter().collect()
    }

    fn build(a: &'a [Vec<i64>], cap: usize) -> Self {
        let l = a.len();
        let mut weight = vec![Decor::ZERO; 2 * l];
        let mut origin = vec![None; 2 * l];
        let mut fimg = vec![vec![]; 2 * l];
        let mut by_weight = BTreeMap::new();
        for i in 0..l {
            let g = weight.len();
            weight.push(Decor::unit(i));
            origin.push(None);
            fimg.push((0..l).map(|j| if i == j { vec![(i, -Q::one())] } else { vec![] }).collect());
            by_weight.insert(Decor::unit(i), vec![g]);
        }
        let mut b = NPlusBuilder { a, l, cap, weight, origin, fimg, eimg: HashMap::new(), by_weight };
        for k in 2..=cap {
            let lower: Vec<(Decor, Vec<usize>)> =
                b.by_weight.iter().filter(|(w, _)| Self::ht(w) == k - 1).map(|(w, v)| (*w, v.clone())).collect();
            let mut targets: BTreeMap<Decor, Vec<(usize, usize)>> = BTreeMap::new();
            for (w, xs) in &lower {
                for i in 0..l {
                    let mut t = *w;
                    t.0[i] += 1;
                    for &x in xs {
                        targets.entry(t).or_default().push((i, x));
                    }
                }
            }
            let total = b.weight.len() + 64 * l;
            for (t, cands) in targets {
                let mut ech = Echelon::tracking();
                let mut images = Vec::new();
                for &(i, x) in &cands {
                    let bw = b.weight[x];
                    let mut parts = Vec::with_capacity(l);
                    for j in 0..l {
                        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                        if i == j {
                            sv_add(&mut acc, &q(-b.pair(i, &bw)), &vec![(x, Q::one())]);
                        }
                        sv_add(&mut acc, &Q::one(), &b.ad_e(i, &b.fimg[x][j]));
                        parts.push(acc.into_iter().collect::<SparseVec>());
                    }
                    let flat: SparseVec =
                        parts.iter().enumerate().flat_map(|(j, p)| p.iter().map(move |(k, c)| (j * total + k, c.clone()))).collect();
                    images.push((parts, flat));
                }
                let mut chosen: Vec<usize> = Vec::new();
                for (ci, (_, flat)) in images.iter().enumerate() {
                    if ech.insert(flat) {
                        chosen.push(ci);
                    }
                }
                let mut ech2 = Echelon::tracking();
                for &ci in &chosen {
                    ech2.insert(&images[ci].1);
                }
                let mut gidx = Vec::new();
                for &ci in &chosen {
                    let g = b.weight.len();
                    b.weight.push(t);
                    b.origin.push(Some(cands[ci]));
                    b.fimg.push(images[ci].0.clone());
                    gidx.push(g);
                }
                for (ci, &(i, x)) in cands.iter().enumerate() {
                    let coords = ech2.solve(&images[ci].1).expect("in span");
                    b.eimg.insert((i, x), coords.into_iter().map(|(k, c)| (gidx[k], c)).collect());
                }
                if !gidx.is_empty() {
                    b.by_weight.insert(t, gidx);
                }
            }
            // brackets of e_i with height k−1 vectors that vanish
            for (_, xs) in &lower {
                for &x in xs {
                    for i in 0..l {
                        b.eimg.entry((i, x)).or_default();
                    }
                }
            }
        }
        b
    }
}

/// Truncated Borel `h ⊕ λ ⊕ n₊` (roots of height ≤ cap) with cobracket
/// `δ(e_i) = (D_i/2)(e_i⊗h_i − h_i⊗e_i)` extended by the cocycle rule.
pub fn build_kac_moody_borel(k: &KacMoodyData) -> Result<KacMoodyBorel> {
    let l = k.rank();
    if l == 0 || l > 3 {
        return Err(Error::Domain("rank must be in 1..=3".into()));
    }
    if k.cap == 0 || k.cap > 4 {
        return Err(Error::Domain("height cap must be in 1..=4".into()));
    }
    let dsym = k.d()?;
    let b = NPlusBuilder::build(&k.gcm, k.cap);
    let dim = b.weight.len();
    let mut alg = LieBialgebraData::zero(dim);
    // Cartan brackets
    for x in 2 * l..dim {
        let w = b.weight[x];
        for m in 0..l {
            let hv = q(b.pair(m, &w));
            alg.bracket[m][x][x] = hv.clone();
            alg.bracket[x][m][x] = -hv;
            let lv = q(w.0[m] as i64);
            alg.bracket[l + m][x][x] = lv.clone();
            alg.bracket[x][l + m][x] = -lv;
        }
    }
    // root brackets, by recursion on the first argument
    let mut memo: HashMap<(usize, usize), SparseVec> = HashMap::new();
    fn br(b: &NPlusBuilder, x: usize, y: &SparseVec, memo: &mut HashMap<(usize, usize), SparseVec>) -> SparseVec {
        let mut acc = BTreeMap::new();
        for (yy, c) in y {
            let v = br1(b, x, *yy, memo);
            sv_add(&mut acc, c, &v);
        }
        acc.into_iter().collect()
    }
    fn br1(b: &NPlusBuilder, x: usize, y: usize, memo: &mut HashMap<(usize, usize), SparseVec>) -> SparseVec {
        if NPlusBuilder::ht(&b.weight[x]) + NPlusBuilder::ht(&b.weight[y]) > b.cap {
            return vec![];
        }
        if let Some(v) = memo.get(&(x, y)) {
            return v.clone();
        }
        let v = match b.origin[x] {
            None => b.ad_e(x - 2 * b.l, &vec![(y, Q::one())]),
            Some((i, xp)) => {
                // [[e_i,x'],y] = [e_i,[x',y]] − [x',[e_i,y]]
                let inner = br1(b, xp, y, memo);
                let mut acc = BTreeMap::new();
                sv_add(&mut acc, &Q::one(), &b.ad_e(i, &inner));
                let ey = b.ad_e(i, &vec![(y, Q::one())]);
                sv_add(&mut acc, &-Q::one(), &br(b, xp, &ey, memo));
                acc.into_iter().collect()
            }
        };
        memo.insert((x, y), v.clone());
        v
    }
    for x in 2 * l..dim {
        for y in 2 * l..dim {
            for (kk, c) in br1(&b, x, y, &mut memo) {
                alg.bracket[x][y][kk] = c;
            }
        }
    }
    // cobracket via δ([e_i,x]) = e_i·δ(x) − x·δ(e_i)
    let act = |alg: &LieBialgebraData, u: usize, t: &BTreeMap<(usize, usize), Q>| -> BTreeMap<(usize, usize), Q> {
        let mut out: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for ((p, qq), c) in t {
            for m in 0..dim {
                let v = &alg.bracket[u][*p][m];
                if !v.is_zero() {
                    *out.entry((m, *qq)).or_insert_with(Q::zero) += c * v;
                }
                let v = &alg.bracket[u][*qq][m];
                if !v.is_zero() {
                    *out.entry((*p, m)).or_insert_with(Q::zero) += c * v;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    };
    let mut delta: Vec<BTreeMap<(usize, usize), Q>> = vec![BTreeMap::new(); dim];
    for x in 2 * l..dim {
        match b.origin[x] {
            None => {
                let i = x - 2 * l;
                let half = qf(dsym[i], 2);
                delta[x].insert((x, i), half.clone());
                delta[x].insert((i, x), -half);
            }
            Some((i, xp)) => {
                let ei = 2 * l + i;
                let mut t = act(&alg, ei, &delta[xp]);
                for (key, c) in act(&alg, xp, &delta[ei]) {
                    *t.entry(key).or_insert_with(Q::zero) -= c;
                }
                t.retain(|_, c| !c.is_zero());
                delta[x] = t;
            }
        }
    }
    for (x, t) in delta.iter().enumerate() {
        for ((p, qq), c) in t {
            alg.cobracket[x][*p][*qq] = c.clone();
        }
    }
    alg.weights = Some(b.weight.clone());
    let mut labels: Vec<String> = (1..=l).map(|i| format!("h{i}")).collect();
    labels.extend((1..=l).map(|i| format!("l{i}")));
    for x in 2 * l..dim {
        let w: Vec<String> = b.weight[x].0[..l].iter().map(|c| c.to_string()).collect();
        labels.push(format!("e[{}]#{}", w.join(","), x));
    }
    Ok(KacMoodyBorel { algebra: alg, labels, rank: l, cap: k.cap })
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LieBialgebraJson {
    pub dim: usize,
    pub bracket: Vec<Vec<Vec<String>>>,
    pub cobracket: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<u8>>>,
}

fn t_to_json(t: &Tensor3) -> Vec<Vec<Vec<String>>> {
    t.iter().map(|m| m.iter().map(|r| r.iter().map(rational::to_string).collect()).collect()).collect()
}

fn t_from_json(t: &[Vec<Vec<String>>]) -> Result<Tensor3> {
    t.iter()
        .map(|m| {
            m.iter()
                .map(|r| r.iter().map(|s| rational::parse(s).ok_or_else(|| Error::Parse(format!("bad rational {s}")))).collect())
                .collect()
        })
        .collect()
}

impl LieBialgebraData {
    pub fn to_json(&self) -> LieBialgebraJson {
        LieBialgebraJson {
            dim: self.dim,
            bracket: t_to_json(&self.bracket),
            cobracket: t_to_json(&self.cobracket),
            weights: self.weights.as_ref().map(|w| {
                let r = w.iter().map(|d| (0..MAX_RANK).rev().find(|&i| d.0[i] != 0).map_or(0, |i| i + 1)).max().unwrap_or(0);
                w.iter().map(|d| d.0[..r.max(1)].to_vec()).collect()
            }),
        }
    }

    pub fn from_json(j: &LieBialgebraJson) -> Result<Self> {
        let a = LieBialgebraData {
            dim: j.dim,
            bracket: t_from_json(&j.bracket)?,
            cobracket: t_from_json(&j.cobracket)?,
            weights: match &j.weights {
                None => None,
                Some(w) => Some(
                    w.iter()
                        .map(|v| if v.len() > MAX_RANK { Err(Error::Parse("weight too long".into())) } else { Ok(Decor::from_slice(v)) })
                        .collect::<Result<_>>()?,
                ),
            },
        };
        a.check_shape().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(a)
    }
}

/// Rows of exact rationals as strings.
pub fn matrix_to_json(m: &Mat) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| (0..m.cols).map(|j| rational::to_string(m.get(i, j))).collect()).collect()
}

pub fn matrix_from_json(rows: &[Vec<String>]) -> Result<Mat> {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|s| rational::parse(s).ok_or_else(|| Error::Parse(format!("bad rational {s}")))).collect())
        .collect::<Result<Vec<Vec<Q>>>>()?;
    Ok(Mat::from_rows(parsed))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DYModuleJson {
    pub dim: usize,
    pub action: Vec<Vec<Vec<String>>>,
    pub coaction: Vec<Vec<Vec<String>>>,
}

impl DYModuleData {
    pub fn to_json(&self) -> DYModuleJson {
        DYModuleJson {
            dim: self.dim,
            action: self.action.iter().map(matrix_to_json).collect(),
            coaction: self.coaction.iter().map(matrix_to_json).collect(),
        }
    }

    pub fn from_json(j: &DYModuleJson) -> Result<Self> {
        let action = j.action.iter().map(|m| matrix_from_json(m)).collect::<Result<Vec<_>>>()?;
        let coaction = j.coaction.iter().map(|m| matrix_from_json(m)).collect::<Result<Vec<_>>>()?;
        if action.len() != coaction.len()
            || action.iter().chain(&coaction).any(|m| m.rows != j.dim || m.cols != j.dim)
        {
            return Err(Error::Parse("module matrices must be dim × dim, one action and coaction per index".into()));
        }
        Ok(DYModuleData { dim: j.dim, action, coaction })
    }
}

/// Checks whether a square rational matrix is invertible.
pub fn is_nondegenerate(m: &Mat) -> bool {
    m.rows == m.cols && m.rank() == m.rows
}

/// Largest absolute entry, for reporting.
pub fn max_abs(m: &Mat) -> Q {
    m.data.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn borel_and_fleet_are_valid() {
        let a = sl2_borel();
        assert!(validate_bialgebra(&a).unwrap().is_valid());
        for (name, m) in sl2_fleet() {
            assert!(validate_dy_module(&a, &m).unwrap().is_valid(), "{name}");
        }
        let (ab, m) = abelian_line();
        assert!(validate_dy_module(&ab, &m).unwrap().is_valid());
    }

    #[test]
    fn seeded_cobracket_failure() {
        let mut a = sl2_borel();
        a.cobracket[1][0][1] = q(1);
        let r = validate_bialgebra(&a).unwrap();
        assert!(r.violations.iter().any(|v| v.starts_with("co-antisymmetry")));
    }

    #[test]
    fn double_form_invariant() {
        let a = sl2_borel();
        let g = build_double(&a).unwrap();
        assert!(validate_bialgebra(&g).unwrap().is_valid());
        assert!(form_is_invariant(&g, &double_form(2)));
    }

    #[test]
    fn kac_moody_a2() {
        let k = KacMoodyData::new(vec![vec![2, -1], vec![-1, 2]], 2);
        let b = build_kac_moody_borel(&k).unwrap();
        assert_eq!(b.algebra.dim, 4 + 3);
        for w in [[1, 0], [0, 1], [1, 1]] {
            assert_eq!(b.root_space(&Decor::from_slice(&w)).len(), 1);
        }
        assert!(validate_bialgebra(&b.algebra).unwrap().is_valid());
        let k3 = KacMoodyData::new(vec![vec![2, -1], vec![-1, 2]], 4);
        assert_eq!(build_kac_moody_borel(&k3).unwrap().algebra.dim, 7);
    }

    #[test]
    fn kac_moody_a1_matches_sl2_borel() {
        let b = build_kac_moody_borel(&KacMoodyData::new(vec![vec![2]], 1)).unwrap();
        // basis h, λ, e; [h,e] = 2e
        assert_eq!(b.algebra.bracket[0][2][2], q(2));
        assert_eq!(b.algebra.cobracket[2][2][0], qf(1, 2));
    }

    #[test]
    fn symmetrizers() {
        assert_eq!(symmetrizer(&[vec![2, -1], vec![-2, 2]]).unwrap(), vec![2, 1]);
        assert!(symmetrizer(&[vec![2, -1, 0], vec![-1, 2, -1], vec![-2, 0, 2]]).is_err());
        let k = KacMoodyData { gcm: vec![vec![2, -1], vec![-2, 2]], symmetrizer: Some(vec![1, 1]), cap: 2 };
        assert!(k.d().is_err());
    }
}

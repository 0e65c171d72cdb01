//! The graded algebras of normally ordered diagrams on `n` slots, with
//! optional strand decorations.

use crate::combinatorics::{enumerate_compositions, Composition, Decor, DecorationMonoid, MonoidLaw, Permutation};
use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::rewriter::{compose_basis_terms, Ctx, Ev, Word};
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// One normally ordered diagram. Action legs are numbered left to right
/// across slots; `perm[j]` is the action leg joined to coaction leg `j`;
/// `decor[i]` decorates the strand through action leg `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub actions: Composition,
    pub coactions: Composition,
    pub perm: Permutation,
    pub decor: Vec<Decor>,
}

impl BasisElement {
    pub fn unit(n: usize) -> Self {
        BasisElement {
            actions: Composition(vec![0; n]),
            coactions: Composition(vec![0; n]),
            perm: Permutation(vec![]),
            decor: vec![],
        }
    }

    pub fn new(actions: Vec<usize>, coactions: Vec<usize>, perm: Permutation, decor: Vec<Decor>) -> Result<Self> {
        let b = BasisElement { actions: Composition(actions), coactions: Composition(coactions), perm, decor };
        b.check()?;
        Ok(b)
    }

    fn check(&self) -> Result<()> {
        let n = self.strands();
        if self.actions.len() == 0 || self.actions.len() != self.coactions.len() {
            return Err(Error::Mismatch("action and coaction compositions need the same positive length".into()));
        }
        if self.coactions.total() != n || self.perm.len() != n || self.decor.len() != n {
            return Err(Error::Mismatch("strand counts disagree".into()));
        }
        Ok(())
    }

    pub fn strands(&self) -> usize {
        self.actions.total()
    }

    pub fn slots(&self) -> usize {
        self.actions.len()
    }

    fn key(&self) -> (usize, &Composition, &Vec<Decor>, &Permutation, &Composition) {
        (self.strands(), &self.coactions, &self.decor, &self.perm, &self.actions)
    }
}

impl Ord for BasisElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for BasisElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All basis elements with `n` slots and `strands` strands; decorations
/// range over the monoid window.
pub fn basis(n: usize, strands: usize, monoid: &DecorationMonoid) -> Result<Vec<BasisElement>> {
    let comps = enumerate_compositions(strands, n)?;
    let perms = Permutation::all(strands);
    let window = monoid.window();
    let mut decors: Vec<Vec<Decor>> = vec![vec![]];
    for _ in 0..strands {
        decors = decors
            .into_iter()
            .flat_map(|v| {
                window.iter().map(move |d| {
                    let mut w = v.clone();
                    w.push(*d);
                    w
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for a in &comps {
        for c in &comps {
            for p in &perms {
                for d in &decors {
                    out.push(BasisElement { actions: a.clone(), coactions: c.clone(), perm: p.clone(), decor: d.clone() });
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    pub n: usize,
    pub monoid: DecorationMonoid,
    pub terms: BTreeMap<BasisElement, Q>,
}

impl AlgebraElement {
    pub fn zero(n: usize, monoid: DecorationMonoid) -> Self {
        AlgebraElement { n, monoid, terms: BTreeMap::new() }
    }

    pub fn one(n: usize, monoid: DecorationMonoid) -> Self {
        Self::from_basis(BasisElement::unit(n), monoid)
    }

    pub fn scalar(n: usize, monoid: DecorationMonoid, c: Q) -> Self {
        Self::one(n, monoid).scale(&c)
    }

    pub fn from_basis(b: BasisElement, monoid: DecorationMonoid) -> Self {
        let n = b.slots();
        let mut terms = BTreeMap::new();
        terms.insert(b, Q::one());
        AlgebraElement { n, monoid, terms }
    }

    pub fn from_terms(n: usize, monoid: DecorationMonoid, terms: BTreeMap<BasisElement, Q>) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        AlgebraElement { n, monoid, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest and largest string degree present; `(0, 0)` for zero.
    pub fn degree_bounds(&self) -> (usize, usize) {
        let lo = self.terms.keys().map(|b| b.strands()).min().unwrap_or(0);
        let hi = self.terms.keys().map(|b| b.strands()).max().unwrap_or(0);
        (lo, hi)
    }

    pub fn is_homogeneous(&self, deg: usize) -> bool {
        self.terms.keys().all(|b| b.strands() == deg)
    }

    pub fn part(&self, deg: usize) -> Self {
        self.filter(|b| b.strands() == deg)
    }

    pub fn truncate(&self, max_deg: usize) -> Self {
        self.filter(|b| b.strands() <= max_deg)
    }

    pub fn filter(&self, keep: impl Fn(&BasisElement) -> bool) -> Self {
        AlgebraElement {
            n: self.n,
            monoid: self.monoid.clone(),
            terms: self.terms.iter().filter(|(b, _)| keep(b)).map(|(b, c)| (b.clone(), c.clone())).collect(),
        }
    }

    /// Coefficient of the empty diagram.
    pub fn counit(&self) -> Q {
        self.terms.get(&BasisElement::unit(self.n)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, b: &BasisElement) -> Q {
        self.terms.get(b).cloned().unwrap_or_else(Q::zero)
    }

    fn same_space(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::Mismatch(format!("slot counts {} and {}", self.n, o.n)));
        }
        if self.monoid != o.monoid {
            return Err(Error::Mismatch("decoration monoids differ".into()));
        }
        Ok(())
    }

    pub fn add_assign_scaled(&mut self, c: &Q, o: &Self) {
        debug_assert!(self.same_space(o).is_ok());
        if c.is_zero() {
            return;
        }
        for (b, k) in &o.terms {
            push(&mut self.terms, b, c * k);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign_scaled(&Q::one(), o);
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign_scaled(&-Q::one(), o);
        r
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.n, self.monoid.clone());
        }
        AlgebraElement {
            n: self.n,
            monoid: self.monoid.clone(),
            terms: self.terms.iter().map(|(b, k)| (b.clone(), k * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    /// Product `self · o` (`o` acts first).
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_space(o)?;
        Ok(self.mul_trunc(o, usize::MAX))
    }

    /// Product keeping only string degrees `≤ max_deg`.
    pub fn mul_trunc(&self, o: &Self, max_deg: usize) -> Self {
        let ctx = Ctx::of(&self.monoid);
        let mut acc = BTreeMap::new();
        for (s, a) in &self.terms {
            for (t, b) in &o.terms {
                if s.strands() + t.strands() > max_deg {
                    continue;
                }
                let ab = a * b;
                for (u, c) in compose_basis_terms(&ctx, s, t).iter() {
                    push(&mut acc, u, &ab * c);
                }
            }
        }
        AlgebraElement { n: self.n, monoid: self.monoid.clone(), terms: acc }
    }

    pub fn commutator(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(o)?.sub(&o.mul(self)?))
    }

    /// Sum of `c_k · op(b_k)` over terms.
    fn map_terms(&self, n: usize, monoid: DecorationMonoid, op: impl Fn(&BasisElement) -> Vec<(BasisElement, Q)>) -> Self {
        let mut acc = BTreeMap::new();
        for (b, c) in &self.terms {
            for (u, k) in op(b) {
                push(&mut acc, &u, c * k);
            }
        }
        AlgebraElement { n, monoid, terms: acc }
    }

    // -- cosimplicial structure ---------------------------------------------

    /// Face `i ∈ 0..=n+1`: `0` and `n+1` add an empty outer slot, `1..=n`
    /// split slot `i` in two, distributing its letters in all ways.
    pub fn face_map(&self, i: usize) -> Result<Self> {
        if i > self.n + 1 {
            return Err(Error::Domain(format!("face index {i} outside 0..={}", self.n + 1)));
        }
        Ok(self.map_terms(self.n + 1, self.monoid.clone(), |b| face_basis(b, i)))
    }

    /// Alternating sum of faces.
    pub fn hochschild_d(&self) -> Self {
        let mut out = Self::zero(self.n + 1, self.monoid.clone());
        for i in 0..=self.n + 1 {
            let sign = if i % 2 == 0 { Q::one() } else { -Q::one() };
            out.add_assign_scaled(&sign, &self.face_map(i).expect("index in range"));
        }
        out
    }

    /// Moves slot `k` to slot `sigma(k)` (0-based permutation of slots).
    pub fn permute_slots(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.len() != self.n {
            return Err(Error::Mismatch("slot permutation size".into()));
        }
        Ok(self.map_terms(self.n, self.monoid.clone(), |b| {
            let w = Word::from_basis(b);
            let mut slots = vec![Vec::new(); self.n];
            for (k, s) in w.slots.into_iter().enumerate() {
                slots[sigma.apply(k)] = s;
            }
            vec![(Word { slots, decor: w.decor }.to_basis(), Q::one())]
        }))
    }

    /// `(1/n!) Σ sgn(σ) σ(x)`.
    pub fn alt(&self) -> Self {
        let mut out = Self::zero(self.n, self.monoid.clone());
        let w = Q::one() / rational::factorial(self.n);
        for s in Permutation::all(self.n) {
            out.add_assign_scaled(&(&w * Q::from_integer(s.sign().into())), &self.permute_slots(&s).expect("size"));
        }
        out
    }

    /// Embeds into `m ≥ n` slots, sending slot `k` to `slots[k]` (0-based).
    pub fn place(&self, m: usize, slots: &[usize]) -> Result<Self> {
        if slots.len() != self.n || slots.iter().any(|&s| s >= m) {
            return Err(Error::Mismatch("bad slot placement".into()));
        }
        let mut seen = vec![false; m];
        for &s in slots {
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::Mismatch("repeated slot in placement".into()));
            }
        }
        Ok(self.map_terms(m, self.monoid.clone(), |b| {
            let w = Word::from_basis(b);
            let mut out = vec![Vec::new(); m];
            for (k, s) in w.slots.into_iter().enumerate() {
                out[slots[k]] = s;
            }
            vec![(Word { slots: out, decor: w.decor }.to_basis(), Q::one())]
        }))
    }

    /// Same diagrams with all-zero decorations read in another monoid.
    fn relabel_monoid(&self, target: DecorationMonoid, f: impl Fn(&[Decor]) -> Vec<(Vec<Decor>, Q)>) -> Self {
        self.map_terms(self.n, target, |b| {
            f(&b.decor)
                .into_iter()
                .map(|(d, c)| (BasisElement { decor: d, ..b.clone() }, c))
                .collect()
        })
    }

    // -- JSON ----------------------------------------------------------------

    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            n: self.n,
            monoid: self.monoid.clone(),
            terms: self
                .terms
                .iter()
                .map(|(b, c)| TermJson {
                    coeff: rational::to_string(c),
                    actions: b.actions.0.clone(),
                    coactions: b.coactions.0.clone(),
                    perm: b.perm.images(),
                    decor: b.decor.iter().map(|d| self.monoid.format_decor(d)).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &ElementJson) -> Result<Self> {
        j.monoid.validate()?;
        if j.n == 0 {
            return Err(Error::Parse("n must be positive".into()));
        }
        let mut terms = BTreeMap::new();
        for t in &j.terms {
            let c = rational::parse(&t.coeff).ok_or_else(|| Error::Parse(format!("bad coefficient {}", t.coeff)))?;
            let perm = Permutation::from_images(&t.perm)?;
            let decor = t.decor.iter().map(|d| j.monoid.parse_decor(d)).collect::<Result<Vec<_>>>()?;
            let b = BasisElement::new(t.actions.clone(), t.coactions.clone(), perm, decor)
                .map_err(|e| Error::Parse(e.to_string()))?;
            if b.slots() != j.n {
                return Err(Error::Parse("term slot count differs from n".into()));
            }
            push(&mut terms, &b, c);
        }
        Ok(AlgebraElement { n: j.n, monoid: j.monoid.clone(), terms })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: ElementJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&j)
    }
}

fn push(acc: &mut BTreeMap<BasisElement, Q>, b: &BasisElement, c: Q) {
    if c.is_zero() {
        return;
    }
    if let Some(e) = acc.get_mut(b) {
        *e += c;
        if e.is_zero() {
            acc.remove(b);
        }
    } else {
        acc.insert(b.clone(), c);
    }
}

fn face_basis(b: &BasisElement, i: usize) -> Vec<(BasisElement, Q)> {
    let w = Word::from_basis(b);
    let n = w.slots.len();
    if i == 0 || i == n + 1 {
        let mut slots = w.slots.clone();
        slots.insert(if i == 0 { 0 } else { n }, Vec::new());
        return vec![(Word { slots, decor: w.decor }.to_basis(), Q::one())];
    }
    let k = i - 1;
    let letters = &w.slots[k];
    let mut out = Vec::with_capacity(1 << letters.len());
    for mask in 0u32..(1u32 << letters.len()) {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for (p, &e) in letters.iter().enumerate() {
            if mask >> p & 1 == 0 {
                left.push(e);
            } else {
                right.push(e);
            }
        }
        let mut slots = w.slots.clone();
        slots[k] = left;
        slots.insert(k + 1, right);
        out.push((Word { slots, decor: w.decor.clone() }.to_basis(), Q::one()));
    }
    out
}

impl fmt::Display for AlgebraElement {
    /// Terms as `c·[actions|coactions|perm|decor]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (b, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})·[{:?}|{:?}|{:?}", rational::to_string(c), b.actions.0, b.coactions.0, b.perm.images())?;
            if self.monoid.rank() > 0 {
                let d: Vec<Vec<u8>> = b.decor.iter().map(|d| self.monoid.format_decor(d)).collect();
                write!(f, "|{d:?}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub actions: Vec<usize>,
    pub coactions: Vec<usize>,
    pub perm: Vec<usize>,
    pub decor: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub n: usize,
    pub monoid: DecorationMonoid,
    pub terms: Vec<TermJson>,
}

// ---------------------------------------------------------------------------
// Distinguished elements (slots are 1-based here)

fn check_slot(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::Domain(format!("slot {i} outside 1..={n}")));
    }
    Ok(())
}

/// One strand, action on slot `i`, coaction on slot `j`, decoration `d`.
pub fn one_strand(n: usize, i: usize, j: usize, d: Decor, monoid: &DecorationMonoid) -> Result<AlgebraElement> {
    check_slot(n, i)?;
    check_slot(n, j)?;
    if !monoid.contains(&d) {
        return Err(Error::Domain("decoration outside the monoid window".into()));
    }
    let mut a = vec![0; n];
    let mut c = vec![0; n];
    a[i - 1] = 1;
    c[j - 1] = 1;
    let b = BasisElement::new(a, c, Permutation::identity(1), vec![d])?;
    Ok(AlgebraElement::from_basis(b, monoid.clone()))
}

/// `r^{ij}`: action on slot `i`, coaction on slot `j`, zero decoration.
pub fn r_matrix(n: usize, i: usize, j: usize, monoid: &DecorationMonoid) -> Result<AlgebraElement> {
    if i == j {
        return Err(Error::Domain("r-matrix needs distinct slots".into()));
    }
    one_strand(n, i, j, Decor::ZERO, monoid)
}

/// `Ω_{ij} = r^{ij} + r^{ji}`.
pub fn omega(n: usize, i: usize, j: usize, monoid: &DecorationMonoid) -> Result<AlgebraElement> {
    Ok(r_matrix(n, i, j, monoid)?.add(&r_matrix(n, j, i, monoid)?))
}

/// `κ` on slot `i`, zero decoration.
pub fn kappa(n: usize, i: usize, monoid: &DecorationMonoid) -> Result<AlgebraElement> {
    one_strand(n, i, i, Decor::ZERO, monoid)
}

/// `κ_α` on slot `i`.
pub fn kappa_alpha(n: usize, i: usize, alpha: Decor, monoid: &DecorationMonoid) -> Result<AlgebraElement> {
    one_strand(n, i, i, alpha, monoid)
}

/// `Σ_{β ∈ Q₊(B)} κ_β` over the window.
pub fn kappa_sum(n: usize, i: usize, support: &[usize], monoid: &DecorationMonoid) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero(n, monoid.clone());
    for d in monoid.window() {
        if d.supported_in(support) {
            out = out.add(&kappa_alpha(n, i, d, monoid)?);
        }
    }
    Ok(out)
}

/// Invariance: `[Σ_k r^{0k}, x^{1..n}] = 0 = [Σ_k r^{k0}, x^{1..n}]`, with
/// the zero-decorated `r`.
pub fn is_invariant(x: &AlgebraElement) -> Result<bool> {
    is_invariant_wrt(x, Decor::ZERO)
}

/// As [`is_invariant`] with `r` decorated by `d`.
pub fn is_invariant_wrt(x: &AlgebraElement, d: Decor) -> Result<bool> {
    let n = x.n;
    let shifted = x.face_map(0)?;
    let m = &x.monoid;
    let mut left = AlgebraElement::zero(n + 1, m.clone());
    let mut right = AlgebraElement::zero(n + 1, m.clone());
    for k in 2..=n + 1 {
        left = left.add(&one_strand(n + 1, 1, k, d, m)?);
        right = right.add(&one_strand(n + 1, k, 1, d, m)?);
    }
    Ok(left.commutator(&shifted)?.is_zero() && right.commutator(&shifted)?.is_zero())
}

// ---------------------------------------------------------------------------
// Maps between decorated algebras

fn expect_law(x: &AlgebraElement, law: MonoidLaw, what: &str) -> Result<()> {
    if x.monoid.law() != law {
        return Err(Error::Mismatch(format!("{what} expects a {law:?} element")));
    }
    Ok(())
}

fn product_of(choices: &[Vec<Decor>]) -> Vec<Vec<Decor>> {
    let mut out: Vec<Vec<Decor>> = vec![vec![]];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|v| {
                c.iter().map(move |d| {
                    let mut w = v.clone();
                    w.push(*d);
                    w
                })
            })
            .collect();
    }
    out
}

/// Undecorated → split, all strands on the sub-bialgebra.
pub fn alpha_map(x: &AlgebraElement) -> Result<AlgebraElement> {
    expect_law(x, MonoidLaw::Trivial, "alpha")?;
    Ok(x.relabel_monoid(DecorationMonoid::Split, |d| vec![(vec![Decor::ZERO; d.len()], Q::one())]))
}

/// Undecorated → split, summing over all decorations.
pub fn beta_map(x: &AlgebraElement) -> Result<AlgebraElement> {
    expect_law(x, MonoidLaw::Trivial, "beta")?;
    let both = vec![Decor::ZERO, Decor::unit(0)];
    Ok(x.relabel_monoid(DecorationMonoid::Split, |d| {
        product_of(&vec![both.clone(); d.len()]).into_iter().map(|v| (v, Q::one())).collect()
    }))
}

fn cone_target(target: &DecorationMonoid) -> Result<()> {
    match target {
        DecorationMonoid::RootCone { .. } => Ok(()),
        _ => Err(Error::Mismatch("target must be a root cone".into())),
    }
}

/// Undecorated → cone, each strand summed over `Q₊(B)` in the window.
pub fn rho_tilde_b(x: &AlgebraElement, support: &[usize], target: &DecorationMonoid) -> Result<AlgebraElement> {
    expect_law(x, MonoidLaw::Trivial, "rho_B")?;
    cone_target(target)?;
    let span: Vec<Decor> = target.window().into_iter().filter(|d| d.supported_in(support)).collect();
    Ok(x.relabel_monoid(target.clone(), |d| {
        product_of(&vec![span.clone(); d.len()]).into_iter().map(|v| (v, Q::one())).collect()
    }))
}

/// Split → cone: decoration 0 goes to `Q₊(B)`, decoration 1 to
/// `Q₊(C) ∖ Q₊(B)`, both within the window.
pub fn rho_tilde_bc(x: &AlgebraElement, b: &[usize], c: &[usize], target: &DecorationMonoid) -> Result<AlgebraElement> {
    expect_law(x, MonoidLaw::Split, "rho_BC")?;
    cone_target(target)?;
    if !b.iter().all(|i| c.contains(i)) {
        return Err(Error::Domain("B must be contained in C".into()));
    }
    let w = target.window();
    let low: Vec<Decor> = w.iter().copied().filter(|d| d.supported_in(b)).collect();
    let high: Vec<Decor> = w.iter().copied().filter(|d| d.supported_in(c) && !d.supported_in(b)).collect();
    Ok(x.relabel_monoid(target.clone(), |d| {
        let choices: Vec<Vec<Decor>> = d.iter().map(|e| if e.is_zero() { low.clone() } else { high.clone() }).collect();
        product_of(&choices).into_iter().map(|v| (v, Q::one())).collect()
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForgetMode {
    /// Keep terms with all strands on the sub-bialgebra (left inverse of α).
    Sub,
    /// Drop the decoration, each idempotent read as the identity.
    Erase,
}

/// Split → undecorated.
pub fn forget_split(x: &AlgebraElement, mode: ForgetMode) -> Result<AlgebraElement> {
    expect_law(x, MonoidLaw::Split, "forget_split")?;
    Ok(x.relabel_monoid(DecorationMonoid::Trivial, |d| {
        if mode == ForgetMode::Sub && d.iter().any(|e| !e.is_zero()) {
            vec![]
        } else {
            vec![(vec![Decor::ZERO; d.len()], Q::one())]
        }
    }))
}

/// Cone → root quotient: terms with a non-root nonzero decoration vanish.
pub fn quotient_r(x: &AlgebraElement, target: &DecorationMonoid) -> Result<AlgebraElement> {
    expect_law(x, MonoidLaw::Cone, "quotient_R")?;
    let DecorationMonoid::RootConeMod { rank, .. } = target else {
        return Err(Error::Mismatch("target must be a root quotient".into()));
    };
    if *rank != x.monoid.rank() {
        return Err(Error::Mismatch("rank mismatch".into()));
    }
    let ctx = Ctx::of(target);
    Ok(x.relabel_monoid(target.clone(), |d| {
        if d.iter().all(|e| ctx.ok(e) && target.contains(e)) {
            vec![(d.to_vec(), Q::one())]
        } else {
            vec![]
        }
    }))
}

// ---------------------------------------------------------------------------

/// Truncated series `Σ_k x_k` with `x_k` homogeneous of string degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    pub n: usize,
    pub monoid: DecorationMonoid,
    pub parts: Vec<AlgebraElement>,
}

impl GradedSeries {
    pub fn order(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn zero(n: usize, monoid: &DecorationMonoid, order: usize) -> Self {
        GradedSeries { n, monoid: monoid.clone(), parts: vec![AlgebraElement::zero(n, monoid.clone()); order + 1] }
    }

    pub fn one(n: usize, monoid: &DecorationMonoid, order: usize) -> Self {
        let mut s = Self::zero(n, monoid, order);
        s.parts[0] = AlgebraElement::one(n, monoid.clone());
        s
    }

    /// Splits an element by degree, dropping degrees above `order`.
    pub fn from_element(x: &AlgebraElement, order: usize) -> Self {
        GradedSeries { n: x.n, monoid: x.monoid.clone(), parts: (0..=order).map(|k| x.part(k)).collect() }
    }

    pub fn to_element(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.n, self.monoid.clone());
        for p in &self.parts {
            out = out.add(p);
        }
        out
    }

    pub fn is_well_formed(&self) -> bool {
        self.parts.iter().enumerate().all(|(k, p)| p.n == self.n && p.monoid == self.monoid && p.is_homogeneous(k))
    }
}

/// A word of `a`/`b` letters on given slots; strands are joined by the
/// caller-supplied pairing. Handy for writing test elements by hand.
pub fn word_element(
    slots: Vec<Vec<(bool, usize)>>,
    decor: Vec<Decor>,
    monoid: &DecorationMonoid,
) -> AlgebraElement {
    let n = slots.len();
    let w = Word {
        slots: slots
            .into_iter()
            .map(|s| s.into_iter().map(|(coact, st)| if coact { Ev::coact(st) } else { Ev::act(st) }).collect())
            .collect(),
        decor,
    };
    assert!(w.is_well_formed(), "malformed word");
    crate::rewriter::straighten_words(&[(w, Q::one())], n, monoid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::binomial;
    use crate::rational::q;

    const T: DecorationMonoid = DecorationMonoid::Trivial;

    #[test]
    fn basis_dimensions() {
        for n in 1..=3 {
            for nn in 0..=3 {
                let f: usize = (1..=nn).product();
                let c = binomial(nn + n - 1, n - 1);
                assert_eq!(basis(n, nn, &T).unwrap().len(), c * c * f);
                assert_eq!(basis(n, nn, &DecorationMonoid::Split).unwrap().len(), c * c * f << nn);
            }
        }
    }

    #[test]
    fn d_kappa_is_minus_omega() {
        let k = kappa(1, 1, &T).unwrap();
        assert_eq!(k.hochschild_d(), omega(2, 1, 2, &T).unwrap().neg());
        assert!(AlgebraElement::one(2, T).hochschild_d().is_zero());
    }

    #[test]
    fn face_of_kappa() {
        let k = kappa(1, 1, &T).unwrap();
        let want = kappa(2, 1, &T).unwrap().add(&kappa(2, 2, &T).unwrap()).add(&omega(2, 1, 2, &T).unwrap());
        assert_eq!(k.face_map(1).unwrap(), want);
        assert!(k.face_map(3).is_err());
    }

    #[test]
    fn kappa_squared() {
        let k = kappa(1, 1, &T).unwrap();
        let kk = k.mul(&k).unwrap();
        // a1 a2 b2 b1 in basis terms: perm [2,1]; a1 a2 b1 b2: identity
        let b = |p: &[usize]| BasisElement::new(vec![2], vec![2], Permutation::from_images(p).unwrap(), vec![Decor::ZERO; 2]).unwrap();
        let mut want = BTreeMap::new();
        want.insert(b(&[2, 1]), q(2));
        want.insert(b(&[1, 2]), q(-1));
        assert_eq!(kk.terms, want);
    }

    #[test]
    fn alt_of_r() {
        let r = r_matrix(2, 1, 2, &T).unwrap();
        let r21 = r_matrix(2, 2, 1, &T).unwrap();
        assert_eq!(r.alt(), r.sub(&r21).scale(&crate::rational::qf(1, 2)));
        assert!(omega(2, 1, 2, &T).unwrap().alt().is_zero());
    }

    #[test]
    fn invariants() {
        assert!(is_invariant(&omega(2, 1, 2, &T).unwrap()).unwrap());
        assert!(!is_invariant(&r_matrix(2, 1, 2, &T).unwrap()).unwrap());
        assert!(is_invariant(&AlgebraElement::one(2, T)).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let k = kappa(1, 1, &T).unwrap();
        let x = k.mul(&k).unwrap().add(&k.scale(&crate::rational::qf(-3, 7)));
        let s = x.to_json_string();
        let y = AlgebraElement::from_json_str(&s).unwrap();
        assert_eq!(x, y);
        assert_eq!(s, y.to_json_string());
    }
}

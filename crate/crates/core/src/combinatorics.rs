//! Index sets: permutations, compositions, decoration monoids, diagrams,
//! nested sets and quotient diagrams.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

// ---------------------------------------------------------------------------
// Permutations and compositions

/// A permutation of `{0..N-1}` stored in one-line notation (`images[i] = σ(i)`).
/// Serialized 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// From 1-based one-line notation.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut v = Vec::with_capacity(n);
        for &i in images {
            if i == 0 || i > n || seen[i - 1] {
                return Err(Error::Parse(format!("not a permutation: {images:?}")));
            }
            seen[i - 1] = true;
            v.push(i - 1);
        }
        Ok(Permutation(v))
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut v = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            v[j] = i;
        }
        Permutation(v)
    }

    pub fn sign(&self) -> i64 {
        let mut seen = vec![false; self.len()];
        let mut s = 1;
        for i in 0..self.len() {
            if seen[i] {
                continue;
            }
            let mut j = i;
            let mut len = 0;
            while !seen[j] {
                seen[j] = true;
                j = self.0[j];
                len += 1;
            }
            if len % 2 == 0 {
                s = -s;
            }
        }
        s
    }

    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut c = 0;
        for i in 0..self.len() {
            if !seen[i] {
                c += 1;
                let mut j = i;
                while !seen[j] {
                    seen[j] = true;
                    j = self.0[j];
                }
            }
        }
        c
    }

    /// The order-reversing involution τ(i) = N+1−i (1-based).
    pub fn tau(n: usize) -> Permutation {
        Permutation((0..n).rev().collect())
    }

    /// All permutations of `n` points in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation(cur.clone()));
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Composition(pub Vec<usize>);

impl Composition {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// All `n`-part weak compositions of `total`, lexicographically sorted.
pub fn enumerate_compositions(total: usize, n: usize) -> Result<Vec<Composition>> {
    if n == 0 {
        return Err(Error::Domain("empty slot count".into()));
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(left: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(Composition(cur.clone()));
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, n, cur, out);
            cur.pop();
        }
    }
    rec(total, n, &mut cur, &mut out);
    Ok(out)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

// ---------------------------------------------------------------------------
// Decorations

/// Maximal rank of a root cone.
pub const MAX_RANK: usize = 4;

/// A decoration value. Trivial uses the zero vector, Split uses the first
/// component in {0,1}, root cones use the first `rank` components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Decor(pub [u8; MAX_RANK]);

impl Decor {
    pub const ZERO: Decor = Decor([0; MAX_RANK]);

    pub fn from_slice(v: &[u8]) -> Decor {
        assert!(v.len() <= MAX_RANK);
        let mut d = [0; MAX_RANK];
        d[..v.len()].copy_from_slice(v);
        Decor(d)
    }

    pub fn unit(i: usize) -> Decor {
        let mut d = [0; MAX_RANK];
        d[i] = 1;
        Decor(d)
    }

    pub fn height(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; MAX_RANK]
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Decor) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// True when the support lies in the given set of simple indices.
    pub fn supported_in(&self, support: &[usize]) -> bool {
        (0..MAX_RANK).all(|i| self.0[i] == 0 || support.contains(&i))
    }
}

/// Addition law shared by the straightening engine; the key for structure
/// constant memoization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonoidLaw {
    Trivial,
    Split,
    Cone,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DecorationMonoid {
    Trivial,
    Split,
    RootCone { rank: usize, cap: usize },
    RootConeMod { rank: usize, cap: usize, allowed: Vec<Vec<u8>> },
}

impl DecorationMonoid {
    pub fn law(&self) -> MonoidLaw {
        match self {
            DecorationMonoid::Trivial => MonoidLaw::Trivial,
            DecorationMonoid::Split => MonoidLaw::Split,
            _ => MonoidLaw::Cone,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            DecorationMonoid::Trivial => 0,
            DecorationMonoid::Split => 1,
            DecorationMonoid::RootCone { rank, .. } | DecorationMonoid::RootConeMod { rank, .. } => {
                *rank
            }
        }
    }

    /// Weight cap of the window; `usize::MAX` for finite monoids.
    pub fn cap(&self) -> usize {
        match self {
            DecorationMonoid::RootCone { cap, .. } | DecorationMonoid::RootConeMod { cap, .. } => *cap,
            _ => usize::MAX,
        }
    }

    pub fn with_cap(&self, new_cap: usize) -> DecorationMonoid {
        match self.clone() {
            DecorationMonoid::RootCone { rank, .. } => DecorationMonoid::RootCone { rank, cap: new_cap },
            DecorationMonoid::RootConeMod { rank, allowed, .. } => {
                DecorationMonoid::RootConeMod { rank, cap: new_cap, allowed }
            }
            m => m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DecorationMonoid::RootCone { rank, .. } | DecorationMonoid::RootConeMod { rank, .. }
                if *rank == 0 || *rank > MAX_RANK =>
            {
                Err(Error::Domain(format!("cone rank must be in 1..={MAX_RANK}")))
            }
            _ => Ok(()),
        }
    }

    /// Whether `d` is a legal element (within the window and the allowed set).
    pub fn contains(&self, d: &Decor) -> bool {
        let r = self.rank();
        if d.0[r..].iter().any(|&x| x != 0) {
            return false;
        }
        match self {
            DecorationMonoid::Trivial => true,
            DecorationMonoid::Split => d.0[0] <= 1,
            DecorationMonoid::RootCone { cap, .. } => d.height() <= *cap,
            DecorationMonoid::RootConeMod { cap, allowed, .. } => {
                d.height() <= *cap && (d.is_zero() || allowed.iter().any(|a| Decor::from_slice(a) == *d))
            }
        }
    }

    pub fn add(&self, a: &Decor, b: &Decor) -> Decor {
        add_law(self.law(), a, b)
    }

    /// All elements of the weight window, in increasing order.
    pub fn window(&self) -> Vec<Decor> {
        match self {
            DecorationMonoid::Trivial => vec![Decor::ZERO],
            DecorationMonoid::Split => vec![Decor::ZERO, Decor::unit(0)],
            DecorationMonoid::RootCone { rank, cap } | DecorationMonoid::RootConeMod { rank, cap, .. } => {
                let mut out = Vec::new();
                let mut cur = [0u8; MAX_RANK];
                fn rec(i: usize, rank: usize, left: usize, cur: &mut [u8; MAX_RANK], out: &mut Vec<Decor>) {
                    if i == rank {
                        out.push(Decor(*cur));
                        return;
                    }
                    for k in 0..=left {
                        cur[i] = k as u8;
                        rec(i + 1, rank, left - k, cur, out);
                    }
                    cur[i] = 0;
                }
                rec(0, *rank, *cap, &mut cur, &mut out);
                out.retain(|d| self.contains(d));
                out.sort();
                out
            }
        }
    }

    /// All pairs (β, γ) with β + γ = α.
    pub fn decompositions(&self, a: &Decor) -> Vec<(Decor, Decor)> {
        decompositions_law(self.law(), a)
    }

    pub fn parse_decor(&self, v: &[u8]) -> Result<Decor> {
        if v.len() > MAX_RANK {
            return Err(Error::Parse("decoration too long".into()));
        }
        let d = Decor::from_slice(v);
        if !self.contains(&d) {
            return Err(Error::Domain(format!("decoration {v:?} outside the monoid window")));
        }
        Ok(d)
    }

    pub fn format_decor(&self, d: &Decor) -> Vec<u8> {
        d.0[..self.rank()].to_vec()
    }
}

pub fn add_law(law: MonoidLaw, a: &Decor, b: &Decor) -> Decor {
    match law {
        MonoidLaw::Trivial => Decor::ZERO,
        MonoidLaw::Split => Decor::from_slice(&[a.0[0] | b.0[0]]),
        MonoidLaw::Cone => {
            let mut d = [0u8; MAX_RANK];
            for i in 0..MAX_RANK {
                d[i] = a.0[i] + b.0[i];
            }
            Decor(d)
        }
    }
}

/// All `e` with `x + e = y`.
pub fn complements_law(law: MonoidLaw, x: &Decor, y: &Decor) -> Vec<Decor> {
    match law {
        MonoidLaw::Trivial => vec![Decor::ZERO],
        MonoidLaw::Split => match (x.0[0], y.0[0]) {
            (0, v) => vec![Decor::from_slice(&[v])],
            (1, 1) => vec![Decor::ZERO, Decor::unit(0)],
            _ => vec![],
        },
        MonoidLaw::Cone => {
            if !x.le(y) {
                return vec![];
            }
            let mut d = [0u8; MAX_RANK];
            for i in 0..MAX_RANK {
                d[i] = y.0[i] - x.0[i];
            }
            vec![Decor(d)]
        }
    }
}

pub fn decompositions_law(law: MonoidLaw, a: &Decor) -> Vec<(Decor, Decor)> {
    match law {
        MonoidLaw::Trivial => vec![(Decor::ZERO, Decor::ZERO)],
        MonoidLaw::Split => {
            let z = Decor::ZERO;
            let o = Decor::unit(0);
            if a.0[0] == 0 {
                vec![(z, z)]
            } else {
                vec![(z, o), (o, z), (o, o)]
            }
        }
        MonoidLaw::Cone => {
            let mut out = Vec::new();
            let mut cur = [0u8; MAX_RANK];
            fn rec(i: usize, a: &Decor, cur: &mut [u8; MAX_RANK], out: &mut Vec<(Decor, Decor)>) {
                if i == MAX_RANK {
                    let mut rest = [0u8; MAX_RANK];
                    for k in 0..MAX_RANK {
                        rest[k] = a.0[k] - cur[k];
                    }
                    out.push((Decor(*cur), Decor(rest)));
                    return;
                }
                for k in 0..=a.0[i] {
                    cur[i] = k;
                    rec(i + 1, a, cur, out);
                }
            }
            rec(0, a, &mut cur, &mut out);
            out
        }
    }
}

// ---------------------------------------------------------------------------
// Diagrams

/// A vertex subset, as a bitmask over vertex positions of the ambient diagram.
pub type VSet = u64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    labels: Vec<u32>,
    adj: Vec<VSet>,
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    vertices: Vec<u32>,
    edges: Vec<[u32; 2]>,
}

impl Serialize for Diagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DiagramJson { vertices: self.labels.clone(), edges: self.edges() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Diagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DiagramJson::deserialize(d)?;
        Diagram::new(&j.vertices, &j.edges).map_err(serde::de::Error::custom)
    }
}

impl Diagram {
    pub fn new(vertices: &[u32], edges: &[[u32; 2]]) -> Result<Self> {
        let mut labels = vertices.to_vec();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != vertices.len() {
            return Err(Error::Parse("duplicate vertex".into()));
        }
        if labels.is_empty() || labels.len() > 64 {
            return Err(Error::Domain("diagram must have 1..=64 vertices".into()));
        }
        let mut adj = vec![0; labels.len()];
        for &[a, b] in edges {
            if a == b {
                return Err(Error::Parse(format!("loop at vertex {a}")));
            }
            let i = labels.binary_search(&a).map_err(|_| Error::Domain(format!("unknown vertex {a}")))?;
            let j = labels.binary_search(&b).map_err(|_| Error::Domain(format!("unknown vertex {b}")))?;
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        Ok(Diagram { labels, adj })
    }

    /// The path 1–2–…–n (type A_n).
    pub fn path(n: u32) -> Self {
        let v: Vec<u32> = (1..=n).collect();
        let e: Vec<[u32; 2]> = (1..n).map(|i| [i, i + 1]).collect();
        Diagram::new(&v, &e).expect("valid path")
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn full(&self) -> VSet {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    pub fn edges(&self) -> Vec<[u32; 2]> {
        let mut e = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.adj[i] >> j & 1 == 1 {
                    e.push([self.labels[i], self.labels[j]]);
                }
            }
        }
        e
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    pub fn set_of(&self, vertices: &[u32]) -> Result<VSet> {
        let mut s = 0;
        for v in vertices {
            let i = self.labels.binary_search(v).map_err(|_| Error::Domain(format!("vertex {v} not in diagram")))?;
            s |= 1 << i;
        }
        Ok(s)
    }

    pub fn labels_of(&self, s: VSet) -> Vec<u32> {
        (0..self.len()).filter(|i| s >> i & 1 == 1).map(|i| self.labels[i]).collect()
    }

    /// Vertices adjacent to some vertex of `s` (possibly inside `s`).
    pub fn neighbours(&self, s: VSet) -> VSet {
        let mut n = 0;
        for i in 0..self.len() {
            if s >> i & 1 == 1 {
                n |= self.adj[i];
            }
        }
        n
    }

    pub fn orthogonal(&self, a: VSet, b: VSet) -> bool {
        a & b == 0 && self.neighbours(a) & b == 0
    }

    pub fn compatible_sets(&self, a: VSet, b: VSet) -> bool {
        a & b == a || a & b == b || self.orthogonal(a, b)
    }

    /// Connected components of the full subdiagram on `s`, sorted.
    pub fn components(&self, s: VSet) -> Vec<VSet> {
        let mut left = s;
        let mut out = Vec::new();
        while left != 0 {
            let start = left & left.wrapping_neg();
            let mut comp = start;
            loop {
                let grown = comp | (self.neighbours(comp) & s);
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            out.push(comp);
            left &= !comp;
        }
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self, s: VSet) -> bool {
        s != 0 && self.components(s).len() == 1
    }

    /// All nonempty connected subdiagrams.
    pub fn connected_subdiagrams(&self) -> Vec<VSet> {
        let full = self.full();
        let mut out = Vec::new();
        let mut s: VSet = 1;
        while s != 0 && s <= full {
            if self.is_connected(s) {
                out.push(s);
            }
            s += 1;
        }
        out
    }

    /// The full subdiagram on `s`, relabelled with the original labels.
    pub fn restrict(&self, s: VSet) -> Result<Diagram> {
        let labels = self.labels_of(s);
        let edges: Vec<[u32; 2]> =
            self.edges().into_iter().filter(|[a, b]| labels.contains(a) && labels.contains(b)).collect();
        Diagram::new(&labels, &edges)
    }
}

pub fn compatible(b1: &[u32], b2: &[u32], d: &Diagram) -> Result<bool> {
    let a = d.set_of(b1)?;
    let b = d.set_of(b2)?;
    Ok(d.compatible_sets(a, b))
}

/// A nested set, stored as a sorted list of vertex-label sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NestedSet(pub Vec<Vec<u32>>);

impl NestedSet {
    fn from_masks(d: &Diagram, masks: &[VSet]) -> NestedSet {
        let mut v: Vec<Vec<u32>> = masks.iter().map(|&m| d.labels_of(m)).collect();
        v.sort();
        NestedSet(v)
    }

    pub fn members(&self) -> &[Vec<u32>] {
        &self.0
    }

    pub fn is_nested_on(&self, d: &Diagram) -> bool {
        let Ok(masks) = self.0.iter().map(|m| d.set_of(m)).collect::<Result<Vec<_>>>() else {
            return false;
        };
        masks.iter().all(|&m| d.is_connected(m))
            && masks.iter().all(|&a| masks.iter().all(|&b| d.compatible_sets(a, b)))
            && d.components(d.full()).iter().all(|c| masks.contains(c))
    }
}

/// Maximal nested sets, by maximal-clique search in the compatibility graph
/// of connected subdiagrams. Sorted.
pub fn maximal_nested_sets(d: &Diagram) -> Vec<NestedSet> {
    let comps = d.components(d.full());
    let cands: Vec<VSet> = d.connected_subdiagrams().into_iter().filter(|s| !comps.contains(s)).collect();
    let mut out = Vec::new();
    let mut cur: Vec<VSet> = Vec::new();
    fn rec(d: &Diagram, cands: &[VSet], start: usize, cur: &mut Vec<VSet>, comps: &[VSet], out: &mut Vec<NestedSet>) {
        let mut extended = false;
        for i in start..cands.len() {
            let c = cands[i];
            if cur.iter().all(|&m| d.compatible_sets(m, c)) {
                extended = true;
                cur.push(c);
                rec(d, cands, i + 1, cur, comps, out);
                cur.pop();
            }
        }
        if !extended {
            // Maximal only if no earlier candidate could be added either.
            let maximal = cands.iter().all(|c| cur.contains(c) || !cur.iter().all(|&m| d.compatible_sets(m, *c)));
            if maximal {
                let mut all = cur.clone();
                all.extend_from_slice(comps);
                out.push(NestedSet::from_masks(d, &all));
            }
        }
    }
    rec(d, &cands, 0, &mut cur, &comps, &mut out);
    out.sort();
    out.dedup();
    out
}

/// The quotient diagram D/B.
pub fn quotient_diagram(d: &Diagram, b: &[u32]) -> Result<Diagram> {
    let bm = d.set_of(b)?;
    quotient_masks(d, bm)
}

fn quotient_masks(d: &Diagram, bm: VSet) -> Result<Diagram> {
    if bm == d.full() {
        return Err(Error::Domain("quotient by full diagram".into()));
    }
    let rest = d.full() & !bm;
    let comps = d.components(bm);
    let verts = d.labels_of(rest);
    let idx: Vec<usize> = (0..d.len()).filter(|i| rest >> i & 1 == 1).collect();
    let mut edges = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            let linked = d.adjacent(i, j)
                || comps.iter().any(|&c| d.neighbours(c) >> i & 1 == 1 && d.neighbours(c) >> j & 1 == 1);
            if linked {
                edges.push([d.labels[i], d.labels[j]]);
            }
        }
    }
    Diagram::new(&verts, &edges)
}

/// The embedding Mns(B″,B′) × Mns(B′,B) → Mns(B″,B). `F` is a maximal nested
/// set on B″/B′ and `G` one on B′/B; the chain is given by vertex lists inside
/// the ambient diagram `d`.
pub fn mns_union(
    d: &Diagram,
    b: &[u32],
    b1: &[u32],
    b2: &[u32],
    f: &NestedSet,
    g: &NestedSet,
) -> Result<NestedSet> {
    let bm = d.set_of(b)?;
    let b1m = d.set_of(b1)?;
    let b2m = d.set_of(b2)?;
    if bm & !b1m != 0 || b1m & !b2m != 0 || bm == b1m || b1m == b2m {
        return Err(Error::Domain("chain mismatch: need B ⊊ B′ ⊊ B″".into()));
    }
    let top = d.restrict(b2m)?;
    let q_top = quotient_masks(&top, top.set_of(&d.labels_of(bm))?)?;
    let q_f = quotient_masks(&top, top.set_of(&d.labels_of(b1m))?)?;
    let q_g = d.restrict(b1m).and_then(|x| quotient_masks(&x, x.set_of(&d.labels_of(bm))?))?;
    if !f.is_nested_on(&q_f) || !g.is_nested_on(&q_g) {
        return Err(Error::Domain("nested sets do not live on the given quotients".into()));
    }
    let middle = q_top.set_of(&d.labels_of(b1m & !bm))?;
    let mut members: Vec<VSet> = g.0.iter().map(|m| q_top.set_of(m)).collect::<Result<_>>()?;
    for c in &f.0 {
        let cm = q_top.set_of(c)?;
        let pool = cm | middle;
        let lift = q_top.components(pool).into_iter().filter(|k| k & cm != 0).fold(0, |a, k| a | k);
        members.push(lift);
    }
    members.sort_unstable();
    members.dedup();
    Ok(NestedSet::from_masks(&q_top, &members))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdiagramPair {
    pub outer: Vec<u32>,
    pub inner: Vec<u32>,
}

/// Restriction of a nested set on B″/B to the full subdiagram B′/B.
pub fn restrict_nested(f: &NestedSet, part: &[u32]) -> NestedSet {
    let set: BTreeSet<u32> = part.iter().copied().collect();
    let mut v: Vec<Vec<u32>> = f.0.iter().filter(|m| m.iter().all(|x| set.contains(x))).cloned().collect();
    v.sort();
    NestedSet(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_examples() {
        let c = enumerate_compositions(3, 2).unwrap();
        let parts: Vec<Vec<usize>> = c.into_iter().map(|c| c.0).collect();
        assert_eq!(parts, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        assert_eq!(enumerate_compositions(0, 3).unwrap(), vec![Composition(vec![0, 0, 0])]);
        assert_eq!(enumerate_compositions(4, 3).unwrap().len(), binomial(6, 2));
        assert!(enumerate_compositions(2, 0).is_err());
    }

    #[test]
    fn permutation_basics() {
        let p = Permutation::from_images(&[2, 3, 1]).unwrap();
        assert_eq!(p.compose(&p.inverse()), Permutation::identity(3));
        assert_eq!(p.sign(), 1);
        assert_eq!(Permutation::tau(4).images(), vec![4, 3, 2, 1]);
        assert!(Permutation::from_images(&[1, 1]).is_err());
        assert_eq!(Permutation::all(4).len(), 24);
    }

    #[test]
    fn split_decompositions() {
        let m = DecorationMonoid::Split;
        assert_eq!(m.decompositions(&Decor::ZERO).len(), 1);
        assert_eq!(m.decompositions(&Decor::unit(0)).len(), 3);
        let c = DecorationMonoid::RootCone { rank: 2, cap: 3 };
        let a = Decor::from_slice(&[1, 2]);
        assert_eq!(c.decompositions(&a).len(), 6);
        assert_eq!(c.window().len(), 10);
    }

    #[test]
    fn nested_set_counts() {
        assert_eq!(maximal_nested_sets(&Diagram::path(1)).len(), 1);
        assert_eq!(maximal_nested_sets(&Diagram::path(2)).len(), 2);
        assert_eq!(maximal_nested_sets(&Diagram::path(3)).len(), 5);
        assert_eq!(maximal_nested_sets(&Diagram::path(4)).len(), 14);
        for f in maximal_nested_sets(&Diagram::path(3)) {
            assert_eq!(f.0.len(), 3);
        }
    }

    #[test]
    fn compatibility_examples() {
        let d = Diagram::path(3);
        assert!(compatible(&[1], &[3], &d).unwrap());
        assert!(!compatible(&[1], &[2, 3], &d).unwrap());
        assert!(compatible(&[1, 2], &[1, 2], &d).unwrap());
        assert!(compatible(&[7], &[1], &d).is_err());
    }

    #[test]
    fn quotient_examples() {
        let d = Diagram::path(3);
        let q = quotient_diagram(&d, &[2]).unwrap();
        assert_eq!(q.labels(), &[1, 3]);
        assert_eq!(q.edges(), vec![[1, 3]]);
        let q = quotient_diagram(&d, &[3]).unwrap();
        assert_eq!(q.edges(), vec![[1, 2]]);
        assert_eq!(quotient_diagram(&d, &[]).unwrap(), d);
        assert!(quotient_diagram(&d, &[1, 2, 3]).is_err());
    }

    #[test]
    fn union_on_a2() {
        let d = Diagram::path(2);
        let f = NestedSet(vec![vec![2]]);
        let g = NestedSet(vec![vec![1]]);
        let u = mns_union(&d, &[], &[1], &[1, 2], &f, &g).unwrap();
        assert_eq!(u, NestedSet(vec![vec![1], vec![1, 2]]));
        assert!(mns_union(&d, &[1], &[1], &[1, 2], &f, &g).is_err());
    }
}

//! Normal ordering of diagrams built from coactions, actions, brackets,
//! cobrackets and decoration idempotents.
//!
//! A diagram with no bracket/cobracket nodes is a [`Word`]: each slot holds
//! a sequence of letters `a(s)` (action consuming strand `s`) and `b(s)`
//! (coaction emitting strand `s`); the leftmost letter acts last. Every strand
//! has exactly one `a` and one `b`. A word is normal when in every slot all
//! actions stand left of all coactions.
//!
//! The only rule needed on words rewrites an adjacent pair `b(y) a(x)`:
//!
//! ```text
//! b(y) a(x) = a(x) b(y)
//!           + Σ_{dx+e=dy}  [a(x) at the sink of y, decor(y) := e]
//!           − Σ_{dy+e=dx}  [b(y) at the source of x, decor(x) := e]
//! ```
//!
//! where "at the sink of y" replaces `a(y)` by `a(x)a(y) − a(y)a(x)` and "at the
//! source of x" replaces `b(x)` by `b(y)b(x) − b(x)b(y)`.
//!
//! Termination: fix any interleaving of all letters into a single time line
//! compatible with the slot orders and count pairs (action, coaction) with
//! the action earlier. The swap moves `a(x)` later past `b(y)` and past other
//! slots' letters only; the second term moves `a(x)` later to the sink of `y`,
//! which lies after `b(y)`; the third moves `b(y)` earlier to the source of
//! `x`, which lies before `a(x)`. Each of these strictly lowers the count and
//! letters never multiply, so every rewrite sequence is finite.
//!
//! Bracket and cobracket nodes are removed first (see [`Net`]): a cobracket
//! fed by a bracket is reordered by the cocycle identity, which lowers the
//! number of bracket ancestors of cobrackets; a bracket feeding an action
//! and a cobracket fed by a coaction are absorbed into commutators of
//! letters, lowering the node count.

use crate::algebra::{AlgebraElement, BasisElement};
use crate::combinatorics::{
    add_law, complements_law, Composition, Decor, DecorationMonoid, MonoidLaw, Permutation,
};
use crate::error::{Error, Result};
use crate::rational::Q;
use num::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

// ---------------------------------------------------------------------------
// Letters and words

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ev(u16);

impl Ev {
    pub fn act(s: usize) -> Ev {
        Ev((s as u16) << 1)
    }
    pub fn coact(s: usize) -> Ev {
        Ev(((s as u16) << 1) | 1)
    }
    pub fn is_coact(self) -> bool {
        self.0 & 1 == 1
    }
    pub fn strand(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn with_strand(self, s: usize) -> Ev {
        Ev(((s as u16) << 1) | (self.0 & 1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub slots: Vec<Vec<Ev>>,
    /// Decoration per strand.
    pub decor: Vec<Decor>,
}

impl Word {
    pub fn strands(&self) -> usize {
        self.decor.len()
    }

    pub fn is_normal(&self) -> bool {
        self.inversions().is_empty()
    }

    /// Positions `(slot, p)` with `b` at `p` and `a` at `p + 1`.
    pub fn inversions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, s) in self.slots.iter().enumerate() {
            for p in 0..s.len().saturating_sub(1) {
                if s[p].is_coact() && !s[p + 1].is_coact() {
                    out.push((k, p));
                }
            }
        }
        out
    }

    /// Relabels strands by first appearance (slot order, left to right).
    pub fn canonical(&self) -> Word {
        let mut map = vec![usize::MAX; self.strands()];
        let mut next = 0;
        for s in &self.slots {
            for e in s {
                if map[e.strand()] == usize::MAX {
                    map[e.strand()] = next;
                    next += 1;
                }
            }
        }
        let mut decor = vec![Decor::ZERO; self.strands()];
        for (old, &new) in map.iter().enumerate() {
            decor[new] = self.decor[old];
        }
        Word {
            slots: self.slots.iter().map(|s| s.iter().map(|e| e.with_strand(map[e.strand()])).collect()).collect(),
            decor,
        }
    }

    fn locate(&self, e: Ev) -> (usize, usize) {
        for (k, s) in self.slots.iter().enumerate() {
            if let Some(p) = s.iter().position(|&x| x == e) {
                return (k, p);
            }
        }
        panic!("letter {e:?} missing from word")
    }

    /// Checks that each strand has one action and one coaction, and that on a
    /// shared slot the coaction stands right of the action.
    pub fn is_well_formed(&self) -> bool {
        let n = self.strands();
        let mut a = vec![None; n];
        let mut b = vec![None; n];
        for (k, s) in self.slots.iter().enumerate() {
            for (p, e) in s.iter().enumerate() {
                if e.strand() >= n {
                    return false;
                }
                let slot = if e.is_coact() { &mut b[e.strand()] } else { &mut a[e.strand()] };
                if slot.is_some() {
                    return false;
                }
                *slot = Some((k, p));
            }
        }
        (0..n).all(|s| match (a[s], b[s]) {
            (Some((ka, pa)), Some((kb, pb))) => ka != kb || pb > pa,
            _ => false,
        })
    }

    pub fn to_basis(&self) -> BasisElement {
        debug_assert!(self.is_normal());
        let n = self.slots.len();
        let mut act_leg = vec![0usize; self.strands()];
        let mut actions = Vec::with_capacity(n);
        let mut coactions = Vec::with_capacity(n);
        let mut leg = 0;
        for s in &self.slots {
            let mut c = 0;
            for e in s.iter().filter(|e| !e.is_coact()) {
                act_leg[e.strand()] = leg;
                leg += 1;
                c += 1;
            }
            actions.push(c);
        }
        let mut perm = Vec::with_capacity(self.strands());
        for s in &self.slots {
            let mut c = 0;
            for e in s.iter().filter(|e| e.is_coact()) {
                perm.push(act_leg[e.strand()]);
                c += 1;
            }
            coactions.push(c);
        }
        let mut decor = vec![Decor::ZERO; self.strands()];
        for (s, &l) in act_leg.iter().enumerate() {
            decor[l] = self.decor[s];
        }
        BasisElement {
            actions: Composition(actions),
            coactions: Composition(coactions),
            perm: Permutation(perm),
            decor,
        }
    }

    /// Word of a basis element; strand `i` is action leg `i`.
    pub fn from_basis(b: &BasisElement) -> Word {
        let n = b.actions.len();
        let mut slots = vec![Vec::new(); n];
        let mut leg = 0;
        for k in 0..n {
            for _ in 0..b.actions.0[k] {
                slots[k].push(Ev::act(leg));
                leg += 1;
            }
        }
        let mut j = 0;
        for k in 0..n {
            for _ in 0..b.coactions.0[k] {
                slots[k].push(Ev::coact(b.perm.apply(j)));
                j += 1;
            }
        }
        Word { slots, decor: b.decor.clone() }
    }

    /// `self ∘ other` (other acts first): concatenation per slot.
    pub fn compose(&self, other: &Word) -> Word {
        assert_eq!(self.slots.len(), other.slots.len());
        let off = self.strands();
        let slots = self
            .slots
            .iter()
            .zip(&other.slots)
            .map(|(a, b)| {
                let mut v = a.clone();
                v.extend(b.iter().map(|e| e.with_strand(e.strand() + off)));
                v
            })
            .collect();
        let mut decor = self.decor.clone();
        decor.extend_from_slice(&other.decor);
        Word { slots, decor }
    }
}

/// Decoration rules of a monoid as seen by the rewriting engine.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ctx {
    pub law: MonoidLaw,
    /// In the root quotient, terms carrying any other nonzero decoration vanish.
    pub allowed: Option<Vec<Decor>>,
}

impl Ctx {
    pub fn of(m: &DecorationMonoid) -> Ctx {
        let allowed = match m {
            DecorationMonoid::RootConeMod { allowed, .. } => {
                let mut v: Vec<Decor> = allowed.iter().map(|a| Decor::from_slice(a)).collect();
                v.sort();
                Some(v)
            }
            _ => None,
        };
        Ctx { law: m.law(), allowed }
    }

    pub fn ok(&self, d: &Decor) -> bool {
        match &self.allowed {
            None => true,
            Some(a) => d.is_zero() || a.binary_search(d).is_ok(),
        }
    }
}

/// One application of the action–coaction exchange at `(slot, pos)`.
pub fn rewrite_at(ctx: &Ctx, w: &Word, slot: usize, pos: usize) -> Vec<(Word, i64)> {
    let s = &w.slots[slot];
    let (by, ax) = (s[pos], s[pos + 1]);
    assert!(by.is_coact() && !ax.is_coact(), "no exchange at ({slot},{pos})");
    let (y, x) = (by.strand(), ax.strand());
    let (dx, dy) = (w.decor[x], w.decor[y]);
    let mut out = Vec::with_capacity(5);

    let mut swapped = w.clone();
    swapped.slots[slot].swap(pos, pos + 1);
    out.push((swapped, 1));

    for e in complements_law(ctx.law, &dx, &dy) {
        if !ctx.ok(&e) {
            continue;
        }
        let mut base = w.clone();
        base.slots[slot].remove(pos + 1);
        base.decor[y] = e;
        let (k, p) = base.locate(Ev::act(y));
        let mut plus = base.clone();
        plus.slots[k].insert(p, Ev::act(x));
        let mut minus = base;
        minus.slots[k].insert(p + 1, Ev::act(x));
        out.push((plus, 1));
        out.push((minus, -1));
    }

    for e in complements_law(ctx.law, &dy, &dx) {
        if !ctx.ok(&e) {
            continue;
        }
        let mut base = w.clone();
        base.slots[slot].remove(pos);
        base.decor[x] = e;
        let (k, p) = base.locate(Ev::coact(x));
        let mut yx = base.clone();
        yx.slots[k].insert(p, Ev::coact(y));
        let mut xy = base;
        xy.slots[k].insert(p + 1, Ev::coact(y));
        out.push((yx, -1));
        out.push((xy, 1));
    }
    out
}

type Terms = Vec<(BasisElement, Q)>;

fn accumulate(acc: &mut BTreeMap<BasisElement, Q>, b: &BasisElement, c: Q) {
    if let Some(e) = acc.get_mut(b) {
        *e += c;
        if e.is_zero() {
            acc.remove(b);
        }
    } else if !c.is_zero() {
        acc.insert(b.clone(), c);
    }
}

/// Memoized depth-first normal ordering; rewrites the first exchange found.
pub struct WordNormalizer {
    ctx: Ctx,
    memo: HashMap<Word, Arc<Terms>>,
    trace: Option<Vec<TraceStep>>,
}

impl WordNormalizer {
    pub fn new(ctx: Ctx) -> Self {
        WordNormalizer { ctx, memo: HashMap::new(), trace: None }
    }

    pub fn with_trace(ctx: Ctx) -> Self {
        WordNormalizer { ctx, memo: HashMap::new(), trace: Some(Vec::new()) }
    }

    pub fn normalize(&mut self, w: &Word) -> Arc<Terms> {
        let w = w.canonical();
        if let Some(r) = self.memo.get(&w) {
            return r.clone();
        }
        if w.decor.iter().any(|d| !self.ctx.ok(d)) {
            let r = Arc::new(Vec::new());
            self.memo.insert(w, r.clone());
            return r;
        }
        let inv = w.inversions();
        let result = if let Some(&(k, p)) = inv.first() {
            if let Some(t) = &mut self.trace {
                t.push(TraceStep { rule: "exchange".into(), state: format!("{w:?}"), slot: k, pos: p });
            }
            let mut acc = BTreeMap::new();
            for (w2, c) in rewrite_at(&self.ctx, &w, k, p) {
                let sub = self.normalize(&w2);
                let cq = Q::from_integer(c.into());
                for (b, k2) in sub.iter() {
                    accumulate(&mut acc, b, &cq * k2);
                }
            }
            acc.into_iter().collect()
        } else {
            vec![(w.to_basis(), Q::one())]
        };
        let r = Arc::new(result);
        self.memo.insert(w, r.clone());
        r
    }

    pub fn take_trace(&mut self) -> Vec<TraceStep> {
        self.trace.take().unwrap_or_default()
    }
}

/// Worklist normal ordering where `choose` picks the exchange to apply and
/// `pick` the next word to expand. Used to test order independence.
pub fn normalize_with_schedule<R: Rng>(ctx: &Ctx, start: &[(Word, Q)], rng: &mut R) -> BTreeMap<BasisElement, Q> {
    let mut work: HashMap<Word, Q> = HashMap::new();
    for (w, c) in start {
        *work.entry(w.canonical()).or_insert_with(Q::zero) += c;
    }
    let mut out = BTreeMap::new();
    while !work.is_empty() {
        let mut keys: Vec<&Word> = work.keys().collect();
        keys.sort();
        let w = keys[rng.gen_range(0..keys.len())].clone();
        let c = work.remove(&w).expect("present");
        if c.is_zero() || w.decor.iter().any(|d| !ctx.ok(d)) {
            continue;
        }
        let inv = w.inversions();
        if inv.is_empty() {
            accumulate(&mut out, &w.to_basis(), c);
            continue;
        }
        let (k, p) = inv[rng.gen_range(0..inv.len())];
        for (w2, s) in rewrite_at(ctx, &w, k, p) {
            let e = work.entry(w2.canonical()).or_insert_with(Q::zero);
            *e += &c * Q::from_integer(s.into());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Traces

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: String,
    /// Canonical rendering of the rewritten state.
    pub state: String,
    pub slot: usize,
    pub pos: usize,
}

/// Ordered record of rule applications. Each state is rewritten at most once;
/// replay applies the recorded choice whenever that state occurs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteTrace {
    pub steps: Vec<TraceStep>,
}

/// Replays the word phase of a trace on a combination of words.
pub fn replay_words(ctx: &Ctx, start: &[(Word, Q)], trace: &RewriteTrace) -> Result<BTreeMap<BasisElement, Q>> {
    let choice: HashMap<&str, (usize, usize)> =
        trace.steps.iter().filter(|s| s.rule == "exchange").map(|s| (s.state.as_str(), (s.slot, s.pos))).collect();
    let mut work: BTreeMap<Word, Q> = BTreeMap::new();
    for (w, c) in start {
        *work.entry(w.canonical()).or_insert_with(Q::zero) += c;
    }
    let mut out = BTreeMap::new();
    while let Some((w, c)) = work.pop_last() {
        if c.is_zero() || w.decor.iter().any(|d| !ctx.ok(d)) {
            continue;
        }
        if w.is_normal() {
            accumulate(&mut out, &w.to_basis(), c);
            continue;
        }
        let key = format!("{w:?}");
        let &(k, p) = choice.get(key.as_str()).ok_or_else(|| Error::Domain(format!("trace has no step for {key}")))?;
        for (w2, s) in rewrite_at(ctx, &w, k, p) {
            *work.entry(w2.canonical()).or_insert_with(Q::zero) += &c * Q::from_integer(s.into());
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Diagrams with bracket and cobracket nodes

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NEv {
    pub coact: bool,
    pub wire: usize,
}

/// A decorated diagram that may still contain bracket (`mus`) and cobracket
/// (`deltas`) nodes. Each wire has one producer and one consumer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Net {
    pub slots: Vec<Vec<NEv>>,
    /// `[in0, in1, out]`
    pub mus: Vec<[usize; 3]>,
    /// `[in, out0, out1]`
    pub deltas: Vec<[usize; 3]>,
    pub decor: Vec<Decor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetRule {
    /// Cobracket `d` fed by bracket `m`.
    Cocycle { delta: usize, mu: usize },
    /// Bracket feeding an action.
    Action { mu: usize },
    /// Cobracket fed by a coaction.
    Coaction { delta: usize },
}

impl NetRule {
    pub fn name(&self) -> &'static str {
        match self {
            NetRule::Cocycle { .. } => "cocycle",
            NetRule::Action { .. } => "action",
            NetRule::Coaction { .. } => "coaction",
        }
    }
}

impl Net {
    pub fn node_count(&self) -> usize {
        self.mus.len() + self.deltas.len()
    }

    fn find_event(&self, coact: bool, wire: usize) -> Option<(usize, usize)> {
        for (k, s) in self.slots.iter().enumerate() {
            if let Some(p) = s.iter().position(|e| e.coact == coact && e.wire == wire) {
                return Some((k, p));
            }
        }
        None
    }

    /// All applicable elimination steps.
    pub fn candidates(&self) -> Vec<NetRule> {
        let mut out = Vec::new();
        for (d, del) in self.deltas.iter().enumerate() {
            if let Some(m) = self.mus.iter().position(|mu| mu[2] == del[0]) {
                out.push(NetRule::Cocycle { delta: d, mu: m });
            }
        }
        for (m, mu) in self.mus.iter().enumerate() {
            if self.find_event(false, mu[2]).is_some() {
                out.push(NetRule::Action { mu: m });
            }
        }
        for (d, del) in self.deltas.iter().enumerate() {
            if self.find_event(true, del[0]).is_some() {
                out.push(NetRule::Coaction { delta: d });
            }
        }
        out
    }

    fn new_wire(&mut self, d: Decor) -> usize {
        self.decor.push(d);
        self.decor.len() - 1
    }

    /// Applies one elimination step.
    pub fn apply(&self, ctx: &Ctx, rule: NetRule) -> Vec<(Net, i64)> {
        match rule {
            NetRule::Action { mu } => {
                let [x, y, w] = self.mus[mu];
                let (k, p) = self.find_event(false, w).expect("bracket feeds an action");
                let mut base = self.clone();
                base.mus.remove(mu);
                base.slots[k].remove(p);
                let mut plus = base.clone();
                plus.slots[k].insert(p, NEv { coact: false, wire: y });
                plus.slots[k].insert(p, NEv { coact: false, wire: x });
                let mut minus = base;
                minus.slots[k].insert(p, NEv { coact: false, wire: x });
                minus.slots[k].insert(p, NEv { coact: false, wire: y });
                vec![(plus.compact(), 1), (minus.compact(), -1)]
            }
            NetRule::Coaction { delta } => {
                let [w, o0, o1] = self.deltas[delta];
                let (k, p) = self.find_event(true, w).expect("cobracket fed by a coaction");
                let mut base = self.clone();
                base.deltas.remove(delta);
                base.slots[k].remove(p);
                let mut plus = base.clone();
                plus.slots[k].insert(p, NEv { coact: true, wire: o1 });
                plus.slots[k].insert(p, NEv { coact: true, wire: o0 });
                let mut minus = base;
                minus.slots[k].insert(p, NEv { coact: true, wire: o0 });
                minus.slots[k].insert(p, NEv { coact: true, wire: o1 });
                vec![(plus.compact(), 1), (minus.compact(), -1)]
            }
            NetRule::Cocycle { delta, mu } => {
                let [x, y, _] = self.mus[mu];
                let [_, w0, w1] = self.deltas[delta];
                let mut base = self.clone();
                base.mus.remove(mu);
                base.deltas.remove(delta);
                let mut out = Vec::new();
                // δ([x,y]) = T(x,y) − T(y,x), T(u,v) = u'⊗[u'',v] − [u'',v]⊗u'
                for (u, v, prime_on_first, sign) in [(x, y, true, 1), (x, y, false, -1), (y, x, true, -1), (y, x, false, 1)] {
                    let (wp, wm) = if prime_on_first { (w0, w1) } else { (w1, w0) };
                    let (du, dv, dm, dp) = (self.decor[u], self.decor[v], self.decor[wm], self.decor[wp]);
                    for t in complements_law(ctx.law, &dv, &dm) {
                        if add_law(ctx.law, &dp, &t) != du || !ctx.ok(&t) {
                            continue;
                        }
                        let mut n = base.clone();
                        let tw = n.new_wire(t);
                        n.deltas.push([u, wp, tw]);
                        n.mus.push([tw, v, wm]);
                        out.push((n.compact(), sign));
                    }
                }
                out
            }
        }
    }

    /// Renumbers wires in order of first reference.
    fn compact(mut self) -> Net {
        let mut map = vec![usize::MAX; self.decor.len()];
        let mut next = 0;
        let mut touch = |w: usize, map: &mut Vec<usize>| {
            if map[w] == usize::MAX {
                map[w] = next;
                next += 1;
            }
        };
        for s in &self.slots {
            for e in s {
                touch(e.wire, &mut map);
            }
        }
        for m in &self.mus {
            for &w in m {
                touch(w, &mut map);
            }
        }
        for d in &self.deltas {
            for &w in d {
                touch(w, &mut map);
            }
        }
        let mut decor = vec![Decor::ZERO; next];
        for (old, &new) in map.iter().enumerate() {
            if new != usize::MAX {
                decor[new] = self.decor[old];
            }
        }
        for s in &mut self.slots {
            for e in s.iter_mut() {
                e.wire = map[e.wire];
            }
        }
        for m in &mut self.mus {
            for w in m.iter_mut() {
                *w = map[*w];
            }
        }
        for d in &mut self.deltas {
            for w in d.iter_mut() {
                *w = map[*w];
            }
        }
        self.decor = decor;
        self
    }

    pub fn to_word(&self) -> Word {
        assert_eq!(self.node_count(), 0);
        Word {
            slots: self
                .slots
                .iter()
                .map(|s| s.iter().map(|e| if e.coact { Ev::coact(e.wire) } else { Ev::act(e.wire) }).collect())
                .collect(),
            decor: self.decor.clone(),
        }
    }

    pub fn from_word(w: &Word) -> Net {
        Net {
            slots: w.slots.iter().map(|s| s.iter().map(|e| NEv { coact: e.is_coact(), wire: e.strand() }).collect()).collect(),
            mus: vec![],
            deltas: vec![],
            decor: w.decor.clone(),
        }
    }
}

/// Eliminates all bracket/cobracket nodes, choosing steps with `choose`.
pub fn eliminate_nodes(
    ctx: &Ctx,
    start: Vec<(Net, Q)>,
    choose: &mut dyn FnMut(&[NetRule]) -> usize,
    trace: Option<&mut Vec<TraceStep>>,
) -> Vec<(Word, Q)> {
    let mut work: BTreeMap<Net, Q> = BTreeMap::new();
    for (n, c) in start {
        *work.entry(n).or_insert_with(Q::zero) += c;
    }
    let mut words: Vec<(Word, Q)> = Vec::new();
    let mut trace = trace;
    while let Some((net, c)) = work.pop_last() {
        if c.is_zero() {
            continue;
        }
        let cands = net.candidates();
        if cands.is_empty() {
            debug_assert_eq!(net.node_count(), 0);
            words.push((net.to_word(), c));
            continue;
        }
        let rule = cands[choose(&cands)];
        if let Some(t) = trace.as_deref_mut() {
            let (slot, pos) = match rule {
                NetRule::Cocycle { delta, mu } => (delta, mu),
                NetRule::Action { mu } => (mu, 0),
                NetRule::Coaction { delta } => (delta, 0),
            };
            t.push(TraceStep { rule: rule.name().into(), state: format!("{net:?}"), slot, pos });
        }
        for (n2, s) in net.apply(ctx, rule) {
            *work.entry(n2).or_insert_with(Q::zero) += &c * Q::from_integer(s.into());
        }
    }
    words
}

// ---------------------------------------------------------------------------
// Prop terms

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Port(pub usize, pub usize);

/// Generators. Slots are 1-based. Nodes are listed in the order they act.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Node {
    /// π*_k: one output.
    Coact { slot: usize },
    /// π_k: consumes one wire.
    Act { slot: usize, input: Port },
    /// μ: two inputs, one output.
    Bracket { inputs: [Port; 2] },
    /// δ: one input, two outputs.
    Cobracket { input: Port },
    /// π_d: one input, one output.
    Proj { decor: Vec<u8>, input: Port },
    /// Strand permutation: input `i` leaves on output `perm[i] − 1`.
    Perm { inputs: Vec<Port>, perm: Vec<usize> },
}

impl Node {
    fn outputs(&self) -> usize {
        match self {
            Node::Coact { .. } | Node::Bracket { .. } | Node::Proj { .. } => 1,
            Node::Act { .. } => 0,
            Node::Cobracket { .. } => 2,
            Node::Perm { inputs, .. } => inputs.len(),
        }
    }

    fn inputs(&self) -> Vec<Port> {
        match self {
            Node::Coact { .. } => vec![],
            Node::Act { input, .. } | Node::Cobracket { input } | Node::Proj { input, .. } => vec![*input],
            Node::Bracket { inputs } => inputs.to_vec(),
            Node::Perm { inputs, .. } => inputs.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropTerm {
    pub n: usize,
    pub nodes: Vec<Node>,
}

/// A wire after idempotents and permutations are resolved.
#[derive(Clone, Debug)]
struct ResolvedWire {
    producer: Port,
    consumer: (usize, usize),
    constraint: Option<Decor>,
    empty: bool,
}

impl PropTerm {
    /// Checks typing: ports refer to earlier outputs, every output is used
    /// exactly once, slots exist.
    pub fn check(&self, monoid: &DecorationMonoid) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Mismatch("empty slot count".into()));
        }
        let mut used: HashMap<Port, usize> = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Coact { slot } | Node::Act { slot, .. } if *slot == 0 || *slot > self.n => {
                    return Err(Error::Mismatch(format!("node {i}: slot {slot} outside 1..={}", self.n)));
                }
                Node::Perm { inputs, perm } => {
                    Permutation::from_images(perm)
                        .map_err(|_| Error::Mismatch(format!("node {i}: bad permutation")))?;
                    if perm.len() != inputs.len() {
                        return Err(Error::Mismatch(format!("node {i}: permutation arity")));
                    }
                }
                Node::Proj { decor, .. } => {
                    monoid.parse_decor(decor).map_err(|e| Error::Mismatch(format!("node {i}: {e}")))?;
                }
                _ => {}
            }
            for p in node.inputs() {
                if p.0 >= i || p.1 >= self.nodes[p.0].outputs() {
                    return Err(Error::Mismatch(format!("node {i}: dangling input {p:?}")));
                }
                if used.insert(p, i).is_some() {
                    return Err(Error::Mismatch(format!("output {p:?} used twice")));
                }
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            for o in 0..node.outputs() {
                if !used.contains_key(&Port(i, o)) {
                    return Err(Error::Mismatch(format!("output {:?} left open", Port(i, o))));
                }
            }
        }
        Ok(())
    }

    fn resolve(&self, monoid: &DecorationMonoid) -> Result<Vec<ResolvedWire>> {
        let mut consumer: HashMap<Port, (usize, usize)> = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            for (k, p) in node.inputs().into_iter().enumerate() {
                consumer.insert(p, (i, k));
            }
        }
        let mut wires = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if !matches!(node, Node::Coact { .. } | Node::Bracket { .. } | Node::Cobracket { .. }) {
                continue;
            }
            for o in 0..node.outputs() {
                let mut at = Port(i, o);
                let mut constraint: Option<Decor> = None;
                let mut empty = false;
                loop {
                    let (ci, ck) = consumer[&at];
                    match &self.nodes[ci] {
                        Node::Proj { decor, .. } => {
                            let d = monoid.parse_decor(decor)?;
                            match constraint {
                                Some(c) if c != d => empty = true,
                                _ => constraint = Some(d),
                            }
                            at = Port(ci, 0);
                        }
                        Node::Perm { perm, .. } => at = Port(ci, perm[ck] - 1),
                        _ => {
                            wires.push(ResolvedWire { producer: Port(i, o), consumer: (ci, ck), constraint, empty });
                            break;
                        }
                    }
                }
            }
        }
        Ok(wires)
    }

    /// Expands into fully decorated nets.
    pub fn to_nets(&self, monoid: &DecorationMonoid) -> Result<Vec<Net>> {
        self.check(monoid)?;
        let ctx = Ctx::of(monoid);
        let wires = self.resolve(monoid)?;
        let wire_of_producer: HashMap<Port, usize> = wires.iter().enumerate().map(|(k, w)| (w.producer, k)).collect();
        let wire_of_consumer: HashMap<(usize, usize), usize> =
            wires.iter().enumerate().map(|(k, w)| (w.consumer, k)).collect();
        let window = monoid.window();
        let mut out = Vec::new();
        let mut assign: Vec<Option<Decor>> = vec![None; wires.len()];
        let accepts = |k: usize, d: &Decor| -> bool {
            let w = &wires[k];
            !w.empty && w.constraint.map_or(true, |c| c == *d) && ctx.ok(d)
        };

        #[allow(clippy::too_many_arguments)]
        fn rec(
            i: usize,
            t: &PropTerm,
            monoid: &DecorationMonoid,
            wires: &[ResolvedWire],
            by_prod: &HashMap<Port, usize>,
            by_cons: &HashMap<(usize, usize), usize>,
            window: &[Decor],
            assign: &mut Vec<Option<Decor>>,
            accepts: &dyn Fn(usize, &Decor) -> bool,
            out: &mut Vec<Net>,
        ) -> Result<()> {
            if i == t.nodes.len() {
                out.push(build_net(t, wires, by_prod, by_cons, assign));
                return Ok(());
            }
            let mut go = |assign: &mut Vec<Option<Decor>>| {
                rec(i + 1, t, monoid, wires, by_prod, by_cons, window, assign, accepts, out)
            };
            match &t.nodes[i] {
                Node::Coact { .. } => {
                    let k = by_prod[&Port(i, 0)];
                    let choices: Vec<Decor> = match wires[k].constraint {
                        Some(c) => vec![c],
                        None => window.to_vec(),
                    };
                    for d in choices {
                        if accepts(k, &d) {
                            assign[k] = Some(d);
                            go(assign)?;
                        }
                    }
                    assign[k] = None;
                }
                Node::Bracket { .. } => {
                    let a = assign[by_cons[&(i, 0)]].expect("assigned upstream");
                    let b = assign[by_cons[&(i, 1)]].expect("assigned upstream");
                    let k = by_prod[&Port(i, 0)];
                    let s = monoid.add(&a, &b);
                    if wires[k].constraint.is_none() && !monoid.contains(&s) && monoid.law() == MonoidLaw::Cone {
                        if s.height() > monoid.cap() {
                            return Err(Error::Overflow(format!("bracket weight {:?} exceeds cap {}", s, monoid.cap())));
                        }
                    }
                    if accepts(k, &s) {
                        assign[k] = Some(s);
                        go(assign)?;
                        assign[k] = None;
                    }
                }
                Node::Cobracket { .. } => {
                    let a = assign[by_cons[&(i, 0)]].expect("assigned upstream");
                    let k0 = by_prod[&Port(i, 0)];
                    let k1 = by_prod[&Port(i, 1)];
                    for (b, c) in monoid.decompositions(&a) {
                        if accepts(k0, &b) && accepts(k1, &c) {
                            assign[k0] = Some(b);
                            assign[k1] = Some(c);
                            go(assign)?;
                        }
                    }
                    assign[k0] = None;
                    assign[k1] = None;
                }
                _ => go(assign)?,
            }
            Ok(())
        }
        rec(0, self, monoid, &wires, &wire_of_producer, &wire_of_consumer, &window, &mut assign, &accepts, &mut out)?;
        Ok(out)
    }
}

fn build_net(
    t: &PropTerm,
    wires: &[ResolvedWire],
    by_prod: &HashMap<Port, usize>,
    by_cons: &HashMap<(usize, usize), usize>,
    assign: &[Option<Decor>],
) -> Net {
    let mut slots = vec![Vec::new(); t.n];
    let mut mus = Vec::new();
    let mut deltas = Vec::new();
    // Nodes act in list order, so later letters go further left.
    for (i, node) in t.nodes.iter().enumerate() {
        match node {
            Node::Coact { slot } => slots[slot - 1].insert(0, NEv { coact: true, wire: by_prod[&Port(i, 0)] }),
            Node::Act { slot, .. } => slots[slot - 1].insert(0, NEv { coact: false, wire: by_cons[&(i, 0)] }),
            Node::Bracket { .. } => mus.push([by_cons[&(i, 0)], by_cons[&(i, 1)], by_prod[&Port(i, 0)]]),
            Node::Cobracket { .. } => deltas.push([by_cons[&(i, 0)], by_prod[&Port(i, 0)], by_prod[&Port(i, 1)]]),
            _ => {}
        }
    }
    let decor = (0..wires.len()).map(|k| assign[k].expect("all wires assigned")).collect();
    Net { slots, mus, deltas, decor }.compact()
}

// ---------------------------------------------------------------------------
// Entry points

fn collect(n: usize, monoid: &DecorationMonoid, terms: BTreeMap<BasisElement, Q>) -> AlgebraElement {
    AlgebraElement::from_terms(n, monoid.clone(), terms)
}

/// Normal form of a prop term.
pub fn straighten(t: &PropTerm, monoid: &DecorationMonoid) -> Result<AlgebraElement> {
    Ok(straighten_traced(t, monoid)?.0)
}

/// Normal form together with the applied rules.
pub fn straighten_traced(t: &PropTerm, monoid: &DecorationMonoid) -> Result<(AlgebraElement, RewriteTrace)> {
    let ctx = Ctx::of(monoid);
    let nets = t.to_nets(monoid)?;
    let mut steps = Vec::new();
    let words = eliminate_nodes(&ctx, nets.into_iter().map(|n| (n, Q::one())).collect(), &mut |_| 0, Some(&mut steps));
    let mut norm = WordNormalizer::with_trace(ctx);
    let mut acc = BTreeMap::new();
    for (w, c) in &words {
        for (b, k) in norm.normalize(w).iter() {
            accumulate(&mut acc, b, c * k);
        }
    }
    steps.extend(norm.take_trace());
    Ok((collect(t.n, monoid, acc), RewriteTrace { steps }))
}

/// Replays a trace produced by [`straighten_traced`].
pub fn replay(t: &PropTerm, monoid: &DecorationMonoid, trace: &RewriteTrace) -> Result<AlgebraElement> {
    let ctx = Ctx::of(monoid);
    let nets = t.to_nets(monoid)?;
    let choice: HashMap<&str, (usize, usize, &str)> = trace
        .steps
        .iter()
        .filter(|s| s.rule != "exchange")
        .map(|s| (s.state.as_str(), (s.slot, s.pos, s.rule.as_str())))
        .collect();
    let mut work: BTreeMap<Net, Q> = nets.into_iter().map(|n| (n, Q::one())).collect();
    let mut words = Vec::new();
    while let Some((net, c)) = work.pop_last() {
        if net.node_count() == 0 {
            words.push((net.to_word(), c));
            continue;
        }
        let key = format!("{net:?}");
        let &(a, b, name) = choice.get(key.as_str()).ok_or_else(|| Error::Domain("trace has no step for net".into()))?;
        let rule = match name {
            "cocycle" => NetRule::Cocycle { delta: a, mu: b },
            "action" => NetRule::Action { mu: a },
            "coaction" => NetRule::Coaction { delta: a },
            other => return Err(Error::Parse(format!("unknown rule {other}"))),
        };
        for (n2, s) in net.apply(&ctx, rule) {
            *work.entry(n2).or_insert_with(Q::zero) += &c * Q::from_integer(s.into());
        }
    }
    Ok(collect(t.n, monoid, replay_words(&ctx, &words, trace)?))
}

/// Normal form under a random rewrite schedule.
pub fn straighten_scheduled<R: Rng>(t: &PropTerm, monoid: &DecorationMonoid, rng: &mut R) -> Result<AlgebraElement> {
    let ctx = Ctx::of(monoid);
    let nets = t.to_nets(monoid)?;
    let words = {
        let mut pick = |c: &[NetRule]| rng.gen_range(0..c.len());
        eliminate_nodes(&ctx, nets.into_iter().map(|n| (n, Q::one())).collect(), &mut pick, None)
    };
    Ok(collect(t.n, monoid, normalize_with_schedule(&ctx, &words, rng)))
}

/// Normal form of a combination of words.
pub fn straighten_words(words: &[(Word, Q)], n: usize, monoid: &DecorationMonoid) -> AlgebraElement {
    let mut norm = WordNormalizer::new(Ctx::of(monoid));
    let mut acc = BTreeMap::new();
    for (w, c) in words {
        for (b, k) in norm.normalize(w).iter() {
            accumulate(&mut acc, b, c * k);
        }
    }
    collect(n, monoid, acc)
}

type CacheKey = (Ctx, BasisElement, BasisElement);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<Terms>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<Terms>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Structure constants: normal form of `s ∘ t`. Memoized.
pub fn compose_basis_terms(ctx: &Ctx, s: &BasisElement, t: &BasisElement) -> Arc<Terms> {
    if s.strands() == 0 {
        return Arc::new(vec![(t.clone(), Q::one())]);
    }
    if t.strands() == 0 {
        return Arc::new(vec![(s.clone(), Q::one())]);
    }
    let key = (ctx.clone(), s.clone(), t.clone());
    if let Some(r) = cache().read().expect("cache lock").get(&key) {
        return r.clone();
    }
    let w = Word::from_basis(s).compose(&Word::from_basis(t));
    let mut norm = WordNormalizer::new(ctx.clone());
    let r = norm.normalize(&w);
    cache().write().expect("cache lock").insert(key, r.clone());
    r
}

pub fn compose_basis(s: &BasisElement, t: &BasisElement, n: usize, monoid: &DecorationMonoid) -> Result<AlgebraElement> {
    if s.slots() != n || t.slots() != n {
        return Err(Error::Mismatch("slot count mismatch".into()));
    }
    let terms = compose_basis_terms(&Ctx::of(monoid), s, t);
    Ok(collect(n, monoid, terms.iter().cloned().collect()))
}

pub fn clear_cache() {
    cache().write().expect("cache lock").clear();
}

// ---------------------------------------------------------------------------
// Random prop terms

/// Random well-typed term with at most `max_nodes` bracket/cobracket/
/// idempotent/coaction generators; remaining open wires are closed by actions.
pub fn random_propterm<R: Rng>(rng: &mut R, n: usize, max_nodes: usize, monoid: &DecorationMonoid) -> PropTerm {
    let mut nodes: Vec<Node> = Vec::new();
    let mut open: Vec<Port> = Vec::new();
    let window = monoid.window();
    let budget = rng.gen_range(1..=max_nodes.max(1));
    let mut used = 0;
    while used < budget {
        let choice = rng.gen_range(0..6);
        let i = nodes.len();
        match choice {
            0 | 1 => {
                nodes.push(Node::Coact { slot: rng.gen_range(1..=n) });
                open.push(Port(i, 0));
            }
            2 if open.len() >= 2 => {
                let a = open.remove(rng.gen_range(0..open.len()));
                let b = open.remove(rng.gen_range(0..open.len()));
                nodes.push(Node::Bracket { inputs: [a, b] });
                open.push(Port(i, 0));
            }
            3 if !open.is_empty() => {
                let a = open.remove(rng.gen_range(0..open.len()));
                nodes.push(Node::Cobracket { input: a });
                open.push(Port(i, 0));
                open.push(Port(i, 1));
            }
            4 if !open.is_empty() && window.len() > 1 => {
                let a = open.remove(rng.gen_range(0..open.len()));
                let d = window[rng.gen_range(0..window.len())];
                nodes.push(Node::Proj { decor: monoid.format_decor(&d), input: a });
                open.push(Port(i, 0));
            }
            5 if !open.is_empty() => {
                let a = open.remove(rng.gen_range(0..open.len()));
                nodes.push(Node::Act { slot: rng.gen_range(1..=n), input: a });
                continue;
            }
            _ => continue,
        }
        used += 1;
    }
    while !open.is_empty() {
        let a = open.remove(rng.gen_range(0..open.len()));
        nodes.push(Node::Act { slot: rng.gen_range(1..=n), input: a });
    }
    PropTerm { n, nodes }
}

/// Random well-formed word with `strands` strands on `n` slots, decorations
/// drawn from the monoid window.
pub fn random_word<R: Rng>(rng: &mut R, n: usize, strands: usize, monoid: &DecorationMonoid) -> Word {
    let window = monoid.window();
    let mut slots: Vec<Vec<Ev>> = vec![Vec::new(); n];
    for s in 0..strands {
        let ka = rng.gen_range(0..n);
        let pa = rng.gen_range(0..=slots[ka].len());
        slots[ka].insert(pa, Ev::act(s));
        let kb = rng.gen_range(0..n);
        let lo = if kb == ka { pa + 1 } else { 0 };
        let pb = rng.gen_range(lo..=slots[kb].len());
        slots[kb].insert(pb, Ev::coact(s));
    }
    let decor = (0..strands).map(|_| window[rng.gen_range(0..window.len())]).collect();
    Word { slots, decor }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn t1() -> DecorationMonoid {
        DecorationMonoid::Trivial
    }

    #[test]
    fn kappa_is_normal() {
        let t = PropTerm { n: 1, nodes: vec![Node::Coact { slot: 1 }, Node::Act { slot: 1, input: Port(0, 0) }] };
        let x = straighten(&t, &t1()).unwrap();
        assert_eq!(x.terms.len(), 1);
        let (b, c) = x.terms.iter().next().unwrap();
        assert_eq!(*c, q(1));
        assert_eq!(b.strands(), 1);
    }

    #[test]
    fn action_after_coaction_gives_three_terms() {
        // π* ∘ π on two open strands: coact(x) act first, then coact(y) ... written as
        // the word b(y) a(x) closed by an outer action of y and inner coaction of x.
        let t = PropTerm {
            n: 1,
            nodes: vec![
                Node::Coact { slot: 1 },
                Node::Act { slot: 1, input: Port(0, 0) },
                Node::Coact { slot: 1 },
                Node::Act { slot: 1, input: Port(2, 0) },
            ],
        };
        // a(y) b(y) a(x) b(x): one exchange, swap + one bracket pair + one cobracket pair
        let x = straighten(&t, &t1()).unwrap();
        assert_eq!(x.degree_bounds(), (2, 2));
        let w = Word { slots: vec![vec![Ev::act(1), Ev::coact(1), Ev::act(0), Ev::coact(0)]], decor: vec![Decor::ZERO; 2] };
        assert!(w.is_well_formed());
        assert_eq!(rewrite_at(&Ctx::of(&t1()), &w, 0, 1).len(), 5);
    }

    #[test]
    fn bracket_into_action_is_removed() {
        let t = PropTerm {
            n: 1,
            nodes: vec![
                Node::Coact { slot: 1 },
                Node::Coact { slot: 1 },
                Node::Bracket { inputs: [Port(0, 0), Port(1, 0)] },
                Node::Act { slot: 1, input: Port(2, 0) },
            ],
        };
        let nets = t.to_nets(&t1()).unwrap();
        assert_eq!(nets.len(), 1);
        assert_eq!(nets[0].candidates(), vec![NetRule::Action { mu: 0 }]);
        let words = eliminate_nodes(&Ctx::of(&t1()), vec![(nets[0].clone(), q(1))], &mut |_| 0, None);
        assert_eq!(words.len(), 2);
        assert!(straighten(&t, &t1()).is_ok());
    }

    #[test]
    fn typing_errors() {
        let open = PropTerm { n: 1, nodes: vec![Node::Coact { slot: 1 }] };
        assert!(matches!(open.check(&t1()), Err(Error::Mismatch(_))));
        let bad_slot = PropTerm { n: 1, nodes: vec![Node::Coact { slot: 2 }, Node::Act { slot: 1, input: Port(0, 0) }] };
        assert!(bad_slot.check(&t1()).is_err());
    }

    #[test]
    fn overflow_in_cone() {
        let m = DecorationMonoid::RootCone { rank: 1, cap: 1 };
        let t = PropTerm {
            n: 1,
            nodes: vec![
                Node::Coact { slot: 1 },
                Node::Proj { decor: vec![1], input: Port(0, 0) },
                Node::Coact { slot: 1 },
                Node::Proj { decor: vec![1], input: Port(2, 0) },
                Node::Bracket { inputs: [Port(1, 0), Port(3, 0)] },
                Node::Act { slot: 1, input: Port(4, 0) },
            ],
        };
        assert!(matches!(straighten(&t, &m), Err(Error::Overflow(_))));
    }

    #[test]
    fn trace_replays() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        use rand::SeedableRng;
        for _ in 0..20 {
            let t = random_propterm(&mut rng, 2, 5, &t1());
            let (x, tr) = straighten_traced(&t, &t1()).unwrap();
            assert_eq!(replay(&t, &t1(), &tr).unwrap(), x);
        }
    }
}

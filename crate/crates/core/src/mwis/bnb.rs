//! Branch and bound over bitsets, generic in the weight type.

use std::ops::{Add, Sub};
use std::time::Instant;

pub trait SolverWeight: Copy + Ord + Default + Add<Output = Self> + Sub<Output = Self> {}
impl SolverWeight for i128 {}

/// `coeff * delta + bias` ordered for all sufficiently large delta.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Lex(pub i64, pub i128);

impl Add for Lex {
    type Output = Lex;
    fn add(self, o: Lex) -> Lex {
        Lex(self.0 + o.0, self.1 + o.1)
    }
}

impl Sub for Lex {
    type Output = Lex;
    fn sub(self, o: Lex) -> Lex {
        Lex(self.0 - o.0, self.1 - o.1)
    }
}

impl SolverWeight for Lex {}

#[derive(Clone, PartialEq, Eq)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    pub fn full(n: usize) -> Self {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    pub fn has(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, w)| **w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn and_not(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    pub fn and_count(&self, o: &Bits) -> u32 {
        self.0.iter().zip(&o.0).map(|(a, b)| (a & b).count_ones()).sum()
    }

    pub fn intersects(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }
}

pub(crate) struct Core<'a, W: SolverWeight> {
    pub adj: &'a [Bits],
    pub w: &'a [W],
    /// Per offset, the 2x2 clique block of each vertex (empty when blocks are not cliques).
    pub blocks: &'a [Vec<usize>],
    pub nblocks: &'a [usize],
    pub deadline: Option<Instant>,
    pub nodes: u64,
    pub timed_out: bool,
}

impl<W: SolverWeight> Core<'_, W> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out
    }

    fn bound(&self, p: &Bits, scratch: &mut Vec<W>) -> W {
        let zero = W::default();
        let mut pos = zero;
        for v in p.iter() {
            pos = pos + self.w[v];
        }
        let mut best = pos;
        for (off, blk) in self.blocks.iter().enumerate() {
            scratch.clear();
            scratch.resize(self.nblocks[off], zero);
            for v in p.iter() {
                let b = blk[v];
                if self.w[v] > scratch[b] {
                    scratch[b] = self.w[v];
                }
            }
            let s = scratch.iter().fold(zero, |a, &x| a + x);
            if s < best {
                best = s;
            }
        }
        best
    }

    /// Drops non-positive vertices and takes vertices with no neighbour left.
    fn simplify(&self, p: &mut Bits, cur: &mut W, set: &mut Vec<usize>) {
        let zero = W::default();
        loop {
            let mut changed = false;
            let items: Vec<usize> = p.iter().collect();
            for v in items {
                if !p.has(v) {
                    continue;
                }
                if self.w[v] <= zero {
                    p.clear(v);
                    changed = true;
                } else if !self.adj[v].intersects(p) {
                    p.clear(v);
                    *cur = *cur + self.w[v];
                    set.push(v);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn components(&self, p: &Bits) -> Vec<Bits> {
        let n = self.adj.len();
        let mut left = p.clone();
        let mut out = Vec::new();
        while let Some(s) = left.first() {
            let mut comp = Bits::empty(n);
            let mut stack = vec![s];
            comp.set(s);
            left.clear(s);
            while let Some(v) = stack.pop() {
                let nb: Vec<usize> = self.adj[v].iter().filter(|u| left.has(*u)).collect();
                for u in nb {
                    left.clear(u);
                    comp.set(u);
                    stack.push(u);
                }
            }
            out.push(comp);
        }
        out
    }

    fn greedy(&self, p: &Bits) -> (W, Vec<usize>) {
        let mut order: Vec<usize> = p.iter().collect();
        order.sort_by(|a, b| self.w[*b].cmp(&self.w[*a]).then(a.cmp(b)));
        let mut left = p.clone();
        let mut set = Vec::new();
        let mut tot = W::default();
        for v in order {
            if left.has(v) && self.w[v] > W::default() {
                set.push(v);
                tot = tot + self.w[v];
                left = left.and_not(&self.adj[v]);
                left.clear(v);
            }
        }
        (tot, set)
    }

    /// Maximum weight independent set inside `p`.
    pub fn solve(&mut self, p: &Bits) -> (W, Vec<usize>) {
        let mut p = p.clone();
        let mut base = W::default();
        let mut forced = Vec::new();
        self.simplify(&mut p, &mut base, &mut forced);
        let comps = self.components(&p);
        let mut total = base;
        for comp in comps {
            let (gw, gs) = self.greedy(&comp);
            let mut best = (gw, gs);
            let mut cur = Vec::new();
            let mut scratch = Vec::new();
            self.dfs(comp, W::default(), &mut cur, &mut best, &mut scratch);
            total = total + best.0;
            forced.extend(best.1);
        }
        forced.sort_unstable();
        (total, forced)
    }

    fn dfs(&mut self, mut p: Bits, mut cur: W, set: &mut Vec<usize>, best: &mut (W, Vec<usize>), scratch: &mut Vec<W>) {
        if self.tick() {
            return;
        }
        let mark = set.len();
        self.simplify(&mut p, &mut cur, set);
        if p.is_empty() {
            if cur > best.0 {
                *best = (cur, set.clone());
            }
            set.truncate(mark);
            return;
        }
        if cur + self.bound(&p, scratch) <= best.0 {
            set.truncate(mark);
            return;
        }
        let comps = self.components(&p);
        if comps.len() > 1 {
            let mut tot = cur;
            let mut all = set.clone();
            for c in comps {
                let (w, s) = self.solve(&c);
                tot = tot + w;
                all.extend(s);
            }
            if tot > best.0 {
                *best = (tot, all);
            }
            set.truncate(mark);
            return;
        }
        let v = p.iter().max_by_key(|&v| (self.adj[v].and_count(&p), std::cmp::Reverse(v))).unwrap();
        let mut inc = p.and_not(&self.adj[v]);
        inc.clear(v);
        set.push(v);
        self.dfs(inc, cur + self.w[v], set, best, scratch);
        set.pop();
        let mut exc = p;
        exc.clear(v);
        self.dfs(exc, cur, set, best, scratch);
        set.truncate(mark);
    }
}

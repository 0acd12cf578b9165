//! Group presentations from the Morse complex: boundary words, the rewriting map r̃,
//! and Tietze simplification.

use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::cell::{self, classify, matching, Cell, Class, Flavor, Item};
use crate::error::{Error, Result};
use crate::homology::{self, OneCellTag};
use crate::morse::MorseComplex;
use crate::names::{self, name_of, name_unordered};
use crate::snf::{self, AbelianGroup};
use crate::tree::OrderedTree;

/// Letters (generator, ±1).
pub type Word = Vec<(u32, i8)>;

pub fn inverse(w: &[(u32, i8)]) -> Word {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

pub fn free_reduce(w: &[(u32, i8)]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w {
        match out.last() {
            Some(&(g, e)) if g == x.0 && e == -x.1 => {
                out.pop();
            }
            _ => out.push(x),
        }
    }
    out
}

pub fn cyclic_reduce(w: &[(u32, i8)]) -> Word {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0].0 == w[w.len() - 1].0 && w[0].1 == -w[w.len() - 1].1 {
        w.pop();
        w.remove(0);
    }
    w
}

pub fn exponent_sum(w: &[(u32, i8)], g: u32) -> i64 {
    w.iter().filter(|x| x.0 == g).map(|x| x.1 as i64).sum()
}

fn rotations(w: &[(u32, i8)]) -> impl Iterator<Item = Word> + '_ {
    (0..w.len()).map(move |i| w[i..].iter().chain(&w[..i]).copied().collect())
}

/// (u, v) with w conjugate to u·v·u⁻¹·v⁻¹. A cyclically reduced word is a commutator
/// exactly when a rotation of it reads X·Y·Z·X⁻¹·Y⁻¹·Z⁻¹ letter for letter.
pub fn commutator_form(w: &[(u32, i8)]) -> Option<(Word, Word)> {
    let w = cyclic_reduce(w);
    let len = w.len();
    if len == 0 || len % 2 == 1 {
        return None;
    }
    let half = len / 2;
    let mut best: Option<(Word, Word)> = None;
    for r in rotations(&w) {
        for a in 1..half {
            for b in 1..=half - a {
                let c = half - a - b;
                let (x, y, z) = (&r[..a], &r[a..a + b], &r[a + b..half]);
                let tail: Word = [inverse(x), inverse(y), inverse(z)].concat();
                if tail != r[half..] {
                    continue;
                }
                let form = if c == 0 {
                    (x.to_vec(), y.to_vec())
                } else {
                    (free_reduce(&[x, y].concat()), free_reduce(&[z.to_vec(), inverse(x)].concat()))
                };
                if best.as_ref().is_none_or(|(u, v)| form.0.len() + form.1.len() < u.len() + v.len()) {
                    best = Some(form);
                }
            }
        }
    }
    best
}

/// Splits a word literally into consecutive commutators of single letters.
pub fn letter_commutators(w: &[(u32, i8)]) -> Option<Vec<((u32, i8), (u32, i8))>> {
    let w = cyclic_reduce(w);
    if w.is_empty() || !w.len().is_multiple_of(4) {
        return None;
    }
    'rot: for r in rotations(&w) {
        let mut out = vec![];
        for q in r.chunks(4) {
            if q[2] != (q[0].0, -q[0].1) || q[3] != (q[1].0, -q[1].1) || q[0].0 == q[1].0 {
                continue 'rot;
            }
            out.push((q[0], q[1]));
        }
        return Some(out);
    }
    None
}

fn face(t: &OrderedTree, c: &[Item], pos: usize, v: usize, flavor: Flavor) -> Cell {
    let mut f: Cell = c.iter().copied().collect();
    f[pos] = Item::vertex(v);
    if flavor == Flavor::Unordered {
        cell::sort_cell(t, &mut f);
    }
    f
}

/// The square word {e_hi, ι(e_lo)}·{e_lo, τ(e_hi)}·{e_hi, τ(e_lo)}⁻¹·{e_lo, ι(e_hi)}⁻¹,
/// with 1-cells oriented from ι to τ; e_hi is the edge with the larger terminal vertex.
pub fn boundary_word(t: &OrderedTree, c: &[Item], flavor: Flavor) -> Vec<(Cell, i8)> {
    let mut edges: Vec<usize> = (0..c.len()).filter(|&p| c[p].is_edge()).collect();
    assert_eq!(edges.len(), 2, "boundary words are defined for 2-cells");
    edges.sort_by_key(|&p| t.tau(c[p].index()));
    let (lo, hi) = (edges[0], edges[1]);
    let (el, eh) = (c[lo].index(), c[hi].index());
    vec![
        (face(t, c, lo, t.iota(el), flavor), 1),
        (face(t, c, hi, t.tau(eh), flavor), 1),
        (face(t, c, lo, t.tau(el), flavor), -1),
        (face(t, c, hi, t.iota(eh), flavor), -1),
    ]
}

const REWRITE_CAP: usize = 50_000_000;

/// Memoized r̃ from words in 1-cells to words in critical 1-cells.
pub struct Rewriter<'a> {
    t: &'a OrderedTree,
    flavor: Flavor,
    shortcut: bool,
    index: FxHashMap<Cell, u32>,
    memo: FxHashMap<Cell, Word>,
    steps: usize,
}

impl<'a> Rewriter<'a> {
    /// `critical` fixes the generator numbering. The vertex-moving shortcut is only
    /// used for unordered cells.
    pub fn new(t: &'a OrderedTree, flavor: Flavor, critical: &[Cell], shortcut: bool) -> Rewriter<'a> {
        let index = critical.iter().enumerate().map(|(i, c)| (c.clone(), i as u32)).collect();
        Rewriter { t, flavor, shortcut: shortcut && flavor == Flavor::Unordered, index, memo: FxHashMap::default(), steps: 0 }
    }

    fn moved(&self, c: &[Item], v: usize) -> Option<Cell> {
        if !self.shortcut {
            return None;
        }
        let t = self.t;
        let e = t.up_edge(v)?;
        let (lo, hi) = (t.tau(e), t.iota(e));
        let between = |w: usize| lo < w && w < hi;
        let clear = c.iter().all(|&it| {
            if it.is_edge() {
                !between(t.tau(it.index())) && !between(t.iota(it.index()))
            } else {
                !between(it.index())
            }
        });
        if !clear {
            return None;
        }
        let pos = c.iter().position(|&i| i == Item::vertex(v))?;
        Some(face(t, c, pos, lo, self.flavor))
    }

    /// One application of r to a redundant 1-cell, read off the square W(c).
    fn step(&self, c: &Cell, v: usize) -> Result<Vec<(Cell, i8)>> {
        if let Some(d) = self.moved(c, v) {
            return Ok(vec![(d, 1)]);
        }
        let w = matching(self.t, c, self.flavor).expect("redundant cell has a W image");
        let sq = boundary_word(self.t, &w, self.flavor);
        let at: Vec<usize> = (0..4).filter(|&i| &sq[i].0 == c).collect();
        let [p] = at[..] else {
            return Err(Error::Invalid(format!("{} is not a single side of its square", cell::cell_text(self.t, c, self.flavor))));
        };
        let before: Vec<(Cell, i8)> = sq[..p].to_vec();
        let after: Vec<(Cell, i8)> = sq[p + 1..].to_vec();
        let inv = |v: Vec<(Cell, i8)>| -> Vec<(Cell, i8)> { v.into_iter().rev().map(|(c, e)| (c, -e)).collect() };
        // A·c·B = 1 gives c = A⁻¹B⁻¹; A·c⁻¹·B = 1 gives c = B·A
        Ok(if sq[p].1 == 1 { [inv(before), inv(after)].concat() } else { [after, before].concat() })
    }

    pub fn rewrite_cell(&mut self, c: &Cell) -> Result<Word> {
        if let Some(w) = self.memo.get(c) {
            return Ok(w.clone());
        }
        let mut stack: Vec<(Cell, Option<Vec<(Cell, i8)>>)> = vec![(c.clone(), None)];
        let mut active: FxHashSet<Cell> = FxHashSet::default();
        active.insert(c.clone());
        while let Some(top) = stack.last_mut() {
            if top.1.is_none() {
                self.steps += 1;
                if self.steps > REWRITE_CAP {
                    return Err(Error::IterationCap("rewrite"));
                }
                let cell = top.0.clone();
                let done = match classify(self.t, &cell) {
                    Class::Critical => {
                        let g = *self.index.get(&cell).ok_or_else(|| Error::Invalid("critical cell outside the basis".into()))?;
                        Some(vec![(g, 1)])
                    }
                    Class::Collapsible(_) => Some(vec![]),
                    Class::Redundant(v) => {
                        stack.last_mut().unwrap().1 = Some(self.step(&cell, v)?);
                        None
                    }
                };
                if let Some(w) = done {
                    self.memo.insert(cell.clone(), w);
                    active.remove(&cell);
                    stack.pop();
                }
                continue;
            }
            let deps = top.1.as_ref().unwrap();
            if let Some((f, _)) = deps.iter().find(|(f, _)| !self.memo.contains_key(f)) {
                if !active.insert(f.clone()) {
                    return Err(Error::IterationCap("rewrite: gradient path revisits a cell"));
                }
                let f = f.clone();
                stack.push((f, None));
                continue;
            }
            let mut w = vec![];
            for (f, e) in deps {
                let part = &self.memo[f];
                if *e == 1 {
                    w.extend_from_slice(part);
                } else {
                    w.extend(inverse(part));
                }
            }
            let w = free_reduce(&w);
            let (cell, _) = stack.pop().unwrap();
            active.remove(&cell);
            self.memo.insert(cell, w);
        }
        Ok(self.memo[c].clone())
    }

    pub fn rewrite(&mut self, w: &[(Cell, i8)]) -> Result<Word> {
        let mut out = vec![];
        for (c, e) in w {
            let part = self.rewrite_cell(c)?;
            if *e == 1 {
                out.extend(part);
            } else {
                out.extend(inverse(&part));
            }
        }
        Ok(free_reduce(&out))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "move", rename_all = "lowercase")]
pub enum Move {
    /// A joining generator set to the identity.
    Kill { generator: String },
    /// A generator solved from a relator and substituted everywhere.
    Eliminate { generator: String, relator: usize, stage: &'static str },
    /// A new generator replacing an old one.
    Substitute { new: String, old: String, definition: String },
    /// A relator that reduced to the empty word.
    Drop { relator: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct PresentationReport {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub history: Vec<Move>,
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub names: Vec<String>,
    pub alive: Vec<bool>,
    pub relators: Vec<Word>,
    /// Critical 2-cell each relator came from.
    pub origin: Vec<usize>,
    pub history: Vec<Move>,
    /// Joining generator set to the identity (ordered case).
    pub killed: Option<u32>,
}

impl Presentation {
    pub fn generators(&self) -> Vec<u32> {
        (0..self.names.len() as u32).filter(|&g| self.alive[g as usize]).collect()
    }

    pub fn generator_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn word_text(&self, w: &[(u32, i8)]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut s = String::new();
        for (i, &(g, e)) in w.iter().enumerate() {
            if i > 0 {
                s.push('·');
            }
            s.push_str(&self.names[g as usize]);
            if e < 0 {
                s.push_str("⁻¹");
            }
        }
        s
    }

    /// Bracket notation where a relator is a commutator or a product of letter commutators.
    pub fn relator_text(&self, w: &[(u32, i8)]) -> String {
        let letter = |x: (u32, i8)| self.word_text(&[x]);
        if let Some(list) = letter_commutators(w) {
            let mut s = String::new();
            for (a, b) in list {
                let _ = write!(s, "[{},{}]", letter(a), letter(b));
            }
            return s;
        }
        if let Some((u, v)) = commutator_form(w) {
            return format!("[{},{}]", self.word_text(&u), self.word_text(&v));
        }
        self.word_text(w)
    }

    pub fn report(&self) -> PresentationReport {
        PresentationReport {
            generators: self.generators().iter().map(|&g| self.names[g as usize].clone()).collect(),
            relators: self.relators.iter().map(|r| self.relator_text(r)).collect(),
            history: self.history.clone(),
        }
    }

    pub fn abelianization(&self) -> AbelianGroup {
        let gens = self.generators();
        if self.relators.is_empty() {
            return AbelianGroup::free(gens.len());
        }
        let pos: FxHashMap<u32, usize> = gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut m = vec![vec![0i64; self.relators.len()]; gens.len()];
        for (j, r) in self.relators.iter().enumerate() {
            for &(g, e) in r {
                m[pos[&g]][j] += e as i64;
            }
        }
        if gens.is_empty() {
            return AbelianGroup::free(0);
        }
        AbelianGroup::cokernel(gens.len(), &snf::invariant_factors(&snf::from_i64(&m)))
    }

    fn kill(&mut self, g: u32) {
        self.alive[g as usize] = false;
        for r in self.relators.iter_mut() {
            let w: Word = r.iter().copied().filter(|x| x.0 != g).collect();
            *r = free_reduce(&w);
        }
        self.history.push(Move::Kill { generator: self.names[g as usize].clone() });
    }

    fn substitute(&mut self, g: u32, by: &[(u32, i8)]) {
        let inv = inverse(by);
        for r in self.relators.iter_mut() {
            if r.iter().any(|x| x.0 == g) {
                let mut w = vec![];
                for &x in r.iter() {
                    if x.0 != g {
                        w.push(x);
                    } else if x.1 == 1 {
                        w.extend_from_slice(by);
                    } else {
                        w.extend_from_slice(&inv);
                    }
                }
                *r = free_reduce(&w);
            }
        }
    }

    /// Tietze move: solves relator `j` (containing `g` once) for `g`.
    fn eliminate(&mut self, g: u32, j: usize, stage: &'static str) {
        let r = self.relators.remove(j);
        self.origin.remove(j);
        let p = r.iter().position(|x| x.0 == g).unwrap();
        let (a, b) = (&r[..p], &r[p + 1..]);
        let value = if r[p].1 == 1 { free_reduce(&[inverse(a), inverse(b)].concat()) } else { free_reduce(&[b, a].concat()) };
        self.alive[g as usize] = false;
        self.substitute(g, &value);
        self.history.push(Move::Eliminate { generator: self.names[g as usize].clone(), relator: j, stage });
        self.drop_trivial();
    }

    fn drop_trivial(&mut self) {
        while let Some(j) = self.relators.iter().position(|r| r.is_empty()) {
            self.relators.remove(j);
            self.origin.remove(j);
            self.history.push(Move::Drop { relator: j });
        }
    }

    fn occurrences(&self, j: usize, g: u32) -> usize {
        self.relators[j].iter().filter(|x| x.0 == g).count()
    }
}

/// Joining 1-cell to kill in the ordered case, among `candidates`: a non-pivotal
/// tree-edge cell with identity permutation when possible.
fn joining_generator(mc: &MorseComplex, candidates: &[usize], tags: Option<&[OneCellTag]>) -> Option<u32> {
    let t = &mc.tree;
    let score = |j: usize| {
        let nm = name_of(t, &mc.critical[1][j]);
        let tree_id = nm.as_ref().is_some_and(|n| {
            n.parts.len() == 1 && t.is_tree_edge(n.parts[0].edge) && n.sigma.as_ref().is_some_and(|s| cell::is_identity(s))
        });
        let pivotal = tags.is_some_and(|tg| tg[j] == OneCellTag::Pivotal);
        (pivotal, !tree_id, std::cmp::Reverse(j))
    };
    candidates.iter().copied().min_by_key(|&j| score(j)).map(|j| j as u32)
}

/// Generators are critical 1-cells, relators r̃(∂_w) of the critical 2-cells. In the
/// ordered case (n = 2) one joining generator is killed, giving the pure braid group.
/// The killed generator is one that survives simplification of the unkilled
/// presentation, so that killing first and simplifying agree with the reverse order.
pub fn raw_presentation(mc: &MorseComplex) -> Result<Presentation> {
    if mc.ordered() && mc.n != 2 {
        return Err(Error::Unsupported("ordered presentations need n = 2".into()));
    }
    let empty = vec![];
    let ones = mc.critical.get(1).unwrap_or(&empty);
    let twos = mc.critical.get(2).unwrap_or(&empty);
    let mut rw = Rewriter::new(&mc.tree, mc.flavor, ones, true);
    let mut relators = vec![];
    for c in twos {
        relators.push(rw.rewrite(&boundary_word(&mc.tree, c, mc.flavor))?);
    }
    let mut p = Presentation {
        names: ones.iter().map(|c| mc.label(c)).collect(),
        alive: vec![true; ones.len()],
        origin: (0..relators.len()).collect(),
        relators,
        history: vec![],
        killed: None,
    };
    if mc.ordered() {
        let d1 = &mc.boundary[1];
        let mut joining: Vec<usize> = (0..d1.ncols()).filter(|&j| !d1.cols[j].is_empty()).collect();
        let tags = homology::classify_1cells(mc).ok();
        if tags.is_some() {
            let dry = simplify(&p, mc)?;
            let survivors: Vec<usize> = joining.iter().copied().filter(|&j| dry.alive[j]).collect();
            if !survivors.is_empty() {
                joining = survivors;
            }
        }
        if let Some(g) = joining_generator(mc, &joining, tags.as_deref()) {
            p.kill(g);
            p.killed = Some(g);
        }
    }
    p.drop_trivial();
    Ok(p)
}

/// Order used only for eliminating pivotal 1-cells: (s, τ, t, ι, ā) with t = 1 for
/// deleted edges, so they outrank tree edges at the same terminal vertex.
fn pivotal_key(mc: &MorseComplex, c: &[Item]) -> Vec<i64> {
    let t = &mc.tree;
    let nm = if mc.ordered() { name_of(t, c) } else { name_unordered(t, c) };
    let Some(nm) = nm else { return vec![] };
    let p = &nm.parts[0];
    let mut k = vec![names::abs(&p.a) as i64, t.tau(p.edge) as i64, !t.is_tree_edge(p.edge) as i64, t.iota(p.edge) as i64];
    k.extend(p.a.iter().map(|&x| x as i64));
    if let Some(s) = &nm.sigma {
        k.extend(s.iter().map(|&x| -(x as i64)));
    }
    k
}

/// Simplifies a raw presentation, calling `observe` after every Tietze move.
pub fn simplify_with(p: &Presentation, mc: &MorseComplex, observe: &mut dyn FnMut(&Presentation)) -> Result<Presentation> {
    let mut p = p.clone();
    let tags = match homology::classify_1cells(mc) {
        Ok(t) => t,
        Err(Error::Unsupported(_)) => {
            greedy(&mut p, "greedy", observe);
            return Ok(p);
        }
        Err(e) => return Err(e),
    };
    let d2 = mc.boundary.get(2);

    // pivotal generators, largest first
    let mut pivotal: Vec<u32> = (0..tags.len() as u32).filter(|&g| tags[g as usize] == OneCellTag::Pivotal && p.alive[g as usize]).collect();
    pivotal.sort_by_key(|&g| std::cmp::Reverse(pivotal_key(mc, &mc.critical[1][g as usize])));
    for g in pivotal {
        let leading = |cell2: usize| d2.and_then(|m| m.cols[cell2].iter().map(|x| x.0).min()) == Some(g as usize);
        let candidates: Vec<usize> = (0..p.relators.len()).filter(|&j| p.occurrences(j, g) == 1).collect();
        let j = candidates
            .iter()
            .copied()
            .min_by_key(|&j| (!leading(p.origin[j]), p.relators[j].len()))
            .ok_or_else(|| Error::Invalid(format!("pivotal generator {} occurs in no relator exactly once", p.names[g as usize])))?;
        p.eliminate(g, j, "pivotal");
        observe(&p);
    }

    // separating generators: contract edges w(d,d′,d″) smallest vertex first
    let separating: Vec<u32> = (0..tags.len() as u32).filter(|&g| tags[g as usize] == OneCellTag::Separating).collect();
    let mut done: FxHashSet<u32> = FxHashSet::default();
    loop {
        // critical[1] is in decreasing order, so the smallest has the largest index
        let Some(&s) = separating.iter().rev().find(|&&g| p.alive[g as usize] && !done.contains(&g)) else { break };
        let mut edges: Vec<(u32, usize, usize)> = vec![];
        for j in 0..p.relators.len() {
            if p.occurrences(j, s) != 1 {
                continue;
            }
            let r = &p.relators[j];
            let mut gens: Vec<u32> = r.iter().map(|x| x.0).collect();
            gens.sort_unstable();
            gens.dedup();
            let nonzero: Vec<u32> = gens.into_iter().filter(|&g| exponent_sum(r, g) != 0).collect();
            match nonzero[..] {
                // an edge to the killed joining generator, which is the identity
                [a] if a == s => edges.push((p.killed.filter(|k| separating.contains(k)).unwrap_or(u32::MAX), j, r.len())),
                [a, b] if a == s || b == s => {
                    let other = if a == s { b } else { a };
                    if separating.contains(&other) && exponent_sum(r, other).abs() == 1 {
                        edges.push((other, j, r.len()));
                    }
                }
                _ => {}
            }
        }
        // smallest neighbour, then the shortest label
        match edges.into_iter().min_by_key(|&(o, _, len)| (std::cmp::Reverse(o), len)) {
            Some((_, j, _)) => {
                p.eliminate(s, j, "separating");
                observe(&p);
            }
            None => {
                done.insert(s);
            }
        }
    }

    // leftovers, e.g. a separating class that became eliminable once a joining cell died
    greedy(&mut p, "residual", observe);

    if p.relators.len() == 1 && commutator_form(&p.relators[0]).is_none() && letter_commutators(&p.relators[0]).is_none() {
        surface_normal_form(&mut p, observe);
    }
    Ok(p)
}

/// Fallback without a 1-cell classification: eliminate any generator that occurs once
/// in some relator, largest generator first, using the shortest such relator.
fn greedy(p: &mut Presentation, stage: &'static str, observe: &mut dyn FnMut(&Presentation)) {
    loop {
        let mut pick = None;
        'gens: for g in p.generators() {
            let best = (0..p.relators.len()).filter(|&j| p.occurrences(j, g) == 1).min_by_key(|&j| p.relators[j].len());
            if let Some(j) = best {
                pick = Some((g, j));
                break 'gens;
            }
        }
        let Some((g, j)) = pick else { break };
        p.eliminate(g, j, stage);
        observe(p);
    }
}

pub fn simplify(p: &Presentation, mc: &MorseComplex) -> Result<Presentation> {
    simplify_with(p, mc, &mut |_| {})
}

fn is_orientable_quadratic(w: &[(u32, i8)]) -> bool {
    let mut seen: FxHashMap<u32, (usize, i64)> = FxHashMap::default();
    for &(g, e) in w {
        let s = seen.entry(g).or_default();
        s.0 += 1;
        s.1 += e as i64;
    }
    !w.is_empty() && seen.values().all(|&(n, sum)| n == 2 && sum == 0)
}

/// Rewrites a single orientable quadratic relator into [a₁,b₁]⋯[a_g,b_g] by generator
/// substitutions. For x·P·y·Q·x⁻¹·R·y⁻¹·S put u = x·P, v = y·Q·P, u′ = (R·Q·P)⁻¹·u;
/// the relator becomes [u′,v]·S·R·Q·P up to rotation.
fn surface_normal_form(p: &mut Presentation, observe: &mut dyn FnMut(&Presentation)) {
    let mut w = cyclic_reduce(&p.relators[0]);
    if !is_orientable_quadratic(&w) {
        return;
    }
    let mut done: Word = vec![];
    while !w.is_empty() {
        // linked pair x … y … x⁻¹ … y⁻¹ with x at the front after rotation
        let mut found = None;
        'search: for (rot, r) in rotations(&w).enumerate() {
            let x = r[0];
            let xi = r.iter().position(|&l| l == (x.0, -x.1)).unwrap();
            for yp in 1..xi {
                let y = r[yp];
                if let Some(yi) = r.iter().position(|&l| l == (y.0, -y.1)) {
                    if yi > xi {
                        found = Some((rot, r.clone(), yp, xi, yi));
                        break 'search;
                    }
                }
            }
        }
        let Some((_, r, yp, xi, yi)) = found else { break };
        let (x, y) = (r[0], r[yp]);
        let pp = r[1..yp].to_vec();
        let q = r[yp + 1..xi].to_vec();
        let rr = r[xi + 1..yi].to_vec();
        let s = r[yi + 1..].to_vec();
        let qp = [q.clone(), pp.clone()].concat();
        let m = [rr.clone(), qp.clone()].concat();
        // a definition that is a single letter keeps that letter
        let define = |p: &mut Presentation, def: Word, old: (u32, i8)| -> (u32, i8) {
            if let [l] = def[..] {
                return l;
            }
            let id = p.names.len() as u32;
            let name = format!("X{}", p.names.iter().filter(|n| n.starts_with('X')).count() + 1);
            p.history.push(Move::Substitute { new: name.clone(), old: p.word_text(&[old]), definition: p.word_text(&def) });
            p.names.push(name);
            p.alive.push(true);
            p.alive[old.0 as usize] = false;
            (id, 1)
        };
        let u = define(p, free_reduce(&[vec![x], pp.clone()].concat()), x);
        let v = define(p, free_reduce(&[vec![y], qp.clone()].concat()), y);
        let u2 = define(p, free_reduce(&[inverse(&m), vec![u]].concat()), u);
        let rest = free_reduce(&[s, m].concat());
        done.extend([u2, v, (u2.0, -u2.1), (v.0, -v.1)]);
        w = cyclic_reduce(&rest);
        p.relators[0] = [done.clone(), w.clone()].concat();
        observe(p);
    }
}

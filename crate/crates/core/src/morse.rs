//! The reduction R̃ onto critical cells and the Morse complex.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::cell::{self, boundary, classify, matching, Cell, Class, Flavor, Item};
use crate::error::{Error, Result};
use crate::fast;
use crate::graph::{self, Graph, Policy};
use crate::names;
use crate::tree::{self, Mode, OrderedTree};

pub type Chain = Vec<(Cell, i64)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Generic,
    Fast,
    Both,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        match s {
            "generic" => Ok(Method::Generic),
            "fast" => Ok(Method::Fast),
            "both" => Ok(Method::Both),
            _ => Err(Error::Invalid(format!("method {s}"))),
        }
    }
}

const STEP_CAP: usize = 200_000_000;

enum Plan {
    Done(Vec<(u32, i64)>),
    Deps(Vec<(Cell, i64)>),
}

struct Frame {
    cell: Cell,
    deps: Option<Vec<(Cell, i64)>>,
}

/// Memoized R̃. Critical cells met during reduction get indices in order of discovery.
pub struct Reducer<'a> {
    t: &'a OrderedTree,
    flavor: Flavor,
    shortcuts: bool,
    crit_index: FxHashMap<Cell, u32>,
    crit: Vec<Cell>,
    memo: FxHashMap<Cell, u32>,
    chains: Vec<Vec<(u32, i64)>>,
    steps: usize,
}

impl<'a> Reducer<'a> {
    /// With `shortcuts`, the vertex-moving lemmas replace single R steps where they hold.
    /// They are never used for ordered cells with more than two members.
    pub fn new(t: &'a OrderedTree, flavor: Flavor, shortcuts: bool) -> Reducer<'a> {
        Reducer {
            t,
            flavor,
            shortcuts,
            crit_index: FxHashMap::default(),
            crit: vec![],
            memo: FxHashMap::default(),
            chains: vec![],
            steps: 0,
        }
    }

    pub fn critical(&self, i: u32) -> &Cell {
        &self.crit[i as usize]
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// V_e(c) when a shortcut lemma applies to the smallest unblocked vertex of c.
    fn shortcut(&self, c: &[Item], v: usize) -> Option<Cell> {
        let t = self.t;
        if !self.shortcuts || (self.flavor == Flavor::Ordered && c.len() > 2) {
            return None;
        }
        let e = t.up_edge(v)?;
        let (lo, hi) = (t.tau(e), t.iota(e));
        let between = |w: usize| lo < w && w < hi;
        let kkp = c.iter().all(|&it| {
            if it.is_edge() {
                !between(t.tau(it.index())) && !between(t.iota(it.index()))
            } else {
                !between(it.index())
            }
        });
        let special = self.flavor == Flavor::Unordered
            && cell::dim(c) == 1
            && c.iter().all(|&it| {
                if it.is_edge() {
                    let p = it.index();
                    !(between(t.tau(p)) || between(t.iota(p))) || !t.separates(p, lo)
                } else {
                    !between(it.index()) || cell::is_blocked(t, c, it.index())
                }
            });
        if !(kkp || special) {
            return None;
        }
        let pos = c.iter().position(|&i| i == Item::vertex(v))?;
        let mut d: Cell = c.iter().copied().collect();
        d[pos] = Item::vertex(lo);
        if self.flavor == Flavor::Unordered {
            cell::sort_cell(t, &mut d);
        }
        Some(d)
    }

    fn plan(&mut self, c: &Cell) -> Result<Plan> {
        match classify(self.t, c) {
            Class::Critical => {
                let next = self.crit.len() as u32;
                let i = *self.crit_index.entry(c.clone()).or_insert(next);
                if i == next {
                    self.crit.push(c.clone());
                }
                Ok(Plan::Done(vec![(i, 1)]))
            }
            Class::Collapsible(_) => Ok(Plan::Done(vec![])),
            Class::Redundant(v) => {
                if let Some(d) = self.shortcut(c, v) {
                    return Ok(Plan::Deps(vec![(d, 1)]));
                }
                let w = matching(self.t, c, self.flavor).expect("redundant cell has a W image");
                let faces = boundary(self.t, &w, self.flavor);
                let kappa: i64 = faces.iter().filter(|(f, _)| f == c).map(|(_, k)| k).sum();
                if kappa.abs() != 1 {
                    return Err(Error::Invalid(format!(
                        "coefficient {kappa} of {} in the boundary of its W image",
                        cell::cell_text(self.t, c, self.flavor)
                    )));
                }
                // R(c) = c − κ⁻¹ ∂W(c)
                Ok(Plan::Deps(faces.into_iter().filter(|(f, _)| f != c).map(|(f, k)| (f, -k * kappa)).collect()))
            }
        }
    }

    fn store(&mut self, c: Cell, chain: Vec<(u32, i64)>) -> u32 {
        let id = self.chains.len() as u32;
        self.chains.push(chain);
        self.memo.insert(c, id);
        id
    }

    fn chain_id(&mut self, c: &Cell) -> Result<u32> {
        if let Some(&id) = self.memo.get(c) {
            return Ok(id);
        }
        let mut stack = vec![Frame { cell: c.clone(), deps: None }];
        let mut active: FxHashSet<Cell> = FxHashSet::default();
        active.insert(c.clone());
        while let Some(top) = stack.last_mut() {
            if top.deps.is_none() {
                self.steps += 1;
                if self.steps > STEP_CAP {
                    return Err(Error::IterationCap("reduce"));
                }
                let cell = top.cell.clone();
                match self.plan(&cell)? {
                    Plan::Done(ch) => {
                        self.store(cell.clone(), ch);
                        active.remove(&cell);
                        stack.pop();
                        continue;
                    }
                    Plan::Deps(d) => stack.last_mut().unwrap().deps = Some(d),
                }
            }
            let top = stack.last().unwrap();
            let deps = top.deps.as_ref().unwrap();
            if let Some((f, _)) = deps.iter().find(|(f, _)| !self.memo.contains_key(f)) {
                if !active.insert(f.clone()) {
                    return Err(Error::IterationCap("reduce: gradient path revisits a cell"));
                }
                let f = f.clone();
                stack.push(Frame { cell: f, deps: None });
                continue;
            }
            let mut acc: Vec<(u32, i64)> = vec![];
            for (f, k) in deps {
                let id = self.memo[f];
                acc.extend(self.chains[id as usize].iter().map(|&(i, x)| (i, x * k)));
            }
            let acc = normalize(acc);
            let frame = stack.pop().unwrap();
            active.remove(&frame.cell);
            self.store(frame.cell, acc);
        }
        Ok(self.memo[c])
    }

    /// R̃ of one cell, over critical-cell indices.
    pub fn reduce_cell(&mut self, c: &Cell) -> Result<Vec<(u32, i64)>> {
        let id = self.chain_id(c)?;
        Ok(self.chains[id as usize].clone())
    }

    /// R̃ applied linearly.
    pub fn reduce(&mut self, ch: &[(Cell, i64)]) -> Result<Chain> {
        let mut acc = vec![];
        for (c, k) in ch {
            let id = self.chain_id(c)?;
            acc.extend(self.chains[id as usize].iter().map(|&(i, x)| (i, x * k)));
        }
        Ok(normalize(acc).into_iter().map(|(i, x)| (self.crit[i as usize].clone(), x)).collect())
    }

    /// ∂̃ = R̃∘∂.
    pub fn morse_boundary(&mut self, c: &[Item]) -> Result<Chain> {
        let b = boundary(self.t, c, self.flavor);
        self.reduce(&b)
    }
}

fn normalize(mut v: Vec<(u32, i64)>) -> Vec<(u32, i64)> {
    v.sort_unstable_by_key(|p| p.0);
    let mut out: Vec<(u32, i64)> = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|p| p.1 != 0);
    out
}

/// Sums a chain of cells, dropping zero coefficients, in a deterministic order.
pub fn collect_chain(ch: Chain) -> Chain {
    let mut m: FxHashMap<Cell, i64> = FxHashMap::default();
    for (c, k) in ch {
        *m.entry(c).or_default() += k;
    }
    let mut v: Chain = m.into_iter().filter(|(_, k)| *k != 0).collect();
    v.sort();
    v
}

pub fn reduce(t: &OrderedTree, flavor: Flavor, ch: &[(Cell, i64)]) -> Result<Chain> {
    Reducer::new(t, flavor, true).reduce(ch)
}

pub fn morse_boundary(t: &OrderedTree, flavor: Flavor, c: &[Item]) -> Result<Chain> {
    Reducer::new(t, flavor, true).morse_boundary(c)
}

/// Integer matrix stored by columns; column j lists (row, entry).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.cols[c].iter().find(|p| p.0 == r).map_or(0, |p| p.1)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.cols.len()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, x) in col {
                m[i][j] = x;
            }
        }
        m
    }

    /// Product self ∘ other (other applied first).
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut acc = vec![];
                for &(k, x) in col {
                    acc.extend(self.cols[k].iter().map(|&(i, y)| (i as u32, x * y)));
                }
                normalize(acc).into_iter().map(|(i, x)| (i as usize, x)).collect()
            })
            .collect();
        SparseMatrix { rows: self.rows, cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn to_csv(&self) -> String {
        self.to_dense()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Clone, Debug)]
pub struct MorseComplex {
    pub tree: OrderedTree,
    pub n: usize,
    pub flavor: Flavor,
    pub method: Method,
    /// Number of cells of each dimension in the whole cube complex.
    pub cell_counts: Vec<usize>,
    /// Critical cells per dimension, in decreasing basis order.
    pub critical: Vec<Vec<Cell>>,
    /// `boundary[k]`: critical k-cells (columns) to critical (k−1)-cells (rows); `boundary[0]` is empty.
    pub boundary: Vec<SparseMatrix>,
    /// Critical 2-cells whose boundary came from the closed formulas.
    pub fast_cells: usize,
}

impl MorseComplex {
    pub fn counts(&self) -> Vec<usize> {
        self.critical.iter().map(|v| v.len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating(&self.counts())
    }

    pub fn complex_euler_characteristic(&self) -> i64 {
        alternating(&self.cell_counts)
    }

    pub fn ordered(&self) -> bool {
        self.flavor == Flavor::Ordered
    }

    pub fn label(&self, c: &[Item]) -> String {
        names::cell_label(&self.tree, c, self.ordered())
    }

    pub fn index_of(&self, c: &[Item]) -> Option<usize> {
        self.critical.get(cell::dim(c))?.iter().position(|x| x.as_slice() == c)
    }

    /// ∂̃ of the j-th critical k-cell as a chain of cells.
    pub fn column_chain(&self, k: usize, j: usize) -> Chain {
        self.boundary[k].cols[j].iter().map(|&(i, x)| (self.critical[k - 1][i].clone(), x)).collect()
    }

    pub fn chain_text(&self, ch: &[(Cell, i64)]) -> String {
        chain_text(|c| self.label(c), ch)
    }
}

pub fn chain_text(label: impl Fn(&[Item]) -> String, ch: &[(Cell, i64)]) -> String {
    if ch.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (c, k)) in ch.iter().enumerate() {
        let sign = if *k < 0 { "−" } else if i > 0 { "+" } else { "" };
        let mag = if k.abs() == 1 { String::new() } else { k.abs().to_string() };
        if i > 0 {
            s.push(' ');
        }
        s.push_str(sign);
        if i > 0 && !sign.is_empty() {
            s.push(' ');
        }
        s.push_str(&mag);
        s.push_str(&label(c));
    }
    s
}

fn alternating(v: &[usize]) -> i64 {
    v.iter().enumerate().map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) }).sum()
}

pub fn build_morse_complex(g: &Graph, n: usize, flavor: Flavor, method: Method, mode: Mode, cap: usize) -> Result<MorseComplex> {
    let t = tree::choose_tree_and_order(g, n, mode)?;
    from_tree(t, n, flavor, method, cap)
}

/// Subdivides `g` by `policy` and builds the complex. `Policy::Auto` falls back to
/// finer subdivisions when the minimal one admits no tree meeting the conditions.
pub fn build_subdivided(
    g: &Graph,
    n: usize,
    flavor: Flavor,
    method: Method,
    mode: Mode,
    policy: Policy,
    cap: usize,
) -> Result<(Graph, MorseComplex)> {
    let tries: &[Policy] = match policy {
        Policy::Auto if n <= 2 => &[Policy::Strict, Policy::Uniform],
        Policy::Auto => &[Policy::Auto, Policy::Strict, Policy::Uniform],
        _ => std::slice::from_ref(&policy),
    };
    let mut last = None;
    for &p in tries {
        let (h, _) = graph::subdivide(g, n, p)?;
        match tree::choose_tree_and_order(&h, n, mode) {
            Ok(t) => return Ok((h, from_tree(t, n, flavor, method, cap)?)),
            Err(e @ Error::Conditions(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one policy tried"))
}

pub fn from_tree(t: OrderedTree, n: usize, flavor: Flavor, method: Method, cap: usize) -> Result<MorseComplex> {
    if method != Method::Generic && flavor == Flavor::Ordered && n >= 3 {
        return Err(Error::Unsupported(
            "closed boundary formulas for ordered cells need n = 2; use --method generic".into(),
        ));
    }
    let fast_ok = method != Method::Generic && fast::applicable(&t);
    if method == Method::Fast && !fast_ok {
        return Err(Error::Unsupported("closed boundary formulas need a tree satisfying T1-T3".into()));
    }
    let all = cell::enumerate_cells(&t, n, flavor, cap)?;
    let cell_counts: Vec<usize> = all.iter().map(|v| v.len()).collect();
    let ordered = flavor == Flavor::Ordered;
    let mut critical: Vec<Vec<Cell>> = all
        .into_iter()
        .map(|list| list.into_iter().filter(|c| classify(&t, c) == Class::Critical).collect::<Vec<_>>())
        .collect();
    while critical.len() > 1 && critical.last().is_some_and(|v| v.is_empty()) {
        critical.pop();
    }
    for list in critical.iter_mut() {
        let mut keyed: Vec<(Vec<i64>, Cell)> = list.drain(..).map(|c| (names::basis_key(&t, &c, ordered), c)).collect();
        keyed.sort_by(|a, b| b.0.cmp(&a.0));
        *list = keyed.into_iter().map(|p| p.1).collect();
    }
    let mut boundary_mats = vec![SparseMatrix::default()];
    let mut fast_cells = 0;
    {
        let mut red = Reducer::new(&t, flavor, true);
        for k in 1..critical.len() {
            let pos: FxHashMap<&Cell, usize> = critical[k - 1].iter().enumerate().map(|(i, c)| (c, i)).collect();
            let to_col = |ch: Chain| -> Result<Vec<(usize, i64)>> {
                let mut col: Vec<(usize, i64)> = ch
                    .into_iter()
                    .map(|(c, x)| {
                        pos.get(&c).map(|&i| (i, x)).ok_or_else(|| {
                            Error::Invalid(format!("reduction produced a non-basis cell {}", cell::cell_text(&t, &c, flavor)))
                        })
                    })
                    .collect::<Result<_>>()?;
                col.sort_unstable();
                Ok(col)
            };
            let mut cols = Vec::with_capacity(critical[k].len());
            for c in &critical[k] {
                let fast_chain = if k == 2 && fast_ok { fast::fast_morse_boundary(&t, n, flavor, c)? } else { None };
                let col = match (method, fast_chain) {
                    (Method::Fast, Some(ch)) => {
                        fast_cells += 1;
                        to_col(ch)?
                    }
                    (Method::Both, Some(ch)) => {
                        fast_cells += 1;
                        let a = to_col(ch)?;
                        let b = to_col(red.morse_boundary(c)?)?;
                        if a != b {
                            return Err(Error::Invalid(format!(
                                "closed formula and reduction disagree on {}",
                                names::cell_label(&t, c, ordered)
                            )));
                        }
                        a
                    }
                    _ => to_col(red.morse_boundary(c)?)?,
                };
                cols.push(col);
            }
            boundary_mats.push(SparseMatrix { rows: critical[k - 1].len(), cols });
        }
    }
    Ok(MorseComplex { tree: t, n, flavor, method, cell_counts, critical, boundary: boundary_mats, fast_cells })
}

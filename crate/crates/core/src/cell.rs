//! Cells of the discrete configuration spaces UD_nΓ (sorted sets) and D_nΓ (tuples).

use std::fmt::Write as _;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::tree::OrderedTree;

/// A vertex or an edge, packed as `index << 1 | is_edge`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Item(u32);

impl Item {
    pub fn vertex(v: usize) -> Item {
        Item((v as u32) << 1)
    }

    pub fn edge(e: usize) -> Item {
        Item(((e as u32) << 1) | 1)
    }

    pub fn is_edge(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn index(self) -> usize {
        (self.0 >> 1) as usize
    }
}

pub type Cell = SmallVec<[Item; 4]>;

/// Permutation σ of an ordered cell: `o[σ[i]]` is the i-th smallest member.
pub type Perm = SmallVec<[u8; 4]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Unordered,
    Ordered,
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Flavor> {
        match s {
            "unordered" => Ok(Flavor::Unordered),
            "ordered" => Ok(Flavor::Ordered),
            _ => Err(Error::Invalid(format!("flavor {s}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Critical,
    /// Carries the smallest unblocked vertex.
    Redundant(usize),
    /// Carries the tree edge e with c = W(c[e → ι(e)]).
    Collapsible(usize),
}

/// Comparison key: the vertex number, or τ for an edge.
pub fn key(t: &OrderedTree, it: Item) -> usize {
    if it.is_edge() {
        t.tau(it.index())
    } else {
        it.index()
    }
}

pub fn dim(c: &[Item]) -> usize {
    c.iter().filter(|i| i.is_edge()).count()
}

pub fn sort_cell(t: &OrderedTree, c: &mut Cell) {
    c.sort_unstable_by_key(|&i| key(t, i));
}

pub fn sorted(t: &OrderedTree, c: &[Item]) -> Cell {
    let mut s: Cell = c.iter().copied().collect();
    sort_cell(t, &mut s);
    s
}

fn occupied(t: &OrderedTree, c: &[Item], v: usize) -> bool {
    c.iter().any(|&i| {
        if i.is_edge() {
            t.tau(i.index()) == v || t.iota(i.index()) == v
        } else {
            i.index() == v
        }
    })
}

/// A vertex v of c is blocked if v = 0 or its parent is occupied by c.
pub fn is_blocked(t: &OrderedTree, c: &[Item], v: usize) -> bool {
    match t.parent(v) {
        None => true,
        Some(p) => occupied(t, c, p),
    }
}

pub fn smallest_unblocked(t: &OrderedTree, c: &[Item]) -> Option<usize> {
    c.iter()
        .filter(|i| !i.is_edge())
        .map(|i| i.index())
        .filter(|&v| !is_blocked(t, c, v))
        .min()
}

/// Replaces the member at position `pos` and keeps tuple positions.
fn replaced(c: &[Item], pos: usize, it: Item) -> Cell {
    let mut d: Cell = c.iter().copied().collect();
    d[pos] = it;
    d
}

/// Whether c lies in the image of W (tested on the underlying set).
pub fn in_image(t: &OrderedTree, c: &[Item]) -> Option<usize> {
    for (i, &it) in c.iter().enumerate() {
        if !it.is_edge() || !t.is_tree_edge(it.index()) {
            continue;
        }
        let e = it.index();
        let v = t.iota(e);
        let pre = replaced(c, i, Item::vertex(v));
        if smallest_unblocked(t, &pre) == Some(v) && in_image(t, &pre).is_none() {
            return Some(e);
        }
    }
    None
}

pub fn classify(t: &OrderedTree, c: &[Item]) -> Class {
    if let Some(e) = in_image(t, c) {
        return Class::Collapsible(e);
    }
    match smallest_unblocked(t, c) {
        Some(v) => Class::Redundant(v),
        None => Class::Critical,
    }
}

/// W(c): replace the smallest unblocked vertex v by e_v, in place. `None` for
/// critical and collapsible cells. Unordered results are re-sorted.
pub fn matching(t: &OrderedTree, c: &[Item], flavor: Flavor) -> Option<Cell> {
    match classify(t, c) {
        Class::Redundant(v) => {
            let pos = c.iter().position(|&i| i == Item::vertex(v)).unwrap();
            let mut w = replaced(c, pos, Item::edge(t.up_edge(v).unwrap()));
            if flavor == Flavor::Unordered {
                sort_cell(t, &mut w);
            }
            Some(w)
        }
        _ => None,
    }
}

/// Cubical boundary ∂(c) = Σ_k (−1)^k (∂^ι_k c − ∂^τ_k c), edges ranked by τ.
/// Faces replace the edge in place; unordered faces are re-sorted.
pub fn boundary(t: &OrderedTree, c: &[Item], flavor: Flavor) -> Vec<(Cell, i64)> {
    let mut edges: SmallVec<[(usize, usize); 4]> = c
        .iter()
        .enumerate()
        .filter(|(_, i)| i.is_edge())
        .map(|(p, i)| (t.tau(i.index()), p))
        .collect();
    edges.sort_unstable();
    let mut out = Vec::with_capacity(2 * edges.len());
    for (k, &(_, p)) in edges.iter().enumerate() {
        let e = c[p].index();
        let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
        let mut fi = replaced(c, p, Item::vertex(t.iota(e)));
        let mut ft = replaced(c, p, Item::vertex(t.tau(e)));
        if flavor == Flavor::Unordered {
            sort_cell(t, &mut fi);
            sort_cell(t, &mut ft);
        }
        out.push((fi, sign));
        out.push((ft, -sign));
    }
    out
}

/// Φ(o) = (sorted cell, σ) with o[σ[i]] equal to the i-th smallest member.
pub fn phi(t: &OrderedTree, o: &[Item]) -> (Cell, Perm) {
    let mut idx: SmallVec<[u8; 4]> = (0..o.len() as u8).collect();
    idx.sort_unstable_by_key(|&i| key(t, o[i as usize]));
    let s: Cell = idx.iter().map(|&i| o[i as usize]).collect();
    (s, idx)
}

pub fn phi_inverse(s: &[Item], sigma: &[u8]) -> Cell {
    let mut o: Cell = s.iter().copied().collect();
    for (i, &p) in sigma.iter().enumerate() {
        o[p as usize] = s[i];
    }
    o
}

pub fn is_identity(p: &[u8]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x as usize)
}

/// Composition (a∘b)(i) = a(b(i)).
pub fn compose(a: &[u8], b: &[u8]) -> Perm {
    b.iter().map(|&i| a[i as usize]).collect()
}

/// All permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Perm> {
    let mut out = vec![];
    let mut cur: Perm = (0..n as u8).collect();
    loop {
        out.push(cur.clone());
        let mut i = n;
        while i > 1 && cur[i - 2] >= cur[i - 1] {
            i -= 1;
        }
        if i <= 1 {
            break;
        }
        let mut j = n - 1;
        while cur[j] <= cur[i - 2] {
            j -= 1;
        }
        cur.swap(i - 2, j);
        cur[i - 1..].reverse();
    }
    out
}

/// Enumerates all cells by dimension. Unordered cells come sorted by key; ordered
/// cells are all n! arrangements of each. Fails once more than `cap` cells are produced.
pub fn enumerate_cells(t: &OrderedTree, n: usize, flavor: Flavor, cap: usize) -> Result<Vec<Vec<Cell>>> {
    // candidate items sorted by (key, vertex before edge, index)
    let mut items: Vec<Item> = (0..t.len()).map(Item::vertex).collect();
    items.extend((0..t.edge_count()).map(Item::edge));
    items.sort_by_key(|&i| (key(t, i), i.is_edge(), if i.is_edge() { t.iota(i.index()) } else { 0 }));
    let mut by_dim: Vec<Vec<Cell>> = vec![Vec::new(); n + 1];
    let mut used = vec![false; t.len()];
    let mut cur: Cell = SmallVec::new();
    let mut count = 0usize;
    let perms = permutations(n);
    let mult = if flavor == Flavor::Ordered { perms.len() } else { 1 };
    #[allow(clippy::too_many_arguments)]
    fn rec(
        t: &OrderedTree,
        items: &[Item],
        start: usize,
        n: usize,
        used: &mut [bool],
        cur: &mut Cell,
        out: &mut Vec<Vec<Cell>>,
        count: &mut usize,
        mult: usize,
        cap: usize,
    ) -> Result<()> {
        if cur.len() == n {
            *count += mult;
            if *count > cap {
                return Err(Error::CapExceeded(cap));
            }
            out[dim(cur)].push(cur.clone());
            return Ok(());
        }
        for i in start..items.len() {
            if items.len() - i < n - cur.len() {
                break;
            }
            let it = items[i];
            let (a, b) = if it.is_edge() {
                (t.tau(it.index()), t.iota(it.index()))
            } else {
                (it.index(), it.index())
            };
            if used[a] || used[b] {
                continue;
            }
            used[a] = true;
            used[b] = true;
            cur.push(it);
            rec(t, items, i + 1, n, used, cur, out, count, mult, cap)?;
            cur.pop();
            used[a] = false;
            used[b] = false;
        }
        Ok(())
    }
    rec(t, &items, 0, n, &mut used, &mut cur, &mut by_dim, &mut count, mult, cap)?;
    if flavor == Flavor::Ordered {
        for list in by_dim.iter_mut() {
            let base = std::mem::take(list);
            for c in &base {
                for p in &perms {
                    list.push(phi_inverse(c, p));
                }
            }
        }
    }
    Ok(by_dim)
}

pub fn item_text(t: &OrderedTree, it: Item) -> String {
    if it.is_edge() {
        t.edge_text(it.index())
    } else {
        it.index().to_string()
    }
}

/// `{0-3,1-5}` for unordered cells, `(4,3-5)` for ordered ones.
pub fn cell_text(t: &OrderedTree, c: &[Item], flavor: Flavor) -> String {
    let (l, r) = if flavor == Flavor::Unordered { ('{', '}') } else { ('(', ')') };
    let mut s = String::new();
    s.push(l);
    for (i, &it) in c.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}", item_text(t, it));
    }
    s.push(r);
    s
}

/// Parses `{..}` or `(..)` cell text against the tree's vertex numbers.
pub fn parse_cell(t: &OrderedTree, text: &str) -> Result<(Cell, Flavor)> {
    let text = text.trim();
    let flavor = match text.chars().next() {
        Some('{') => Flavor::Unordered,
        Some('(') => Flavor::Ordered,
        _ => return Err(Error::Parse(format!("cell {text}"))),
    };
    let inner = &text[1..text.len() - 1];
    let mut c: Cell = SmallVec::new();
    for part in inner.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once('-') {
            let a: usize = a.parse().map_err(|_| Error::Parse(part.into()))?;
            let b: usize = b.parse().map_err(|_| Error::Parse(part.into()))?;
            let e = (0..t.edge_count())
                .find(|&e| t.tau(e) == a.min(b) && t.iota(e) == a.max(b))
                .ok_or_else(|| Error::Parse(format!("no edge {part}")))?;
            c.push(Item::edge(e));
        } else {
            let v: usize = part.parse().map_err(|_| Error::Parse(part.into()))?;
            if v >= t.len() {
                return Err(Error::Parse(format!("no vertex {v}")));
            }
            c.push(Item::vertex(v));
        }
    }
    if flavor == Flavor::Unordered {
        sort_cell(t, &mut c);
    }
    Ok((c, flavor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::fixtures;
    use std::collections::HashMap;

    fn cell(t: &OrderedTree, s: &str) -> Cell {
        parse_cell(t, s).unwrap().0
    }

    fn chain_text(t: &OrderedTree, ch: &[(Cell, i64)], f: Flavor) -> Vec<(String, i64)> {
        let mut m: HashMap<String, i64> = HashMap::new();
        for (c, k) in ch {
            *m.entry(cell_text(t, c, f)).or_default() += k;
        }
        let mut v: Vec<(String, i64)> = m.into_iter().filter(|(_, k)| *k != 0).collect();
        v.sort();
        v
    }

    #[test]
    fn k33_boundary_examples() {
        let t = fixtures::k33();
        let b = boundary(&t, &cell(&t, "{0-3,1-5}"), Flavor::Unordered);
        let mut want = vec![
            ("{1-5,3}".to_string(), -1),
            ("{0,1-5}".to_string(), 1),
            ("{0-3,5}".to_string(), 1),
            ("{0-3,1}".to_string(), -1),
        ];
        want.sort();
        assert_eq!(chain_text(&t, &b, Flavor::Unordered), want);
        let b = boundary(&t, &cell(&t, "{0-1,4}"), Flavor::Unordered);
        let mut want = vec![("{0,4}".to_string(), 1), ("{1,4}".to_string(), -1)];
        want.sort();
        assert_eq!(chain_text(&t, &b, Flavor::Unordered), want);
    }

    #[test]
    fn k33_counts_and_classes() {
        let t = fixtures::k33();
        let u = enumerate_cells(&t, 2, Flavor::Unordered, 1_000_000).unwrap();
        assert_eq!(u.iter().map(|l| l.len()).collect::<Vec<_>>(), vec![15, 36, 18]);
        let o = enumerate_cells(&t, 2, Flavor::Ordered, 1_000_000).unwrap();
        assert_eq!(o.iter().map(|l| l.len()).collect::<Vec<_>>(), vec![30, 72, 36]);
        assert!(enumerate_cells(&t, 2, Flavor::Ordered, 100).is_err());
        assert_eq!(classify(&t, &cell(&t, "{1,4}")), Class::Redundant(1));
        assert!(matches!(classify(&t, &cell(&t, "{0-1,4}")), Class::Collapsible(_)));
        assert_eq!(classify(&t, &cell(&t, "{0,1}")), Class::Critical);
        assert_eq!(classify(&t, &cell(&t, "{2-4,3}")), Class::Critical);
        assert_eq!(matching(&t, &cell(&t, "{1,4}"), Flavor::Unordered).unwrap(), cell(&t, "{0-1,4}"));
        let crit: Vec<Vec<String>> = u
            .iter()
            .map(|l| {
                l.iter()
                    .filter(|c| classify(&t, c) == Class::Critical)
                    .map(|c| cell_text(&t, c, Flavor::Unordered))
                    .collect()
            })
            .collect();
        assert_eq!(crit[0], vec!["{0,1}"]);
        let mut c1 = crit[1].clone();
        c1.sort();
        let mut want1: Vec<String> =
            ["{0-3,1}", "{0-4,1}", "{0-4,5}", "{1-5,0}", "{1-5,2}", "{2-4,3}", "{3-5,0}"]
                .iter()
                .map(|s| cell_text(&t, &cell(&t, s), Flavor::Unordered))
                .collect();
        want1.sort();
        assert_eq!(c1, want1);
        assert_eq!(crit[2].len(), 3);
    }

    /// Classification from order-respecting edges and unblocked vertices.
    fn fs_class(t: &OrderedTree, c: &[Item]) -> &'static str {
        let respecting: Vec<usize> = c
            .iter()
            .filter(|i| i.is_edge() && t.is_tree_edge(i.index()))
            .map(|i| i.index())
            .filter(|&e| {
                !c.iter().any(|u| {
                    !u.is_edge()
                        && t.parent(u.index()) == Some(t.tau(e))
                        && t.tau(e) < u.index()
                        && u.index() < t.iota(e)
                })
            })
            .collect();
        let unblocked: Vec<usize> = c
            .iter()
            .filter(|i| !i.is_edge() && !is_blocked(t, c, i.index()))
            .map(|i| i.index())
            .collect();
        if respecting.is_empty() && unblocked.is_empty() {
            "critical"
        } else if unblocked.iter().any(|&v| respecting.iter().all(|&e| v < t.iota(e))) {
            "redundant"
        } else {
            "collapsible"
        }
    }

    #[test]
    fn inductive_matching_agrees_with_local_description() {
        for (t, n) in [(fixtures::k33(), 2), (fixtures::theta4(), 3), (fixtures::k4(), 3), (fixtures::fig_b3n3(), 3)] {
            let cells = enumerate_cells(&t, n, Flavor::Unordered, 10_000_000).unwrap();
            for c in cells.iter().flatten() {
                let lit = match classify(&t, c) {
                    Class::Critical => "critical",
                    Class::Redundant(_) => "redundant",
                    Class::Collapsible(_) => "collapsible",
                };
                assert_eq!(lit, fs_class(&t, c), "{}", cell_text(&t, c, Flavor::Unordered));
            }
        }
    }

    #[test]
    fn matching_is_injective_and_lands_on_collapsible() {
        let t = fixtures::theta4();
        let cells = enumerate_cells(&t, 3, Flavor::Unordered, 10_000_000).unwrap();
        let mut seen = std::collections::HashSet::new();
        for c in cells.iter().flatten() {
            if let Some(w) = matching(&t, c, Flavor::Unordered) {
                assert!(matches!(classify(&t, &w), Class::Collapsible(_)));
                assert!(seen.insert(w));
            } else {
                assert!(!matches!(classify(&t, c), Class::Redundant(_)));
            }
        }
    }

    #[test]
    fn phi_examples_and_round_trip() {
        // a path 0-1-2-3-4-5 with chord 3-5 gives the edges 1-3 and 3-5 used below
        let t = OrderedTree::numbered(
            6,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)],
            &[(1, 3), (3, 5)],
            crate::tree::Mode::Generic,
        );
        let (s, p) = phi(&t, &cell(&t, "(1-3,2)"));
        assert_eq!(cell_text(&t, &s, Flavor::Unordered), "{1-3,2}");
        assert!(is_identity(&p));
        let (s, p) = phi(&t, &cell(&t, "(4,3-5)"));
        assert_eq!(cell_text(&t, &s, Flavor::Unordered), "{3-5,4}");
        assert_eq!(p.as_slice(), &[1, 0]);
        let k = fixtures::k33();
        let o = enumerate_cells(&k, 2, Flavor::Ordered, 1_000_000).unwrap();
        for c in o.iter().flatten() {
            let (s, p) = phi(&k, c);
            assert_eq!(&phi_inverse(&s, &p), c);
            assert_eq!(classify(&k, c), classify(&k, &s));
        }
    }

    fn check_dd_zero(t: &OrderedTree, n: usize, f: Flavor) {
        let cells = enumerate_cells(t, n, f, 10_000_000).unwrap();
        for c in cells.iter().skip(2).flatten() {
            let mut acc: HashMap<Cell, i64> = HashMap::new();
            for (face, k) in boundary(t, c, f) {
                for (ff, k2) in boundary(t, &face, f) {
                    *acc.entry(ff).or_default() += k * k2;
                }
            }
            assert!(acc.values().all(|&x| x == 0), "{}", cell_text(t, c, f));
        }
    }

    #[test]
    fn boundary_squares_to_zero() {
        check_dd_zero(&fixtures::k33(), 2, Flavor::Unordered);
        check_dd_zero(&fixtures::k33(), 2, Flavor::Ordered);
        check_dd_zero(&fixtures::theta4(), 3, Flavor::Unordered);
        check_dd_zero(&fixtures::theta4(), 3, Flavor::Ordered);
    }

    #[test]
    fn one_point_cells_are_graph_cells() {
        let t = fixtures::k5();
        let c = enumerate_cells(&t, 1, Flavor::Unordered, 1000).unwrap();
        assert_eq!((c[0].len(), c[1].len()), (25, 30));
    }
}

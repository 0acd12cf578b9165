//! Names of critical cells: `A_k(ā)`, `d_i(ā)`, unions of those, and permutation subscripts.

use std::fmt;

use smallvec::SmallVec;

use crate::cell::{self, Cell, Item, Perm};
use crate::error::{Error, Result};
use crate::tree::OrderedTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    /// The edge carried by this part.
    pub edge: usize,
    /// Blocked-vertex counts on the branches of τ(edge).
    pub a: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    /// Parts by decreasing τ.
    pub parts: Vec<Part>,
    /// Size of the stack 0_s at the base vertex.
    pub s: usize,
    pub sigma: Option<Perm>,
}

pub fn abs(a: &[usize]) -> usize {
    a.iter().sum()
}

/// p(ā): 1-based index of the first nonzero entry.
pub fn p(a: &[usize]) -> Option<usize> {
    a.iter().position(|&x| x > 0).map(|i| i + 1)
}

pub fn delta(mu: usize, k: usize) -> Vec<usize> {
    let mut v = vec![0; mu];
    v[k - 1] = 1;
    v
}

pub fn plus(a: &[usize], k: usize) -> Vec<usize> {
    let mut v = a.to_vec();
    v[k - 1] += 1;
    v
}

/// ā − 1: subtract one from the first positive entry.
pub fn minus_one(a: &[usize]) -> Vec<usize> {
    let mut v = a.to_vec();
    if let Some(i) = v.iter().position(|&x| x > 0) {
        v[i] -= 1;
    }
    v
}

/// Splits a critical cell into parts. `None` when some vertex is not attached to an
/// edge or to the base stack in the standard way.
pub fn name_of(t: &OrderedTree, c: &[Item]) -> Option<Name> {
    let (s, sigma) = cell::phi(t, c);
    let mut parts: Vec<Part> = s
        .iter()
        .filter(|i| i.is_edge())
        .map(|i| Part { edge: i.index(), a: vec![0; t.mu(t.tau(i.index()))] })
        .collect();
    let verts: SmallVec<[usize; 4]> = s.iter().filter(|i| !i.is_edge()).map(|i| i.index()).collect();
    let mut stack = 0;
    for &v in &verts {
        let mut top = v;
        while let Some(p) = t.parent(top) {
            if verts.contains(&p) {
                top = p;
            } else {
                break;
            }
        }
        let Some(p) = t.parent(top) else {
            stack += 1;
            continue;
        };
        let part = parts.iter_mut().find(|q| t.tau(q.edge) == p || t.iota(q.edge) == p)?;
        let e = part.edge;
        let branch = if t.tau(e) == p {
            t.g(p, top)
        } else if t.is_tree_edge(e) {
            t.g(t.tau(e), p)
        } else {
            return None;
        };
        part.a[branch - 1] += 1;
    }
    parts.sort_by(|x, y| t.tau(y.edge).cmp(&t.tau(x.edge)));
    let name = Name {
        parts,
        s: stack,
        sigma: Some(sigma),
    };
    // the base stack must be the chain 0, 1, .., s-1
    let back = cell_of(t, &name, c.len()).ok()?;
    if cell::sorted(t, &back) != s {
        return None;
    }
    Some(name)
}

/// Unordered name (no subscript) of a sorted cell.
pub fn name_unordered(t: &OrderedTree, c: &[Item]) -> Option<Name> {
    name_of(t, c).map(|mut n| {
        n.sigma = None;
        n
    })
}

fn chain_below(t: &OrderedTree, start: usize, count: usize, out: &mut Cell) -> Result<()> {
    let mut v = start;
    for i in 0..count {
        out.push(Item::vertex(v));
        if i + 1 < count {
            let ch = t.children(v);
            if ch.len() != 1 {
                return Err(Error::Invalid(format!("vertex {v} does not continue a stack")));
            }
            v = ch[0];
        }
    }
    Ok(())
}

/// Reconstructs the cell; ordered when the name carries a permutation.
pub fn cell_of(t: &OrderedTree, name: &Name, n: usize) -> Result<Cell> {
    let mut c: Cell = SmallVec::new();
    for part in &name.parts {
        let e = part.edge;
        let a = t.tau(e);
        c.push(Item::edge(e));
        if part.a.len() != t.mu(a) {
            return Err(Error::Invalid(format!("vector length for {}", t.edge_text(e))));
        }
        for (i, &cnt) in part.a.iter().enumerate() {
            if cnt == 0 {
                continue;
            }
            let child = t.children(a)[i];
            if child == t.iota(e) {
                let ch = t.children(child);
                if ch.len() != 1 {
                    return Err(Error::Invalid(format!("no stack below {}", t.edge_text(e))));
                }
                chain_below(t, ch[0], cnt, &mut c)?;
            } else {
                chain_below(t, child, cnt, &mut c)?;
            }
        }
    }
    if name.s > 0 {
        chain_below(t, 0, name.s, &mut c)?;
    }
    if c.len() != n {
        return Err(Error::Invalid(format!("name has {} members, expected {n}", c.len())));
    }
    let mut seen = std::collections::HashSet::new();
    for &it in &c {
        let ends = if it.is_edge() {
            vec![t.tau(it.index()), t.iota(it.index())]
        } else {
            vec![it.index()]
        };
        for v in ends {
            if !seen.insert(v) {
                return Err(Error::Invalid(format!("overlapping members at vertex {v}")));
            }
        }
    }
    let s = cell::sorted(t, &c);
    Ok(match &name.sigma {
        Some(p) => cell::phi_inverse(&s, p),
        None => s,
    })
}

impl Name {
    /// A name for a one-edge cell with the given vector, padded by the base stack.
    pub fn single(t: &OrderedTree, edge: usize, a: Vec<usize>, n: usize) -> Name {
        let s = n - 1 - abs(&a);
        let _ = t;
        Name { parts: vec![Part { edge, a }], s, sigma: None }
    }

    pub fn with_sigma(mut self, p: Perm) -> Name {
        self.sigma = Some(p);
        self
    }

    pub fn display<'a>(&'a self, t: &'a OrderedTree) -> NameDisplay<'a> {
        NameDisplay { t, name: self }
    }
}

pub struct NameDisplay<'a> {
    t: &'a OrderedTree,
    name: &'a Name,
}

pub fn perm_text(p: &[u8]) -> String {
    if cell::is_identity(p) {
        "id".into()
    } else {
        let parts: Vec<String> = p.iter().map(|x| (x + 1).to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

fn vec_text(a: &[usize]) -> String {
    let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn part_text(t: &OrderedTree, part: &Part) -> String {
    let e = part.edge;
    let head = if t.is_tree_edge(e) {
        let a = t.tau(e);
        match t.letter(a) {
            Some(l) => format!("{l}_{}", t.g(a, t.iota(e))),
            None => format!("[{}]", t.edge_text(e)),
        }
    } else {
        format!("d_{}", t.label(e))
    };
    if part.a.iter().all(|&x| x == 0) {
        head
    } else {
        format!("{head}{}", vec_text(&part.a))
    }
}

impl fmt::Display for NameDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.name;
        let body = if n.parts.is_empty() {
            format!("0_{}", n.s)
        } else {
            n.parts.iter().map(|p| part_text(self.t, p)).collect::<Vec<_>>().join(" ∪ ")
        };
        match &n.sigma {
            Some(p) if n.parts.len() > 1 => write!(f, "({body})_{}", perm_text(p)),
            Some(p) => write!(f, "{body}_{}", perm_text(p)),
            None => write!(f, "{body}"),
        }
    }
}

/// Display text of any cell: its name when it has one, else the raw cell text.
pub fn cell_label(t: &OrderedTree, c: &[Item], ordered: bool) -> String {
    let name = if ordered { name_of(t, c) } else { name_unordered(t, c) };
    match name {
        Some(n) => n.display(t).to_string(),
        None => cell::cell_text(t, c, if ordered { cell::Flavor::Ordered } else { cell::Flavor::Unordered }),
    }
}

fn parse_part(t: &OrderedTree, s: &str) -> Result<Part> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cell name part {s}"));
    let (head, vec) = match s.find('(') {
        Some(i) => (&s[..i], Some(&s[i..])),
        None => (s, None),
    };
    let (lead, idx) = head.split_once('_').ok_or_else(bad)?;
    let idx: usize = idx.parse().map_err(|_| bad())?;
    let edge = if lead == "d" {
        t.deleted_by_label(idx).ok_or_else(bad)?
    } else {
        let a = t.vertex_by_letter(lead).ok_or_else(bad)?;
        let child = *t.children(a).get(idx.wrapping_sub(1)).ok_or_else(bad)?;
        t.up_edge(child).ok_or_else(bad)?
    };
    let mu = t.mu(t.tau(edge));
    let a = match vec {
        None => vec![0; mu],
        Some(v) => {
            let inner = v.strip_prefix('(').and_then(|v| v.strip_suffix(')')).ok_or_else(bad)?;
            let a: Vec<usize> = inner
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if a.len() != mu {
                return Err(bad());
            }
            a
        }
    };
    Ok(Part { edge, a })
}

/// Parses `B_3(1,0,1) ∪ d_2`, `d_1_id`, `(d_1 ∪ d_2)_[2,1]` or `0_3`.
pub fn parse_name(t: &OrderedTree, text: &str, n: usize) -> Result<Name> {
    let text = text.trim();
    let mut body = text;
    let mut sigma = None;
    if let Some(i) = text.rfind(")_").filter(|_| text.starts_with('(')) {
        body = &text[1..i];
        sigma = Some(parse_perm(&text[i + 2..], n)?);
    } else if let Some(rest) = text.strip_suffix("_id") {
        body = rest;
        sigma = Some((0..n as u8).collect());
    } else if let Some(i) = text.rfind("_[") {
        body = &text[..i];
        sigma = Some(parse_perm(&text[i + 1..], n)?);
    }
    if let Some(s) = body.strip_prefix("0_") {
        let s: usize = s.parse().map_err(|_| Error::Parse(text.into()))?;
        return Ok(Name { parts: vec![], s, sigma });
    }
    let mut parts: Vec<Part> = body.split('∪').map(|p| parse_part(t, p)).collect::<Result<_>>()?;
    parts.sort_by(|x, y| t.tau(y.edge).cmp(&t.tau(x.edge)));
    let used: usize = parts.iter().map(|p| 1 + abs(&p.a)).sum();
    if used > n {
        return Err(Error::Parse(format!("{text} has more than {n} members")));
    }
    Ok(Name { parts, s: n - used, sigma })
}

fn parse_perm(s: &str, n: usize) -> Result<Perm> {
    if s == "id" {
        return Ok((0..n as u8).collect());
    }
    let inner = s.strip_prefix('[').and_then(|v| v.strip_suffix(']')).ok_or_else(|| Error::Parse(s.into()))?;
    let p: Perm = inner
        .split(',')
        .map(|x| x.trim().parse::<u8>().ok().filter(|&v| v >= 1).map(|v| v - 1))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Parse(s.into()))?;
    let mut seen = p.clone();
    seen.sort_unstable();
    if seen.iter().enumerate().any(|(i, &x)| i != x as usize) || p.len() != n {
        return Err(Error::Parse(s.into()));
    }
    Ok(p)
}

/// Edge rank: deleted edges above tree edges, then by (τ, ι).
pub fn edge_rank(t: &OrderedTree, e: usize) -> [i64; 3] {
    [!t.is_tree_edge(e) as i64, t.tau(e) as i64, t.iota(e) as i64]
}

fn perm_key(p: Option<&Perm>, out: &mut Vec<i64>) {
    if let Some(p) = p {
        out.push(cell::is_identity(p) as i64);
        out.extend(p.iter().map(|&x| -(x as i64)));
    }
}

/// Sort key realizing the basis orders: (s, e, ā) for 1-cells and
/// (s, e, ā+δ_h, h, e′, ā′) for 2-cells, with σ appended for ordered cells.
/// Unnamed cells sort below named ones by their raw members.
pub fn basis_key(t: &OrderedTree, c: &[Item], ordered: bool) -> Vec<i64> {
    let name = if ordered { name_of(t, c) } else { name_unordered(t, c) };
    let mut key = vec![];
    match name {
        Some(nm) if nm.parts.len() <= 2 => {
            key.push(1);
            match nm.parts.as_slice() {
                [] => {}
                [p] => {
                    key.push(abs(&p.a) as i64);
                    key.extend(edge_rank(t, p.edge));
                    key.extend(p.a.iter().map(|&x| x as i64));
                }
                [p, q] => {
                    let h = t.g(t.tau(p.edge), t.iota(q.edge));
                    let a = if h >= 1 { plus(&p.a, h) } else { p.a.clone() };
                    key.push(abs(&p.a) as i64);
                    key.extend(edge_rank(t, p.edge));
                    key.extend(a.iter().map(|&x| x as i64));
                    key.push(h as i64);
                    key.extend(edge_rank(t, q.edge));
                    key.extend(q.a.iter().map(|&x| x as i64));
                }
                _ => unreachable!(),
            }
            perm_key(nm.sigma.as_ref(), &mut key);
        }
        _ => {
            key.push(0);
            let (s, sigma) = cell::phi(t, c);
            key.extend(s.iter().map(|&i| (cell::key(t, i) as i64) * 2 + i.is_edge() as i64));
            if ordered {
                perm_key(Some(&sigma), &mut key);
            }
        }
    }
    key
}

/// ∧(d,d′) = C_k(δ_ℓ) at C = ι(d)∧ι(d′), as a 1-cell padded to n members.
pub fn wedge(t: &OrderedTree, d: usize, d2: usize, n: usize) -> Result<Cell> {
    let c = t.meet(t.iota(d), t.iota(d2));
    let g1 = t.g(c, t.iota(d));
    let g2 = t.g(c, t.iota(d2));
    if g1 == 0 || g2 == 0 || g1 == g2 {
        return Err(Error::Invalid("wedge of edges whose initial vertices share a branch".into()));
    }
    let (l, k) = (g1.min(g2), g1.max(g2));
    let edge = t.up_edge(t.children(c)[k - 1]).unwrap();
    cell_of(t, &Name::single(t, edge, delta(t.mu(c), l), n), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{classify, enumerate_cells, Class, Flavor};
    use crate::tree::fixtures;

    #[test]
    fn names_round_trip_on_critical_cells() {
        for (t, n) in [(fixtures::k5(), 4), (fixtures::theta4(), 3), (fixtures::k4(), 3), (fixtures::fig_b3n3(), 3)] {
            let cells = enumerate_cells(&t, n, Flavor::Unordered, 10_000_000).unwrap();
            for c in cells.iter().flatten().filter(|c| classify(&t, c) == Class::Critical) {
                let nm = name_unordered(&t, c).unwrap_or_else(|| panic!("{}", cell::cell_text(&t, c, Flavor::Unordered)));
                assert_eq!(&cell_of(&t, &nm, n).unwrap(), c);
                let text = nm.display(&t).to_string();
                assert_eq!(parse_name(&t, &text, n).unwrap(), nm, "{text}");
            }
        }
    }

    #[test]
    fn ordered_names_round_trip() {
        let t = fixtures::theta4();
        let cells = enumerate_cells(&t, 2, Flavor::Ordered, 1_000_000).unwrap();
        for c in cells.iter().flatten().filter(|c| classify(&t, c) == Class::Critical) {
            let nm = name_of(&t, c).unwrap();
            assert_eq!(&cell_of(&t, &nm, 2).unwrap(), c);
            let text = nm.display(&t).to_string();
            assert_eq!(parse_name(&t, &text, 2).unwrap(), nm, "{text}");
        }
    }

    #[test]
    fn k5_examples() {
        let t = fixtures::k5();
        let nm = parse_name(&t, "B_3(1,0,1) ∪ d_2", 4).unwrap();
        let c = cell_of(&t, &nm, 4).unwrap();
        assert_eq!(classify(&t, &c), Class::Critical);
        assert_eq!(name_unordered(&t, &c).unwrap().display(&t).to_string(), "B_3(1,0,1) ∪ d_2");
        let nm = parse_name(&t, "d_6(0,1) ∪ d_4", 4).unwrap();
        assert_eq!(nm.s, 1);
        let c = cell_of(&t, &nm, 4).unwrap();
        assert_eq!(classify(&t, &c), Class::Critical);
        // ∧(d₆,d₄) = B_3(1,0,0)
        let d6 = t.deleted_by_label(6).unwrap();
        let d4 = t.deleted_by_label(4).unwrap();
        let w = wedge(&t, d6, d4, 4).unwrap();
        assert_eq!(cell_label(&t, &w, false), "B_3(1,0,0)");
        assert!(parse_name(&t, "B_4(1,0,1)", 4).is_err());
        assert!(parse_name(&t, "B_3(1,0)", 4).is_err());
    }

    #[test]
    fn vector_helpers() {
        assert_eq!(minus_one(&[0, 2, 1]), vec![0, 1, 1]);
        assert_eq!(p(&[0, 0, 3]), Some(3));
        assert_eq!(p(&[0, 0]), None);
        assert_eq!(plus(&[1, 0], 2), vec![1, 1]);
    }

    #[test]
    fn basis_order_puts_deleted_edges_above_tree_edges() {
        let t = fixtures::k5();
        let a = cell_of(&t, &parse_name(&t, "C_3(1,0,0)", 4).unwrap(), 4).unwrap();
        let d = cell_of(&t, &parse_name(&t, "d_6(1,0)", 4).unwrap(), 4).unwrap();
        let big = cell_of(&t, &parse_name(&t, "A_2(2,0)", 4).unwrap(), 4).unwrap();
        assert!(basis_key(&t, &d, false) > basis_key(&t, &a, false));
        assert!(basis_key(&t, &big, false) > basis_key(&t, &d, false));
    }
}

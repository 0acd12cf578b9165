//! Closed formulas for the Morse boundary of critical 2-cells.
//!
//! Unordered: `A_k(ā) ∪ B_ℓ(b̄)` maps to 0, `A_k(ā) ∪ d(b̄)` and `d(ā) ∪ d′(b̄)` follow the
//! two boundary formulas built from 𝐀(ā,ℓ) and ∧(d,d′). Ordered, n = 2: cells `(d ∪ d′)_σ`.

use smallvec::smallvec;

use crate::cell::{self, classify, Cell, Class, Flavor, Perm};
use crate::error::{Error, Result};
use crate::morse::{collect_chain, Chain};
use crate::names::{self, abs, cell_of, name_of, name_unordered, plus, Name, Part};
use crate::tree::OrderedTree;

/// The formulas assume a tree satisfying T1–T3.
pub fn applicable(t: &OrderedTree) -> bool {
    let r = t.verify_conditions();
    r.base.ok && r.t1.ok && r.t2.ok && r.t3.ok
}

fn one_cell(t: &OrderedTree, edge: usize, a: Vec<usize>, n: usize) -> Result<Cell> {
    cell_of(t, &Name::single(t, edge, a, n), n)
}

/// Edge A_p from vertex `a` into its p-th branch.
fn branch_edge(t: &OrderedTree, a: usize, p: usize) -> usize {
    t.up_edge(t.children(a)[p - 1]).expect("child has an up edge")
}

/// 𝐀(ā,ℓ) at vertex `a` as an explicit sum of critical 1-cells.
pub fn bold(t: &OrderedTree, a: usize, av: &[usize], l: usize, n: usize) -> Result<Chain> {
    let mut out = vec![];
    let mut cur = av.to_vec();
    for _ in 0..abs(av) {
        let p = names::p(&cur).expect("nonzero vector");
        let mut v = cur.clone();
        v[p - 1] -= 1;
        v[l - 1] += 1;
        // without blocked vertices on a lower branch the term is collapsible
        if v[..p - 1].iter().all(|&x| x == 0) {
            cur = names::minus_one(&cur);
            continue;
        }
        let c = one_cell(t, branch_edge(t, a, p), v, n)?;
        match classify(t, &c) {
            Class::Critical => out.push((c, 1)),
            Class::Collapsible(_) => {}
            Class::Redundant(_) => {
                return Err(Error::Invalid(format!("redundant term {} in 𝐀", cell::cell_text(t, &c, Flavor::Unordered))))
            }
        }
        cur = names::minus_one(&cur);
    }
    Ok(out)
}

fn neg(ch: Chain) -> Chain {
    ch.into_iter().map(|(c, k)| (c, -k)).collect()
}

/// d(ā) − d(ā+δ_ℓ) − 𝐀(ā,ℓ) + 𝐀(ā+δ_k,ℓ) for the upper deleted edge d at A.
fn upper_terms(t: &OrderedTree, upper: &Part, k: usize, l: usize, n: usize) -> Result<Chain> {
    let a = t.tau(upper.edge);
    let mut ch = vec![
        (one_cell(t, upper.edge, upper.a.clone(), n)?, 1),
        (one_cell(t, upper.edge, plus(&upper.a, l), n)?, -1),
    ];
    ch.extend(neg(bold(t, a, &upper.a, l, n)?));
    ch.extend(bold(t, a, &plus(&upper.a, k), l, n)?);
    Ok(ch)
}

/// Closed-form ∂̃ of a critical 2-cell, or `None` when the cell has no formula.
pub fn fast_morse_boundary(t: &OrderedTree, n: usize, flavor: Flavor, c: &Cell) -> Result<Option<Chain>> {
    if cell::dim(c) != 2 {
        return Ok(None);
    }
    match flavor {
        Flavor::Unordered => unordered(t, n, c),
        Flavor::Ordered if n == 2 => ordered2(t, c),
        Flavor::Ordered => Err(Error::Unsupported("closed formulas for ordered cells need n = 2".into())),
    }
}

fn unordered(t: &OrderedTree, n: usize, c: &Cell) -> Result<Option<Chain>> {
    let Some(name) = name_unordered(t, c) else { return Ok(None) };
    let [p, q] = name.parts.as_slice() else { return Ok(None) };
    let (pt, qt) = (t.is_tree_edge(p.edge), t.is_tree_edge(q.edge));
    let ch = match (pt, qt) {
        (true, true) => vec![],
        (true, false) | (false, true) => {
            let (tp, d) = if pt { (p, q.edge) } else { (q, p.edge) };
            let a = t.tau(tp.edge);
            if !t.separates(d, a) {
                vec![]
            } else {
                let k = t.g(a, t.iota(tp.edge));
                let l = t.g(a, t.iota(d));
                let mut ch = vec![
                    (one_cell(t, tp.edge, tp.a.clone(), n)?, 1),
                    (one_cell(t, tp.edge, plus(&tp.a, l), n)?, -1),
                ];
                ch.extend(neg(bold(t, a, &tp.a, l, n)?));
                ch.extend(bold(t, a, &plus(&tp.a, k), l, n)?);
                ch
            }
        }
        (false, false) => {
            let (d, d2) = (p.edge, q.edge);
            let a = t.tau(d);
            if !t.separates(d2, a) {
                vec![]
            } else {
                let k = t.g(a, t.iota(d));
                let l = t.g(a, t.iota(d2));
                let mut ch = upper_terms(t, p, k, l, n)?;
                if k == l {
                    let eps = if t.iota(d) < t.iota(d2) { -1 } else { 1 };
                    ch.push((names::wedge(t, d, d2, n)?, eps));
                }
                ch
            }
        }
    };
    Ok(Some(collect_chain(ch)))
}

fn ordered2(t: &OrderedTree, c: &Cell) -> Result<Option<Chain>> {
    let Some(name) = name_of(t, c) else { return Ok(None) };
    let [p, q] = name.parts.as_slice() else { return Ok(None) };
    if t.is_tree_edge(p.edge) || t.is_tree_edge(q.edge) {
        return Ok(None);
    }
    let sigma = name.sigma.clone().expect("ordered name");
    let (d, d2) = (p.edge, q.edge);
    let a = t.tau(d);
    if !t.separates(d2, a) {
        return Ok(Some(vec![]));
    }
    let k = t.g(a, t.iota(d));
    let l = t.g(a, t.iota(d2));
    let id: Perm = smallvec![0, 1];
    let rho: Perm = smallvec![1, 0];
    let with = |cell: Cell, p: &Perm| cell::phi_inverse(&cell, p);
    let mu = t.mu(a);
    let mut ch: Chain = vec![
        (with(one_cell(t, d, vec![0; mu], 2)?, &id), 1),
        (with(one_cell(t, d, names::delta(mu, l), 2)?, &rho), -1),
    ];
    if t.iota(d) < t.iota(d2) {
        if k == l {
            ch.push((with(names::wedge(t, d, d2, 2)?, &id), -1));
        }
    } else {
        ch.push((with(names::wedge(t, d, d2, 2)?, &rho), 1));
    }
    // ∂̃(c_σ): move tuple positions i → σ(i)
    let moved = ch
        .into_iter()
        .map(|(x, k)| {
            let mut y = x.clone();
            for i in 0..2 {
                y[sigma[i] as usize] = x[i];
            }
            (y, k)
        })
        .collect();
    Ok(Some(collect_chain(moved)))
}

//! Homology of Morse complexes and the pivotal / separating / free split of critical 1-cells.

use num_bigint::BigInt;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::cell::Flavor;
use crate::error::{Error, Result};
use crate::fast;
use crate::morse::{MorseComplex, SparseMatrix};
use crate::names::{self, name_of, name_unordered, Name};
use crate::snf::{self, AbelianGroup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub degree: usize,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn group(&self) -> AbelianGroup {
        AbelianGroup { rank: self.rank, torsion: self.torsion.clone() }
    }
}

fn dense(m: &SparseMatrix) -> snf::IntMatrix {
    snf::from_i64(&m.to_dense())
}

fn factors(m: Option<&SparseMatrix>) -> Vec<BigInt> {
    match m {
        Some(m) if m.rows > 0 && m.ncols() > 0 => snf::invariant_factors(&dense(m)),
        _ => vec![],
    }
}

/// H_k = ker ∂_k / im ∂_{k+1} in every degree of the complex.
pub fn homology(mc: &MorseComplex) -> Vec<HomologyGroup> {
    let top = mc.critical.len();
    let f: Vec<Vec<BigInt>> = (0..=top).map(|k| if k == 0 { vec![] } else { factors(mc.boundary.get(k)) }).collect();
    (0..top)
        .map(|k| {
            let dim = mc.critical[k].len();
            let lower = f[k].len();
            let upper = &f[k + 1];
            let g = AbelianGroup::cokernel(dim - lower, upper);
            HomologyGroup { degree: k, rank: g.rank, torsion: g.torsion }
        })
        .collect()
}

pub fn h1(mc: &MorseComplex) -> AbelianGroup {
    homology(mc).get(1).map_or(AbelianGroup::free(0), |h| h.group())
}

/// Critical 1-cell joining the two critical 0-cells, chosen as the first with nonzero ∂̃.
fn joining_cell(mc: &MorseComplex) -> Option<usize> {
    mc.boundary.get(1)?.cols.iter().position(|c| !c.is_empty())
}

/// Every available route to H₁. Ordered n = 2 adds the relative group minus one free
/// summand and the cokernel with one joining 1-cell deleted.
pub fn h1_routes(mc: &MorseComplex) -> Vec<(&'static str, AbelianGroup)> {
    let mut out = vec![("direct", h1(mc))];
    if mc.flavor == Flavor::Ordered && mc.n == 2 && mc.critical.len() > 1 {
        let n1 = mc.critical[1].len();
        let d2 = mc.boundary.get(2).cloned().unwrap_or(SparseMatrix { rows: n1, cols: vec![] });
        let rel = AbelianGroup::cokernel(n1, &factors(Some(&d2)));
        out.push(("relative", AbelianGroup { rank: rel.rank.saturating_sub(1), torsion: rel.torsion }));
        if let Some(j) = joining_cell(mc) {
            let cols = d2
                .cols
                .iter()
                .map(|c| c.iter().filter(|p| p.0 != j).map(|&(i, x)| (if i > j { i - 1 } else { i }, x)).collect())
                .collect();
            let cut = SparseMatrix { rows: n1 - 1, cols };
            out.push(("column-deletion", AbelianGroup::cokernel(n1 - 1, &factors(Some(&cut)))));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OneCellTag {
    Pivotal,
    Separating,
    Free,
}

fn check_supported(mc: &MorseComplex) -> Result<()> {
    if mc.flavor == Flavor::Ordered && mc.n != 2 {
        return Err(Error::Unsupported("1-cell classification for ordered cells needs n = 2".into()));
    }
    if !fast::applicable(&mc.tree) {
        return Err(Error::Unsupported("1-cell classification needs a tree satisfying T1-T3".into()));
    }
    Ok(())
}

fn name(mc: &MorseComplex, c: &[crate::cell::Item]) -> Option<Name> {
    if mc.ordered() {
        name_of(&mc.tree, c)
    } else {
        name_unordered(&mc.tree, c)
    }
}

/// A_k(ā) (with s ≥ 2) or d(ā) is pivotal when some deleted edge separated by its
/// terminal vertex A enters a branch m of A with a_m ≥ 1.
pub fn is_pivotal_name(mc: &MorseComplex, nm: &Name) -> bool {
    let t = &mc.tree;
    let [p] = nm.parts.as_slice() else { return false };
    if t.is_tree_edge(p.edge) && names::abs(&p.a) < 2 {
        return false;
    }
    let a = t.tau(p.edge);
    t.deleted().iter().any(|&d| {
        if !t.separates(d, a) {
            return false;
        }
        let m = t.g(a, t.iota(d));
        m >= 1 && p.a[m - 1] >= 1
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct UndeterminedBlock {
    /// Row labels `X − Y` for the pairs of critical 2-cells.
    pub rows: Vec<String>,
    /// Critical 1-cell indices (into `critical[1]`) of the columns.
    pub cols: Vec<usize>,
    pub col_labels: Vec<String>,
    pub matrix: Vec<Vec<i64>>,
}

impl UndeterminedBlock {
    pub fn factors(&self) -> Vec<BigInt> {
        if self.matrix.is_empty() || self.cols.is_empty() {
            return vec![];
        }
        snf::invariant_factors(&snf::from_i64(&self.matrix))
    }
}

/// Pairs (d∪d′, d∪d″) with d′, d″ separated by τ(d) and entering the branch of ι(d),
/// d″ the smallest such edge. Each yields ∂̃ differences ±∧(d,d′) ± ∧(d,d″).
fn relation_rows(mc: &MorseComplex) -> Result<Vec<(String, Vec<(usize, i64)>)>> {
    let t = &mc.tree;
    // critical 2-cells d(0̄) ∪ d′(b̄), keyed by (d, d′, σ); ∂̃ does not depend on b̄
    let mut cells: FxHashMap<(usize, usize, Vec<u8>), usize> = FxHashMap::default();
    for (j, c) in mc.critical.get(2).map_or(&[][..], |v| &v[..]).iter().enumerate() {
        let Some(nm) = name(mc, c) else { continue };
        let [p, q] = nm.parts.as_slice() else { continue };
        if t.is_tree_edge(p.edge) || t.is_tree_edge(q.edge) || p.a.iter().any(|&x| x > 0) {
            continue;
        }
        let sigma = nm.sigma.map(|s| s.to_vec()).unwrap_or_default();
        cells.entry((p.edge, q.edge, sigma)).or_insert(j);
    }
    let mut deleted: Vec<usize> = t.deleted().to_vec();
    deleted.sort_by_key(|&d| std::cmp::Reverse((t.tau(d), t.iota(d))));
    let sigmas: Vec<Vec<u8>> = if mc.ordered() { crate::cell::permutations(mc.n).into_iter().map(|p| p.to_vec()).collect() } else { vec![vec![]] };
    let mut rows = vec![];
    for &d in &deleted {
        let a = t.tau(d);
        let k = t.g(a, t.iota(d));
        let mut group: Vec<usize> =
            deleted.iter().copied().filter(|&x| t.tau(x) < a && t.separates(x, a) && t.g(a, t.iota(x)) == k).collect();
        group.sort_by_key(|&x| (t.tau(x), t.iota(x)));
        let Some((&base, rest)) = group.split_first() else { continue };
        for &d1 in rest.iter().rev() {
            for s in &sigmas {
                let (Some(&j1), Some(&j0)) = (cells.get(&(d, d1, s.clone())), cells.get(&(d, base, s.clone()))) else {
                    return Err(Error::Invalid(format!("no critical 2-cell for d_{} ∪ d_{}", t.label(d), t.label(d1))));
                };
                let mut acc: FxHashMap<usize, i64> = FxHashMap::default();
                for &(i, x) in &mc.boundary[2].cols[j1] {
                    *acc.entry(i).or_default() += x;
                }
                for &(i, x) in &mc.boundary[2].cols[j0] {
                    *acc.entry(i).or_default() -= x;
                }
                let mut row: Vec<(usize, i64)> = acc.into_iter().filter(|p| p.1 != 0).collect();
                row.sort_unstable();
                if row.is_empty() {
                    continue;
                }
                let label = format!("{} − {}", mc.label(&mc.critical[2][j1]), mc.label(&mc.critical[2][j0]));
                rows.push((label, row));
            }
        }
    }
    Ok(rows)
}

/// Tags for `critical[1]` in basis order.
pub fn classify_1cells(mc: &MorseComplex) -> Result<Vec<OneCellTag>> {
    check_supported(mc)?;
    let rows = relation_rows(mc)?;
    let mut tags = vec![OneCellTag::Free; mc.critical.get(1).map_or(0, |v| v.len())];
    for (_, row) in &rows {
        for &(i, _) in row {
            tags[i] = OneCellTag::Separating;
        }
    }
    for (i, c) in mc.critical[1].iter().enumerate() {
        let nm = name(mc, c).ok_or_else(|| Error::Invalid(format!("unnamed critical 1-cell {}", mc.label(c))))?;
        if is_pivotal_name(mc, &nm) {
            if tags[i] == OneCellTag::Separating {
                return Err(Error::Invalid(format!("{} is both pivotal and separating", mc.label(c))));
            }
            tags[i] = OneCellTag::Pivotal;
        }
    }
    Ok(tags)
}

pub fn undetermined_block(mc: &MorseComplex) -> Result<UndeterminedBlock> {
    check_supported(mc)?;
    let rows = relation_rows(mc)?;
    let mut cols: Vec<usize> = rows.iter().flat_map(|(_, r)| r.iter().map(|p| p.0)).collect();
    cols.sort_unstable();
    cols.dedup();
    let matrix = rows
        .iter()
        .map(|(_, r)| cols.iter().map(|&c| r.iter().find(|p| p.0 == c).map_or(0, |p| p.1)).collect())
        .collect();
    Ok(UndeterminedBlock {
        rows: rows.into_iter().map(|r| r.0).collect(),
        col_labels: cols.iter().map(|&i| mc.label(&mc.critical[1][i])).collect(),
        cols,
        matrix,
    })
}

/// H₁ assembled from free 1-cells and the undetermined block alone.
pub fn h1_from_classification(mc: &MorseComplex) -> Result<AbelianGroup> {
    let tags = classify_1cells(mc)?;
    let block = undetermined_block(mc)?;
    let free = tags.iter().filter(|&&t| t == OneCellTag::Free).count();
    let f = block.factors();
    let mut g = AbelianGroup::cokernel(free + block.cols.len(), &f);
    if mc.ordered() {
        g.rank -= 1;
    }
    Ok(g)
}

/// Largest summand (in basis order) of each nonzero ∂̃ of a critical 2-cell.
pub fn leading_summands(mc: &MorseComplex) -> Vec<usize> {
    let mut v: Vec<usize> = mc
        .boundary
        .get(2)
        .map(|m| m.cols.iter().filter_map(|c| c.iter().map(|p| p.0).min()).collect())
        .unwrap_or_default();
    v.sort_unstable();
    v.dedup();
    v
}


#[cfg(test)]
mod k5_tests {
    use super::*;
    use crate::morse::{from_tree, Method};
    use crate::tree::fixtures;

    #[test]
    fn k5_block() {
        let m = from_tree(fixtures::k5(), 4, Flavor::Unordered, Method::Fast, 10_000_000).unwrap();
        let b = undetermined_block(&m).unwrap();
        let tags = classify_1cells(&m).unwrap();
        let cols = ["C_3(1,0,0)", "C_3(0,1,0)", "C_2(1,0,0)", "B_3(1,0,0)", "B_3(0,1,0)", "B_2(1,0,0)", "A_2(1,0)"];
        assert_eq!(b.col_labels, cols);
        let want = vec![
            vec![0, 0, -1, 0, -1, 0, 0],
            vec![0, 0, 0, 1, -1, 0, 0],
            vec![-1, 0, 0, 0, -1, 0, 0],
            vec![0, -1, 0, 0, 0, 0, -1],
            vec![0, 0, 0, 0, 1, 0, -1],
            vec![0, 0, 0, -1, 0, 0, -1],
            vec![0, 0, 0, 0, 0, -1, -1],
        ];
        assert_eq!(b.matrix, want);
        assert_eq!(b.rows[0], "d_6 ∪ d_5(2) − d_6 ∪ d_2(2)");
        assert_eq!(tags.iter().filter(|&&t| t == OneCellTag::Free).count(), 6);
        let f: Vec<i64> = b.factors().iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert_eq!(f, vec![1, 1, 1, 1, 1, 1, 2]);
        assert_eq!(h1_from_classification(&m).unwrap(), h1(&m));
    }
}

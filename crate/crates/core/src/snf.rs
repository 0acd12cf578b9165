//! Smith normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn from_i64(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Result of a reduction: diagonal entries and, when requested, U and V with U·M·V = D.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub u: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

struct Work {
    a: IntMatrix,
    u: Option<IntMatrix>,
    v: Option<IntMatrix>,
    cols: usize,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                r.swap(i, j);
            }
        }
    }

    /// row_i −= q·row_j
    fn sub_row(&mut self, i: usize, j: usize, q: &BigInt) {
        let (ri, rj) = pair(&mut self.a, i, j);
        for (x, y) in ri.iter_mut().zip(rj.iter()) {
            if !y.is_zero() {
                *x -= q * y;
            }
        }
        if let Some(u) = &mut self.u {
            let (ri, rj) = pair(u, i, j);
            for (x, y) in ri.iter_mut().zip(rj.iter()) {
                *x -= q * y;
            }
        }
    }

    /// col_i −= q·col_j
    fn sub_col(&mut self, i: usize, j: usize, q: &BigInt) {
        for r in self.a.iter_mut() {
            if !r[j].is_zero() {
                let t = q * &r[j];
                r[i] -= t;
            }
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                let t = q * &r[j];
                r[i] -= t;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for x in u[i].iter_mut() {
                *x = -&*x;
            }
        }
    }

    fn smallest(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.len() {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.magnitude() < self.a[bi][bj].magnitude()) {
                    best = Some((i, j));
                    if x.magnitude().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }
}

fn pair<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &T) {
    assert!(i != j);
    if i < j {
        let (a, b) = v.split_at_mut(j);
        (&mut a[i], &b[0])
    } else {
        let (a, b) = v.split_at_mut(i);
        (&mut b[0], &a[j])
    }
}

/// Diagonalizes by repeatedly moving the smallest nonzero entry to the pivot.
pub fn smith(m: &IntMatrix, transforms: bool) -> Smith {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut w = Work {
        a: m.clone(),
        u: transforms.then(|| identity(rows)),
        v: transforms.then(|| identity(cols)),
        cols,
    };
    let mut diagonal = vec![];
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = w.smallest(t) else { break };
        if pi != t {
            w.swap_rows(pi, t);
        }
        if pj != t {
            w.swap_cols(pj, t);
        }
        loop {
            let p = w.a[t][t].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&p);
                    w.sub_row(i, t, &q);
                    dirty |= !w.a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&p);
                    w.sub_col(j, t, &q);
                    dirty |= !w.a[t][j].is_zero();
                }
            }
            if dirty {
                // a remainder smaller than the pivot is left in row or column t
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !w.a[i][t].is_zero() && w.a[i][t].magnitude() < w.a[best.0][best.1].magnitude() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !w.a[t][j].is_zero() && w.a[t][j].magnitude() < w.a[best.0][best.1].magnitude() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    w.swap_rows(best.0, t);
                } else if best.1 != t {
                    w.swap_cols(best.1, t);
                }
                continue;
            }
            if p.magnitude().is_one() {
                break;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !w.a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    // row_t += row_i brings a non-multiple into row t
                    let neg = BigInt::from(-1);
                    w.sub_row(t, i, &neg);
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        diagonal.push(w.a[t][t].clone());
        t += 1;
    }
    Smith { diagonal, u: w.u, v: w.v }
}

pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    smith(m, false).diagonal
}

pub fn rank(m: &IntMatrix) -> usize {
    smith(m, false).rank()
}

/// A finitely generated abelian group Z^rank ⊕ ⊕ Z/t.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianGroup {
    pub fn free(rank: usize) -> AbelianGroup {
        AbelianGroup { rank, torsion: vec![] }
    }

    /// Cokernel of a presentation matrix with `gens` generators (rows of relations as columns).
    pub fn cokernel(gens: usize, factors: &[BigInt]) -> AbelianGroup {
        let torsion = canonical_torsion(factors);
        AbelianGroup { rank: gens - factors.len(), torsion }
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

fn canonical_torsion(factors: &[BigInt]) -> Vec<u64> {
    let mut t: Vec<u64> = factors
        .iter()
        .filter(|d| !d.is_one())
        .map(|d| d.abs().to_u64().expect("torsion coefficient fits in 64 bits"))
        .collect();
    t.sort_unstable();
    t
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = vec![];
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let x = self.torsion[i];
            let j = self.torsion[i..].iter().take_while(|&&y| y == x).count();
            parts.push(if j == 1 { format!("Z_{x}") } else { format!("Z_{x}^{j}") });
            i += j;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

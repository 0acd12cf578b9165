//! Closed-form route: cut-vertex and 2-cut decompositions and the H₁ / β₂ formulas.

use num_integer::binomial;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::planar;
use crate::snf::AbelianGroup;

/// N(n,Γ,x) for a 1-cut with μ x-components and valency ν.
pub fn n_cut(n: usize, mu: usize, nu: usize) -> i64 {
    let (n, mu, nu) = (n as i128, mu as i128, nu as i128);
    let v = binomial(n + mu - 2, n - 1) * (nu - 2) - binomial(n + mu - 2, n) - (nu - mu - 1);
    v as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Segment,
    Circle,
    Biconnected,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutVertex {
    pub vertex: String,
    pub mu: usize,
    pub nu: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoCut {
    pub pair: (String, String),
    pub mu: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Leaf {
    /// `triconnected` or `circle`.
    pub kind: &'static str,
    pub vertices: Vec<String>,
    pub edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planar: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Block {
    pub kind: BlockKind,
    pub vertices: Vec<String>,
    pub edges: usize,
    pub articulation: Vec<String>,
    pub two_cuts: Vec<TwoCut>,
    pub leaves: Vec<Leaf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionTree {
    pub blocks: Vec<Block>,
    pub cut_vertices: Vec<CutVertex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantBundle {
    pub n: usize,
    pub beta1: usize,
    #[serde(rename = "N1")]
    pub n1: i64,
    #[serde(rename = "N2")]
    pub n2: usize,
    #[serde(rename = "N3")]
    pub n3: usize,
    #[serde(rename = "N3prime")]
    pub n3prime: usize,
}

fn check_connected(g: &Graph) -> Result<()> {
    if g.vertex_count() == 0 || g.bfs(0, None).iter().any(|d| d.is_none()) {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Blocks of the graph itself; subdivision only changes the number of segment blocks.
pub fn biconnected_decomposition(g: &Graph) -> Result<(Vec<(BlockKind, Vec<usize>)>, Vec<usize>)> {
    check_connected(g)?;
    if g.edge_count() == 0 {
        return Ok((vec![], vec![]));
    }
    let b = planar::biconnected_components(g);
    let blocks = b
        .blocks
        .into_iter()
        .map(|edges| {
            let kind = if edges.len() == 1 {
                BlockKind::Segment
            } else {
                let mut deg = std::collections::HashMap::new();
                for &e in &edges {
                    let (x, y) = g.endpoints(e);
                    *deg.entry(x).or_insert(0) += 1;
                    *deg.entry(y).or_insert(0) += 1;
                }
                if deg.values().all(|&d| d == 2) {
                    BlockKind::Circle
                } else {
                    BlockKind::Biconnected
                }
            };
            (kind, edges)
        })
        .collect();
    let mut cuts = b.cut_vertices;
    cuts.sort_unstable();
    Ok((blocks, cuts))
}

/// Edge multiset on global vertex ids; loops only arise for circles.
#[derive(Clone, Debug)]
struct Piece {
    edges: Vec<(usize, usize)>,
}

impl Piece {
    fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()
    }

    /// Suppresses valency-2 vertices. Returns true when only a circle is left.
    fn smooth(&mut self) -> bool {
        loop {
            let Some(v) = self.vertices().into_iter().find(|&v| self.degree(v) == 2 && !self.edges.contains(&(v, v))) else {
                break;
            };
            let mut ends = vec![];
            self.edges.retain(|&(a, b)| {
                if a == v || b == v {
                    ends.push(if a == v { b } else { a });
                    false
                } else {
                    true
                }
            });
            self.edges.push((ends[0].min(ends[1]), ends[0].max(ends[1])));
        }
        self.edges.len() == 1 && self.edges[0].0 == self.edges[0].1
    }

    /// {x,y}-components: edge sets of the components of the piece minus x and y,
    /// with every x–y edge forming its own component.
    fn components(&self, x: usize, y: usize) -> Vec<Vec<(usize, usize)>> {
        let verts = self.vertices();
        let idx = |v: usize| verts.binary_search(&v).unwrap();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let inner = |v: usize| v != x && v != y;
        for &(a, b) in &self.edges {
            if inner(a) && inner(b) {
                let (ra, rb) = (find(&mut parent, idx(a)), find(&mut parent, idx(b)));
                parent[ra] = rb;
            }
        }
        let mut groups: Vec<(usize, Vec<(usize, usize)>)> = vec![];
        let mut out = vec![];
        for &(a, b) in &self.edges {
            let rep = if inner(a) { Some(a) } else if inner(b) { Some(b) } else { None };
            match rep {
                None => out.push(vec![(a, b)]),
                Some(v) => {
                    let r = find(&mut parent, idx(v));
                    match groups.iter_mut().find(|g| g.0 == r) {
                        Some(g) => g.1.push((a, b)),
                        None => groups.push((r, vec![(a, b)])),
                    }
                }
            }
        }
        out.extend(groups.into_iter().map(|g| g.1));
        out
    }
}

struct Marked {
    cuts: Vec<(usize, usize, usize)>,
    leaves: Vec<(Piece, bool)>,
}

/// Splits along 2-cuts, adding a virtual x–y edge to every piece, until each piece
/// is a circle or topologically triconnected. Splits with one side a lone edge are
/// not real separations and are skipped.
fn marked_split(mut p: Piece, out: &mut Marked) {
    if p.smooth() {
        out.leaves.push((p, true));
        return;
    }
    let verts = p.vertices();
    for (i, &x) in verts.iter().enumerate() {
        for &y in &verts[i + 1..] {
            let comps = p.components(x, y);
            let mu = comps.len();
            let single = comps.iter().any(|c| c.len() == 1);
            if mu >= 3 || (mu == 2 && !single) {
                out.cuts.push((x, y, mu));
                for mut c in comps {
                    c.push((x, y));
                    marked_split(Piece { edges: c }, out);
                }
                return;
            }
        }
    }
    out.leaves.push((p, false));
}

fn piece_graph(g: &Graph, p: &Piece) -> Graph {
    let names: Vec<String> = p.vertices().iter().map(|&v| g.id(v).to_string()).collect();
    let edges: Vec<(String, String)> = p.edges.iter().map(|&(a, b)| (g.id(a).to_string(), g.id(b).to_string())).collect();
    Graph::new(&names, &edges).expect("triconnected pieces are simple")
}

pub fn decompose(g: &Graph) -> Result<DecompositionTree> {
    let (raw, cuts) = biconnected_decomposition(g)?;
    let name = |v: usize| g.id(v).to_string();
    let mut blocks = vec![];
    let mut count = vec![0usize; g.vertex_count()];
    for (kind, edges) in &raw {
        let piece = Piece { edges: edges.iter().map(|&e| g.endpoints(e)).map(|(a, b)| (a.min(b), a.max(b))).collect() };
        let verts = piece.vertices();
        for &v in &verts {
            count[v] += 1;
        }
        let mut marked = Marked { cuts: vec![], leaves: vec![] };
        if *kind == BlockKind::Biconnected {
            marked_split(piece.clone(), &mut marked);
        }
        blocks.push(Block {
            kind: *kind,
            vertices: verts.iter().map(|&v| name(v)).collect(),
            edges: edges.len(),
            articulation: verts.iter().filter(|v| cuts.contains(v)).map(|&v| name(v)).collect(),
            two_cuts: marked.cuts.iter().map(|&(x, y, mu)| TwoCut { pair: (name(x), name(y)), mu }).collect(),
            leaves: marked
                .leaves
                .iter()
                .map(|(p, circle)| Leaf {
                    kind: if *circle { "circle" } else { "triconnected" },
                    vertices: p.vertices().iter().map(|&v| name(v)).collect(),
                    edges: p.edges.len(),
                    planar: (!circle).then(|| planar::is_planar(&piece_graph(g, p))),
                })
                .collect(),
        });
    }
    let cut_vertices = cuts.iter().map(|&v| CutVertex { vertex: name(v), mu: count[v], nu: g.valency(v) }).collect();
    Ok(DecompositionTree { blocks, cut_vertices })
}

impl DecompositionTree {
    pub fn bundle(&self, g: &Graph, n: usize) -> InvariantBundle {
        let leaves = self.blocks.iter().flat_map(|b| &b.leaves);
        let tri: Vec<bool> = leaves.filter_map(|l| l.planar).collect();
        InvariantBundle {
            n,
            beta1: g.betti1(),
            n1: self.cut_vertices.iter().map(|c| n_cut(n, c.mu, c.nu)).sum(),
            n2: self.blocks.iter().flat_map(|b| &b.two_cuts).map(|c| (c.mu - 1) * (c.mu - 2) / 2).sum(),
            n3: tri.iter().filter(|&&p| p).count(),
            n3prime: tri.iter().filter(|&&p| !p).count(),
        }
    }
}

pub fn invariant_bundle(g: &Graph, n: usize) -> Result<InvariantBundle> {
    if n < 2 {
        return Err(Error::Invalid("invariants need n >= 2".into()));
    }
    Ok(decompose(g)?.bundle(g, n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FormulaFlavor {
    B,
    P2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H1Formula {
    pub group: AbelianGroup,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

/// Topologically a point or a segment: no cycles and no essential vertex.
fn is_segment(g: &Graph) -> bool {
    g.betti1() == 0 && (0..g.vertex_count()).all(|v| g.valency(v) <= 2)
}

pub fn h1_formula(g: &Graph, n: usize, flavor: FormulaFlavor) -> Result<H1Formula> {
    check_connected(g)?;
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    if n == 1 {
        return Ok(H1Formula {
            group: AbelianGroup::free(g.betti1()),
            notice: Some("n = 1: abelianized fundamental group of the graph".into()),
        });
    }
    if flavor == FormulaFlavor::P2 && n != 2 {
        return Err(Error::Unsupported("the ordered formula covers n = 2 only".into()));
    }
    let b = invariant_bundle(g, n)?;
    let base = b.n1 + (b.n2 + b.n3 + b.beta1) as i64;
    let group = match flavor {
        FormulaFlavor::B => AbelianGroup { rank: base as usize, torsion: vec![2; b.n3prime] },
        // the segment has a disconnected ordered configuration space with contractible pieces
        FormulaFlavor::P2 if is_segment(g) => AbelianGroup::free(0),
        FormulaFlavor::P2 => AbelianGroup::free((2 * base + b.n3prime as i64 - 1) as usize),
    };
    Ok(H1Formula { group, notice: None })
}

/// Σ over vertices of (ν−1)(ν−2); valency-2 vertices contribute nothing, so this is
/// the same on every subdivision.
fn valency_sum(g: &Graph) -> i64 {
    (0..g.vertex_count()).map(|v| g.valency(v) as i64).map(|x| (x - 1) * (x - 2)).sum()
}

/// β₂ of the two-point configuration spaces via Euler characteristic. The unordered
/// version carries no trailing constant.
pub fn beta2_formula(g: &Graph, flavor: FormulaFlavor) -> Result<i64> {
    check_connected(g)?;
    let b = invariant_bundle(g, 2)?;
    let beta = b.beta1 as i64;
    let sum = valency_sum(g);
    Ok(match flavor {
        FormulaFlavor::B => b.n1 + (b.n2 + b.n3) as i64 - sum / 2 + beta * (beta - 1) / 2,
        FormulaFlavor::P2 => 2 * b.n1 + 2 * (b.n2 + b.n3) as i64 + b.n3prime as i64 + beta * (beta - 1) - sum,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterizationReport {
    pub beta1: usize,
    pub beta1_p2: usize,
    pub planar: bool,
    /// β₁(P₂Γ) = 2β₁(Γ) + 1.
    pub plus_one: bool,
    /// β₁(P₂Γ) = 2β₁(Γ).
    pub doubled: bool,
    /// (N₁, N₂, N₃) solving N₁ + N₂ + N₃ = 1 with N₃′ = 0, for planar graphs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<(i64, usize, usize)>,
    pub summary: String,
}

pub fn classify_beta1_characterizations(g: &Graph) -> Result<CharacterizationReport> {
    check_connected(g)?;
    let leaf = (0..g.vertex_count()).any(|v| g.valency(v) <= 1);
    if leaf || (0..g.vertex_count()).all(|v| g.valency(v) == 2) {
        return Err(Error::Invalid("characterizations need every vertex of valency >= 3 after smoothing".into()));
    }
    let b = invariant_bundle(g, 2)?;
    let h = h1_formula(g, 2, FormulaFlavor::P2)?.group.rank;
    let planar = planar::is_planar(g);
    let plus_one = h == 2 * b.beta1 + 1;
    let doubled = h == 2 * b.beta1;
    let tuple = (b.n1, b.n2, b.n3);
    let case = (planar && b.n3prime == 0 && b.n1 + (b.n2 + b.n3) as i64 == 1).then_some(tuple);
    let summary = match (planar, plus_one, doubled, case) {
        (true, true, _, Some((1, 0, 0))) => "planar: β₁(P₂)=2β₁+1 holds, case (1,0,0) one 1-cut of valency 3".to_string(),
        (true, true, _, Some((0, 1, 0))) => "planar: β₁(P₂)=2β₁+1 holds, case (0,1,0) Γ is the Θ-shape graph".to_string(),
        (true, true, _, Some(_)) => "planar: β₁(P₂)=2β₁+1 holds, case (0,0,1) simple triconnected".to_string(),
        (true, _, _, _) => "planar: β₁(P₂)=2β₁+1 fails".to_string(),
        (false, true, _, _) => "non-planar: β₁(P₂)=2β₁+1 holds yet the planar characterization does not apply".to_string(),
        (false, _, true, _) => "non-planar: β₁(P₂)=2β₁ holds, topologically simple and triconnected".to_string(),
        (false, _, _, _) => "non-planar: neither equality holds".to_string(),
    };
    Ok(CharacterizationReport { beta1: b.beta1, beta1_p2: h, planar, plus_one, doubled, case, summary })
}

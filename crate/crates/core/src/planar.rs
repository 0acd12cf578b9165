//! Biconnected blocks, planarity testing and combinatorial embeddings.
//!
//! Embedding follows the Demoucron–Malgrange–Pertuiset scheme: grow an embedded
//! subgraph one fragment path at a time, always placing a fragment with the fewest
//! admissible faces first.

use std::collections::{HashMap, HashSet};

use crate::graph::Graph;

#[derive(Clone, Debug)]
pub struct Blocks {
    /// Edge sets of the biconnected components (bridges form single-edge blocks).
    pub blocks: Vec<Vec<usize>>,
    pub cut_vertices: Vec<usize>,
}

pub fn biconnected_components(g: &Graph) -> Blocks {
    let nv = g.vertex_count();
    let mut disc = vec![usize::MAX; nv];
    let mut low = vec![0usize; nv];
    let mut time = 0;
    let mut blocks = Vec::new();
    let mut estack: Vec<usize> = Vec::new();
    let mut is_cut = vec![false; nv];
    // iterative DFS: (vertex, parent edge, next incident index)
    let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(0, None, 0)];
    disc[0] = 0;
    low[0] = 0;
    time += 1;
    let mut root_children = 0;
    while let Some(&mut (v, pe, ref mut i)) = stack.last_mut() {
        if *i < g.incident(v).len() {
            let e = g.incident(v)[*i];
            *i += 1;
            if Some(e) == pe {
                continue;
            }
            let w = g.other(e, v);
            if disc[w] == usize::MAX {
                disc[w] = time;
                low[w] = time;
                time += 1;
                estack.push(e);
                if v == 0 {
                    root_children += 1;
                }
                stack.push((w, Some(e), 0));
            } else if disc[w] < disc[v] {
                estack.push(e);
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(&(u, _, _)) = stack.last() {
                low[u] = low[u].min(low[v]);
                if low[v] >= disc[u] {
                    if u != 0 {
                        is_cut[u] = true;
                    }
                    let pe = pe.unwrap();
                    let mut blk = Vec::new();
                    while let Some(e) = estack.pop() {
                        blk.push(e);
                        if e == pe {
                            break;
                        }
                    }
                    blk.sort_unstable();
                    blocks.push(blk);
                }
            }
        }
    }
    if root_children > 1 {
        is_cut[0] = true;
    }
    Blocks { blocks, cut_vertices: (0..nv).filter(|&v| is_cut[v]).collect() }
}

/// Rotation system: for each vertex, its incident edges in cyclic order.
pub type Rotation = Vec<Vec<usize>>;

/// Computes a planar rotation system, or `None` if the graph is not planar.
/// Parallel edges are allowed; each extra parallel copy is placed next to its twin.
pub fn embed(g: &Graph) -> Option<Rotation> {
    let nv = g.vertex_count();
    let mut rot: Rotation = vec![Vec::new(); nv];
    let b = biconnected_components(g);
    for blk in &b.blocks {
        // keep one representative edge per vertex pair; parallel copies follow it
        let mut rep: HashMap<(usize, usize), usize> = HashMap::new();
        let mut twins: HashMap<usize, Vec<usize>> = HashMap::new();
        for &e in blk {
            let (a, c) = g.endpoints(e);
            let key = (a.min(c), a.max(c));
            match rep.get(&key) {
                Some(&r) => twins.entry(r).or_default().push(e),
                None => {
                    rep.insert(key, e);
                }
            }
        }
        let mut simple: Vec<usize> = rep.values().copied().collect();
        simple.sort_unstable();
        let local = embed_block(g, &simple)?;
        for (v, cyc) in local {
            for e in cyc {
                // parallel copies bound digon faces: reversed order at the smaller end
                match twins.get(&e) {
                    Some(ts) if g.endpoints(e).0.min(g.endpoints(e).1) == v => {
                        rot[v].extend(ts.iter().rev().copied());
                        rot[v].push(e);
                    }
                    Some(ts) => {
                        rot[v].push(e);
                        rot[v].extend(ts.iter().copied());
                    }
                    None => rot[v].push(e),
                }
            }
        }
    }
    Some(rot)
}

pub fn is_planar(g: &Graph) -> bool {
    embed(g).is_some()
}

/// Embeds a simple biconnected edge set; returns the cyclic edge order at each vertex.
fn embed_block(g: &Graph, edges: &[usize]) -> Option<Vec<(usize, Vec<usize>)>> {
    let mut verts: Vec<usize> = edges.iter().flat_map(|&e| [g.endpoints(e).0, g.endpoints(e).1]).collect();
    verts.sort_unstable();
    verts.dedup();
    if edges.len() == 1 {
        let (a, c) = g.endpoints(edges[0]);
        return Some(vec![(a, vec![edges[0]]), (c, vec![edges[0]])]);
    }
    let ne = edges.len();
    if verts.len() >= 3 && ne > 3 * verts.len() - 6 {
        return None;
    }
    let in_block: HashSet<usize> = edges.iter().copied().collect();
    let adj = |v: usize| g.incident(v).iter().copied().filter(|e| in_block.contains(e));
    let edge_between: HashMap<(usize, usize), usize> = edges
        .iter()
        .map(|&e| {
            let (a, c) = g.endpoints(e);
            ((a.min(c), a.max(c)), e)
        })
        .collect();

    let cycle = find_cycle(g, edges)?;
    let mut in_h: HashSet<usize> = cycle.iter().copied().collect();
    let mut h_edges: HashSet<usize> = HashSet::new();
    for i in 0..cycle.len() {
        let (a, c) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        h_edges.insert(edge_between[&(a.min(c), a.max(c))]);
    }
    let mut faces: Vec<Vec<usize>> = vec![cycle.clone(), cycle.iter().rev().copied().collect()];

    while h_edges.len() < ne {
        let frags = fragments(g, edges, &in_h, &h_edges, &adj);
        let mut choice: Option<(usize, usize)> = None;
        let mut best = usize::MAX;
        for (fi, f) in frags.iter().enumerate() {
            let adm: Vec<usize> = (0..faces.len())
                .filter(|&k| f.attach.iter().all(|a| faces[k].contains(a)))
                .collect();
            if adm.is_empty() {
                return None;
            }
            if adm.len() < best {
                best = adm.len();
                choice = Some((fi, adm[0]));
            }
        }
        let (fi, fk) = choice.unwrap();
        let path = frags[fi].path.clone();
        let face = faces.swap_remove(fk);
        let i = face.iter().position(|&x| x == path[0]).unwrap();
        let j = face.iter().position(|&x| x == *path.last().unwrap()).unwrap();
        let m = path.len() - 1;
        let k = face.len();
        let mut f1 = vec![];
        let mut t = i;
        loop {
            f1.push(face[t]);
            if t == j {
                break;
            }
            t = (t + 1) % k;
        }
        f1.extend(path[1..m].iter().rev().copied());
        let mut f2 = vec![];
        let mut t = j;
        loop {
            f2.push(face[t]);
            if t == i {
                break;
            }
            t = (t + 1) % k;
        }
        f2.extend(path[1..m].iter().copied());
        faces.push(f1);
        faces.push(f2);
        for w in path.windows(2) {
            h_edges.insert(edge_between[&(w[0].min(w[1]), w[0].max(w[1]))]);
            in_h.insert(w[0]);
            in_h.insert(w[1]);
        }
    }

    // sigma_v(u) = w for consecutive darts u -> v -> w on a face
    let mut next: HashMap<(usize, usize), usize> = HashMap::new();
    for f in &faces {
        let k = f.len();
        for t in 0..k {
            next.insert((f[t], f[(t + 1) % k]), f[(t + 2) % k]);
        }
    }
    let mut out = vec![];
    for &v in &verts {
        let nbrs: Vec<usize> = adj(v).map(|e| g.other(e, v)).collect();
        let mut cyc = vec![];
        let mut u = nbrs[0];
        for _ in 0..nbrs.len() {
            cyc.push(edge_between[&(u.min(v), u.max(v))]);
            u = next[&(u, v)];
        }
        if u != nbrs[0] {
            return None;
        }
        out.push((v, cyc));
    }
    Some(out)
}

struct Fragment {
    attach: Vec<usize>,
    path: Vec<usize>,
}

fn fragments<'a, I: Iterator<Item = usize>>(
    g: &Graph,
    edges: &[usize],
    in_h: &HashSet<usize>,
    h_edges: &HashSet<usize>,
    adj: &dyn Fn(usize) -> I,
) -> Vec<Fragment> {
    let mut out = vec![];
    for &e in edges {
        let (a, c) = g.endpoints(e);
        if !h_edges.contains(&e) && in_h.contains(&a) && in_h.contains(&c) {
            out.push(Fragment { attach: vec![a, c], path: vec![a, c] });
        }
    }
    let mut seen: HashSet<usize> = HashSet::new();
    let mut outside: Vec<usize> = edges
        .iter()
        .flat_map(|&e| [g.endpoints(e).0, g.endpoints(e).1])
        .filter(|v| !in_h.contains(v))
        .collect();
    outside.sort_unstable();
    outside.dedup();
    for &s in &outside {
        if seen.contains(&s) {
            continue;
        }
        let mut comp = vec![s];
        seen.insert(s);
        let mut attach: Vec<usize> = vec![];
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            i += 1;
            for e in adj(v) {
                let w = g.other(e, v);
                if in_h.contains(&w) {
                    if !attach.contains(&w) {
                        attach.push(w);
                    }
                } else if seen.insert(w) {
                    comp.push(w);
                }
            }
        }
        attach.sort_unstable();
        let comp_set: HashSet<usize> = comp.iter().copied().collect();
        let a = attach[0];
        // BFS from a through the component to another attachment vertex
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut queue = vec![];
        for e in adj(a) {
            let w = g.other(e, a);
            if comp_set.contains(&w) && !parent.contains_key(&w) {
                parent.insert(w, a);
                queue.push(w);
            }
        }
        let mut qi = 0;
        let mut path = None;
        'bfs: while qi < queue.len() {
            let v = queue[qi];
            qi += 1;
            for e in adj(v) {
                let w = g.other(e, v);
                if in_h.contains(&w) && w != a {
                    let mut p = vec![w, v];
                    let mut x = v;
                    while parent[&x] != a {
                        x = parent[&x];
                        p.push(x);
                    }
                    p.push(a);
                    p.reverse();
                    path = Some(p);
                    break 'bfs;
                }
                if comp_set.contains(&w) && !parent.contains_key(&w) {
                    parent.insert(w, v);
                    queue.push(w);
                }
            }
        }
        out.push(Fragment { attach, path: path.expect("biconnected block has two attachments") });
    }
    out
}

fn find_cycle(g: &Graph, edges: &[usize]) -> Option<Vec<usize>> {
    let in_block: HashSet<usize> = edges.iter().copied().collect();
    let start = g.endpoints(edges[0]).0;
    let mut parent: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut depth: HashMap<usize, usize> = HashMap::from([(start, 0)]);
    let mut stack = vec![(start, usize::MAX, 0usize)];
    while let Some(&mut (v, pe, ref mut i)) = stack.last_mut() {
        let inc: Vec<usize> = g.incident(v).iter().copied().filter(|e| in_block.contains(e)).collect();
        if *i >= inc.len() {
            stack.pop();
            continue;
        }
        let e = inc[*i];
        *i += 1;
        if e == pe {
            continue;
        }
        let w = g.other(e, v);
        if let Some(&dw) = depth.get(&w) {
            if dw < depth[&v] {
                let mut cyc = vec![v];
                let mut x = v;
                while x != w {
                    x = parent[&x].0;
                    cyc.push(x);
                }
                cyc.reverse();
                return Some(cyc);
            }
        } else {
            depth.insert(w, depth[&v] + 1);
            parent.insert(w, (v, e));
            stack.push((w, e, 0));
        }
    }
    None
}

/// Number of faces traced by a rotation system (orbits of darts).
pub fn count_faces(g: &Graph, rot: &Rotation) -> usize {
    let mut pos: HashMap<(usize, usize), usize> = HashMap::new();
    for (v, cyc) in rot.iter().enumerate() {
        for (i, &e) in cyc.iter().enumerate() {
            pos.insert((v, e), i);
        }
    }
    // dart (v, e): leaving v along e. Next dart: at w = other end, the edge after e.
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut faces = 0;
    for (v, cyc) in rot.iter().enumerate() {
        for &e in cyc {
            if seen.contains(&(v, e)) {
                continue;
            }
            faces += 1;
            let (mut x, mut f) = (v, e);
            while seen.insert((x, f)) {
                let w = g.other(f, x);
                let c = &rot[w];
                let i = pos[&(w, f)];
                f = c[(i + 1) % c.len()];
                x = w;
            }
        }
    }
    faces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{builtin, complete, complete_bipartite, subdivide, Policy};

    /// Exhaustive oracle: some rotation system has Euler genus 0.
    fn brute_planar(g: &Graph) -> bool {
        let nv = g.vertex_count();
        let mut rot: Rotation = (0..nv).map(|v| g.incident(v).to_vec()).collect();
        fn rec(g: &Graph, rot: &mut Rotation, v: usize) -> bool {
            if v == rot.len() {
                let f = count_faces(g, rot) as i64;
                return g.vertex_count() as i64 - g.edge_count() as i64 + f == 2;
            }
            let k = rot[v].len();
            if k <= 2 {
                return rec(g, rot, v + 1);
            }
            // permutations fixing the first element
            let base = rot[v].clone();
            let mut idx: Vec<usize> = (1..k).collect();
            loop {
                rot[v] = std::iter::once(base[0]).chain(idx.iter().map(|&i| base[i])).collect();
                if rec(g, rot, v + 1) {
                    rot[v] = base;
                    return true;
                }
                if !next_perm(&mut idx) {
                    break;
                }
            }
            rot[v] = base;
            false
        }
        rec(g, &mut rot, 0)
    }

    fn next_perm(a: &mut [usize]) -> bool {
        let n = a.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && a[i - 1] >= a[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while a[j] <= a[i - 1] {
            j -= 1;
        }
        a.swap(i - 1, j);
        a[i..].reverse();
        true
    }

    #[test]
    fn kuratowski_examples() {
        assert!(is_planar(&complete(4)));
        assert!(!is_planar(&complete(5)));
        assert!(!is_planar(&complete_bipartite(3, 3)));
        assert!(is_planar(&builtin("Theta5").unwrap()));
        assert!(is_planar(&builtin("FigB3n3").unwrap()));
        assert!(!is_planar(&builtin("FigCounterEx").unwrap()));
        let (k5, _) = subdivide(&complete(5), 3, Policy::Auto).unwrap();
        assert!(!is_planar(&k5));
    }

    #[test]
    fn embeddings_have_euler_genus_zero() {
        for name in ["K4", "Theta4", "FigB3n3", "K(2,4)", "K(6)"] {
            let g = builtin(name).unwrap();
            match embed(&g) {
                Some(rot) => {
                    let f = count_faces(&g, &rot) as i64;
                    assert_eq!(g.vertex_count() as i64 - g.edge_count() as i64 + f, 2, "{name}");
                }
                None => assert_eq!(name, "K(6)"),
            }
        }
    }

    #[test]
    fn agrees_with_brute_force() {
        let graphs = [
            complete(4),
            complete(5),
            complete_bipartite(3, 3),
            complete_bipartite(2, 5),
            Graph::parse("a b\nb c\nc d\nd a\na c\nb d\nd e\ne a\ne b").unwrap(),
            Graph::parse("a b\nb c\nc a\nc d\nd e\ne c\na d").unwrap(),
        ];
        for g in &graphs {
            assert_eq!(is_planar(g), brute_planar(g));
        }
    }

    #[test]
    fn blocks_and_cuts() {
        let k33 = complete_bipartite(3, 3);
        let b = biconnected_components(&k33);
        assert_eq!(b.blocks.len(), 1);
        assert!(b.cut_vertices.is_empty());
        let p = Graph::parse("a b\nb c\nc d").unwrap();
        let b = biconnected_components(&p);
        assert_eq!(b.blocks.len(), 3);
        assert_eq!(b.cut_vertices.len(), 2);
        let f = builtin("FigB3n3").unwrap();
        let b = biconnected_components(&f);
        assert_eq!(b.blocks.len(), 3);
        assert_eq!(b.cut_vertices, vec![f.vertex("A").unwrap()]);
    }
}

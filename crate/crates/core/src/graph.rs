//! Finite connected multigraphs, built-in examples and subdivision.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    edge_ids: Vec<String>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

impl Graph {
    /// Builds a graph from vertex ids and endpoint pairs. Edge ids are `e0, e1, ...`.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Graph> {
        let vs: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        let es: Vec<(String, String, String)> = edges
            .iter()
            .enumerate()
            .map(|(i, (a, b))| (format!("e{i}"), a.as_ref().to_string(), b.as_ref().to_string()))
            .collect();
        Graph::with_edge_ids(vs, es)
    }

    pub fn with_edge_ids(vertices: Vec<String>, edges: Vec<(String, String, String)>) -> Result<Graph> {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut seen = HashMap::new();
        let mut edge_ids = Vec::with_capacity(edges.len());
        let mut es = Vec::with_capacity(edges.len());
        let mut adj = vec![Vec::new(); vertices.len()];
        for (k, (id, a, b)) in edges.into_iter().enumerate() {
            if seen.insert(id.clone(), ()).is_some() {
                return Err(Error::DuplicateId(id));
            }
            let ia = *index.get(&a).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            if ia == ib {
                return Err(Error::Loop(id));
            }
            adj[ia].push(k);
            adj[ib].push(k);
            es.push((ia, ib));
            edge_ids.push(id);
        }
        let g = Graph { ids: vertices, index, edge_ids, edges: es, adj };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Accepts JSON (`{"vertices":[..],"edges":[[u,v],..]}`) or edge-list text (one `u v` per line).
    pub fn parse(text: &str) -> Result<Graph> {
        let t = text.trim_start();
        if t.starts_with('{') {
            let j: GraphJson = serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))?;
            let edges: Vec<(&str, &str)> = j.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let vs: Vec<&str> = j.vertices.iter().map(|s| s.as_str()).collect();
            return Graph::new(&vs, &edges);
        }
        let mut vs: Vec<String> = Vec::new();
        let mut seen = HashMap::new();
        let mut es = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("line {}: expected `u v`", ln + 1)));
            }
            for p in &parts {
                if seen.insert(p.to_string(), ()).is_none() {
                    vs.push(p.to_string());
                }
            }
            es.push((parts[0].to_string(), parts[1].to_string()));
        }
        let edges: Vec<(&str, &str)> = es.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let vr: Vec<&str> = vs.iter().map(|s| s.as_str()).collect();
        Graph::new(&vr, &edges)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = GraphJson {
            vertices: self.ids.clone(),
            edges: self.edges.iter().map(|&(a, b)| (self.ids[a].clone(), self.ids[b].clone())).collect(),
        };
        serde_json::to_value(j).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.edge_ids[e]
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn other(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn valency(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn betti1(&self) -> usize {
        self.edges.len() + 1 - self.ids.len()
    }

    /// Vertices of valency at least 3.
    pub fn essential_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.valency(v) >= 3).collect()
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.adj[a].iter().copied().find(|&e| self.other(e, a) == b)
    }

    fn is_connected(&self) -> bool {
        if self.ids.is_empty() {
            return false;
        }
        self.bfs(0, None).iter().all(|d| d.is_some())
    }

    /// BFS distances from `s`, optionally ignoring one edge.
    pub fn bfs(&self, s: usize, skip_edge: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &e in &self.adj[v] {
                if Some(e) == skip_edge {
                    continue;
                }
                let w = self.other(e, v);
                if dist[w].is_none() {
                    dist[w] = Some(dist[v].unwrap() + 1);
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Length of the shortest cycle, or `None` for a tree.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for e in 0..self.edge_count() {
            let (a, b) = self.edges[e];
            if let Some(d) = self.bfs(a, Some(e))[b] {
                best = Some(best.map_or(d + 1, |x| x.min(d + 1)));
            }
        }
        best
    }

    /// Maximal paths whose interior vertices have valency 2. A component that is a
    /// bare cycle yields one closed path starting and ending at its first vertex.
    pub fn topological_edges(&self) -> Vec<TopoEdge> {
        let mut used = vec![false; self.edge_count()];
        let mut out = Vec::new();
        let walk = |start: usize, first: usize, used: &mut Vec<bool>| -> TopoEdge {
            let mut verts = vec![start];
            let mut edges = vec![first];
            used[first] = true;
            let mut cur = self.other(first, start);
            let mut prev = first;
            while self.valency(cur) == 2 && cur != start {
                verts.push(cur);
                let next = *self.adj[cur].iter().find(|&&e| e != prev).unwrap();
                used[next] = true;
                edges.push(next);
                prev = next;
                cur = self.other(next, cur);
            }
            verts.push(cur);
            TopoEdge { vertices: verts, edges }
        };
        for v in 0..self.vertex_count() {
            if self.valency(v) == 2 {
                continue;
            }
            for &e in &self.adj[v] {
                if !used[e] {
                    out.push(walk(v, e, &mut used));
                }
            }
        }
        for e in 0..self.edge_count() {
            if !used[e] {
                let (a, _) = self.edges[e];
                out.push(walk(a, e, &mut used));
            }
        }
        out
    }

    /// Replaces every edge `e` by a path of `segments[e]` edges. Inserted vertices are
    /// named `<edge-id>~<i>` and replacement edges `<edge-id>/<i>`.
    pub fn split_edges(&self, segments: &[usize]) -> (Graph, SubdivisionRecord) {
        let mut vs = self.ids.clone();
        let mut es = Vec::new();
        let mut rec = SubdivisionRecord::default();
        for (e, &k) in segments.iter().enumerate() {
            let (a, b) = self.edges[e];
            let eid = &self.edge_ids[e];
            if k <= 1 {
                es.push((eid.clone(), self.ids[a].clone(), self.ids[b].clone()));
                rec.paths.push((eid.clone(), vec![eid.clone()], vec![]));
                continue;
            }
            let mut path = vec![self.ids[a].clone()];
            let mut inserted = vec![];
            for i in 1..k {
                let name = format!("{eid}~{i}");
                vs.push(name.clone());
                inserted.push(name.clone());
                path.push(name);
            }
            path.push(self.ids[b].clone());
            let mut reps = vec![];
            for i in 0..k {
                let id = format!("{eid}/{i}");
                reps.push(id.clone());
                es.push((id, path[i].clone(), path[i + 1].clone()));
            }
            rec.paths.push((eid.clone(), reps, inserted));
        }
        (Graph::with_edge_ids(vs, es).expect("subdivision preserves validity"), rec)
    }
}

/// A maximal path through valency-2 vertices (closed when first == last vertex).
#[derive(Clone, Debug)]
pub struct TopoEdge {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl TopoEdge {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn ends(&self) -> (usize, usize) {
        (self.vertices[0], *self.vertices.last().unwrap())
    }

    pub fn is_closed(&self) -> bool {
        let (a, b) = self.ends();
        a == b
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SubdivisionRecord {
    /// (original edge id, replacement edge ids, inserted vertex ids)
    pub paths: Vec<(String, Vec<String>, Vec<String>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    None,
    Auto,
    Uniform,
    Strict,
    Fixed(usize),
}

impl std::str::FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Policy> {
        match s {
            "none" => Ok(Policy::None),
            "auto" => Ok(Policy::Auto),
            "uniform" => Ok(Policy::Uniform),
            "strict" => Ok(Policy::Strict),
            k => k
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 1)
                .map(Policy::Fixed)
                .ok_or_else(|| Error::Invalid(format!("subdivision policy {s}"))),
        }
    }
}

/// Checks the path rule (n-1) and cycle rule (n+1); with `strict`, also at least two
/// edges on every path between vertices of valency other than 2.
pub fn suitability(g: &Graph, n: usize, strict: bool) -> std::result::Result<(), String> {
    let need = n.saturating_sub(1).max(if strict { 2 } else { 0 });
    for t in g.topological_edges() {
        if !t.is_closed() && t.len() < need {
            let (a, b) = t.ends();
            return Err(format!("path {}..{} has {} edges, needs {}", g.id(a), g.id(b), t.len(), need));
        }
    }
    if let Some(gi) = g.girth() {
        if gi < n + 1 {
            return Err(format!("a cycle has {} edges, needs {}", gi, n + 1));
        }
    }
    Ok(())
}

pub fn subdivide(g: &Graph, n: usize, policy: Policy) -> Result<(Graph, SubdivisionRecord)> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let m = g.edge_count();
    let segments = match policy {
        Policy::None => {
            suitability(g, n, false).map_err(|reason| Error::Unsuitable { n, reason })?;
            vec![1; m]
        }
        Policy::Uniform => vec![n + 1; m],
        Policy::Fixed(k) => vec![k; m],
        Policy::Auto | Policy::Strict => auto_segments(g, n, policy == Policy::Strict),
    };
    let (h, rec) = g.split_edges(&segments);
    if !matches!(policy, Policy::None) {
        suitability(&h, n, policy == Policy::Strict).map_err(|reason| Error::Unsuitable { n, reason })?;
    }
    Ok((h, rec))
}

fn auto_segments(g: &Graph, n: usize, strict: bool) -> Vec<usize> {
    let topo = g.topological_edges();
    let mut pair_count: HashMap<(usize, usize), usize> = HashMap::new();
    for t in &topo {
        let (a, b) = t.ends();
        *pair_count.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    let base = n.saturating_sub(1).max(1).max(if strict { 2 } else { 1 });
    let mut seg = vec![1; g.edge_count()];
    for t in &topo {
        let (a, b) = t.ends();
        let mut need = base;
        if t.is_closed() {
            need = need.max(n + 1);
        } else if pair_count[&(a.min(b), a.max(b))] > 1 {
            need = need.max((n + 2) / 2);
        }
        let have = t.len();
        if have < need {
            // spread the extra splits over the path's edges
            let extra = need - have;
            for i in 0..extra {
                seg[t.edges[i % have]] += 1;
            }
        }
    }
    seg
}

pub fn complete(m: usize) -> Graph {
    let vs: Vec<String> = (0..m).map(|i| format!("v{i}")).collect();
    let mut es = vec![];
    for i in 0..m {
        for j in i + 1..m {
            es.push((vs[i].clone(), vs[j].clone()));
        }
    }
    Graph::new(&vs, &es).unwrap()
}

pub fn complete_bipartite(m: usize, n: usize) -> Graph {
    let mut vs: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();
    vs.extend((0..n).map(|j| format!("b{j}")));
    let mut es = vec![];
    for i in 0..m {
        for j in 0..n {
            es.push((format!("a{i}"), format!("b{j}")));
        }
    }
    Graph::new(&vs, &es).unwrap()
}

pub fn theta(m: usize) -> Graph {
    let es: Vec<(&str, &str)> = (0..m).map(|_| ("x", "y")).collect();
    Graph::new(&["x", "y"], &es).unwrap()
}

/// Theta graph on B, A (three arcs) with two circles attached at A.
pub fn fig_b3n3() -> Graph {
    let vs = ["B", "A", "p1", "p2", "q1", "q2"];
    let es = [
        ("B", "A"),
        ("B", "A"),
        ("B", "A"),
        ("A", "p1"),
        ("p1", "p2"),
        ("p2", "A"),
        ("A", "q1"),
        ("q1", "q2"),
        ("q2", "A"),
    ];
    Graph::new(&vs, &es).unwrap()
}

/// Two copies of K(3,3) glued along an edge, with the shared edge removed.
pub fn fig_counter_ex() -> Graph {
    let vs = ["a1", "a2", "a3", "b1", "b2", "b3", "c2", "c3", "f2", "f3"];
    let mut es = vec![];
    for a in ["a1", "a2", "a3"] {
        for b in ["b1", "b2", "b3"] {
            if (a, b) != ("a1", "b1") {
                es.push((a, b));
            }
        }
    }
    for a in ["a1", "c2", "c3"] {
        for b in ["b1", "f2", "f3"] {
            if (a, b) != ("a1", "b1") {
                es.push((a, b));
            }
        }
    }
    Graph::new(&vs, &es).unwrap()
}

/// Built-in graphs: K5, K33, K4, Theta3, Theta4, FigB3n3, FigCounterEx, and the
/// parametric forms K(m), K(m,n), Theta(m).
pub fn builtin(name: &str) -> Result<Graph> {
    let bad = || Error::UnknownGraph(name.to_string());
    let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    match compact.as_str() {
        "K5" => return Ok(complete(5)),
        "K4" => return Ok(complete(4)),
        "K33" => return Ok(complete_bipartite(3, 3)),
        "FigB3n3" => return Ok(fig_b3n3()),
        "FigCounterEx" => return Ok(fig_counter_ex()),
        _ => {}
    }
    let args = |prefix: &str| -> Option<Vec<usize>> {
        let inner = compact.strip_prefix(prefix)?;
        let inner = inner.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(inner);
        inner.split(',').map(|p| p.parse().ok()).collect()
    };
    if let Some(a) = args("Theta") {
        return match a[..] {
            [m] if m >= 2 => Ok(theta(m)),
            _ => Err(bad()),
        };
    }
    if let Some(a) = args("K") {
        return match a[..] {
            [m] if m >= 2 => Ok(complete(m)),
            [m, n] if m >= 1 && n >= 1 => Ok(complete_bipartite(m, n)),
            _ => Err(bad()),
        };
    }
    Err(bad())
}

//! Undirected simple graphs with contiguous internal ids.
//!
//! Edge lists on disk may use arbitrary (sparse, non-contiguous) node ids;
//! loaders remap them to dense internal ids `0..n-1` in first-appearance
//! order and retain the mapping, so every downstream stage works with array
//! indices. Adjacency lists are kept sorted, which makes neighbor queries,
//! edge membership tests and common-neighbor merges cheap.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::{Error, Result};

/// Internal node id: a dense index into the adjacency table.
pub type NodeId = usize;

/// An unordered node pair in canonical `(min, max)` orientation.
pub type Pair = (NodeId, NodeId);

/// Return the canonical orientation of an unordered pair.
#[inline]
pub fn canonical(i: NodeId, j: NodeId) -> Pair {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// A simple undirected graph.
#[derive(Debug, Clone)]
pub struct Graph {
    /// Sorted neighbor lists, one per internal node id.
    adj: Vec<Vec<NodeId>>,
    /// Number of undirected edges.
    edge_count: usize,
    /// Internal id -> original external id.
    external_ids: Vec<u64>,
    /// Original external id -> internal id.
    id_map: HashMap<u64, NodeId>,
}

impl Graph {
    /// Build a graph over exactly `n` nodes from an edge iterator.
    ///
    /// Node ids are taken as internal ids (external ids become the identity
    /// mapping). Self-loops and duplicate edges are dropped; ids `>= n` are
    /// an error. Isolated nodes are allowed.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        let mut edge_count = 0;
        for (a, b) in edges {
            if a >= n {
                return Err(Error::NodeOutOfRange { node: a, n });
            }
            if b >= n {
                return Err(Error::NodeOutOfRange { node: b, n });
            }
            if a == b {
                continue;
            }
            let e = canonical(a, b);
            if seen.insert(e) {
                adj[e.0].push(e.1);
                adj[e.1].push(e.0);
                edge_count += 1;
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let external_ids: Vec<u64> = (0..n as u64).collect();
        let id_map = external_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Ok(Graph { adj, edge_count, external_ids, id_map })
    }

    /// Load a plain edge list: one `i j` pair per line, whitespace- or
    /// comma-separated, `#` starting a comment. Duplicate edges and
    /// self-loops are dropped; external ids are remapped to `0..n-1` in
    /// first-appearance order.
    pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
        let mut builder = Builder::default();
        for_each_record(reader, 2, |line_no, toks| {
            let a = parse_id(toks[0], line_no)?;
            let b = parse_id(toks[1], line_no)?;
            builder.add(a, b);
            Ok(())
        })?;
        builder.finish()
    }

    /// Load a plain edge list from a file path.
    pub fn load_edge_list_path(path: &Path) -> Result<Graph> {
        Self::load_edge_list(BufReader::new(File::open(path)?))
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Average degree `2|E| / n`.
    pub fn avg_degree(&self) -> f64 {
        if self.adj.is_empty() {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.adj.len() as f64
        }
    }

    /// Sorted neighbors of `node`; the degree is the slice length.
    pub fn neighbors(&self, node: NodeId) -> Result<&[NodeId]> {
        self.adj
            .get(node)
            .map(Vec::as_slice)
            .ok_or(Error::NodeOutOfRange { node, n: self.adj.len() })
    }

    /// Degree of `node`. Panics if `node` is out of range; use
    /// [`Graph::neighbors`] for a checked lookup.
    pub fn degree(&self, node: NodeId) -> usize {
        self.adj[node].len()
    }

    #[inline]
    pub(crate) fn adj(&self, node: NodeId) -> &[NodeId] {
        &self.adj[node]
    }

    /// Whether the undirected edge `{i, j}` exists.
    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        match self.adj.get(i) {
            Some(list) => list.binary_search(&j).is_ok(),
            None => false,
        }
    }

    /// All edges in canonical orientation, lexicographically sorted.
    pub fn edges(&self) -> impl Iterator<Item = Pair> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Original external id of an internal node.
    pub fn external_id(&self, node: NodeId) -> u64 {
        self.external_ids[node]
    }

    /// Internal id for an original external id, if present.
    pub fn internal_id(&self, external: u64) -> Option<NodeId> {
        self.id_map.get(&external).copied()
    }

    /// Component label per node plus the number of components.
    pub(crate) fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.adj.len();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Whether the graph is connected (vacuously true for `n <= 1`).
    pub fn is_connected(&self) -> bool {
        if self.adj.len() <= 1 {
            return true;
        }
        self.component_labels().1 == 1
    }

    /// Largest connected component as a new graph, together with the sorted
    /// list of retained node ids (new internal id `k` corresponds to old id
    /// `nodes[k]`).
    ///
    /// Size ties are broken toward the component containing the lowest
    /// internal id. The returned graph's id map composes with this graph's,
    /// i.e. it still maps the *original* external ids. Idempotent on a
    /// connected graph.
    pub fn main_component(&self) -> (Graph, Vec<NodeId>) {
        let (label, count) = self.component_labels();
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l] += 1;
        }
        // Component labels are assigned in order of their lowest node id, so
        // the first maximal label wins the tie toward the lowest contained id.
        let best = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap_or(0);
        let nodes: Vec<NodeId> = (0..self.adj.len()).filter(|&v| label[v] == best).collect();
        (self.subgraph(&nodes), nodes)
    }

    /// Induced subgraph over `nodes` (must be sorted and deduplicated).
    /// New internal id `k` corresponds to old id `nodes[k]`; external ids are
    /// carried over so the id map composes.
    pub fn subgraph(&self, nodes: &[NodeId]) -> Graph {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]), "subgraph nodes must be sorted");
        let index_of = |v: NodeId| nodes.binary_search(&v).ok();
        let mut adj: Vec<Vec<NodeId>> = Vec::with_capacity(nodes.len());
        let mut edge_count = 0;
        for &old in nodes {
            let mut list = Vec::new();
            for &w in &self.adj[old] {
                if let Some(new_w) = index_of(w) {
                    list.push(new_w);
                }
            }
            edge_count += list.len();
            adj.push(list);
        }
        edge_count /= 2;
        let external_ids: Vec<u64> = nodes.iter().map(|&v| self.external_ids[v]).collect();
        let id_map = external_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Graph { adj, edge_count, external_ids, id_map }
    }

    /// Build a graph over `nodes` (sorted ids of `parent`) whose edge set is
    /// exactly `edges` (also in parent ids, endpoints contained in `nodes`).
    ///
    /// Unlike [`Graph::subgraph`] this does *not* take the induced edge set —
    /// it is how train graphs are built, where held-out edges must be absent
    /// even though both endpoints survive. External ids compose with the
    /// parent's.
    pub(crate) fn from_parent_edges(parent: &Graph, nodes: &[NodeId], edges: &[Pair]) -> Graph {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let index_of = |v: NodeId| {
            nodes.binary_search(&v).expect("edge endpoint outside train node set")
        };
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); nodes.len()];
        for &(i, j) in edges {
            let (a, b) = (index_of(i), index_of(j));
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            debug_assert!(list.windows(2).all(|w| w[0] != w[1]), "duplicate edge");
        }
        let external_ids: Vec<u64> = nodes.iter().map(|&v| parent.external_ids[v]).collect();
        let id_map = external_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Graph { adj, edge_count: edges.len(), external_ids, id_map }
    }

    /// Write the edge list: internal ids, canonical `i j` orientation with
    /// `i < j`, lexicographically sorted, one edge per line.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, j) in self.edges() {
            writeln!(w, "{} {}", i, j)?;
        }
        Ok(())
    }

    /// Write the edge list to a file path.
    pub fn write_edge_list_path(&self, path: &Path) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(File::create(path)?);
        self.write_edge_list(&mut out)?;
        out.flush()
    }
}

/// An undirected edge list with per-edge timestamps, cleaned like [`Graph`]:
/// ids remapped to `0..n-1` in first-appearance order, self-loops dropped,
/// duplicate edges collapsed keeping the earliest timestamp.
#[derive(Debug, Clone)]
pub struct TimestampedEdgeList {
    n: usize,
    /// Canonical pairs with their earliest timestamp, sorted by pair.
    edges: Vec<(NodeId, NodeId, i64)>,
    external_ids: Vec<u64>,
    id_map: HashMap<u64, NodeId>,
}

impl TimestampedEdgeList {
    /// Build from already-internal ids (identity external mapping);
    /// the same cleaning rules as the loader apply.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<TimestampedEdgeList>
    where
        I: IntoIterator<Item = (NodeId, NodeId, i64)>,
    {
        let mut min_t: HashMap<Pair, i64> = HashMap::new();
        for (a, b, t) in edges {
            if a >= n {
                return Err(Error::NodeOutOfRange { node: a, n });
            }
            if b >= n {
                return Err(Error::NodeOutOfRange { node: b, n });
            }
            if t < 0 {
                return Err(Error::Parse { line: 0, msg: format!("negative timestamp {t}") });
            }
            if a == b {
                continue;
            }
            let e = canonical(a, b);
            min_t.entry(e).and_modify(|old| *old = (*old).min(t)).or_insert(t);
        }
        let mut edges: Vec<(NodeId, NodeId, i64)> =
            min_t.into_iter().map(|((i, j), t)| (i, j, t)).collect();
        edges.sort_unstable();
        let external_ids: Vec<u64> = (0..n as u64).collect();
        let id_map = external_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Ok(TimestampedEdgeList { n, edges, external_ids, id_map })
    }

    /// Load a timestamped edge list: `i j t` per line, `t` a non-negative
    /// integer; cleaning as for [`Graph::load_edge_list`], duplicates keep
    /// the earliest timestamp.
    pub fn load<R: BufRead>(reader: R) -> Result<TimestampedEdgeList> {
        let mut ids = IdAssigner::default();
        let mut min_t: HashMap<Pair, i64> = HashMap::new();
        for_each_record(reader, 3, |line_no, toks| {
            let a = parse_id(toks[0], line_no)?;
            let b = parse_id(toks[1], line_no)?;
            let t: i64 = toks[2].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid timestamp {:?}", toks[2]),
            })?;
            if t < 0 {
                return Err(Error::Parse { line: line_no, msg: format!("negative timestamp {t}") });
            }
            if a == b {
                return Ok(());
            }
            let e = canonical(ids.get(a), ids.get(b));
            min_t.entry(e).and_modify(|old| *old = (*old).min(t)).or_insert(t);
            Ok(())
        })?;
        if min_t.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut edges: Vec<(NodeId, NodeId, i64)> =
            min_t.into_iter().map(|((i, j), t)| (i, j, t)).collect();
        edges.sort_unstable();
        let id_map = ids.map.clone();
        Ok(TimestampedEdgeList { n: ids.next, edges, external_ids: ids.into_external(), id_map })
    }

    /// Load from a file path.
    pub fn load_path(path: &Path) -> Result<TimestampedEdgeList> {
        Self::load(BufReader::new(File::open(path)?))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges `(i, j, t)` in canonical pair order.
    pub fn edges(&self) -> &[(NodeId, NodeId, i64)] {
        &self.edges
    }

    pub fn external_id(&self, node: NodeId) -> u64 {
        self.external_ids[node]
    }

    pub fn internal_id(&self, external: u64) -> Option<NodeId> {
        self.id_map.get(&external).copied()
    }

    /// Restrict to `nodes` (sorted internal ids): edges with both endpoints
    /// retained are renumbered; external ids compose as for
    /// [`Graph::subgraph`].
    pub fn restrict(&self, nodes: &[NodeId]) -> TimestampedEdgeList {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let index_of = |v: NodeId| nodes.binary_search(&v).ok();
        let mut edges = Vec::new();
        for &(i, j, t) in &self.edges {
            if let (Some(a), Some(b)) = (index_of(i), index_of(j)) {
                edges.push((a, b, t));
            }
        }
        let external_ids: Vec<u64> = nodes.iter().map(|&v| self.external_ids[v]).collect();
        let id_map = external_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        TimestampedEdgeList { n: nodes.len(), edges, external_ids, id_map }
    }

    /// The static graph over the same internal ids, timestamps dropped.
    pub fn static_graph(&self) -> Graph {
        let mut g = Graph::from_edges(self.n, self.edges.iter().map(|&(i, j, _)| (i, j)))
            .expect("ids validated at construction");
        g.external_ids = self.external_ids.clone();
        g.id_map = self.id_map.clone();
        g
    }
}

/// Assigns dense ids in first-appearance order.
#[derive(Default)]
struct IdAssigner {
    map: HashMap<u64, NodeId>,
    order: Vec<u64>,
    next: usize,
}

impl IdAssigner {
    fn get(&mut self, external: u64) -> NodeId {
        match self.map.entry(external) {
            std::collections::hash_map::Entry::Occupied(e) => *e.get(),
            std::collections::hash_map::Entry::Vacant(e) => {
                let id = self.next;
                e.insert(id);
                self.order.push(external);
                self.next += 1;
                id
            }
        }
    }

    fn into_external(self) -> Vec<u64> {
        self.order
    }
}

#[derive(Default)]
struct Builder {
    ids: IdAssigner,
    seen: std::collections::HashSet<Pair>,
    edges: Vec<Pair>,
}

impl Builder {
    fn add(&mut self, a: u64, b: u64) {
        if a == b {
            return;
        }
        let e = canonical(self.ids.get(a), self.ids.get(b));
        if self.seen.insert(e) {
            self.edges.push(e);
        }
    }

    fn finish(self) -> Result<Graph> {
        if self.edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let n = self.ids.next;
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let edge_count = self.edges.len();
        let id_map = self.ids.map;
        let external_ids = self.ids.order;
        Ok(Graph { adj, edge_count, external_ids, id_map })
    }
}

/// Split each non-comment line into tokens and hand them to `f`.
/// `min_tokens` is the per-format arity; lines with a different token count
/// are a parse error with the 1-based line number.
fn for_each_record<R: BufRead>(
    reader: R,
    arity: usize,
    mut f: impl FnMut(usize, &[&str]) -> Result<()>,
) -> Result<()> {
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let toks: Vec<&str> =
            content.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != arity {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {} fields, found {}: {:?}", arity, toks.len(), content.trim()),
            });
        }
        f(line_no, &toks)?;
    }
    Ok(())
}

fn parse_id(tok: &str, line: usize) -> Result<u64> {
    tok.parse()
        .map_err(|_| Error::Parse { line, msg: format!("invalid node id {tok:?}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<Graph> {
        Graph::load_edge_list(text.as_bytes())
    }

    #[test]
    fn triangle_loads_with_dense_ids() {
        let g = load("10 20\n20 30\n30 10\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
        // First-appearance order: 10 -> 0, 20 -> 1, 30 -> 2.
        assert_eq!(g.internal_id(10), Some(0));
        assert_eq!(g.internal_id(30), Some(2));
        assert_eq!(g.external_id(1), 20);
        assert!(g.has_edge(0, 2));
    }

    #[test]
    fn duplicates_self_loops_comments_and_commas() {
        let g = load("# header\n1,2\n2 1\n3 3\n2 3 # trailing\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1).unwrap(), &[0, 2]);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = load("1 2\nfoo bar\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = load("1 2\n3 4 5\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(load(""), Err(Error::EmptyGraph)));
        assert!(matches!(load("# only comments\n5 5\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn neighbors_out_of_range() {
        let g = load("0 1\n").unwrap();
        assert!(matches!(g.neighbors(7), Err(Error::NodeOutOfRange { node: 7, n: 2 })));
    }

    #[test]
    fn star_degrees() {
        // S3: center plus three leaves.
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.neighbors(0).unwrap(), &[1, 2, 3]);
        assert_eq!(g.degree(2), 1);
        assert_eq!(g.avg_degree(), 1.5);
    }

    #[test]
    fn main_component_picks_largest_then_lowest_id() {
        // Two components of equal size 2: {0,1} and {2,3}; tie -> contains node 0.
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let (mcc, nodes) = g.main_component();
        assert_eq!(nodes, vec![0, 1]);
        assert_eq!(mcc.n(), 2);
        assert_eq!(mcc.edge_count(), 1);
        // Larger component wins regardless of order.
        let g = Graph::from_edges(5, [(0, 1), (2, 3), (3, 4)]).unwrap();
        let (mcc, nodes) = g.main_component();
        assert_eq!(nodes, vec![2, 3, 4]);
        assert_eq!(mcc.edge_count(), 2);
        // External ids compose through the extraction.
        assert_eq!(mcc.external_id(0), 2);
        assert_eq!(mcc.internal_id(4), Some(2));
    }

    #[test]
    fn main_component_is_idempotent() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let (m1, _) = g.main_component();
        let (m2, nodes) = m1.main_component();
        assert_eq!(nodes, vec![0, 1, 2]);
        assert_eq!(m1.n(), m2.n());
        assert_eq!(m1.edge_count(), m2.edge_count());
        let e1: Vec<Pair> = m1.edges().collect();
        let e2: Vec<Pair> = m2.edges().collect();
        assert_eq!(e1, e2);
    }

    #[test]
    fn timestamped_keeps_earliest_and_rejects_negative() {
        let t = TimestampedEdgeList::load("1 2 100\n2 1 50\n1 1 10\n2 3 70\n".as_bytes()).unwrap();
        assert_eq!(t.n(), 3);
        assert_eq!(t.edges(), &[(0, 1, 50), (1, 2, 70)]);
        let err = TimestampedEdgeList::load("1 2 -5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn static_graph_preserves_ids() {
        let t = TimestampedEdgeList::load("7 9 1\n9 11 2\n".as_bytes()).unwrap();
        let g = t.static_graph();
        assert_eq!(g.n(), 3);
        assert_eq!(g.internal_id(11), Some(2));
        assert!(g.has_edge(0, 1));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn emit_reload_roundtrip_is_isomorphic() {
        let g = Graph::from_edges(5, [(0, 3), (3, 1), (1, 4), (4, 2), (2, 0)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let r = Graph::load_edge_list(&buf[..]).unwrap();
        assert_eq!(r.n(), g.n());
        assert_eq!(r.edge_count(), g.edge_count());
        // The reload's id map witnesses an isomorphism: emitted "external" ids
        // are g's internal ids.
        for (i, j) in g.edges() {
            let (a, b) = (r.internal_id(i as u64).unwrap(), r.internal_id(j as u64).unwrap());
            assert!(r.has_edge(a, b));
        }
    }
}

//! Graphs and rooted trees: chains, arbitrary finite trees, leaf-growth
//! sequences, line graphs, and exhaustive enumeration of trees up to
//! isomorphism.
//!
//! Vertices are 0-indexed. Edges are stored sorted by `(min, max)` endpoint
//! so that every derived object (line graphs, matrices, file dumps) is
//! reproducible.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{FoelError, Result};

/// A finite rooted tree on vertices `0..vertex_count`.
///
/// The parent map is derived from a breadth-first traversal from the root
/// with children visited in ascending vertex order; it encodes the unique
/// non-backtracking path from the root to every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    root: usize,
    parent: Vec<Option<usize>>,
}

/// The line graph of a tree: one vertex per tree edge, adjacent when the
/// underlying edges share a tree vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineGraph {
    tree_edges: Vec<(usize, usize)>,
    adjacency: Vec<(usize, usize)>,
}

/// Serialized tree file: `{"vertices": L, "edges": [[u,v],...], "root": r}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeFile {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
}

impl TreeGraph {
    /// Validated construction from an explicit vertex count and edge list.
    pub fn from_edges(
        vertex_count: usize,
        edges: &[(usize, usize)],
        root: usize,
    ) -> Result<TreeGraph> {
        if vertex_count == 0 {
            return Err(FoelError::SizeLimit {
                what: "tree",
                size: 0,
                max: usize::MAX,
            });
        }
        if root >= vertex_count {
            return Err(FoelError::VertexOutOfRange {
                vertex: root,
                count: vertex_count,
            });
        }
        let mut sorted = Vec::with_capacity(edges.len());
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(FoelError::SelfLoop(u));
            }
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(FoelError::VertexOutOfRange {
                        vertex: w,
                        count: vertex_count,
                    });
                }
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(FoelError::DuplicateEdge(e.0, e.1));
            }
            sorted.push(e);
        }
        sorted.sort_unstable();

        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in &sorted {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        // BFS from the root; children in ascending vertex order.
        let mut parent = vec![None; vertex_count];
        let mut visited = vec![false; vertex_count];
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        let mut reached = 1usize;
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some(v);
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        if reached < vertex_count {
            return Err(FoelError::Disconnected);
        }
        if sorted.len() != vertex_count - 1 {
            // Connected with more than L-1 edges must contain a cycle.
            return Err(FoelError::CycleDetected);
        }
        Ok(TreeGraph {
            vertex_count,
            edges: sorted,
            root,
            parent,
        })
    }

    /// Parse a tree from its serialized file form.
    pub fn from_file(file: &TreeFile) -> Result<TreeGraph> {
        TreeGraph::from_edges(file.vertices, &file.edges, file.root.unwrap_or(0))
    }

    /// Parse a tree from the JSON file format.
    pub fn from_json(text: &str) -> Result<TreeGraph> {
        let file: TreeFile = serde_json::from_str(text)
            .map_err(|e| FoelError::ParseInput(format!("tree JSON: {e}")))?;
        TreeGraph::from_file(&file)
    }

    /// Serialized file form of this tree.
    pub fn to_file(&self) -> TreeFile {
        TreeFile {
            vertices: self.vertex_count,
            edges: self.edges.clone(),
            root: Some(self.root),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Edges sorted by `(min, max)` endpoint.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Parent of `v` on the path to the root; `None` for the root itself.
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent.get(v).copied().flatten()
    }

    /// Same tree rooted at a different vertex.
    pub fn rerooted(&self, root: usize) -> Result<TreeGraph> {
        TreeGraph::from_edges(self.vertex_count, &self.edges, root)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }
}

/// Path graph on `l` vertices `0-1-...-(l-1)`, rooted at vertex 0.
pub fn build_chain(l: usize) -> Result<TreeGraph> {
    if l < 2 {
        return Err(FoelError::ChainTooShort(l));
    }
    let edges: Vec<(usize, usize)> = (0..l - 1).map(|i| (i, i + 1)).collect();
    TreeGraph::from_edges(l, &edges, 0)
}

/// Validated tree from an edge list; the vertex count is inferred as the
/// largest endpoint plus one and the root defaults to vertex 0.
pub fn parse_tree(edges: &[(usize, usize)], root: usize) -> Result<TreeGraph> {
    let vertex_count = edges
        .iter()
        .map(|&(u, v)| u.max(v) + 1)
        .max()
        .unwrap_or(1);
    TreeGraph::from_edges(vertex_count, edges, root)
}

/// Line graph of a tree. Line-graph vertex `k` is the `k`-th tree edge in
/// sorted order.
pub fn line_graph(tree: &TreeGraph) -> LineGraph {
    let tree_edges = tree.edges().to_vec();
    let mut adjacency = Vec::new();
    for i in 0..tree_edges.len() {
        for j in i + 1..tree_edges.len() {
            let (a, b) = tree_edges[i];
            let (c, d) = tree_edges[j];
            if a == c || a == d || b == c || b == d {
                adjacency.push((i, j));
            }
        }
    }
    LineGraph {
        tree_edges,
        adjacency,
    }
}

/// New tree with one extra pendant vertex (index `L`) attached to `attach`.
pub fn add_leaf(tree: &TreeGraph, attach: usize) -> Result<TreeGraph> {
    let l = tree.vertex_count();
    if attach >= l {
        return Err(FoelError::VertexOutOfRange {
            vertex: attach,
            count: l,
        });
    }
    let mut edges = tree.edges().to_vec();
    edges.push((attach, l));
    TreeGraph::from_edges(l + 1, &edges, tree.root())
}

impl LineGraph {
    /// Number of line-graph vertices (= number of tree edges).
    pub fn vertex_count(&self) -> usize {
        self.tree_edges.len()
    }

    /// The underlying tree edges, in the order that indexes the vertices.
    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    /// Line-graph edges as sorted index pairs.
    pub fn adjacency(&self) -> &[(usize, usize)] {
        &self.adjacency
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        let e = (i.min(j), i.max(j));
        self.adjacency.contains(&e)
    }
}

/// All rooted trees on `n` nodes as canonical level sequences
/// (Beyer-Hedetniemi successor generation).
fn rooted_level_sequences(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return Vec::new();
    }
    let mut seq: Vec<usize> = (1..=n).collect(); // the path
    let mut out = Vec::new();
    loop {
        out.push(seq.clone());
        // Rightmost position with level > 2 (0-indexed scan).
        let Some(p) = (0..n).rev().find(|&i| seq[i] > 2) else {
            break;
        };
        let q = (0..p).rev().find(|&i| seq[i] == seq[p] - 1).expect("parent level exists");
        for i in p..n {
            seq[i] = seq[i - (p - q)];
        }
    }
    out
}

/// Tree from a level sequence: node `i` hangs off the nearest earlier node
/// one level up.
fn tree_from_level_sequence(seq: &[usize]) -> TreeGraph {
    let n = seq.len();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let p = (0..i).rev().find(|&j| seq[j] == seq[i] - 1).expect("level sequence is valid");
        edges.push((p, i));
    }
    TreeGraph::from_edges(n, &edges, 0).expect("level sequence encodes a tree")
}

/// Centroid vertices of a tree (one or two).
fn centroids(tree: &TreeGraph) -> Vec<usize> {
    let n = tree.vertex_count();
    if n == 1 {
        return vec![0];
    }
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in tree.edges() {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    // Subtree sizes by iterative post-order from vertex 0.
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    let mut stack = vec![0usize];
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                stack.push(w);
            }
        }
    }
    let mut size = vec![1usize; n];
    for &v in order.iter().rev() {
        if parent[v] != usize::MAX {
            size[parent[v]] += size[v];
        }
    }
    let mut best = usize::MAX;
    let mut result = Vec::new();
    for v in 0..n {
        // Largest component after removing v.
        let mut heaviest = n - size[v];
        for &w in &adjacency[v] {
            if parent[w] == v {
                heaviest = heaviest.max(size[w]);
            }
        }
        match heaviest.cmp(&best) {
            std::cmp::Ordering::Less => {
                best = heaviest;
                result = vec![v];
            }
            std::cmp::Ordering::Equal => result.push(v),
            std::cmp::Ordering::Greater => {}
        }
    }
    result.sort_unstable();
    result
}

/// Canonical code of the tree rooted at `root` (sorted-subtree encoding).
fn rooted_code(tree: &TreeGraph, root: usize) -> String {
    let n = tree.vertex_count();
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in tree.edges() {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    fn code(v: usize, from: usize, adjacency: &[Vec<usize>]) -> String {
        let mut parts: Vec<String> = adjacency[v]
            .iter()
            .filter(|&&w| w != from)
            .map(|&w| code(w, v, adjacency))
            .collect();
        parts.sort();
        format!("({})", parts.concat())
    }
    code(root, usize::MAX, &adjacency)
}

/// Isomorphism-invariant canonical code: minimum rooted code over centroids.
pub fn canonical_code(tree: &TreeGraph) -> String {
    centroids(tree)
        .into_iter()
        .map(|c| rooted_code(tree, c))
        .min()
        .expect("tree has a centroid")
}

/// All trees on `n` vertices up to isomorphism, in canonical-code order.
///
/// Rooted trees come from level-sequence generation; free trees are the
/// deduplication by centroid-rooted canonical codes. Counts for
/// n = 1..=9: 1, 1, 1, 2, 3, 6, 11, 23, 47.
pub fn enumerate_trees(n: usize) -> Vec<TreeGraph> {
    let mut by_code: HashMap<String, TreeGraph> = HashMap::new();
    for seq in rooted_level_sequences(n) {
        let tree = tree_from_level_sequence(&seq);
        by_code.entry(canonical_code(&tree)).or_insert(tree);
    }
    let mut items: Vec<(String, TreeGraph)> = by_code.into_iter().collect();
    items.sort_by(|a, b| a.0.cmp(&b.0));
    items.into_iter().map(|(_, t)| t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_examples() {
        let c2 = build_chain(2).unwrap();
        assert_eq!(c2.edges(), &[(0, 1)]);
        let c4 = build_chain(4).unwrap();
        assert_eq!(c4.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(c4.parent(2), Some(1));
        assert!(matches!(build_chain(1), Err(FoelError::ChainTooShort(1))));
    }

    #[test]
    fn parse_examples() {
        let star = parse_tree(&[(0, 1), (0, 2), (0, 3)], 0).unwrap();
        assert_eq!(star.vertex_count(), 4);
        assert_eq!(star.degree(0), 3);

        let chain = parse_tree(&[(0, 1), (1, 2)], 0).unwrap();
        assert_eq!(chain, build_chain(3).unwrap());

        assert!(matches!(
            parse_tree(&[(0, 1), (2, 3)], 0),
            Err(FoelError::Disconnected)
        ));
        assert!(matches!(
            parse_tree(&[(0, 1), (1, 2), (0, 2)], 0),
            Err(FoelError::CycleDetected)
        ));
        assert!(matches!(
            parse_tree(&[(0, 1), (1, 0)], 0),
            Err(FoelError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            parse_tree(&[(0, 1)], 5),
            Err(FoelError::VertexOutOfRange { vertex: 5, .. })
        ));
    }

    #[test]
    fn line_graph_examples() {
        // Chain of 4 -> path on 3 vertices.
        let lg = line_graph(&build_chain(4).unwrap());
        assert_eq!(lg.vertex_count(), 3);
        assert_eq!(lg.adjacency(), &[(0, 1), (1, 2)]);

        // Chain of 3 -> 2 vertices, 1 edge.
        let lg3 = line_graph(&build_chain(3).unwrap());
        assert_eq!(lg3.vertex_count(), 2);
        assert_eq!(lg3.adjacency().len(), 1);

        // Star K_{1,3} -> triangle, cross-checked by brute-force incidence.
        let star = parse_tree(&[(0, 1), (0, 2), (0, 3)], 0).unwrap();
        let lg = line_graph(&star);
        assert_eq!(lg.vertex_count(), 3);
        assert_eq!(lg.adjacency().len(), 3);
        for i in 0..3 {
            for j in i + 1..3 {
                let (a, b) = lg.tree_edges()[i];
                let (c, d) = lg.tree_edges()[j];
                let share = a == c || a == d || b == c || b == d;
                assert_eq!(lg.is_adjacent(i, j), share);
            }
        }

        // Single edge -> one isolated line-graph vertex.
        let lg1 = line_graph(&build_chain(2).unwrap());
        assert_eq!(lg1.vertex_count(), 1);
        assert!(lg1.adjacency().is_empty());
    }

    #[test]
    fn line_graph_vertex_count_matches_edge_count() {
        for n in 2..=9 {
            for tree in enumerate_trees(n) {
                assert_eq!(line_graph(&tree).vertex_count(), n - 1);
            }
        }
    }

    #[test]
    fn add_leaf_examples() {
        let c3 = build_chain(3).unwrap();
        assert_eq!(add_leaf(&c3, 2).unwrap(), build_chain(4).unwrap());

        let c2 = build_chain(2).unwrap();
        assert_eq!(add_leaf(&c2, 1).unwrap(), build_chain(3).unwrap());

        let star3 = parse_tree(&[(0, 1), (0, 2), (0, 3)], 0).unwrap();
        let star4 = add_leaf(&star3, 0).unwrap();
        assert_eq!(star4.degree(0), 4);
        assert!(matches!(
            add_leaf(&c3, 7),
            Err(FoelError::VertexOutOfRange { vertex: 7, .. })
        ));
    }

    #[test]
    fn add_leaf_restriction_recovers_original() {
        for n in 2..=7 {
            for tree in enumerate_trees(n) {
                for attach in 0..n {
                    let grown = add_leaf(&tree, attach).unwrap();
                    let restricted: Vec<(usize, usize)> = grown
                        .edges()
                        .iter()
                        .copied()
                        .filter(|&(u, v)| u < n && v < n)
                        .collect();
                    let recovered =
                        TreeGraph::from_edges(n, &restricted, tree.root()).unwrap();
                    assert_eq!(&recovered, &tree);
                }
            }
        }
    }

    #[test]
    fn parse_roundtrip_chains() {
        for l in 2..=20 {
            let chain = build_chain(l).unwrap();
            let reparsed = parse_tree(chain.edges(), 0).unwrap();
            assert_eq!(reparsed, chain);
        }
    }

    #[test]
    fn free_tree_counts() {
        let expected = [1usize, 1, 1, 2, 3, 6, 11, 23, 47];
        for (i, &count) in expected.iter().enumerate() {
            assert_eq!(enumerate_trees(i + 1).len(), count, "n = {}", i + 1);
        }
    }

    #[test]
    fn rooted_tree_counts() {
        let expected = [1usize, 1, 2, 4, 9, 20, 48, 115, 286];
        for (i, &count) in expected.iter().enumerate() {
            assert_eq!(rooted_level_sequences(i + 1).len(), count, "n = {}", i + 1);
        }
    }

    #[test]
    fn canonical_code_is_isomorphism_invariant() {
        // The same path labeled differently.
        let a = parse_tree(&[(0, 1), (1, 2), (2, 3)], 0).unwrap();
        let b = parse_tree(&[(0, 2), (2, 3), (3, 1)], 1).unwrap();
        assert_eq!(canonical_code(&a), canonical_code(&b));
        let star = parse_tree(&[(0, 1), (0, 2), (0, 3)], 0).unwrap();
        assert_ne!(canonical_code(&a), canonical_code(&star));
    }

    #[test]
    fn tree_json_roundtrip() {
        let star = parse_tree(&[(0, 1), (0, 2), (0, 3)], 0).unwrap();
        let text = serde_json::to_string(&star.to_file()).unwrap();
        let back = TreeGraph::from_json(&text).unwrap();
        assert_eq!(back, star);
        // Root defaults to 0 when omitted.
        let parsed =
            TreeGraph::from_json(r#"{"vertices": 3, "edges": [[0,1],[1,2]]}"#).unwrap();
        assert_eq!(parsed.root(), 0);
    }
}

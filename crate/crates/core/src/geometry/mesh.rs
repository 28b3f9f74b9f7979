use std::collections::{BTreeSet, HashMap};

use super::element::{check_quad, ElementGeometry};
use crate::error::{Error, Result};
use crate::Vec2;

/// A boundary segment between two nodes, tagged with the name of the boundary
/// part it belongs to (e.g. `left`, `hole`, `traction`).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: String,
}

impl BoundaryEdge {
    pub fn new(a: usize, b: usize, tag: impl Into<String>) -> Self {
        Self {
            a,
            b,
            tag: tag.into(),
        }
    }
}

/// Conforming quadrilateral mesh. Elements are counterclockwise; node `i`
/// owns global dofs `2i` (u_x) and `2i + 1` (u_y).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadMesh {
    nodes: Vec<Vec2>,
    elements: Vec<[usize; 4]>,
    boundary_edges: Vec<BoundaryEdge>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl QuadMesh {
    /// Build a mesh and check every invariant: valid indices, distinct
    /// vertices, positive non-degenerate simple elements, and boundary edges
    /// owned by exactly one element.
    pub fn new(
        nodes: Vec<Vec2>,
        elements: Vec<[usize; 4]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let n = nodes.len();
        for (e, conn) in elements.iter().enumerate() {
            if let Some(&bad) = conn.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidMesh(format!(
                    "element {e} references node {bad} but the mesh has {n} nodes"
                )));
            }
            for i in 0..4 {
                for j in (i + 1)..4 {
                    if conn[i] == conn[j] {
                        return Err(Error::InvalidMesh(format!(
                            "element {e} repeats node {}",
                            conn[i]
                        )));
                    }
                }
            }
            let v = conn.map(|i| nodes[i]);
            check_quad(&v).map_err(|err| err.at_element(e))?;
        }
        let mut owners: HashMap<(usize, usize), usize> = HashMap::new();
        for conn in &elements {
            for k in 0..4 {
                *owners.entry(edge_key(conn[k], conn[(k + 1) % 4])).or_insert(0) += 1;
            }
        }
        for be in &boundary_edges {
            if be.a >= n || be.b >= n {
                return Err(Error::InvalidMesh(format!(
                    "boundary edge ({}, {}) references a missing node",
                    be.a, be.b
                )));
            }
            let count = owners.get(&edge_key(be.a, be.b)).copied().unwrap_or(0);
            if count != 1 {
                return Err(Error::InvalidMesh(format!(
                    "boundary edge ({}, {}) [{}] belongs to {count} elements",
                    be.a, be.b, be.tag
                )));
            }
        }
        Ok(Self {
            nodes,
            elements,
            boundary_edges,
        })
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn elements(&self) -> &[[usize; 4]] {
        &self.elements
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn element_vertices(&self, e: usize) -> [Vec2; 4] {
        self.elements[e].map(|i| self.nodes[i])
    }

    pub fn element_geometry(&self, e: usize) -> Result<ElementGeometry> {
        ElementGeometry::new(self.element_vertices(e)).map_err(|err| err.at_element(e))
    }

    pub fn geometries(&self) -> Result<Vec<ElementGeometry>> {
        (0..self.elements.len())
            .map(|e| self.element_geometry(e))
            .collect()
    }

    /// Distinct boundary tags in first-appearance order.
    pub fn tags(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for be in &self.boundary_edges {
            if !out.contains(&be.tag.as_str()) {
                out.push(&be.tag);
            }
        }
        out
    }

    pub fn edges_with_tag<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a BoundaryEdge> {
        self.boundary_edges.iter().filter(move |be| be.tag == tag)
    }

    /// Sorted node indices touched by boundary edges with the given tag.
    pub fn nodes_with_tag(&self, tag: &str) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .edges_with_tag(tag)
            .flat_map(|be| [be.a, be.b])
            .collect();
        set.into_iter().collect()
    }

    pub fn boundary_nodes(&self) -> BTreeSet<usize> {
        self.boundary_edges
            .iter()
            .flat_map(|be| [be.a, be.b])
            .collect()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.elements.len())
            .map(|e| super::element::signed_area(&self.element_vertices(e)))
            .sum()
    }

    /// Largest element diameter.
    pub fn max_diameter(&self) -> f64 {
        (0..self.elements.len())
            .map(|e| super::element::diameter(&self.element_vertices(e)))
            .fold(0.0, f64::max)
    }

    /// Elements incident to each node.
    pub fn node_elements(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (e, conn) in self.elements.iter().enumerate() {
            for &i in conn {
                out[i].push(e);
            }
        }
        out
    }

    /// Apply a coordinate map to every node and revalidate.
    pub fn map_nodes(&self, f: impl Fn(Vec2) -> Vec2) -> Result<Self> {
        Self::new(
            self.nodes.iter().map(|&p| f(p)).collect(),
            self.elements.clone(),
            self.boundary_edges.clone(),
        )
    }

    pub fn translate(&self, offset: Vec2) -> Self {
        Self {
            nodes: self.nodes.iter().map(|&p| p + offset).collect(),
            elements: self.elements.clone(),
            boundary_edges: self.boundary_edges.clone(),
        }
    }

    /// Renumber nodes: old node `i` becomes node `perm[i]`.
    pub fn renumber_nodes(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {} nodes",
                perm.len(),
                self.nodes.len()
            )));
        }
        let mut nodes = vec![Vec2::zeros(); self.nodes.len()];
        for (old, &new) in perm.iter().enumerate() {
            nodes[new] = self.nodes[old];
        }
        let elements = self.elements.iter().map(|c| c.map(|i| perm[i])).collect();
        let boundary_edges = self
            .boundary_edges
            .iter()
            .map(|be| BoundaryEdge::new(perm[be.a], perm[be.b], be.tag.clone()))
            .collect();
        Self::new(nodes, elements, boundary_edges)
    }

    /// Index of the node closest to `x`.
    pub fn nearest_node(&self, x: Vec2) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (i, p) in self.nodes.iter().enumerate() {
            let d = (p - x).norm();
            if d < dist {
                dist = d;
                best = i;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_nodes() -> Vec<Vec2> {
        vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn rejects_out_of_range_index() {
        let err = QuadMesh::new(square_nodes(), vec![[0, 1, 2, 7]], vec![]).unwrap_err();
        assert!(err.to_string().contains("node 7"));
    }

    #[test]
    fn rejects_repeated_vertex() {
        assert!(QuadMesh::new(square_nodes(), vec![[0, 1, 1, 3]], vec![]).is_err());
    }

    #[test]
    fn rejects_interior_boundary_edge() {
        let mut nodes = square_nodes();
        nodes.push(Vec2::new(2.0, 0.0));
        nodes.push(Vec2::new(2.0, 1.0));
        let elements = vec![[0, 1, 2, 3], [1, 4, 5, 2]];
        let err = QuadMesh::new(nodes, elements, vec![BoundaryEdge::new(1, 2, "x")]).unwrap_err();
        assert!(err.to_string().contains("2 elements"));
    }

    #[test]
    fn degenerate_error_names_element() {
        let mut nodes = square_nodes();
        nodes.extend([Vec2::new(2.0, 0.0), Vec2::new(3.0, 0.0), Vec2::new(4.0, 0.0)]);
        let elements = vec![[0, 1, 2, 3], [1, 4, 5, 6]];
        match QuadMesh::new(nodes, elements, vec![]) {
            Err(Error::DegenerateElement { element, .. }) => assert_eq!(element, 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}

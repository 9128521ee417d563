//! Deterministic builders for the gadget graphs L1..L4 and the 157-vertex
//! counterexample G, plus the label bijections that exhibit L3/L4 as induced
//! subgraphs of G.
//!
//! Fan width `k` is a parameter; the constructions of interest use `k = 5`
//! (five fan vertices against the four corner points of a rectangle
//! intersection). Smaller `k` builds the same shape for exploratory runs but
//! carries no verification guarantee.

use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, Vertex};

pub const DEFAULT_FAN_WIDTH: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetName {
    L1,
    L2,
    L3,
    L4,
    G,
}

impl fmt::Display for GadgetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GadgetName::L1 => "L1",
            GadgetName::L2 => "L2",
            GadgetName::L3 => "L3",
            GadgetName::L4 => "L4",
            GadgetName::G => "G",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for GadgetName {
    type Err = GadgetError;
    fn from_str(s: &str) -> Result<Self, GadgetError> {
        match s.to_ascii_uppercase().as_str() {
            "L1" => Ok(GadgetName::L1),
            "L2" => Ok(GadgetName::L2),
            "L3" => Ok(GadgetName::L3),
            "L4" => Ok(GadgetName::L4),
            "G" => Ok(GadgetName::G),
            _ => Err(GadgetError::UnknownGadget(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GadgetSpec {
    pub name: GadgetName,
    pub k: u32,
}

impl GadgetSpec {
    pub fn new(name: GadgetName, k: u32) -> Result<Self, GadgetError> {
        if k < 1 {
            return Err(GadgetError::BadFanWidth(k));
        }
        Ok(GadgetSpec { name, k })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GadgetError {
    #[error("unknown gadget name {0:?}")]
    UnknownGadget(String),
    #[error("fan width must be >= 1, got {0}")]
    BadFanWidth(u32),
    #[error("fan index {0} out of range 1..={1}")]
    FanIndexOutOfRange(u32, u32),
    #[error("graph lacks required label {0:?}")]
    MissingLabel(String),
}

fn label(g: &mut Graph, name: String, v: Vertex) {
    g.set_label(&name, v).expect("gadget labels are fresh by construction");
}

/// Triangle a,b,c plus a pendant z on c. 4 vertices, 4 edges.
fn build_l1() -> Graph {
    let g = Graph::k2();
    let (g, c) = g.split_edge(0, 1).unwrap();
    let (mut g, z) = g.add_pendant(c).unwrap();
    label(&mut g, "a".into(), 0);
    label(&mut g, "b".into(), 1);
    label(&mut g, "c".into(), c);
    label(&mut g, "z".into(), z);
    g
}

/// Split (a,b) to c, then (a,c) to x and (b,c) to y. 5 vertices, 7 edges.
fn build_l2() -> Graph {
    let g = Graph::k2();
    let (g, c) = g.split_edge(0, 1).unwrap();
    let (g, x) = g.split_edge(0, c).unwrap();
    let (mut g, y) = g.split_edge(1, c).unwrap();
    label(&mut g, "a".into(), 0);
    label(&mut g, "b".into(), 1);
    label(&mut g, "c".into(), c);
    label(&mut g, "x".into(), x);
    label(&mut g, "y".into(), y);
    g
}

/// Split (a,b) k times into the fan c_1..c_k, then split (a,c_i) to x_i and
/// (b,c_i) to y_i for each i. 2+3k vertices, 1+6k edges.
fn build_l3(k: u32) -> Graph {
    let mut g = Graph::k2();
    let mut c = Vec::new();
    for _ in 0..k {
        let (g2, ci) = g.split_edge(0, 1).unwrap();
        g = g2;
        c.push(ci);
    }
    let mut xy = Vec::new();
    for &ci in &c {
        let (g2, xi) = g.split_edge(0, ci).unwrap();
        let (g3, yi) = g2.split_edge(1, ci).unwrap();
        g = g3;
        xy.push((xi, yi));
    }
    label(&mut g, "a".into(), 0);
    label(&mut g, "b".into(), 1);
    for i in 0..k as usize {
        label(&mut g, format!("c{}", i + 1), c[i]);
        label(&mut g, format!("x{}", i + 1), xy[i].0);
        label(&mut g, format!("y{}", i + 1), xy[i].1);
    }
    g
}

/// L3 plus a split of (x_i, c_i) into z_i for each i. 2+4k vertices, 1+8k edges.
fn build_l4(k: u32) -> Graph {
    let mut g = build_l3(k);
    let mut zs = Vec::new();
    for i in 1..=k {
        let xi = g.label(&format!("x{}", i)).unwrap();
        let ci = g.label(&format!("c{}", i)).unwrap();
        let (g2, zi) = g.split_edge(xi, ci).unwrap();
        g = g2;
        zs.push(zi);
    }
    for (i, zi) in zs.into_iter().enumerate() {
        label(&mut g, format!("z{}", i + 1), zi);
    }
    g
}

/// The full counterexample graph. Construction order is fixed so that vertex
/// indices replay deterministically: the c fan first, then per i the d row
/// and the e row, then per (i, j) the quadruple p, q, r, s.
/// 2 + k + 6k^2 vertices, 1 + 2(k + 6k^2 - k) ... = 2n - 3 edges.
fn build_g(k: u32) -> Graph {
    let mut g = Graph::k2();
    let mut c = Vec::new();
    for _ in 0..k {
        let (g2, ci) = g.split_edge(0, 1).unwrap();
        g = g2;
        c.push(ci);
    }
    let mut d = vec![Vec::new(); k as usize];
    let mut e = vec![Vec::new(); k as usize];
    for i in 0..k as usize {
        for _ in 0..k {
            let (g2, dij) = g.split_edge(0, c[i]).unwrap();
            g = g2;
            d[i].push(dij);
        }
        for _ in 0..k {
            let (g2, eij) = g.split_edge(1, c[i]).unwrap();
            g = g2;
            e[i].push(eij);
        }
    }
    let mut pqrs = Vec::new();
    for i in 0..k as usize {
        for j in 0..k as usize {
            let (g2, pij) = g.split_edge(0, d[i][j]).unwrap();
            let (g3, qij) = g2.split_edge(c[i], d[i][j]).unwrap();
            let (g4, rij) = g3.split_edge(1, e[i][j]).unwrap();
            let (g5, sij) = g4.split_edge(c[i], e[i][j]).unwrap();
            g = g5;
            pqrs.push((i, j, pij, qij, rij, sij));
        }
    }
    label(&mut g, "a".into(), 0);
    label(&mut g, "b".into(), 1);
    for i in 0..k as usize {
        label(&mut g, format!("c{}", i + 1), c[i]);
        for j in 0..k as usize {
            label(&mut g, format!("d{}_{}", i + 1, j + 1), d[i][j]);
            label(&mut g, format!("e{}_{}", i + 1, j + 1), e[i][j]);
        }
    }
    for (i, j, p, q, r, s) in pqrs {
        label(&mut g, format!("p{}_{}", i + 1, j + 1), p);
        label(&mut g, format!("q{}_{}", i + 1, j + 1), q);
        label(&mut g, format!("r{}_{}", i + 1, j + 1), r);
        label(&mut g, format!("s{}_{}", i + 1, j + 1), s);
    }
    g
}

/// Build the named gadget. Identical specs produce identical graphs,
/// including vertex indices and labels.
pub fn build_gadget(spec: GadgetSpec) -> Result<Graph, GadgetError> {
    if spec.k < 1 {
        return Err(GadgetError::BadFanWidth(spec.k));
    }
    Ok(match spec.name {
        GadgetName::L1 => build_l1(),
        GadgetName::L2 => build_l2(),
        GadgetName::L3 => build_l3(spec.k),
        GadgetName::L4 => build_l4(spec.k),
        GadgetName::G => build_g(spec.k),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Which induced subgadget of G to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgadgetRef {
    /// {a, b} with c_i, d_i1, e_i1, q_i1 over all fans: isomorphic to L4.
    L4,
    /// Fan i on one side: {a, c_i, d_ij, p_ij, q_ij} (side A) or
    /// {b, c_i, e_ij, r_ij, s_ij} (side B): isomorphic to L3.
    L3At { i: u32, side: Side },
}

/// A label-to-vertex embedding of a gadget into a host graph: pairs of
/// (gadget label, host vertex).
pub type Embedding = Vec<(String, Vertex)>;

fn host_label(g: &Graph, name: &str) -> Result<Vertex, GadgetError> {
    g.label(name).ok_or_else(|| GadgetError::MissingLabel(name.to_string()))
}

/// Vertex subset of a graph built as gadget G that induces a copy of L4 or
/// L3, returned as an explicit label bijection into the host.
pub fn embedded_subgadget(
    g: &Graph,
    k: u32,
    which: SubgadgetRef,
) -> Result<Embedding, GadgetError> {
    let mut map = Vec::new();
    match which {
        SubgadgetRef::L4 => {
            map.push(("a".to_string(), host_label(g, "a")?));
            map.push(("b".to_string(), host_label(g, "b")?));
            for i in 1..=k {
                map.push((format!("c{}", i), host_label(g, &format!("c{}", i))?));
                map.push((format!("x{}", i), host_label(g, &format!("d{}_1", i))?));
                map.push((format!("y{}", i), host_label(g, &format!("e{}_1", i))?));
                map.push((format!("z{}", i), host_label(g, &format!("q{}_1", i))?));
            }
        }
        SubgadgetRef::L3At { i, side } => {
            if i < 1 || i > k {
                return Err(GadgetError::FanIndexOutOfRange(i, k));
            }
            match side {
                Side::A => {
                    map.push(("a".to_string(), host_label(g, "a")?));
                    map.push(("b".to_string(), host_label(g, &format!("c{}", i))?));
                    for j in 1..=k {
                        map.push((
                            format!("c{}", j),
                            host_label(g, &format!("d{}_{}", i, j))?,
                        ));
                        map.push((
                            format!("x{}", j),
                            host_label(g, &format!("p{}_{}", i, j))?,
                        ));
                        map.push((
                            format!("y{}", j),
                            host_label(g, &format!("q{}_{}", i, j))?,
                        ));
                    }
                }
                Side::B => {
                    map.push(("a".to_string(), host_label(g, "b")?));
                    map.push(("b".to_string(), host_label(g, &format!("c{}", i))?));
                    for j in 1..=k {
                        map.push((
                            format!("c{}", j),
                            host_label(g, &format!("e{}_{}", i, j))?,
                        ));
                        map.push((
                            format!("x{}", j),
                            host_label(g, &format!("r{}_{}", i, j))?,
                        ));
                        map.push((
                            format!("y{}", j),
                            host_label(g, &format!("s{}_{}", i, j))?,
                        ));
                    }
                }
            }
        }
    }
    Ok(map)
}

/// Check that `embedding` maps the labeled pattern gadget onto an induced
/// subgraph of `host` edge-for-edge. Returns the offending label pair on
/// failure.
pub fn check_embedding(
    host: &Graph,
    pattern: &Graph,
    embedding: &Embedding,
) -> Result<(), (String, String)> {
    let lookup = |name: &str| -> Vertex {
        embedding
            .iter()
            .find(|(l, _)| l == name)
            .map(|&(_, v)| v)
            .expect("embedding covers every pattern label")
    };
    let labels: Vec<(&str, Vertex)> = pattern.labels().collect();
    for (ai, &(la, pa)) in labels.iter().enumerate() {
        for &(lb, pb) in &labels[ai + 1..] {
            let ha = lookup(la);
            let hb = lookup(lb);
            if pattern.has_edge(pa, pb) != host.has_edge(ha, hb) {
                return Err((la.to_string(), lb.to_string()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gadget(name: GadgetName, k: u32) -> Graph {
        build_gadget(GadgetSpec::new(name, k).unwrap()).unwrap()
    }

    #[test]
    fn gadget_sizes() {
        let l1 = gadget(GadgetName::L1, 5);
        assert_eq!((l1.n(), l1.m()), (4, 4));
        let l2 = gadget(GadgetName::L2, 5);
        assert_eq!((l2.n(), l2.m()), (5, 7));
        let l3 = gadget(GadgetName::L3, 5);
        assert_eq!((l3.n(), l3.m()), (17, 31));
        let l4 = gadget(GadgetName::L4, 5);
        assert_eq!((l4.n(), l4.m()), (22, 41));
        let g = gadget(GadgetName::G, 5);
        assert_eq!((g.n(), g.m()), (157, 311));
    }

    #[test]
    fn size_formulas_hold_for_all_small_k() {
        for k in 1..=6 {
            let l3 = gadget(GadgetName::L3, k);
            assert_eq!(l3.n(), 2 + 3 * k);
            let l4 = gadget(GadgetName::L4, k);
            assert_eq!(l4.n(), 2 + 4 * k);
            let g = gadget(GadgetName::G, k);
            assert_eq!(g.n(), 2 + k + 6 * k * k);
            assert_eq!(g.m() as u32, 2 * g.n() - 3);
        }
    }

    #[test]
    fn gadget_class_membership() {
        // Everything built purely by splits is a 2-tree; L1's pendant keeps
        // it series-parallel but not a 2-tree.
        let l1 = gadget(GadgetName::L1, 5);
        assert!(l1.is_series_parallel());
        assert!(!l1.is_2_tree());
        for name in [GadgetName::L2, GadgetName::L3, GadgetName::L4, GadgetName::G] {
            let g = gadget(name, 3);
            assert!(g.is_2_tree(), "{name} should be a 2-tree");
            assert!(g.is_series_parallel());
        }
    }

    #[test]
    fn l2_reduces_in_construction_order() {
        let l2 = gadget(GadgetName::L2, 5);
        assert!(l2.is_2_tree());
    }

    #[test]
    fn determinism() {
        let a = gadget(GadgetName::G, 4);
        let b = gadget(GadgetName::G, 4);
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_specs() {
        assert_eq!(GadgetSpec::new(GadgetName::L3, 0), Err(GadgetError::BadFanWidth(0)));
        assert!("L9".parse::<GadgetName>().is_err());
    }

    #[test]
    fn embeddings_are_induced_copies() {
        for k in [1, 3, 5] {
            let g = gadget(GadgetName::G, k);
            let l4 = gadget(GadgetName::L4, k);
            let emb = embedded_subgadget(&g, k, SubgadgetRef::L4).unwrap();
            assert_eq!(emb.len(), (2 + 4 * k) as usize);
            assert_eq!(check_embedding(&g, &l4, &emb), Ok(()));

            let l3 = gadget(GadgetName::L3, k);
            for i in 1..=k {
                for side in [Side::A, Side::B] {
                    let emb = embedded_subgadget(&g, k, SubgadgetRef::L3At { i, side }).unwrap();
                    assert_eq!(emb.len(), (2 + 3 * k) as usize);
                    assert_eq!(check_embedding(&g, &l3, &emb), Ok(()));
                }
            }
        }
    }

    #[test]
    fn embedding_rejects_bad_fan_index() {
        let g = gadget(GadgetName::G, 2);
        assert!(matches!(
            embedded_subgadget(&g, 2, SubgadgetRef::L3At { i: 3, side: Side::A }),
            Err(GadgetError::FanIndexOutOfRange(3, 2))
        ));
    }
}

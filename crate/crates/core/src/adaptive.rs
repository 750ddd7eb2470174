//! Adaptive MBQCs as scheduled DAGs of non-adaptive GHZ components.
//!
//! Each node is a deterministic component whose inputs come from global
//! input bits or from earlier nodes' outputs. Global inputs sit at label 0,
//! so every node label is at least 1 and labels strictly increase along
//! every edge.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::BoolFn;
use crate::compiler::{compile_general, MeasurementScheme, SchemeJson};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "src", rename_all = "lowercase")]
pub enum Source {
    Global { bit: usize },
    Node { id: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub scheme: MeasurementScheme,
    /// Source of component input `x_{j+1}`.
    pub inputs: Vec<Source>,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptiveGraph {
    pub n_inputs: usize,
    pub nodes: Vec<Node>,
    pub output: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CostMetrics {
    /// Largest schedule label.
    pub depth: usize,
    /// Steps counting the global-input layer as one, i.e. `depth + 1`.
    pub depth_with_inputs: usize,
    pub width: usize,
    pub volume: usize,
    /// Qubits needed when each is reset and reused between labels.
    pub qubit_reuse_count: usize,
    pub components: usize,
}

impl AdaptiveGraph {
    fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.iter().enumerate().flat_map(|(to, node)| {
            node.inputs.iter().filter_map(move |s| match *s {
                Source::Node { id } => Some((id, to)),
                Source::Global { .. } => None,
            })
        })
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n_inputs: Some(self.n_inputs),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson { scheme: n.scheme.to_json(), inputs: n.inputs.clone(), label: n.label })
                .collect(),
            output: self.output,
        }
    }
}

/// Checks wiring, acyclicity and schedule monotonicity, then computes costs.
pub fn validate(g: &AdaptiveGraph) -> Result<CostMetrics> {
    if g.nodes.is_empty() {
        return Err(Error::InvalidGraph("no nodes".into()));
    }
    if g.output >= g.nodes.len() {
        return Err(Error::InvalidGraph(format!("output node {} does not exist", g.output)));
    }
    for (id, node) in g.nodes.iter().enumerate() {
        if node.inputs.len() != node.scheme.n() {
            return Err(Error::InvalidGraph(format!(
                "node {id} has {} inputs wired for arity {}",
                node.inputs.len(),
                node.scheme.n()
            )));
        }
        if node.label == 0 {
            return Err(Error::InvalidGraph(format!("node {id} has label 0, reserved for global inputs")));
        }
        for s in &node.inputs {
            match *s {
                Source::Global { bit } if bit >= g.n_inputs => {
                    return Err(Error::InvalidGraph(format!("node {id} reads global bit {bit} of {}", g.n_inputs)));
                }
                Source::Node { id: src } if src >= g.nodes.len() => {
                    return Err(Error::InvalidGraph(format!("node {id} reads missing node {src}")));
                }
                _ => {}
            }
        }
    }
    topological_order(g)?;
    if let Some((from, to)) = g.edges().find(|&(a, b)| g.nodes[a].label >= g.nodes[b].label) {
        return Err(Error::ScheduleViolation { from, to });
    }
    let mut per_label: BTreeMap<usize, usize> = BTreeMap::new();
    for node in &g.nodes {
        *per_label.entry(node.label).or_default() += node.scheme.num_qubits();
    }
    let depth = *per_label.keys().next_back().expect("nonempty");
    let width = per_label.values().copied().max().unwrap_or(0);
    Ok(CostMetrics {
        depth,
        depth_with_inputs: depth + 1,
        width,
        volume: g.nodes.iter().map(|n| n.scheme.num_qubits()).sum(),
        qubit_reuse_count: width,
        components: g.nodes.len(),
    })
}

/// Kahn's algorithm; reports a node on a cycle if one exists.
fn topological_order(g: &AdaptiveGraph) -> Result<Vec<usize>> {
    let mut indegree = vec![0usize; g.nodes.len()];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); g.nodes.len()];
    for (from, to) in g.edges() {
        indegree[to] += 1;
        out[from].push(to);
    }
    let mut queue: VecDeque<usize> = (0..g.nodes.len()).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(g.nodes.len());
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &out[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    match (0..g.nodes.len()).find(|&v| indegree[v] > 0) {
        Some(v) => Err(Error::Cycle(v)),
        None => Ok(order),
    }
}

/// Runs the components label by label. Nodes sharing a label are
/// independent and evaluated in parallel.
pub fn execute(g: &AdaptiveGraph, input: usize) -> Result<u8> {
    validate(g)?;
    if g.n_inputs < usize::BITS as usize && input >> g.n_inputs != 0 {
        return Err(Error::Invalid(format!("input {input:#b} exceeds {} bits", g.n_inputs)));
    }
    let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (id, node) in g.nodes.iter().enumerate() {
        by_label.entry(node.label).or_default().push(id);
    }
    let mut values: Vec<Option<u8>> = vec![None; g.nodes.len()];
    for ids in by_label.values() {
        let produced: Vec<(usize, u8)> = ids
            .par_iter()
            .map(|&id| {
                let node = &g.nodes[id];
                let local = node.inputs.iter().enumerate().fold(0usize, |acc, (j, s)| {
                    let bit = match *s {
                        Source::Global { bit } => ((input >> bit) & 1) as u8,
                        Source::Node { id: src } => values[src].expect("schedule orders producers first"),
                    };
                    acc | (bit as usize) << j
                });
                let v = node.scheme.phase_sum(local);
                if !v.is_integer() {
                    return Err(Error::NonDeterministic { input: local, value: v.to_string() });
                }
                Ok((id, v.num() as u8))
            })
            .collect::<Result<_>>()?;
        for (id, bit) in produced {
            values[id] = Some(bit);
        }
    }
    Ok(values[g.output].expect("output executed"))
}

/// Truth table of the whole graph over all `2^{n_inputs}` inputs.
pub fn execute_all(g: &AdaptiveGraph) -> Result<BoolFn> {
    let table: Vec<u8> = (0..1usize << g.n_inputs).map(|i| execute(g, i)).collect::<Result<_>>()?;
    BoolFn::from_bits(g.n_inputs, &table)
}

fn and_box() -> MeasurementScheme {
    compile_general(&BoolFn::and_n(2).expect("arity 2")).expect("AND_2 compiles")
}

fn check_fan_in(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::ArityOutOfRange { n, min: 2, max: usize::BITS as usize - 1 });
    }
    Ok(())
}

/// `n − 1` AND boxes in sequence; box `t` has label `t`.
pub fn chain_and(n: usize) -> Result<AdaptiveGraph> {
    check_fan_in(n)?;
    let nodes = (0..n - 1)
        .map(|t| {
            let left = if t == 0 { Source::Global { bit: 0 } } else { Source::Node { id: t - 1 } };
            Node { scheme: and_box(), inputs: vec![left, Source::Global { bit: t + 1 }], label: t + 1 }
        })
        .collect();
    Ok(AdaptiveGraph { n_inputs: n, nodes, output: n - 2 })
}

/// Balanced binary tree of AND boxes of depth `⌈log2 n⌉`. An odd element
/// at a level is carried up unchanged.
pub fn tree_and(n: usize) -> Result<AdaptiveGraph> {
    check_fan_in(n)?;
    let mut nodes = Vec::new();
    let mut level: Vec<Source> = (0..n).map(|bit| Source::Global { bit }).collect();
    let mut label = 0;
    while level.len() > 1 {
        label += 1;
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        for pair in level.chunks(2) {
            if let [a, b] = *pair {
                nodes.push(Node { scheme: and_box(), inputs: vec![a, b], label });
                next.push(Source::Node { id: nodes.len() - 1 });
            } else {
                next.push(pair[0]);
            }
        }
        level = next;
    }
    let output = nodes.len() - 1;
    Ok(AdaptiveGraph { n_inputs: n, nodes, output })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub scheme: SchemeJson,
    pub inputs: Vec<Source>,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    /// Inferred from the largest global bit when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_inputs: Option<usize>,
    pub nodes: Vec<NodeJson>,
    pub output: usize,
}

impl GraphJson {
    pub fn to_graph(&self) -> Result<AdaptiveGraph> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Ok(Node { scheme: n.scheme.to_scheme()?, inputs: n.inputs.clone(), label: n.label }))
            .collect::<Result<Vec<_>>>()?;
        let inferred = nodes
            .iter()
            .flat_map(|n| n.inputs.iter())
            .filter_map(|s| match *s {
                Source::Global { bit } => Some(bit + 1),
                Source::Node { .. } => None,
            })
            .max()
            .unwrap_or(0);
        Ok(AdaptiveGraph { n_inputs: self.n_inputs.unwrap_or(inferred), nodes, output: self.output })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::clifford_level;
    use crate::qcount::r_ghz_exact;
    use crate::simulator::{run, DEFAULT_TOL};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_node() {
        let s = compile_general(&BoolFn::and_n(3).unwrap()).unwrap();
        let g = AdaptiveGraph {
            n_inputs: 3,
            nodes: vec![Node { scheme: s, inputs: (0..3).map(|bit| Source::Global { bit }).collect(), label: 1 }],
            output: 0,
        };
        let m = validate(&g).unwrap();
        assert_eq!((m.depth, m.width, m.volume), (1, 7, 7));
        assert_eq!(execute_all(&g).unwrap(), BoolFn::and_n(3).unwrap());
    }

    #[test]
    fn chain_metrics() {
        let m = validate(&chain_and(2).unwrap()).unwrap();
        assert_eq!((m.depth, m.width, m.volume), (1, 3, 3));
        let m = validate(&chain_and(4).unwrap()).unwrap();
        assert_eq!((m.depth, m.depth_with_inputs, m.width, m.volume), (3, 4, 3, 9));
        assert_eq!(m.qubit_reuse_count, 3);
    }

    #[test]
    fn parallel_boxes_share_width() {
        let g = AdaptiveGraph {
            n_inputs: 4,
            nodes: vec![
                Node { scheme: and_box(), inputs: vec![Source::Global { bit: 0 }, Source::Global { bit: 1 }], label: 1 },
                Node { scheme: and_box(), inputs: vec![Source::Global { bit: 2 }, Source::Global { bit: 3 }], label: 1 },
            ],
            output: 1,
        };
        assert_eq!(validate(&g).unwrap().width, 6);
    }

    #[test]
    fn tree_metrics() {
        let m = validate(&tree_and(4).unwrap()).unwrap();
        assert_eq!(m.depth, 2);
        let m = validate(&tree_and(8).unwrap()).unwrap();
        assert_eq!((m.depth, m.components, m.volume), (3, 7, 21));
        for n in 2..=33 {
            let m = validate(&tree_and(n).unwrap()).unwrap();
            assert_eq!(m.depth, (n as f64).log2().ceil() as usize, "n={n}");
            assert_eq!(m.components, n - 1);
        }
    }

    #[test]
    fn chain_and_tree_compute_and() {
        let chain = chain_and(4).unwrap();
        assert_eq!(execute(&chain, 0b1111).unwrap(), 1);
        for i in 0..15 {
            assert_eq!(execute(&chain, i).unwrap(), 0);
        }
        let tree = tree_and(4).unwrap();
        for i in 0..16 {
            assert_eq!(execute(&tree, i).unwrap(), execute(&chain, i).unwrap());
        }
        assert_eq!(execute_all(&chain).unwrap(), BoolFn::and_n(4).unwrap());
        let tree8 = tree_and(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let i = rng.gen_range(0..256usize);
            assert_eq!(execute(&tree8, i).unwrap(), u8::from(i == 255));
        }
        assert_eq!(execute(&tree8, 255).unwrap(), 1);
        assert!(execute(&tree8, 256).is_err());
    }

    #[test]
    fn space_collapse() {
        for n in 3..=10 {
            let chain = chain_and(n).unwrap();
            let m = validate(&chain).unwrap();
            assert_eq!(m.volume, 3 * (n - 1));
            let non_adaptive = if n <= 4 {
                r_ghz_exact(&BoolFn::and_n(n).unwrap(), None).unwrap().count
            } else {
                compile_general(&BoolFn::and_n(n).unwrap()).unwrap().num_qubits()
            };
            assert_eq!(non_adaptive, (1 << n) - 1);
            assert!(m.volume < non_adaptive);
        }
    }

    #[test]
    fn level_two_boxes_compute_high_degree() {
        for n in 2..=8 {
            let chain = chain_and(n).unwrap();
            assert!(chain.nodes.iter().all(|node| clifford_level(&node.scheme) == 2));
            assert_eq!(execute_all(&chain).unwrap().degree(), n);
        }
    }

    #[test]
    fn component_bits_match_simulation() {
        let r = run(&and_box(), Some(&BoolFn::and_n(2).unwrap()), DEFAULT_TOL).unwrap();
        assert!(r.all_deterministic());
    }

    #[test]
    fn rejects_bad_graphs() {
        let mut g = chain_and(3).unwrap();
        g.nodes[0].inputs[0] = Source::Node { id: 1 };
        assert!(matches!(validate(&g), Err(Error::Cycle(_))));
        let mut g = chain_and(3).unwrap();
        g.nodes[1].label = 1;
        assert_eq!(validate(&g), Err(Error::ScheduleViolation { from: 0, to: 1 }));
        let mut g = chain_and(3).unwrap();
        g.nodes[0].inputs.pop();
        assert!(matches!(validate(&g), Err(Error::InvalidGraph(_))));
        let mut g = chain_and(3).unwrap();
        g.nodes[0].label = 0;
        assert!(matches!(validate(&g), Err(Error::InvalidGraph(_))));
        let mut g = chain_and(3).unwrap();
        g.output = 7;
        assert!(matches!(validate(&g), Err(Error::InvalidGraph(_))));
        let mut g = chain_and(3).unwrap();
        g.nodes[0].inputs[0] = Source::Global { bit: 9 };
        assert!(matches!(validate(&g), Err(Error::InvalidGraph(_))));
        let mut g = chain_and(3).unwrap();
        g.nodes[0].inputs[0] = Source::Node { id: 0 };
        assert_eq!(validate(&g), Err(Error::Cycle(0)));
        assert!(chain_and(1).is_err() && tree_and(0).is_err());
    }

    #[test]
    fn nondeterministic_component_is_reported() {
        use crate::dyadic::Dyadic;
        let s = MeasurementScheme::new(1, [(1, Dyadic::new(1, 1))], 0).unwrap();
        let g = AdaptiveGraph {
            n_inputs: 1,
            nodes: vec![Node { scheme: s, inputs: vec![Source::Global { bit: 0 }], label: 1 }],
            output: 0,
        };
        assert_eq!(execute(&g, 0).unwrap(), 0);
        assert!(matches!(execute(&g, 1), Err(Error::NonDeterministic { .. })));
    }

    #[test]
    fn json_round_trip() {
        let g = tree_and(5).unwrap();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        assert!(text.contains(r#"{"src":"global","bit":0}"#));
        assert!(text.contains(r#"{"src":"node","id":0}"#));
        let back: GraphJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_graph().unwrap(), g);
        let mut stripped = back.clone();
        stripped.n_inputs = None;
        assert_eq!(stripped.to_graph().unwrap().n_inputs, 5);
    }

    proptest! {
        #[test]
        fn relabelings_respect_monotonicity(n in 2usize..10, labels in proptest::collection::vec(1usize..12, 9), tree in any::<bool>()) {
            let mut g = if tree { tree_and(n).unwrap() } else { chain_and(n).unwrap() };
            for (node, &l) in g.nodes.iter_mut().zip(&labels) {
                node.label = l;
            }
            let monotone = g.edges().all(|(a, b)| g.nodes[a].label < g.nodes[b].label);
            match validate(&g) {
                Ok(m) => {
                    prop_assert!(monotone);
                    prop_assert_eq!(m.depth, g.nodes.iter().map(|x| x.label).max().unwrap());
                    prop_assert_eq!(execute_all(&g).unwrap(), BoolFn::and_n(n).unwrap());
                }
                Err(Error::ScheduleViolation { from, to }) => {
                    prop_assert!(!monotone);
                    prop_assert!(g.nodes[from].label >= g.nodes[to].label);
                }
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }
}

//! Graphs, tree decompositions and their nice form.

pub mod decomposition;
pub mod elimination;
pub mod graph;
pub mod nice;

pub use decomposition::{TreeDecomposition, MAX_BAG};
pub use elimination::min_degree_decomposition;
pub use graph::{Edge, Graph, UnionFind};
pub use nice::{fuse_nodes, make_nice, NiceNode, NiceTd, NodeKind, NODE_BOUND_C};

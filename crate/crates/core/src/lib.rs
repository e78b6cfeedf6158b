pub mod numeric;
pub mod cfrac;
pub mod matcls;
pub mod cgap;
pub mod balanced;
pub mod sturmian;
pub mod forcing;
pub mod tails_graph;
pub mod search;

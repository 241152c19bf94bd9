//! Programs bundled with the binary.

pub const IS_LIST: &str = include_str!("../programs/is_list.pl");
pub const EDIT: &str = include_str!("../programs/edit.pl");
pub const CREATE_LIST: &str = include_str!("../programs/create_list.pl");
/// Left-recursive transitive closure over `edge/2`.
pub const PATH_RULES: &str = include_str!("../programs/path.pl");
pub const PATH: &str = concat!(include_str!("../programs/path.pl"), include_str!("../programs/graph.pl"));
/// Loaded into every engine whose program does not define `range/3`.
pub const LIBRARY: &str = include_str!("../programs/library.pl");

pub const ALL: [(&str, &str); 4] = [("is_list", IS_LIST), ("edit", EDIT), ("create_list", CREATE_LIST), ("path", PATH)];

/// `path/2` over the given edges between nodes `n0, n1, ...`.
pub fn path_program(edges: &[(usize, usize)]) -> String {
    let mut text = String::from(PATH_RULES);
    if edges.is_empty() {
        text.push_str("edge(_, _) :- fail.\n");
    }
    for (a, b) in edges {
        text.push_str(&format!("edge(n{a}, n{b}).\n"));
    }
    text
}

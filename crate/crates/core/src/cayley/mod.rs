//! Cayley graphs of free groups and lattices with their word metrics.
//!
//! Two families are supported: free groups `F_k` (standard basis, or any
//! finite generating set given as words) and lattices `Z^d` with an
//! arbitrary finite symmetric generating set. Both have cheap word problems,
//! so every distance here is exact.

mod ball;
mod element;
mod metric;
mod spec;

pub use ball::{build_ball, estimate_ball_size, sphere, CayleyBall, DEFAULT_CAP};
pub use element::{format_word, letter_char, GroupElement, Letter};
pub use metric::{on_geodesic, word_norm, WordMetric};
pub(crate) use spec::parse_vector_list;
pub use spec::{parse_group_spec, GroupSpec};

/// Left action `g·x`.
pub fn act(spec: &GroupSpec, g: &GroupElement, x: &GroupElement) -> crate::Result<GroupElement> {
    spec.multiply(g, x)
}

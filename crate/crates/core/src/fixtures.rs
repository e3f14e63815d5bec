//! The shipped example systems.

pub const MIRROR: &str = include_str!("../fixtures/mirror.gnf");
pub const IDENTITY: &str = include_str!("../fixtures/identity.gnf");
pub const DOUBLING: &str = include_str!("../fixtures/doubling.gnf");
pub const EMPTY: &str = include_str!("../fixtures/empty.gnf");
pub const C1_NESTED: &str = include_str!("../fixtures/c1_nested.gnf");
pub const C2_SHARED: &str = include_str!("../fixtures/c2_shared.gnf");
pub const C3_COOCCUR: &str = include_str!("../fixtures/c3_cooccur.gnf");
pub const ALL_OPS: &str = include_str!("../fixtures/all_ops.gnf");

//! Normal-form and extensive-form games of complete information.

mod extensive;
mod normal;

pub use extensive::{
    corresponds, ExtensiveFormGame, Infoset, InfosetId, Node, NodeId, NodeKind, NodeSpec, NormalFormConversion,
    PureStrategy, Violation, DEFAULT_STRATEGY_CAP,
};
pub use normal::{NormalFormGame, PlayerId, Profile};

//! Runs the Rust listings of the guide in `book/` as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/games.md")]
pub mod games {}
#[doc = include_str!("../../../book/src/correlated.md")]
pub mod correlated {}
#[doc = include_str!("../../../book/src/quantum.md")]
pub mod quantum {}
#[doc = include_str!("../../../book/src/deviations.md")]
pub mod deviations {}
#[doc = include_str!("../../../book/src/extensive.md")]
pub mod extensive {}
#[doc = include_str!("../../../book/src/ghz.md")]
pub mod ghz {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

//! The guide in `book/` keeps its code listings in Markdown. Each chapter is
//! pulled in here as the docs of an empty module so that `cargo test --doc`
//! compiles and runs every listing, and a failure names the chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/words.md")]
pub mod words {}
#[doc = include_str!("../../../book/src/substitutions.md")]
pub mod substitutions {}
#[doc = include_str!("../../../book/src/automorphisms.md")]
pub mod automorphisms {}
#[doc = include_str!("../../../book/src/graphmap.md")]
pub mod graphmap {}
#[doc = include_str!("../../../book/src/burnside.md")]
pub mod burnside {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}

//! Guide chapters compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/profiles.md")]
pub mod profiles {}
#[doc = include_str!("../../../book/src/calculus.md")]
pub mod calculus {}
#[doc = include_str!("../../../book/src/functional.md")]
pub mod functional {}
#[doc = include_str!("../../../book/src/subcritical.md")]
pub mod subcritical {}
#[doc = include_str!("../../../book/src/exhaustion.md")]
pub mod exhaustion {}
#[doc = include_str!("../../../book/src/blowup.md")]
pub mod blowup {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/limits.md")]
pub mod limits {}

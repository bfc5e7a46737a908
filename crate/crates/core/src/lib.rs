//! Exact invariants of 2-knots from Seifert data. See `book/` for a guide.

pub mod linalg;
pub mod groups;
pub mod laurent;
pub mod seifert;
pub mod pairing;
pub mod eta;
pub mod moves;
pub mod cocycle;
pub mod format;
pub mod cli;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/groups.md")]
    struct Groups;
    #[doc = include_str!("../../../book/src/alexander.md")]
    struct Alexander;
    #[doc = include_str!("../../../book/src/pairing.md")]
    struct Pairing;
    #[doc = include_str!("../../../book/src/eta.md")]
    struct Eta;
    #[doc = include_str!("../../../book/src/moves.md")]
    struct Moves;
    #[doc = include_str!("../../../book/src/cocycle.md")]
    struct Cocycle;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}

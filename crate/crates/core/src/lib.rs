//! A typed lambda calculus with fixed points and oracle constants, with two
//! semantics that can be checked against each other on finite models:
//! exact denotations in truncated partial type structures, and computation
//! trees built by head reduction. Alongside sit exact rational
//! representations of clopen sets, interval unions and step functions, and
//! the effective constructions that operate on them.

pub mod cli;
pub mod corpus;
pub mod domains;
pub mod effsets;
pub mod fineval;
pub mod optree;
pub mod oracles;
pub mod reductions;
pub mod syntax;

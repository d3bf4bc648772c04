//! Decision procedures for string constraints over infinite alphabets.

pub mod automata;
pub mod cli;
pub mod sl;
pub mod theory;
pub mod transducers;
pub mod wordeq;

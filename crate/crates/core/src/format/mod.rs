//! Text formats: game files, strategy files and Graphviz output.

mod dot;
mod game;
mod strategy;

pub use dot::{arena_dot, buchi_dot, game_dot, mpg_dot};
pub use game::{parse_game, write_game};
pub use strategy::{parse_strategy, write_strategy};

pub mod chart;
pub mod cnf;
pub mod config;
pub mod gen;
pub mod net;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod sudoku;
pub mod sweep;

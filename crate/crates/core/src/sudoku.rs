//! 9×9 Sudoku as CNF.
//!
//! Variable `x(r, c, d)` ("cell (r, c) holds digit d", all 1-based) has index
//! `81(r-1) + 9(c-1) + d`. The extended encoding asks for at least one and at
//! most one digit per cell, and at least one and at most one cell per digit
//! in every row, column, and box. Givens follow as unit clauses.

use std::fmt;

use thiserror::Error;

use crate::cnf::{Assignment, Clause, CnfFormula, Lit};
use crate::solver::{solve, SolveResult, SolverLimits, Status};

pub const NUM_VARS: u32 = 729;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SudokuError {
    #[error("grid has {0} cells, expected 81")]
    Length(usize),
    #[error("invalid grid character `{0}`")]
    Char(char),
    #[error("digit {digit} appears twice in {unit}")]
    Conflict { digit: u8, unit: String },
    #[error("model gives cell ({row}, {col}) {count} digits")]
    Cell {
        row: usize,
        col: usize,
        count: usize,
    },
    #[error("model needs {NUM_VARS} variables, got {0}")]
    ModelSize(u32),
}

pub fn var(row: usize, col: usize, digit: u8) -> u32 {
    debug_assert!((1..=9).contains(&row) && (1..=9).contains(&col) && (1..=9).contains(&digit));
    (81 * (row - 1) + 9 * (col - 1)) as u32 + digit as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SudokuGrid {
    /// `cells[r][c]`, zero-based; 0 is blank.
    cells: [[u8; 9]; 9],
}

/// The 27 houses (rows, columns, boxes) as lists of zero-based cells.
fn houses() -> Vec<(String, [(usize, usize); 9])> {
    let mut out = Vec::with_capacity(27);
    for r in 0..9 {
        out.push((format!("row {}", r + 1), std::array::from_fn(|c| (r, c))));
    }
    for c in 0..9 {
        out.push((format!("column {}", c + 1), std::array::from_fn(|r| (r, c))));
    }
    for b in 0..9 {
        let (r0, c0) = (3 * (b / 3), 3 * (b % 3));
        out.push((
            format!("box {}", b + 1),
            std::array::from_fn(|i| (r0 + i / 3, c0 + i % 3)),
        ));
    }
    out
}

impl SudokuGrid {
    pub fn empty() -> Self {
        SudokuGrid { cells: [[0; 9]; 9] }
    }

    /// Builds a grid from zero-based rows, rejecting digits above 9 and conflicting givens.
    pub fn from_cells(cells: [[u8; 9]; 9]) -> Result<Self, SudokuError> {
        if let Some(&d) = cells.iter().flatten().find(|&&d| d > 9) {
            return Err(SudokuError::Char(
                char::from_digit(d as u32 % 36, 36).unwrap_or('?'),
            ));
        }
        let grid = SudokuGrid { cells };
        grid.check_givens()?;
        Ok(grid)
    }

    /// 81 characters from `1-9`, `.`, and `0`, whitespace ignored.
    pub fn parse(text: &str) -> Result<Self, SudokuError> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.len() != 81 {
            return Err(SudokuError::Length(chars.len()));
        }
        let mut cells = [[0u8; 9]; 9];
        for (i, &ch) in chars.iter().enumerate() {
            cells[i / 9][i % 9] = match ch {
                '.' | '0' => 0,
                '1'..='9' => ch as u8 - b'0',
                other => return Err(SudokuError::Char(other)),
            };
        }
        Self::from_cells(cells)
    }

    fn check_givens(&self) -> Result<(), SudokuError> {
        for (name, cells) in houses() {
            let mut seen = [false; 10];
            for (r, c) in cells {
                let d = self.cells[r][c];
                if d != 0 {
                    if seen[d as usize] {
                        return Err(SudokuError::Conflict {
                            digit: d,
                            unit: name,
                        });
                    }
                    seen[d as usize] = true;
                }
            }
        }
        Ok(())
    }

    /// Digit at 1-based `(row, col)`, 0 when blank.
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row - 1][col - 1]
    }

    pub fn givens(&self) -> usize {
        self.cells.iter().flatten().filter(|&&d| d != 0).count()
    }

    /// Every cell filled and every house a permutation of 1..=9.
    pub fn is_solved(&self) -> bool {
        self.givens() == 81 && self.check_givens().is_ok()
    }

    /// True if `other` keeps every given of `self`.
    pub fn is_completed_by(&self, other: &SudokuGrid) -> bool {
        self.cells
            .iter()
            .flatten()
            .zip(other.cells.iter().flatten())
            .all(|(&a, &b)| a == 0 || a == b)
    }
}

/// Nine lines of nine characters, `.` for blanks.
impl fmt::Display for SudokuGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.cells {
            for &d in row {
                let ch = if d == 0 { '.' } else { (b'0' + d) as char };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn at_most_one(out: &mut Vec<Clause>, vars: &[u32; 9]) {
    for (i, &a) in vars.iter().enumerate() {
        for &b in &vars[i + 1..] {
            out.push(Clause::new([Lit::neg(a), Lit::neg(b)]).expect("distinct variables"));
        }
    }
}

fn at_least_one(vars: &[u32; 9]) -> Clause {
    Clause::new(vars.iter().map(|&v| Lit::pos(v))).expect("distinct variables")
}

pub fn encode(grid: &SudokuGrid) -> CnfFormula {
    // Variable groups: one per cell, then one per (house, digit).
    let mut groups: Vec<[u32; 9]> = Vec::with_capacity(324);
    for r in 1..=9 {
        for c in 1..=9 {
            groups.push(std::array::from_fn(|i| var(r, c, i as u8 + 1)));
        }
    }
    for (_, cells) in houses() {
        for d in 1..=9u8 {
            groups.push(std::array::from_fn(|i| {
                var(cells[i].0 + 1, cells[i].1 + 1, d)
            }));
        }
    }
    let mut clauses: Vec<Clause> = groups.iter().map(at_least_one).collect();
    for group in &groups {
        at_most_one(&mut clauses, group);
    }
    for r in 1..=9 {
        for c in 1..=9 {
            let d = grid.get(r, c);
            if d != 0 {
                clauses.push(Clause::new([Lit::pos(var(r, c, d))]).expect("one literal"));
            }
        }
    }
    CnfFormula::new(NUM_VARS, clauses)
        .expect("sudoku variables are in range")
        .with_origin(format!("sudoku givens={}", grid.givens()))
}

pub fn decode_model(model: &Assignment) -> Result<SudokuGrid, SudokuError> {
    if model.num_vars() != NUM_VARS {
        return Err(SudokuError::ModelSize(model.num_vars()));
    }
    let mut cells = [[0u8; 9]; 9];
    for r in 1..=9 {
        for c in 1..=9 {
            let digits: Vec<u8> = (1..=9u8)
                .filter(|&d| model.get(var(r, c, d)) == Some(true))
                .collect();
            if digits.len() != 1 {
                return Err(SudokuError::Cell {
                    row: r,
                    col: c,
                    count: digits.len(),
                });
            }
            cells[r - 1][c - 1] = digits[0];
        }
    }
    SudokuGrid::from_cells(cells)
}

/// Encodes, solves, and decodes. `Ok(None)` means the puzzle has no solution
/// (or the limits ran out, see the returned result's status).
pub fn solve_grid(
    grid: &SudokuGrid,
    limits: SolverLimits,
) -> Result<(Option<SudokuGrid>, SolveResult), SudokuError> {
    let result = solve(&encode(grid), limits);
    let solution = match (&result.status, &result.model) {
        (Status::Sat, Some(model)) => Some(decode_model(model)?),
        _ => None,
    };
    Ok((solution, result))
}

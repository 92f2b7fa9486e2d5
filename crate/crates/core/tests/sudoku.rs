use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use satlab::cnf::Evaluation;
use satlab::solver::{SolverLimits, Status};
use satlab::sudoku::{self, SudokuGrid};

const CLASSIC: &str =
    "53..7....6..195....98....6.8...6...34..8.3..17...2...6.6....28....419..5....8..79";
const HARD: &str =
    "8..........36......7..9.2...5...7.......457.....1...3...1....68..85...1..9....4..";

/// Plain backtracking over cells; returns up to `limit` solutions.
fn exhaustive(cells: &mut [u8; 81], limit: usize, found: &mut Vec<[u8; 81]>) {
    let Some(pos) = cells.iter().position(|&d| d == 0) else {
        found.push(*cells);
        return;
    };
    let (r, c) = (pos / 9, pos % 9);
    for d in 1..=9u8 {
        let clash = (0..9).any(|i| {
            cells[r * 9 + i] == d
                || cells[i * 9 + c] == d
                || cells[(r / 3 * 3 + i / 3) * 9 + c / 3 * 3 + i % 3] == d
        });
        if !clash {
            cells[pos] = d;
            exhaustive(cells, limit, found);
            cells[pos] = 0;
            if found.len() >= limit {
                return;
            }
        }
    }
}

fn cells_of(grid: &SudokuGrid) -> [u8; 81] {
    let mut out = [0; 81];
    for r in 1..=9 {
        for c in 1..=9 {
            out[(r - 1) * 9 + c - 1] = grid.get(r, c);
        }
    }
    out
}

fn text_of(cells: &[u8; 81]) -> String {
    cells
        .iter()
        .map(|&d| if d == 0 { '.' } else { (b'0' + d) as char })
        .collect()
}

fn check(puzzle: &str) {
    let grid = SudokuGrid::parse(puzzle).unwrap();
    let mut found = Vec::new();
    exhaustive(&mut cells_of(&grid), 2, &mut found);
    let (solution, result) = sudoku::solve_grid(&grid, SolverLimits::UNLIMITED).unwrap();
    match found.len() {
        0 => {
            assert_eq!(result.status, Status::Unsat, "{puzzle}");
            assert!(solution.is_none());
        }
        n => {
            let solution = solution.unwrap_or_else(|| panic!("no solution for {puzzle}"));
            assert!(solution.is_solved());
            assert!(grid.is_completed_by(&solution));
            // With several solutions any valid completion will do.
            if n == 1 {
                assert_eq!(cells_of(&solution), found[0], "{puzzle}");
            }
            let model = result.model.unwrap();
            assert_eq!(
                sudoku::encode(&grid).evaluate(&model),
                Evaluation::Satisfied
            );
        }
    }
}

#[test]
fn known_puzzles_match_exhaustive_search() {
    check(CLASSIC);
    check(HARD);
    check(&".".repeat(81));
}

#[test]
fn thinned_puzzles_match_exhaustive_search() {
    let grid = SudokuGrid::parse(CLASSIC).unwrap();
    let (full, _) = sudoku::solve_grid(&grid, SolverLimits::UNLIMITED).unwrap();
    let full = cells_of(&full.unwrap());
    let mut rng = SplitMix64::seed_from_u64(17);
    for keep in [20usize, 24, 28, 32, 40, 60] {
        for _ in 0..5 {
            let mut order: Vec<usize> = (0..81).collect();
            order.shuffle(&mut rng);
            let mut cells = [0u8; 81];
            for &i in &order[..keep] {
                cells[i] = full[i];
            }
            check(&text_of(&cells));
        }
    }
}

#[test]
fn parse_valid_but_unsolvable_grid() {
    // Cell (1,9) can only be 9, and column 9 already holds a 9.
    let grid = format!("12345678.........9{}", ".".repeat(63));
    check(&grid);
    let (solution, result) =
        sudoku::solve_grid(&SudokuGrid::parse(&grid).unwrap(), SolverLimits::UNLIMITED).unwrap();
    assert!(solution.is_none());
    assert_eq!(result.status, Status::Unsat);
}

#[test]
fn empty_grid_encoding_size() {
    let f = sudoku::encode(&SudokuGrid::empty());
    assert_eq!(f.num_vars(), 729);
    assert_eq!(f.num_clauses(), 11_988);
    let given = sudoku::encode(&SudokuGrid::parse(CLASSIC).unwrap());
    assert_eq!(given.num_clauses(), 11_988 + 30);
}

//! Chronological-backtracking DPLL with unit propagation.
//!
//! The search follows a fixed policy: propagate units to a fixpoint, then
//! branch on the first unassigned literal of the first clause that is not yet
//! satisfied, trying the literal as written before its negation. Satisfied
//! clauses count as removed and false literals as deleted, so "first clause"
//! and "first literal" refer to the simplified formula. State is restored
//! from an assignment trail instead of formula snapshots; the search tree is
//! the same.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cnf::{Assignment, CnfFormula, Evaluation, Lit};

/// Propagation steps between wall-clock checks.
const CLOCK_STRIDE: u64 = 4096;

/// Largest variable count [`brute_force`] accepts.
pub const BRUTE_FORCE_MAX_VARS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverLimits {
    /// Zero means unlimited.
    pub timeout: Duration,
    /// Zero means unlimited.
    pub max_backtracks: u64,
}

impl SolverLimits {
    pub const UNLIMITED: SolverLimits = SolverLimits {
        timeout: Duration::ZERO,
        max_backtracks: 0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
    Timeout,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Timeout => "TIMEOUT",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    /// Times the search returned to an open decision to try its opposite literal.
    pub backtracks: u64,
    /// Branch points opened.
    pub decisions: u64,
    pub elapsed: Duration,
    /// Total model, present iff `status == Sat`.
    pub model: Option<Assignment>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("brute force is limited to {max} variables, formula has {vars}")]
pub struct TooManyVars {
    pub vars: u32,
    pub max: u32,
}

/// Literal index: `2*(var-1)` for positive, `2*(var-1)+1` for negative.
fn code(lit: Lit) -> usize {
    2 * (lit.var() as usize - 1) + usize::from(!lit.is_positive())
}

struct Frame {
    trail_len: usize,
    lit: Lit,
    flipped: bool,
    /// No clause before this index is unsatisfied below this decision.
    first_open: usize,
}

struct Search<'f> {
    formula: &'f CnfFormula,
    /// Clause indices per literal code.
    occurs: Vec<Vec<u32>>,
    /// Per variable: 0 unassigned, 1 true, -1 false.
    value: Vec<i8>,
    true_count: Vec<u32>,
    false_count: Vec<u32>,
    trail: Vec<Lit>,
    pending: Vec<u32>,
    steps: u64,
}

impl<'f> Search<'f> {
    fn new(formula: &'f CnfFormula) -> Self {
        let n = formula.num_vars() as usize;
        let mut occurs = vec![Vec::new(); 2 * n];
        for (ci, clause) in formula.clauses().iter().enumerate() {
            for &lit in clause.lits() {
                occurs[code(lit)].push(ci as u32);
            }
        }
        let m = formula.num_clauses();
        Search {
            formula,
            occurs,
            value: vec![0; n + 1],
            true_count: vec![0; m],
            false_count: vec![0; m],
            trail: Vec::with_capacity(n),
            pending: Vec::new(),
            steps: 0,
        }
    }

    fn lit_value(&self, lit: Lit) -> i8 {
        let v = self.value[lit.var() as usize];
        if lit.is_positive() {
            v
        } else {
            -v
        }
    }

    /// Makes `lit` true. Returns false if some clause became empty.
    fn assign(&mut self, lit: Lit) -> bool {
        self.value[lit.var() as usize] = if lit.is_positive() { 1 } else { -1 };
        self.trail.push(lit);
        for &ci in &self.occurs[code(lit)] {
            self.true_count[ci as usize] += 1;
        }
        let mut ok = true;
        for &ci in &self.occurs[code(!lit)] {
            let c = ci as usize;
            self.false_count[c] += 1;
            if self.true_count[c] == 0 {
                let len = self.formula.clauses()[c].len() as u32;
                if self.false_count[c] == len {
                    ok = false;
                } else if self.false_count[c] + 1 == len {
                    self.pending.push(ci);
                }
            }
        }
        ok
    }

    fn undo_to(&mut self, trail_len: usize) {
        while self.trail.len() > trail_len {
            let lit = self.trail.pop().expect("trail longer than target");
            for &ci in &self.occurs[code(lit)] {
                self.true_count[ci as usize] -= 1;
            }
            for &ci in &self.occurs[code(!lit)] {
                self.false_count[ci as usize] -= 1;
            }
            self.value[lit.var() as usize] = 0;
        }
        self.pending.clear();
    }

    /// Assigns unit literals until none remain. Returns false on conflict.
    fn propagate(&mut self, clock: &Clock) -> Result<bool, Stop> {
        while let Some(ci) = self.pending.pop() {
            self.steps += 1;
            if self.steps.is_multiple_of(CLOCK_STRIDE) {
                clock.check()?;
            }
            let c = ci as usize;
            if self.true_count[c] > 0 {
                continue;
            }
            let clause = &self.formula.clauses()[c];
            let Some(&unit) = clause.lits().iter().find(|&&l| self.lit_value(l) == 0) else {
                return Ok(false);
            };
            if !self.assign(unit) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First literal to branch on, scanning clauses from `from`.
    fn branch_literal(&self, from: usize) -> Option<(usize, Lit)> {
        let clauses = self.formula.clauses();
        (from..clauses.len())
            .find(|&c| self.true_count[c] == 0)
            .map(|c| {
                let lit = *clauses[c]
                    .lits()
                    .iter()
                    .find(|&&l| self.lit_value(l) == 0)
                    .expect("open clause after propagation has a free literal");
                (c, lit)
            })
    }

    fn model(&self) -> Assignment {
        let n = self.formula.num_vars();
        let mut a = Assignment::new(n);
        for var in 1..=n {
            a.set(var, self.value[var as usize] > 0);
        }
        a
    }
}

struct Stop;

struct Clock {
    start: Instant,
    timeout: Duration,
}

impl Clock {
    fn check(&self) -> Result<(), Stop> {
        if !self.timeout.is_zero() && self.start.elapsed() >= self.timeout {
            Err(Stop)
        } else {
            Ok(())
        }
    }
}

pub fn solve(formula: &CnfFormula, limits: SolverLimits) -> SolveResult {
    let clock = Clock {
        start: Instant::now(),
        timeout: limits.timeout,
    };
    let mut search = Search::new(formula);
    let mut decisions = 0u64;
    let mut backtracks = 0u64;
    let mut stack: Vec<Frame> = Vec::new();

    let finish = |status, search: &Search, decisions, backtracks| SolveResult {
        status,
        backtracks,
        decisions,
        elapsed: clock.start.elapsed(),
        model: (status == Status::Sat).then(|| search.model()),
    };

    for (ci, clause) in formula.clauses().iter().enumerate() {
        if clause.len() == 1 {
            search.pending.push(ci as u32);
        }
    }

    let mut first_open = 0;
    let mut conflict = false;
    loop {
        if !conflict {
            match search.propagate(&clock) {
                Ok(consistent) => conflict = !consistent,
                Err(Stop) => return finish(Status::Timeout, &search, decisions, backtracks),
            }
        }
        if conflict {
            // Return to the most recent decision whose opposite is untried.
            loop {
                let Some(frame) = stack.pop() else {
                    return finish(Status::Unsat, &search, decisions, backtracks);
                };
                search.undo_to(frame.trail_len);
                if frame.flipped {
                    continue;
                }
                if limits.max_backtracks > 0 && backtracks >= limits.max_backtracks {
                    return finish(Status::Timeout, &search, decisions, backtracks);
                }
                backtracks += 1;
                first_open = frame.first_open;
                let lit = !frame.lit;
                stack.push(Frame {
                    flipped: true,
                    lit,
                    ..frame
                });
                conflict = !search.assign(lit);
                break;
            }
            continue;
        }
        let Some((clause_idx, lit)) = search.branch_literal(first_open) else {
            return finish(Status::Sat, &search, decisions, backtracks);
        };
        if clock.check().is_err() {
            return finish(Status::Timeout, &search, decisions, backtracks);
        }
        decisions += 1;
        first_open = clause_idx;
        stack.push(Frame {
            trail_len: search.trail.len(),
            lit,
            flipped: false,
            first_open,
        });
        conflict = !search.assign(lit);
    }
}

/// Exhaustive satisfiability check over all `2^v` assignments.
pub fn brute_force(formula: &CnfFormula) -> Result<Status, TooManyVars> {
    let vars = formula.num_vars();
    if vars > BRUTE_FORCE_MAX_VARS {
        return Err(TooManyVars {
            vars,
            max: BRUTE_FORCE_MAX_VARS,
        });
    }
    // Bit (var-1) of an assignment word holds the value of var.
    let masks: Vec<(u32, u32)> = formula
        .clauses()
        .iter()
        .map(|c| {
            c.lits().iter().fold((0, 0), |(pos, neg), l| {
                let bit = 1u32 << (l.var() - 1);
                if l.is_positive() {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    let found = (0u32..(1u32 << vars)).any(|x| {
        masks
            .iter()
            .all(|&(pos, neg)| x & pos != 0 || !x & neg != 0)
    });
    Ok(if found { Status::Sat } else { Status::Unsat })
}

/// True if `result` is internally consistent for `formula`: a SAT model is
/// total and satisfies every clause, and the counters are ordered.
pub fn check_result(formula: &CnfFormula, result: &SolveResult) -> bool {
    let model_ok = match (&result.status, &result.model) {
        (Status::Sat, Some(m)) => m.is_total() && formula.evaluate(m) == Evaluation::Satisfied,
        (Status::Sat, None) => false,
        (_, model) => model.is_none(),
    };
    model_ok && result.backtracks <= result.decisions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Clause;
    use crate::gen::{gen_uniform, Gamma, UniformSpec};
    use crate::rng::Seed;

    fn formula(num_vars: u32, clauses: &[&[i32]]) -> CnfFormula {
        let clauses = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c).unwrap())
            .collect();
        CnfFormula::new(num_vars, clauses).unwrap()
    }

    fn run(f: &CnfFormula) -> SolveResult {
        let r = solve(f, SolverLimits::UNLIMITED);
        assert!(check_result(f, &r), "{r:?}");
        r
    }

    #[test]
    fn empty_formula_is_sat() {
        let f = formula(3, &[]);
        let r = run(&f);
        assert_eq!((r.status, r.backtracks, r.decisions), (Status::Sat, 0, 0));
        // Untouched variables default to false.
        assert_eq!(
            r.model.unwrap().lits().collect::<Vec<_>>(),
            vec![Lit::neg(1), Lit::neg(2), Lit::neg(3)]
        );
    }

    #[test]
    fn unit_conflict_without_branching() {
        let r = run(&formula(1, &[&[1], &[-1]]));
        assert_eq!((r.status, r.backtracks, r.decisions), (Status::Unsat, 0, 0));
    }

    #[test]
    fn two_variable_refutation_takes_one_backtrack() {
        // Decide +1: units +2 and -2 clash. Flip to -1 (one backtrack): clash again, no open decision.
        let r = run(&formula(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]));
        assert_eq!((r.status, r.backtracks, r.decisions), (Status::Unsat, 1, 1));
    }

    #[test]
    fn branches_on_written_polarity_first() {
        let r = run(&formula(2, &[&[-2, 1]]));
        assert_eq!(r.status, Status::Sat);
        assert_eq!(r.decisions, 1);
        let model = r.model.unwrap();
        assert_eq!(model.get(2), Some(false));
        assert_eq!(model.get(1), Some(false));
    }

    #[test]
    fn skips_satisfied_clauses_and_false_literals() {
        // Unit -1 falsifies the first literal of clause 2, so the branch is on +3.
        let r = run(&formula(3, &[&[-1], &[1, 3, 2]]));
        assert_eq!(r.decisions, 1);
        let model = r.model.unwrap();
        assert_eq!(model.get(3), Some(true));
        assert_eq!(model.get(2), Some(false));
    }

    #[test]
    fn units_propagate_through_chains() {
        let f = formula(4, &[&[1], &[-1, 2], &[-2, 3], &[-3, 4]]);
        let r = run(&f);
        assert_eq!(r.decisions, 0);
        assert!(r.model.unwrap().lits().all(|l| l.is_positive()));
    }

    #[test]
    fn backtrack_limit_reports_timeout() {
        let f = gen_uniform(
            &UniformSpec {
                vars: 60,
                k: 3,
                gamma: Gamma::from_integer(8),
            },
            Seed(2),
        )
        .unwrap();
        let full = run(&f);
        assert_eq!(full.status, Status::Unsat);
        assert!(full.backtracks > 3);
        let limited = solve(
            &f,
            SolverLimits {
                max_backtracks: 3,
                ..SolverLimits::UNLIMITED
            },
        );
        assert_eq!(limited.status, Status::Timeout);
        assert_eq!(limited.backtracks, 3);
        assert!(limited.model.is_none());
    }

    #[test]
    fn expired_clock_reports_timeout() {
        let f = gen_uniform(
            &UniformSpec {
                vars: 200,
                k: 3,
                gamma: Gamma::new(43, 10),
            },
            Seed(8),
        )
        .unwrap();
        let r = solve(
            &f,
            SolverLimits {
                timeout: Duration::from_nanos(1),
                max_backtracks: 0,
            },
        );
        assert_eq!(r.status, Status::Timeout);
    }

    #[test]
    fn deterministic_counters() {
        let f = gen_uniform(
            &UniformSpec {
                vars: 50,
                k: 3,
                gamma: Gamma::new(43, 10),
            },
            Seed(77),
        )
        .unwrap();
        let a = run(&f);
        let b = run(&f);
        assert_eq!(
            (a.status, a.backtracks, a.decisions),
            (b.status, b.backtracks, b.decisions)
        );
        assert_eq!(a.model, b.model);
    }

    #[test]
    fn brute_force_basics() {
        assert_eq!(brute_force(&formula(1, &[&[1]])), Ok(Status::Sat));
        assert_eq!(brute_force(&formula(1, &[&[1], &[-1]])), Ok(Status::Unsat));
        assert_eq!(brute_force(&formula(4, &[])), Ok(Status::Sat));
        assert_eq!(
            brute_force(&formula(25, &[])),
            Err(TooManyVars { vars: 25, max: 24 })
        );
    }

    #[test]
    fn agrees_with_brute_force_on_small_uniform() {
        for seed in 0..300u64 {
            let vars = 5 + (seed % 12) as u32;
            let gamma = Gamma::from_integer(1 + seed % 8);
            let f = gen_uniform(&UniformSpec { vars, k: 3, gamma }, Seed(seed)).unwrap();
            let r = run(&f);
            assert_eq!(Ok(r.status), brute_force(&f), "seed {seed}");
            if r.status == Status::Unsat && r.decisions == 0 {
                assert_eq!(r.backtracks, 0);
            }
        }
    }
}

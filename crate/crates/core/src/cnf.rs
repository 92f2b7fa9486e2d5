//! CNF formulas, DIMACS input/output, and evaluation under (partial) assignments.

use std::fmt;
use std::fmt::Write as _;

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("line {line}: malformed problem line: {reason}")]
    Header { line: usize, reason: String },
    #[error("missing `p cnf` problem line")]
    MissingHeader,
    #[error("line {line}: invalid literal token `{token}`")]
    Token { line: usize, token: String },
    #[error("literal {lit} exceeds the declared variable count {num_vars}")]
    LiteralOutOfRange { lit: i64, num_vars: u32 },
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCount { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
    #[error("clause contains both {0} and its negation")]
    Tautology(i32),
    #[error("clauses must contain at least one literal")]
    EmptyClause,
    #[error("a formula needs at least one variable")]
    NoVariables,
}

/// A variable together with a polarity, stored in DIMACS form (`-3` is "not x3").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    /// Panics if `var` is zero or does not fit a DIMACS literal.
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(
            var >= 1 && var <= i32::MAX as u32,
            "variable index out of range: {var}"
        );
        let v = var as i32;
        Lit(if positive { v } else { -v })
    }

    pub fn pos(var: u32) -> Self {
        Self::new(var, true)
    }

    pub fn neg(var: u32) -> Self {
        Self::new(var, false)
    }

    /// Returns `None` for 0, which DIMACS reserves as the clause terminator.
    pub fn from_dimacs(value: i32) -> Option<Self> {
        (value != 0 && value != i32::MIN).then_some(Lit(value))
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negate(self) -> Self {
        Lit(-self.0)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        self.negate()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A disjunction of literals over pairwise distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause(Vec<Lit>);

impl Clause {
    /// Builds a clause, keeping the first occurrence of repeated literals.
    ///
    /// Fails on an empty literal list or when a variable appears with both polarities.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Self, CnfError> {
        let mut out: Vec<Lit> = Vec::new();
        for lit in lits {
            match out.iter().find(|l| l.var() == lit.var()) {
                Some(&seen) if seen == lit => {}
                Some(_) => return Err(CnfError::Tautology(lit.var() as i32)),
                None => out.push(lit),
            }
        }
        if out.is_empty() {
            return Err(CnfError::EmptyClause);
        }
        Ok(Clause(out))
    }

    pub fn from_dimacs(values: &[i32]) -> Result<Self, CnfError> {
        let lits = values
            .iter()
            .map(|&v| Lit::from_dimacs(v).ok_or(CnfError::EmptyClause))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(lits)
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|l| l.var())
    }
}

/// Truth values for variables `1..=num_vars`; unassigned variables are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new(num_vars: u32) -> Self {
        Assignment {
            values: vec![None; num_vars as usize],
        }
    }

    /// Assigns every literal true. Later literals overwrite earlier ones on the same variable.
    pub fn from_lits(num_vars: u32, lits: impl IntoIterator<Item = Lit>) -> Self {
        let mut a = Self::new(num_vars);
        for lit in lits {
            a.set(lit.var(), lit.is_positive());
        }
        a
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    /// Panics if `var` is outside `1..=num_vars`.
    pub fn set(&mut self, var: u32, value: bool) {
        self.values[var as usize - 1] = Some(value);
    }

    pub fn unset(&mut self, var: u32) {
        self.values[var as usize - 1] = None;
    }

    pub fn get(&self, var: u32) -> Option<bool> {
        self.values
            .get((var as usize).wrapping_sub(1))
            .copied()
            .flatten()
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.get(lit.var()).map(|v| v == lit.is_positive())
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// Assigned variables as literals, in variable order.
    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| Lit::new(i as u32 + 1, b)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    Satisfied,
    Falsified,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
    origin: Option<String>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        if num_vars == 0 {
            return Err(CnfError::NoVariables);
        }
        for lit in clauses.iter().flat_map(|c| c.lits()) {
            if lit.var() > num_vars {
                return Err(CnfError::LiteralOutOfRange {
                    lit: lit.to_dimacs() as i64,
                    num_vars,
                });
            }
        }
        Ok(CnfFormula {
            num_vars,
            clauses,
            origin: None,
        })
    }

    pub fn with_origin(mut self, origin: impl Into<String>) -> Self {
        self.origin = Some(origin.into());
        self
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn origin(&self) -> Option<&str> {
        self.origin.as_deref()
    }

    /// Clause-to-variable ratio.
    pub fn constrainedness(&self) -> Ratio<u64> {
        Ratio::new(self.clauses.len() as u64, self.num_vars as u64)
    }

    /// True iff every clause has exactly `k` literals (vacuously true without clauses).
    pub fn is_k_uniform(&self, k: usize) -> bool {
        self.clauses.iter().all(|c| c.len() == k)
    }

    pub fn evaluate(&self, assignment: &Assignment) -> Evaluation {
        let mut all_satisfied = true;
        for clause in &self.clauses {
            let mut satisfied = false;
            let mut open = false;
            for &lit in clause.lits() {
                match assignment.lit_value(lit) {
                    Some(true) => {
                        satisfied = true;
                        break;
                    }
                    Some(false) => {}
                    None => open = true,
                }
            }
            if !satisfied {
                if !open {
                    return Evaluation::Falsified;
                }
                all_satisfied = false;
            }
        }
        if all_satisfied {
            Evaluation::Satisfied
        } else {
            Evaluation::Undetermined
        }
    }

    /// Canonical DIMACS text: optional `c origin:` line, header, one clause per line.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        if let Some(origin) = &self.origin {
            let _ = writeln!(out, "c origin: {origin}");
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause.lits() {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses DIMACS CNF text.
    ///
    /// Comment lines start with `c`; a `c origin: <tag>` comment restores the
    /// origin tag. A `%` line (as in the SATLIB benchmark files) ends the body.
    pub fn parse_dimacs(text: &str) -> Result<Self, CnfError> {
        let mut header: Option<(u32, usize)> = None;
        let mut origin = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i32> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('c') {
                if header.is_none() && origin.is_none() {
                    if let Some(tag) = rest.trim_start().strip_prefix("origin:") {
                        origin = Some(tag.trim().to_string());
                    }
                }
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(CnfError::Header {
                        line: line_no,
                        reason: "duplicate problem line".into(),
                    });
                }
                header = Some(parse_header(line, line_no)?);
                continue;
            }
            let Some((num_vars, _)) = header else {
                return Err(CnfError::MissingHeader);
            };
            for token in line.split_whitespace() {
                let value: i64 = token.parse().map_err(|_| CnfError::Token {
                    line: line_no,
                    token: token.to_string(),
                })?;
                if value == 0 {
                    clauses.push(Clause::from_dimacs(&current)?);
                    current.clear();
                } else if value.unsigned_abs() > num_vars as u64 {
                    return Err(CnfError::LiteralOutOfRange {
                        lit: value,
                        num_vars,
                    });
                } else {
                    current.push(value as i32);
                }
            }
        }

        let (num_vars, declared) = header.ok_or(CnfError::MissingHeader)?;
        if !current.is_empty() {
            return Err(CnfError::Unterminated);
        }
        if clauses.len() != declared {
            return Err(CnfError::ClauseCount {
                declared,
                found: clauses.len(),
            });
        }
        let mut formula = CnfFormula::new(num_vars, clauses)?;
        formula.origin = origin;
        Ok(formula)
    }
}

fn parse_header(line: &str, line_no: usize) -> Result<(u32, usize), CnfError> {
    let bad = |reason: &str| CnfError::Header {
        line: line_no,
        reason: reason.to_string(),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
        return Err(bad("expected `p cnf <vars> <clauses>`"));
    }
    let vars: u32 = fields[2].parse().map_err(|_| bad("variable count"))?;
    let clauses: usize = fields[3].parse().map_err(|_| bad("clause count"))?;
    if vars == 0 {
        return Err(CnfError::NoVariables);
    }
    if vars > i32::MAX as u32 {
        return Err(bad("variable count too large"));
    }
    Ok((vars, clauses))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formula(num_vars: u32, clauses: &[&[i32]]) -> CnfFormula {
        let clauses = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c).unwrap())
            .collect();
        CnfFormula::new(num_vars, clauses).unwrap()
    }

    #[test]
    fn parse_single_clause() {
        let f = CnfFormula::parse_dimacs("p cnf 3 1\n1 -2 3 0").unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.clauses(), &[Clause::from_dimacs(&[1, -2, 3]).unwrap()]);
    }

    #[test]
    fn parse_contradictory_units() {
        let f = CnfFormula::parse_dimacs("p cnf 1 2\n1 0\n-1 0").unwrap();
        assert_eq!(f, formula(1, &[&[1], &[-1]]));
    }

    #[test]
    fn parse_rejects_tautology() {
        assert_eq!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 -1 0"),
            Err(CnfError::Tautology(1))
        );
    }

    #[test]
    fn parse_collapses_duplicate_literals() {
        let f = CnfFormula::parse_dimacs("p cnf 2 1\n1 2 1 0\n").unwrap();
        assert_eq!(f.clauses()[0].lits(), &[Lit::pos(1), Lit::pos(2)]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf x 1\n1 0"),
            Err(CnfError::Header { .. })
        ));
        assert!(matches!(
            CnfFormula::parse_dimacs("p cnf 2 1\n3 0"),
            Err(CnfError::LiteralOutOfRange { lit: 3, .. })
        ));
        assert_eq!(
            CnfFormula::parse_dimacs("p cnf 2 0\n1 2 0"),
            Err(CnfError::ClauseCount {
                declared: 0,
                found: 1
            })
        );
        assert_eq!(
            CnfFormula::parse_dimacs("p cnf 2 2\n1 2 0"),
            Err(CnfError::ClauseCount {
                declared: 2,
                found: 1
            })
        );
        assert_eq!(
            CnfFormula::parse_dimacs("1 2 0"),
            Err(CnfError::MissingHeader)
        );
        assert_eq!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 2"),
            Err(CnfError::Unterminated)
        );
        assert_eq!(
            CnfFormula::parse_dimacs("p cnf 0 0\n"),
            Err(CnfError::NoVariables)
        );
    }

    #[test]
    fn parse_comments_and_multiline_clauses() {
        let text = "c hello\nc origin: uniform v=3\np cnf 3 2\n1 -2\n 3 0 -1\n0\n";
        let f = CnfFormula::parse_dimacs(text).unwrap();
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(f.origin(), Some("uniform v=3"));
    }

    #[test]
    fn write_exact_bytes() {
        assert_eq!(
            formula(3, &[&[1, -2, 3]]).to_dimacs(),
            "p cnf 3 1\n1 -2 3 0\n"
        );
        assert_eq!(formula(2, &[]).to_dimacs(), "p cnf 2 0\n");
        let tagged = formula(2, &[&[-2]]).with_origin("uniform v=2 k=1 g=0.5 seed=1");
        assert_eq!(
            tagged.to_dimacs(),
            "c origin: uniform v=2 k=1 g=0.5 seed=1\np cnf 2 1\n-2 0\n"
        );
    }

    #[test]
    fn constrainedness_ratio() {
        assert_eq!(
            formula(3, &[&[1], &[2], &[3]]).constrainedness(),
            Ratio::from_integer(1)
        );
        let many = CnfFormula::new(100, vec![Clause::from_dimacs(&[1]).unwrap(); 430]).unwrap();
        assert_eq!(many.constrainedness(), Ratio::new(43, 10));
        assert_eq!(formula(5, &[]).constrainedness(), Ratio::from_integer(0));
    }

    #[test]
    fn evaluate_cases() {
        let f = formula(2, &[&[1, 2]]);
        assert_eq!(
            f.evaluate(&Assignment::from_lits(2, [Lit::pos(1)])),
            Evaluation::Satisfied
        );
        assert_eq!(f.evaluate(&Assignment::new(2)), Evaluation::Undetermined);
        let g = formula(1, &[&[1], &[-1]]);
        assert_eq!(
            g.evaluate(&Assignment::from_lits(1, [Lit::pos(1)])),
            Evaluation::Falsified
        );
    }

    #[test]
    fn k_uniformity() {
        assert!(!formula(3, &[&[1, 2], &[3]]).is_k_uniform(2));
        assert!(formula(3, &[]).is_k_uniform(7));
        assert!(formula(3, &[&[1, -2, 3], &[-1, 2, 3]]).is_k_uniform(3));
    }

    #[test]
    fn assignment_accessors() {
        let mut a = Assignment::new(3);
        a.set(2, false);
        assert_eq!(a.get(2), Some(false));
        assert_eq!(a.get(0), None);
        assert_eq!(a.get(4), None);
        assert!(!a.is_total());
        assert_eq!(a.lits().collect::<Vec<_>>(), vec![Lit::neg(2)]);
        a.unset(2);
        assert_eq!(a.get(2), None);
    }
}

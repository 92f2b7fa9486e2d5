//! Seeded random k-SAT generators: uniform, rich-get-richer (urn), and
//! neighborhood-sensitive (bucketed).
//!
//! All generators draw `k` distinct variables per clause by rejection and then
//! flip a fair coin for each literal's polarity, right after its variable is
//! accepted. Output is a pure function of the spec and the seed.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Lit};
use crate::rng::{instance_rng, Seed};

pub const DEFAULT_BUCKET_SIZE: u32 = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("clause length k must be at least 1")]
    ZeroK,
    #[error("{vars} variables cannot fill clauses of {k} distinct variables")]
    TooFewVars { vars: u32, k: u32 },
    #[error("copies must be at least 1")]
    ZeroCopies,
    #[error("bucket of {size} variables cannot hold {k} distinct variables")]
    BucketTooSmall { size: u32, k: u32 },
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("invalid constrainedness `{0}`")]
    Gamma(String),
}

/// Constrainedness (clauses per variable), kept as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gamma(Ratio<u64>);

impl Gamma {
    pub fn new(numer: u64, denom: u64) -> Self {
        Gamma(Ratio::new(numer, denom))
    }

    pub fn from_integer(value: u64) -> Self {
        Gamma(Ratio::from_integer(value))
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl From<Ratio<u64>> for Gamma {
    fn from(r: Ratio<u64>) -> Self {
        Gamma(r)
    }
}

impl std::ops::Add for Gamma {
    type Output = Gamma;

    fn add(self, rhs: Gamma) -> Gamma {
        Gamma(self.0 + rhs.0)
    }
}

impl std::ops::Mul<u64> for Gamma {
    type Output = Gamma;

    fn mul(self, rhs: u64) -> Gamma {
        Gamma(self.0 * rhs)
    }
}

/// Accepts integers, decimals (`4.3`), and fractions (`43/10`).
impl FromStr for Gamma {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GenError::Gamma(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| err())?;
            let d: u64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            return Ok(Gamma::new(n, d));
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(err());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| err())?
        };
        let denom = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| err())?
        };
        let numer = int
            .checked_mul(denom)
            .and_then(|x| x.checked_add(frac))
            .ok_or_else(err)?;
        Ok(Gamma::new(numer, denom))
    }
}

/// Terminating decimals print as decimals, anything else as `n/d`.
impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = (*self.0.numer(), *self.0.denom());
        let mut rest = d;
        for p in [2, 5] {
            while rest % p == 0 {
                rest /= p;
            }
        }
        if rest != 1 {
            return write!(f, "{n}/{d}");
        }
        write!(f, "{}", n / d)?;
        let mut rem = n % d;
        if rem != 0 {
            f.write_str(".")?;
            while rem != 0 {
                rem *= 10;
                write!(f, "{}", rem / d)?;
                rem %= d;
            }
        }
        Ok(())
    }
}

/// Clause count for `v` variables at constrainedness `gamma`: `v * gamma`
/// rounded half up.
pub fn num_clauses(v: u32, gamma: Gamma) -> usize {
    let (n, d) = (*gamma.0.numer() as u128, *gamma.0.denom() as u128);
    ((2 * v as u128 * n + d) / (2 * d)) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformSpec {
    pub vars: u32,
    pub k: u32,
    pub gamma: Gamma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RichSpec {
    pub vars: u32,
    pub k: u32,
    pub gamma: Gamma,
    /// Tokens added to the urn for each accepted pick.
    pub copies: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodSpec {
    pub vars: u32,
    pub k: u32,
    pub gamma: Gamma,
    pub bucket_size: u32,
    /// Probability that a non-first literal is drawn from all variables
    /// instead of the clause's home bucket.
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Uniform(UniformSpec),
    Rich(RichSpec),
    Neighborhood(NeighborhoodSpec),
}

impl GeneratorSpec {
    pub fn vars(&self) -> u32 {
        match self {
            GeneratorSpec::Uniform(s) => s.vars,
            GeneratorSpec::Rich(s) => s.vars,
            GeneratorSpec::Neighborhood(s) => s.vars,
        }
    }

    pub fn k(&self) -> u32 {
        match self {
            GeneratorSpec::Uniform(s) => s.k,
            GeneratorSpec::Rich(s) => s.k,
            GeneratorSpec::Neighborhood(s) => s.k,
        }
    }

    pub fn gamma(&self) -> Gamma {
        match self {
            GeneratorSpec::Uniform(s) => s.gamma,
            GeneratorSpec::Rich(s) => s.gamma,
            GeneratorSpec::Neighborhood(s) => s.gamma,
        }
    }

    pub fn with_gamma(&self, gamma: Gamma) -> GeneratorSpec {
        let mut out = self.clone();
        match &mut out {
            GeneratorSpec::Uniform(s) => s.gamma = gamma,
            GeneratorSpec::Rich(s) => s.gamma = gamma,
            GeneratorSpec::Neighborhood(s) => s.gamma = gamma,
        }
        out
    }

    pub fn validate(&self) -> Result<(), GenError> {
        check_vk(self.vars(), self.k())?;
        match self {
            GeneratorSpec::Uniform(_) => Ok(()),
            GeneratorSpec::Rich(s) if s.copies == 0 => Err(GenError::ZeroCopies),
            GeneratorSpec::Rich(_) => Ok(()),
            GeneratorSpec::Neighborhood(s) => Buckets::new(s).map(|_| ()),
        }
    }

    pub fn generate(&self, seed: Seed) -> Result<CnfFormula, GenError> {
        match self {
            GeneratorSpec::Uniform(s) => gen_uniform(s, seed),
            GeneratorSpec::Rich(s) => gen_rich(s, seed),
            GeneratorSpec::Neighborhood(s) => gen_neighborhood(s, seed),
        }
    }

    /// Origin tag written into DIMACS comments.
    pub fn origin_tag(&self, seed: Seed) -> String {
        match self {
            GeneratorSpec::Uniform(s) => {
                format!("uniform v={} k={} g={} seed={seed}", s.vars, s.k, s.gamma)
            }
            GeneratorSpec::Rich(s) => format!(
                "rich v={} k={} g={} copies={} seed={seed}",
                s.vars, s.k, s.gamma, s.copies
            ),
            GeneratorSpec::Neighborhood(s) => format!(
                "nbhd v={} k={} g={} b={} p={} seed={seed}",
                s.vars, s.k, s.gamma, s.bucket_size, s.p
            ),
        }
    }
}

fn check_vk(vars: u32, k: u32) -> Result<(), GenError> {
    if k == 0 {
        return Err(GenError::ZeroK);
    }
    if vars < k {
        return Err(GenError::TooFewVars { vars, k });
    }
    Ok(())
}

fn coin(rng: &mut SplitMix64) -> bool {
    rng.gen::<bool>()
}

/// Draws `k` distinct variables with `draw`, redrawing repeats, and gives each
/// accepted variable a fair-coin polarity.
fn fill_clause(
    k: u32,
    rng: &mut SplitMix64,
    mut draw: impl FnMut(&mut SplitMix64, &[Lit]) -> u32,
    mut accepted: impl FnMut(u32),
) -> Clause {
    let mut lits: Vec<Lit> = Vec::with_capacity(k as usize);
    while lits.len() < k as usize {
        let var = draw(rng, &lits);
        if lits.iter().any(|l| l.var() == var) {
            continue;
        }
        accepted(var);
        lits.push(Lit::new(var, coin(rng)));
    }
    Clause::new(lits).expect("distinct variables never form an invalid clause")
}

fn assemble(vars: u32, clauses: Vec<Clause>, tag: String) -> CnfFormula {
    CnfFormula::new(vars, clauses)
        .expect("generated literals stay within the variable range")
        .with_origin(tag)
}

pub fn gen_uniform(spec: &UniformSpec, seed: Seed) -> Result<CnfFormula, GenError> {
    check_vk(spec.vars, spec.k)?;
    let mut rng = instance_rng(seed);
    let m = num_clauses(spec.vars, spec.gamma);
    let clauses = (0..m)
        .map(|_| fill_clause(spec.k, &mut rng, |r, _| r.gen_range(1..=spec.vars), |_| {}))
        .collect();
    let tag = GeneratorSpec::Uniform(spec.clone()).origin_tag(seed);
    Ok(assemble(spec.vars, clauses, tag))
}

/// Urn model: the urn starts with one token per variable, every accepted
/// pick adds `copies` more tokens of that variable, and the urn persists
/// across all clauses. Rejected (in-clause duplicate) draws leave it unchanged.
pub fn gen_rich(spec: &RichSpec, seed: Seed) -> Result<CnfFormula, GenError> {
    check_vk(spec.vars, spec.k)?;
    if spec.copies == 0 {
        return Err(GenError::ZeroCopies);
    }
    let mut rng = instance_rng(seed);
    let m = num_clauses(spec.vars, spec.gamma);
    let mut urn: Vec<u32> = (1..=spec.vars).collect();
    urn.reserve(m * spec.k as usize * spec.copies as usize);
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let mut picked = Vec::with_capacity(spec.k as usize);
        let clause = fill_clause(
            spec.k,
            &mut rng,
            |r, _| urn[r.gen_range(0..urn.len())],
            |var| picked.push(var),
        );
        for var in picked {
            urn.extend(std::iter::repeat_n(var, spec.copies as usize));
        }
        clauses.push(clause);
    }
    let tag = GeneratorSpec::Rich(spec.clone()).origin_tag(seed);
    Ok(assemble(spec.vars, clauses, tag))
}

/// Consecutive variable ranges of `bucket_size`; the last may be shorter.
#[derive(Debug, Clone, Copy)]
pub struct Buckets {
    vars: u32,
    size: u32,
}

impl Buckets {
    fn new(spec: &NeighborhoodSpec) -> Result<Self, GenError> {
        if !(0.0..=1.0).contains(&spec.p) {
            return Err(GenError::Probability(spec.p));
        }
        let size = spec.bucket_size;
        if size < spec.k {
            return Err(GenError::BucketTooSmall { size, k: spec.k });
        }
        let last = spec.vars % size;
        if last != 0 && last < spec.k {
            return Err(GenError::BucketTooSmall {
                size: last,
                k: spec.k,
            });
        }
        Ok(Buckets {
            vars: spec.vars,
            size,
        })
    }

    /// Zero-based bucket of a variable.
    pub fn of(&self, var: u32) -> u32 {
        (var - 1) / self.size
    }

    /// Inclusive variable range of bucket `b`.
    pub fn range(&self, b: u32) -> (u32, u32) {
        let lo = b * self.size + 1;
        (lo, (lo + self.size - 1).min(self.vars))
    }
}

/// The first variable of each clause is uniform over all variables and fixes
/// the home bucket. Each later variable comes from all variables with
/// probability `p` and from the home bucket otherwise; duplicates are redrawn
/// under the same rule. With `p = 1` no bucket coin is drawn, so the random
/// stream matches [`gen_uniform`] exactly.
pub fn gen_neighborhood(spec: &NeighborhoodSpec, seed: Seed) -> Result<CnfFormula, GenError> {
    check_vk(spec.vars, spec.k)?;
    let buckets = Buckets::new(spec)?;
    let mut rng = instance_rng(seed);
    let m = num_clauses(spec.vars, spec.gamma);
    let global = |r: &mut SplitMix64| {
        if spec.p >= 1.0 {
            true
        } else if spec.p <= 0.0 {
            false
        } else {
            r.gen_bool(spec.p)
        }
    };
    let clauses = (0..m)
        .map(|_| {
            fill_clause(
                spec.k,
                &mut rng,
                |r, so_far| match so_far.first() {
                    None => r.gen_range(1..=spec.vars),
                    Some(_) if global(r) => r.gen_range(1..=spec.vars),
                    Some(first) => {
                        let (lo, hi) = buckets.range(buckets.of(first.var()));
                        r.gen_range(lo..=hi)
                    }
                },
                |_| {},
            )
        })
        .collect();
    let tag = GeneratorSpec::Neighborhood(spec.clone()).origin_tag(seed);
    Ok(assemble(spec.vars, clauses, tag))
}

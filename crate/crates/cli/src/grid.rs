//! Argument parsing shared by the subcommands: grids, stability indices, tolerances.

use std::fmt;

use subfrac_core::subordinator::StabilityIndex;

/// Malformed or inconsistent command-line input; maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Evaluation points: `start:stop:count`, a comma list, or a single value.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Range { start: f64, stop: f64, count: usize },
    List(Vec<f64>),
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self, UsageError> {
        let bad = |why: &str| UsageError(format!("bad grid {s:?}: {why}"));
        let num = |p: &str| -> Result<f64, UsageError> {
            let v: f64 = p.trim().parse().map_err(|_| bad("not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad("values must be finite"))
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.len() {
            1 => Ok(Grid::List(s.split(',').map(num).collect::<Result<_, _>>()?)),
            3 => {
                let count: usize = parts[2].trim().parse().map_err(|_| bad("count must be a positive integer"))?;
                if count == 0 {
                    return Err(bad("count must be positive"));
                }
                Ok(Grid::Range {
                    start: num(parts[0])?,
                    stop: num(parts[1])?,
                    count,
                })
            }
            _ => Err(bad("expected start:stop:count")),
        }
    }

    /// The points, log-spaced between the ends when `log` is set.
    pub fn values(&self, log: bool) -> Result<Vec<f64>, UsageError> {
        match self {
            Grid::List(v) => Ok(v.clone()),
            Grid::Range { start, stop, count } => {
                if log && !(*start > 0.0 && *stop > 0.0) {
                    return Err(UsageError("log-spaced grid needs positive ends".into()));
                }
                if *count == 1 {
                    return Ok(vec![*start]);
                }
                let n = (*count - 1) as f64;
                Ok((0..*count)
                    .map(|i| {
                        let w = i as f64 / n;
                        if i + 1 == *count {
                            *stop
                        } else if log {
                            (start.ln() * (1.0 - w) + stop.ln() * w).exp()
                        } else {
                            start + (stop - start) * w
                        }
                    })
                    .collect())
            }
        }
    }
}

/// A stability index as typed: `"1/3"` keeps the reciprocal fast paths, a decimal does not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuArg {
    pub index: StabilityIndex,
    pub exact: bool,
}

impl NuArg {
    pub fn parse(s: &str) -> Result<Self, UsageError> {
        let index = StabilityIndex::parse(s).map_err(|e| UsageError(e.to_string()))?;
        Ok(NuArg {
            index,
            exact: s.contains('/'),
        })
    }

    pub fn nu(&self) -> f64 {
        self.index.nu()
    }

    /// `n` with `ν = 1/(n+1)`, only when typed as a fraction.
    pub fn order(&self) -> Option<u32> {
        if self.exact {
            self.index.order()
        } else {
            None
        }
    }
}

/// Relative tolerance: the flag wins over `SUBFRAC_TOL`, which wins over `default`.
pub fn resolve_tol(flag: Option<f64>, env: Option<&str>, default: f64) -> Result<f64, UsageError> {
    let tol = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("SUBFRAC_TOL={s:?} is not a number")))?,
        (None, None) => default,
    };
    if tol > 0.0 && tol < 1.0 {
        Ok(tol)
    } else {
        Err(UsageError(format!("tolerance must lie in (0, 1), got {tol}")))
    }
}

//! Error statistics over populations of estimates.
//!
//! Standard deviations use the population convention (divide by the count).
//! Sums run left to right in the order the errors are supplied, so identical
//! inputs give bit-identical statistics.

use alloc::string::String;

use crate::error::{contract, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Formula {
    Classic,
    Lower,
    Ent,
}

impl Formula {
    pub const DISTANCE: [Formula; 3] = [Formula::Classic, Formula::Lower, Formula::Ent];
    pub const RAYLEIGH: [Formula; 2] = [Formula::Classic, Formula::Ent];

    pub fn name(self) -> &'static str {
        match self {
            Formula::Classic => "classic",
            Formula::Lower => "lower",
            Formula::Ent => "ent",
        }
    }
}

/// What the errors were measured over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Population {
    /// Unordered column pairs `i < j`.
    Pairs,
    /// (query, column) pairs.
    Queries,
    /// Column-space Rayleigh quotients.
    RqColumn,
    /// Row-space Rayleigh quotients.
    RqRow,
}

impl Population {
    pub fn name(self) -> &'static str {
        match self {
            Population::Pairs => "pairs",
            Population::Queries => "queries",
            Population::RqColumn => "rq-column",
            Population::RqRow => "rq-row",
        }
    }
}

/// Mean and population standard deviation of `|estimate − exact|`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorStats {
    pub formula: Formula,
    pub k: usize,
    pub population: Population,
    pub count: usize,
    pub mean_abs_err: f64,
    pub std_abs_err: f64,
}

impl ErrorStats {
    /// Two-pass mean and std over absolute errors.
    pub fn from_abs_errors(formula: Formula, k: usize, population: Population, errors: &[f64]) -> Result<Self> {
        if errors.is_empty() {
            return Err(contract(String::from("error population is empty")));
        }
        let count = errors.len();
        let n = count as f64;
        let mean = errors.iter().sum::<f64>() / n;
        let var = errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
        Ok(Self { formula, k, population, count, mean_abs_err: mean, std_abs_err: libm::sqrt(var) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value() {
        let s = ErrorStats::from_abs_errors(Formula::Ent, 2, Population::Queries, &[3.5]).unwrap();
        assert_eq!(s.count, 1);
        assert_eq!(s.mean_abs_err, 3.5);
        assert_eq!(s.std_abs_err, 0.0);
    }

    #[test]
    fn population_std() {
        let s = ErrorStats::from_abs_errors(Formula::Classic, 1, Population::Pairs, &[1.0, 3.0]).unwrap();
        assert_eq!(s.mean_abs_err, 2.0);
        assert_eq!(s.std_abs_err, 1.0);
        let s = ErrorStats::from_abs_errors(Formula::Lower, 1, Population::Pairs, &[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(s.mean_abs_err, 5.0);
        assert_eq!(s.std_abs_err, 2.0);
    }

    #[test]
    fn empty_is_rejected() {
        assert!(ErrorStats::from_abs_errors(Formula::Ent, 1, Population::Pairs, &[]).is_err());
    }
}

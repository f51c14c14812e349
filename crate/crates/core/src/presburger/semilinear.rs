//! Semi-linear sets as unions of base+periods linear sets, with membership
//! and export to existential formulas over `x1..xd`.

use super::{sat, Atom, Formula, LinearTerm};
use num_bigint::BigInt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemiLinearError {
    #[error("vector has dimension {got}, expected {want}")]
    DimensionMismatch { want: usize, got: usize },
}

/// `base + nonnegative integer combinations of periods`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSet {
    pub base: Vec<BigInt>,
    pub periods: Vec<Vec<BigInt>>,
}

impl LinearSet {
    pub fn new(base: Vec<BigInt>, periods: Vec<Vec<BigInt>>) -> Result<Self, SemiLinearError> {
        let want = base.len();
        for p in &periods {
            if p.len() != want {
                return Err(SemiLinearError::DimensionMismatch { want, got: p.len() });
            }
        }
        Ok(LinearSet { base, periods })
    }
}

/// Finite union of linear sets of a common dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiLinearSet {
    dimension: usize,
    pub components: Vec<LinearSet>,
}

impl SemiLinearSet {
    pub fn new(dimension: usize, components: Vec<LinearSet>) -> Result<Self, SemiLinearError> {
        for c in &components {
            if c.base.len() != dimension {
                return Err(SemiLinearError::DimensionMismatch { want: dimension, got: c.base.len() });
            }
        }
        Ok(SemiLinearSet { dimension, components })
    }

    /// The set `{v}`.
    pub fn singleton(v: Vec<BigInt>) -> Self {
        let dimension = v.len();
        SemiLinearSet { dimension, components: vec![LinearSet { base: v, periods: vec![] }] }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Existential formula over `x1..xd` whose models are exactly the
    /// members: a disjunction over components of
    /// `exists y1..yk >= 0. /\_dim  x_dim = base_dim + sum_j yj * period_j_dim`.
    pub fn to_formula(&self) -> Formula {
        let mut comps = Vec::new();
        for ls in &self.components {
            let multipliers: Vec<String> = (1..=ls.periods.len()).map(|j| format!("y{j}")).collect();
            let mut conj = Vec::new();
            for k in 0..self.dimension {
                // x_{k+1} - base_k - sum_j yj * p_{j,k} = 0
                let mut t = LinearTerm::var(&format!("x{}", k + 1));
                t.constant = -&ls.base[k];
                for (j, p) in ls.periods.iter().enumerate() {
                    t = t.add(&LinearTerm::var(&multipliers[j]).scale(&-&p[k]));
                }
                conj.push(Formula::Atom(Atom::Eq(t)));
            }
            for m in &multipliers {
                conj.push(Formula::Atom(Atom::Le(LinearTerm::var(m).scale(&BigInt::from(-1)))));
            }
            comps.push(Formula::exists_many(&multipliers, Formula::and(conj)));
        }
        Formula::or(comps).normalize_bound()
    }

    /// Exact membership, via satisfiability of the instantiated component
    /// formulas; no search bound is involved.
    pub fn contains(&self, v: &[BigInt]) -> Result<bool, SemiLinearError> {
        if v.len() != self.dimension {
            return Err(SemiLinearError::DimensionMismatch { want: self.dimension, got: v.len() });
        }
        let mut phi = self.to_formula();
        for (i, value) in v.iter().enumerate() {
            phi = phi.substitute(&format!("x{}", i + 1), &LinearTerm::constant(value.clone()));
        }
        Ok(sat::decide_closed(&phi))
    }
}

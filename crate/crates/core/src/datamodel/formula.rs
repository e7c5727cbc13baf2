//! Equation formula mini-language.
//!
//! `outcome ~ term, term, ...` where a term is a variable name, a product
//! `a*b` (the constructed interaction column) or a trailing `-1` that
//! suppresses the intercept. Example:
//!
//! ```text
//! isClosed ~ fzrisk, fprisk, rate*nreview, nreview, rate
//! ```

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    /// Elementwise product of two variables; named `a*b` in the design.
    Interaction(String, String),
}

impl Term {
    pub fn column_name(&self) -> String {
        match self {
            Term::Var(v) => v.clone(),
            Term::Interaction(a, b) => format!("{a}*{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub outcome: String,
    pub terms: Vec<Term>,
    pub intercept: bool,
}

impl Formula {
    pub fn parse(input: &str) -> Result<Self> {
        let (lhs, rhs) = input
            .split_once('~')
            .ok_or_else(|| Error::Formula(format!("missing `~` in `{input}`")))?;
        let outcome = lhs.trim();
        if outcome.is_empty() {
            return Err(Error::Formula("empty outcome".into()));
        }
        let mut terms = Vec::new();
        let mut intercept = true;
        let raw: Vec<&str> = rhs.split(',').map(str::trim).collect();
        for (i, tok) in raw.iter().enumerate() {
            if tok.is_empty() {
                return Err(Error::Formula(format!("empty term in `{input}`")));
            }
            if *tok == "-1" {
                if i != raw.len() - 1 {
                    return Err(Error::Formula("`-1` must be the trailing term".into()));
                }
                intercept = false;
                continue;
            }
            if let Some((a, b)) = tok.split_once('*') {
                let (a, b) = (a.trim(), b.trim());
                if a.is_empty() || b.is_empty() || a.contains('*') || b.contains('*') {
                    return Err(Error::Formula(format!("bad interaction `{tok}`")));
                }
                terms.push(Term::Interaction(a.to_string(), b.to_string()));
            } else {
                terms.push(Term::Var(tok.to_string()));
            }
        }
        if terms.is_empty() {
            return Err(Error::Formula("formula has no regressors".into()));
        }
        Ok(Self {
            outcome: outcome.to_string(),
            terms,
            intercept,
        })
    }

    /// Drops the intercept, the programmatic equivalent of a trailing `-1`.
    pub fn without_intercept(mut self) -> Self {
        self.intercept = false;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_survival_equation() {
        let f = Formula::parse("isClosed ~ fzrisk, fprisk, rate*nreview, nreview, rate").unwrap();
        assert_eq!(f.outcome, "isClosed");
        assert!(f.intercept);
        assert_eq!(f.terms.len(), 5);
        assert_eq!(f.terms[2], Term::Interaction("rate".into(), "nreview".into()));
        assert_eq!(f.terms[2].column_name(), "rate*nreview");
    }

    #[test]
    fn trailing_minus_one_strips_intercept() {
        let f = Formula::parse("y ~ a, b, -1").unwrap();
        assert!(!f.intercept);
        assert_eq!(f.terms.len(), 2);
        let err = Formula::parse("y ~ -1, a").unwrap_err();
        assert!(matches!(err, Error::Formula(_)));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Formula::parse("no tilde here").is_err());
        assert!(Formula::parse(" ~ a").is_err());
        assert!(Formula::parse("y ~ ").is_err());
        assert!(Formula::parse("y ~ a, , b").is_err());
        assert!(Formula::parse("y ~ a**b").is_err());
    }
}

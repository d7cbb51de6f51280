use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// 1-based variable index.
pub type Var = u32;

/// A variable together with a polarity.
///
/// Stored packed as `var << 1 | negative`, so the derived ordering sorts by
/// ascending variable and puts the positive literal before the negative one.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(u32);

impl Literal {
    pub fn new(var: Var, positive: bool) -> Literal {
        assert!(var >= 1, "variable indices are 1-based");
        assert!(var <= Var::MAX >> 1, "variable index {var} out of range");
        Literal((var << 1) | u32::from(!positive))
    }

    pub fn pos(var: Var) -> Literal {
        Literal::new(var, true)
    }

    pub fn neg(var: Var) -> Literal {
        Literal::new(var, false)
    }

    /// Parses a signed DIMACS-style integer. Zero is not a literal.
    pub fn from_dimacs(value: i64) -> Option<Literal> {
        if value == 0 {
            return None;
        }
        let var = Var::try_from(value.unsigned_abs()).ok()?;
        if var > Var::MAX >> 1 {
            return None;
        }
        Some(Literal::new(var, value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let var = i64::from(self.var());
        if self.is_positive() {
            var
        } else {
            -var
        }
    }

    pub fn var(self) -> Var {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Literal {
        Literal(self.0 ^ 1)
    }

    /// Dense index usable for per-literal tables (`2 * var + negative`).
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// Truth value of the literal under a value for its variable.
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        self.negate()
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "~x{}", self.var())
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i64(self.to_dimacs())
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Literal, D::Error> {
        let value = i64::deserialize(deserializer)?;
        Literal::from_dimacs(value)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid literal {value}")))
    }
}

/// A total assignment over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    /// All variables false.
    pub fn all_false(num_vars: u32) -> Assignment {
        Assignment {
            values: vec![false; num_vars as usize],
        }
    }

    pub fn from_values(values: Vec<bool>) -> Assignment {
        Assignment { values }
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        if var == 0 {
            return None;
        }
        self.values.get(var as usize - 1).copied()
    }

    pub fn set(&mut self, var: Var, value: bool) {
        self.values[var as usize - 1] = value;
    }

    /// Truth value of `lit`, or `None` if its variable is outside the assignment.
    pub fn satisfies(&self, lit: Literal) -> Option<bool> {
        self.get(lit.var()).map(|v| lit.eval(v))
    }

    /// The assignment as signed literals in ascending variable order.
    pub fn to_literals(&self) -> Vec<Literal> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| Literal::new(i as Var + 1, v))
            .collect()
    }

    pub fn to_dimacs(&self) -> Vec<i64> {
        self.to_literals().into_iter().map(Literal::to_dimacs).collect()
    }

    /// DIMACS-style model line: `v 1 -2 3 0`.
    pub fn to_model_line(&self) -> String {
        let mut line = String::from("v");
        for lit in self.to_dimacs() {
            line.push(' ');
            line.push_str(&lit.to_string());
        }
        line.push_str(" 0");
        line
    }

    /// Reads `v` lines over variables `1..=num_vars`; `c` and `s` lines are skipped.
    /// Every variable must be given exactly once.
    pub fn parse_model(text: &str, num_vars: u32) -> Result<Assignment, ModelError> {
        let mut values: Vec<Option<bool>> = vec![None; num_vars as usize];
        let mut terminated = false;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let mut tokens = line.split_whitespace();
            match tokens.next() {
                None | Some("c") | Some("s") => continue,
                Some("v") => {}
                Some(other) => return Err(ModelError::BadToken(line_no, other.to_string())),
            }
            for tok in tokens {
                if terminated {
                    return Err(ModelError::BadToken(line_no, tok.to_string()));
                }
                let value: i64 = tok
                    .parse()
                    .map_err(|_| ModelError::BadToken(line_no, tok.to_string()))?;
                if value == 0 {
                    terminated = true;
                    continue;
                }
                let lit = Literal::from_dimacs(value).ok_or(ModelError::BadToken(line_no, tok.to_string()))?;
                let slot = values
                    .get_mut(lit.var() as usize - 1)
                    .ok_or(ModelError::OutOfRange(line_no, value))?;
                if slot.replace(lit.is_positive()).is_some() {
                    return Err(ModelError::Repeated(line_no, lit.var()));
                }
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or(ModelError::Missing(i as Var + 1)))
            .collect::<Result<_, _>>()?;
        Ok(Assignment { values })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("line {0}: unexpected token {1:?}")]
    BadToken(usize, String),
    #[error("line {0}: literal {1} out of range")]
    OutOfRange(usize, i64),
    #[error("line {0}: variable {1} given twice")]
    Repeated(usize, Var),
    #[error("variable {0} has no value")]
    Missing(Var),
}

//! Linear equations `c_1 x_1 + ... + c_l x_l = K`: parsing, classification,
//! standard form, triviality of solutions and sub-equations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A linear equation with nonzero integer coefficients and an integer constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawEquation")]
pub struct LinearEquation {
    coefficients: Vec<i64>,
    constant: i64,
}

#[derive(Deserialize)]
struct RawEquation {
    coefficients: Vec<i64>,
    constant: i64,
}

impl TryFrom<RawEquation> for LinearEquation {
    type Error = Error;
    fn try_from(raw: RawEquation) -> Result<Self> {
        LinearEquation::new(raw.coefficients, raw.constant)
    }
}

impl LinearEquation {
    pub fn new(coefficients: Vec<i64>, constant: i64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::TooFewVariables { need: 1, got: 0 });
        }
        if let Some(pos) = coefficients.iter().position(|&c| c == 0) {
            return Err(Error::ZeroCoefficient(pos + 1));
        }
        Ok(LinearEquation {
            coefficients,
            constant,
        })
    }

    pub fn homogeneous(coefficients: Vec<i64>) -> Result<Self> {
        Self::new(coefficients, 0)
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    /// Number of variables.
    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant == 0
    }

    pub fn coefficient_sum(&self) -> i64 {
        self.coefficients.iter().sum()
    }

    pub fn is_translation_invariant(&self) -> bool {
        self.coefficient_sum() == 0
    }

    pub fn all_same_sign(&self) -> bool {
        self.coefficients.iter().all(|&c| c > 0) || self.coefficients.iter().all(|&c| c < 0)
    }

    /// `sum c_i x_i - K`, computed in i128.
    pub fn residual(&self, tuple: &[i64]) -> i128 {
        self.coefficients
            .iter()
            .zip(tuple)
            .map(|(&c, &x)| c as i128 * x as i128)
            .sum::<i128>()
            - self.constant as i128
    }

    pub fn is_solution(&self, tuple: &[i64]) -> bool {
        tuple.len() == self.arity() && self.residual(tuple) == 0
    }

    /// The same equation with its terms reordered: position `i` of the result
    /// holds coefficient `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.arity()];
        if order.len() != self.arity() {
            return Err(Error::LengthMismatch {
                expected: self.arity(),
                got: order.len(),
            });
        }
        for &i in order {
            if i >= self.arity() || seen[i] {
                return Err(Error::Precondition(format!("{order:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Self::new(order.iter().map(|&i| self.coefficients[i]).collect(), self.constant)
    }

    pub fn negated(&self) -> Self {
        LinearEquation {
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            constant: -self.constant,
        }
    }
}

impl fmt::Display for LinearEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &c) in self.coefficients.iter().enumerate() {
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            let sep = if i > 0 { " " } else { "" };
            let space = if i > 0 { " " } else { "" };
            let mag = c.unsigned_abs();
            let coef = if mag == 1 { String::new() } else { mag.to_string() };
            write!(f, "{sep}{sign}{space}{coef}x{}", i + 1)?;
        }
        write!(f, " = {}", self.constant)
    }
}

impl FromStr for LinearEquation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_equation(s)
    }
}

/// Parses either `"c1,...,cl = K"` or a symbolic form such as
/// `"2x1 - 3x2 + x3 = 5"`. In the symbolic form variables may appear on
/// either side; each distinct name is one position, in order of first
/// appearance, and constants are collected on the right.
pub fn parse_equation(text: &str) -> Result<LinearEquation> {
    let (lhs, rhs) = text
        .split_once('=')
        .ok_or_else(|| Error::Syntax("missing '='".into()))?;
    if rhs.contains('=') {
        return Err(Error::Syntax("more than one '='".into()));
    }
    if !text.contains(char::is_alphabetic) {
        let coefficients = lhs
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Syntax(format!("bad coefficient {:?}", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        let constant = rhs
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::Syntax(format!("bad constant {:?}", rhs.trim())))?;
        return LinearEquation::new(coefficients, constant);
    }

    let mut names: Vec<String> = Vec::new();
    let mut coefs: Vec<i64> = Vec::new();
    let mut constant: i64 = 0;
    for (side, sign) in [(lhs, 1i64), (rhs, -1i64)] {
        for (coef, var) in tokenize_side(side)? {
            match var {
                Some(name) => {
                    let idx = match names.iter().position(|n| *n == name) {
                        Some(i) => i,
                        None => {
                            names.push(name);
                            coefs.push(0);
                            coefs.len() - 1
                        }
                    };
                    coefs[idx] += sign * coef;
                }
                None => constant -= sign * coef,
            }
        }
    }
    if coefs.is_empty() {
        return Err(Error::Syntax("no variables".into()));
    }
    LinearEquation::new(coefs, constant)
}

fn tokenize_side(side: &str) -> Result<Vec<(i64, Option<String>)>> {
    let chars: Vec<char> = side.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(Error::Syntax("empty side".into()));
    }
    let mut terms = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let mut sign = 1i64;
        let mut saw_sign = false;
        while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
            if chars[i] == '-' {
                sign = -sign;
            }
            saw_sign = true;
            i += 1;
        }
        if !saw_sign && !terms.is_empty() {
            return Err(Error::Syntax("expected '+' or '-' between terms".into()));
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let digits: String = chars[start..i].iter().collect();
        if i < chars.len() && chars[i] == '*' {
            i += 1;
        }
        let vstart = i;
        if i < chars.len() && chars[i].is_alphabetic() {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
        }
        let name: String = chars[vstart..i].iter().collect();
        if digits.is_empty() && name.is_empty() {
            return Err(Error::Syntax(format!(
                "unexpected character {:?}",
                chars.get(i).copied().unwrap_or(' ')
            )));
        }
        let mag = if digits.is_empty() {
            1
        } else {
            digits
                .parse::<i64>()
                .map_err(|_| Error::Syntax(format!("bad number {digits:?}")))?
        };
        terms.push((sign * mag, (!name.is_empty()).then_some(name)));
    }
    Ok(terms)
}

/// Derived facts about an equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationProfile {
    pub homogeneous: bool,
    pub translation_invariant: bool,
    pub all_same_sign: bool,
    pub coefficient_sum: i64,
    pub gcd: i64,
    /// `K / C` when `C != 0` and `C | K`.
    pub forbidden_singleton: Option<i64>,
}

pub fn classify(eq: &LinearEquation) -> EquationProfile {
    let c = eq.coefficient_sum();
    let gcd = eq
        .coefficients()
        .iter()
        .fold(0i64, |g, &x| g.gcd(&x));
    let forbidden_singleton = (c != 0 && eq.constant() % c == 0).then(|| eq.constant() / c);
    EquationProfile {
        homogeneous: eq.is_homogeneous(),
        translation_invariant: c == 0,
        all_same_sign: eq.all_same_sign(),
        coefficient_sum: c,
        gcd,
        forbidden_singleton,
    }
}

/// A homogeneous equation rearranged as
/// `a1 x1 + a2 x2 + b1 y1 + ... + b_{l-3} y_{l-3} = b0 y0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardForm {
    pub a1: i64,
    pub a2: i64,
    pub b: Vec<i64>,
    pub b0: i64,
    /// `perm[p]` is the original position of standard position `p`, where the
    /// standard positions are ordered `a1, a2, b1, ..., b_{l-3}, b0`.
    pub perm: Vec<usize>,
    /// Whether every coefficient was negated before reordering.
    pub flipped: bool,
}

impl StandardForm {
    pub fn arity(&self) -> usize {
        self.b.len() + 3
    }

    /// Left-hand coefficients `a1, a2, b1, ..., b_{l-3}`.
    pub fn lhs(&self) -> Vec<i64> {
        let mut out = vec![self.a1, self.a2];
        out.extend_from_slice(&self.b);
        out
    }

    /// All coefficients as an equation equal to zero:
    /// `a1, a2, b1, ..., b_{l-3}, -b0`.
    pub fn zero_form(&self) -> Vec<i64> {
        let mut out = self.lhs();
        out.push(-self.b0);
        out
    }

    pub fn as_equation(&self) -> LinearEquation {
        LinearEquation::new(self.zero_form(), 0).expect("standard form coefficients are nonzero")
    }

    /// Common factor of all coefficients, positive.
    pub fn content(&self) -> i64 {
        self.zero_form().iter().fold(0i64, |g, &x| g.gcd(&x))
    }

    /// Recovers the original coefficient vector.
    pub fn original_coefficients(&self) -> Vec<i64> {
        let sign = if self.flipped { -1 } else { 1 };
        let mut out = vec![0; self.arity()];
        for (p, &c) in self.zero_form().iter().enumerate() {
            out[self.perm[p]] = sign * c;
        }
        out
    }
}

/// Rearranges a homogeneous equation with at least three terms into
/// standard form. Ties between equal coefficients are broken by original
/// position.
pub fn standardize(eq: &LinearEquation) -> Result<StandardForm> {
    if !eq.is_homogeneous() {
        return Err(Error::Inhomogeneous(eq.constant()));
    }
    let l = eq.arity();
    if l < 3 {
        return Err(Error::TooFewVariables { need: 3, got: l });
    }
    let c = eq.coefficients();
    let positives = c.iter().filter(|&&x| x > 0).count();
    let negatives = l - positives;

    let flipped = if negatives == 0 || positives == 0 {
        negatives == l
    } else if negatives == 1 || positives == 1 {
        negatives != 1
    } else {
        let neg_sum: i64 = c.iter().filter(|&&x| x < 0).map(|x| -x).sum();
        let pos_sum: i64 = c.iter().filter(|&&x| x > 0).sum();
        neg_sum > pos_sum
    };
    let sign = if flipped { -1 } else { 1 };
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by_key(|&i| (sign * c[i], i));
    let val = |i: usize| sign * c[i];

    let (lhs_idx, rhs_idx): (Vec<usize>, usize) = if positives == 0 || negatives == 0 {
        (order[..l - 1].to_vec(), order[l - 1])
    } else {
        (order[1..].to_vec(), order[0])
    };
    let mut perm = lhs_idx.clone();
    perm.push(rhs_idx);
    let std = StandardForm {
        a1: val(lhs_idx[0]),
        a2: val(lhs_idx[1]),
        b: lhs_idx[2..].iter().map(|&i| val(i)).collect(),
        b0: -val(rhs_idx),
        perm,
        flipped,
    };
    debug_assert_eq!(std.original_coefficients(), c);
    Ok(std)
}

/// True iff every distinct value in `tuple` carries a zero total coefficient.
pub fn is_trivial(eq: &LinearEquation, tuple: &[i64]) -> Result<bool> {
    if tuple.len() != eq.arity() {
        return Err(Error::LengthMismatch {
            expected: eq.arity(),
            got: tuple.len(),
        });
    }
    Ok(trivial_by_value(eq.coefficients(), tuple))
}

pub(crate) fn trivial_by_value(coefficients: &[i64], tuple: &[i64]) -> bool {
    let mut totals: BTreeMap<i64, i64> = BTreeMap::new();
    for (&c, &x) in coefficients.iter().zip(tuple) {
        *totals.entry(x).or_insert(0) += c;
    }
    totals.values().all(|&s| s == 0)
}

/// The equation restricted to a nonempty proper subset of its positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubEquation {
    /// Zero-based kept positions, ascending.
    pub kept_positions: Vec<usize>,
    pub equation: LinearEquation,
}

/// All `2^l - 2` proper sub-equations, ordered by subset bitmask.
pub fn sub_equations(eq: &LinearEquation) -> Vec<SubEquation> {
    let l = eq.arity();
    let full = (1u64 << l) - 1;
    (1..full)
        .map(|mask| {
            let kept: Vec<usize> = (0..l).filter(|i| mask >> i & 1 == 1).collect();
            let coefficients = kept.iter().map(|&i| eq.coefficients()[i]).collect();
            SubEquation {
                equation: LinearEquation::new(coefficients, eq.constant())
                    .expect("nonzero coefficients"),
                kept_positions: kept,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(c: &[i64], k: i64) -> LinearEquation {
        LinearEquation::new(c.to_vec(), k).unwrap()
    }

    #[test]
    fn parses_coefficient_form() {
        let e = parse_equation("1,1,-1=0").unwrap();
        assert_eq!(e.coefficients(), &[1, 1, -1]);
        assert_eq!(e.constant(), 0);
        let e = parse_equation(" 2, 3 , -5 = 7 ").unwrap();
        assert_eq!(e.coefficients(), &[2, 3, -5]);
        assert_eq!(e.constant(), 7);
    }

    #[test]
    fn parses_symbolic_form() {
        let e = parse_equation("x1+x2-2x3=0").unwrap();
        assert_eq!(e.coefficients(), &[1, 1, -2]);
        let e = parse_equation("2x1 - 3x2 + x3 = 5").unwrap();
        assert_eq!(e.coefficients(), &[2, -3, 1]);
        assert_eq!(e.constant(), 5);
        let e = parse_equation("x + y = z + 1").unwrap();
        assert_eq!(e.coefficients(), &[1, 1, -1]);
        assert_eq!(e.constant(), 1);
    }

    #[test]
    fn rejects_zero_and_garbage() {
        assert_eq!(parse_equation("1,0,1=0"), Err(Error::ZeroCoefficient(2)));
        assert!(matches!(parse_equation("x1 + x2 - x1 - x2 + x3 = 0"), Err(Error::ZeroCoefficient(1))));
        assert!(matches!(parse_equation("1,1,-1"), Err(Error::Syntax(_))));
        assert!(matches!(parse_equation("1,a,-1=0"), Err(Error::Syntax(_))));
        assert!(matches!(parse_equation("x1 + = 0"), Err(Error::Syntax(_))));
    }

    #[test]
    fn classify_examples() {
        let p = classify(&eq(&[1, 1, -1], 0));
        assert!(p.homogeneous && !p.translation_invariant);
        assert_eq!((p.coefficient_sum, p.gcd, p.forbidden_singleton), (1, 1, Some(0)));

        let p = classify(&eq(&[1, 1, -2], 0));
        assert!(p.translation_invariant);
        assert_eq!(p.forbidden_singleton, None);

        let p = classify(&eq(&[1, 1, 1], 6));
        assert!(!p.homogeneous && p.all_same_sign);
        assert_eq!((p.coefficient_sum, p.gcd, p.forbidden_singleton), (3, 1, Some(2)));

        let p = classify(&eq(&[2, 4, -6], 5));
        assert_eq!(p.gcd, 2);
        assert_eq!(p.forbidden_singleton, None);
    }

    #[test]
    fn standardize_examples() {
        let s = standardize(&eq(&[1, 1, -1], 0)).unwrap();
        assert_eq!((s.a1, s.a2, s.b0), (1, 1, 1));
        assert!(s.b.is_empty());

        let s = standardize(&eq(&[1, 1, 1], 0)).unwrap();
        assert_eq!((s.a1, s.a2, s.b0), (1, 1, -1));

        let s = standardize(&eq(&[1, -1, 1, -1], 0)).unwrap();
        assert_eq!((s.a1, s.a2, s.b.clone(), s.b0), (-1, 1, vec![1], 1));
        assert_eq!(s.perm, vec![3, 0, 2, 1]);

        let s = standardize(&eq(&[-1, -1, -1], 0)).unwrap();
        assert!(s.flipped);
        assert_eq!((s.a1, s.a2, s.b0), (1, 1, -1));
    }

    #[test]
    fn standardize_rejects() {
        assert_eq!(standardize(&eq(&[1, 1, -1], 2)), Err(Error::Inhomogeneous(2)));
        assert!(matches!(
            standardize(&eq(&[1, -1], 0)),
            Err(Error::TooFewVariables { .. })
        ));
    }

    #[test]
    fn triviality_examples() {
        assert!(is_trivial(&eq(&[1, 1, -2], 0), &[5, 5, 5]).unwrap());
        assert!(!is_trivial(&eq(&[1, 1, -1], 0), &[1, 1, 2]).unwrap());
        assert!(is_trivial(&eq(&[1, -1, 1, -1], 0), &[3, 3, 7, 7]).unwrap());
        assert!(is_trivial(&eq(&[1, 1], 0), &[1]).is_err());
    }

    #[test]
    fn sub_equation_counts() {
        assert_eq!(sub_equations(&eq(&[1, 1, -1], 0)).len(), 6);
        assert_eq!(sub_equations(&eq(&[1, 1, 1, -1], 0)).len(), 14);
        let subs = sub_equations(&eq(&[1, 1, -2], 0));
        assert!(subs
            .iter()
            .any(|s| s.kept_positions == vec![0, 1] && s.equation.coefficients() == [1, 1]));
    }

    #[test]
    fn display_round_trips() {
        let e = eq(&[2, -3, 1], 5);
        assert_eq!(e.to_string(), "2x1 - 3x2 + x3 = 5");
        assert_eq!(parse_equation(&e.to_string()).unwrap(), e);
    }
}

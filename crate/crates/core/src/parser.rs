//! Text format for reversible networks.
//!
//! ```text
//! # bistable network
//! 0 <-> A ; kf=13.5, kr=3.335
//! 2A <-> 3A ; kf=0.132, kr=0.001
//! A + B <-> 2B ; kf=k3, kr=k-3
//! ```
//!
//! A numeric rate gets the positional label `k<i>` / `k-<i>` (1-based line of
//! the reaction among reaction lines). `kf=name:value` attaches a value to a
//! custom label. The rate clause may be omitted entirely.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::network::{build_network, NetworkError, ReactionNetwork, ReversibleReaction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: rate `{label}` must be positive")]
    NegativeOrZeroRate { line: usize, label: String },
    #[error("line {line}, column {column}: unknown token `{token}`")]
    UnknownToken {
        line: usize,
        column: usize,
        token: String,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no value for rate constant(s): {}", .0.join(", "))]
pub struct IncompleteRates(pub Vec<String>);

/// Exact positive rate constants keyed by label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RateAssignment {
    values: BTreeMap<String, BigRational>,
}

impl RateAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, BigRational)>,
        S: Into<String>,
    {
        RateAssignment {
            values: pairs.into_iter().map(|(l, v)| (l.into(), v)).collect(),
        }
    }

    /// Convenience for tests and examples: integer ratio `num/den`.
    pub fn from_ratios<S: Into<String>>(pairs: impl IntoIterator<Item = (S, i64, i64)>) -> Self {
        Self::from_pairs(
            pairs
                .into_iter()
                .map(|(l, n, d)| (l, BigRational::new(n.into(), d.into()))),
        )
    }

    pub fn insert(&mut self, label: impl Into<String>, value: BigRational) {
        self.values.insert(label.into(), value);
    }

    pub fn get(&self, label: &str) -> Option<&BigRational> {
        self.values.get(label)
    }

    pub fn get_f64(&self, label: &str) -> Option<f64> {
        self.values.get(label).and_then(|v| v.to_f64())
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BigRational)> {
        self.values.iter()
    }

    /// Labels of `net` that have no value.
    pub fn missing(&self, net: &ReactionNetwork) -> Vec<String> {
        net.label_order()
            .into_iter()
            .filter(|l| !self.values.contains_key(l))
            .collect()
    }

    pub fn is_complete(&self, net: &ReactionNetwork) -> bool {
        self.missing(net).is_empty()
    }

    pub fn require_complete(&self, net: &ReactionNetwork) -> Result<(), IncompleteRates> {
        let missing = self.missing(net);
        if missing.is_empty() {
            Ok(())
        } else {
            Err(IncompleteRates(missing))
        }
    }

    /// Values from `other` replace or extend these.
    pub fn overridden_by(&self, other: &RateAssignment) -> RateAssignment {
        let mut values = self.values.clone();
        values.extend(other.values.iter().map(|(k, v)| (k.clone(), v.clone())));
        RateAssignment { values }
    }

    pub fn lookup(&self) -> impl Fn(&str) -> Option<BigRational> + '_ {
        move |l| self.values.get(l).cloned()
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::SyntaxError {
        line,
        column,
        message: message.into(),
    }
}

fn is_identifier(tok: &str) -> bool {
    let mut chars = tok.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_label(tok: &str) -> bool {
    let mut chars = tok.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Exact value of a decimal (`13.5`, `1e-3`) or fraction (`1/3`) literal.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Renders integers plainly, terminating decimals as decimals, anything else as `p/q`.
pub fn format_rational(v: &BigRational) -> String {
    if v.is_integer() {
        return v.numer().to_string();
    }
    let mut d = v.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", v.numer(), v.denom());
    }
    let places = twos.max(fives);
    let scaled = v * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    let n = scaled.to_integer();
    let sign = if n.is_negative() { "-" } else { "" };
    let digits = n.abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (ip, fp) = digits.split_at(digits.len() - places);
    format!("{sign}{ip}.{fp}")
}

struct Term {
    coefficient: i64,
    species: String,
}

fn parse_complex(text: &str, line: usize, offset: usize) -> Result<Vec<Term>, ParseError> {
    let trimmed = text.trim();
    let col = offset + text.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
    if trimmed.is_empty() {
        return Err(syntax(line, col, "expected a complex"));
    }
    if trimmed == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut pos = offset;
    for part in text.split('+') {
        let col = pos + part.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        pos += part.len() + 1;
        let tok: String = part.split_whitespace().collect();
        if tok.is_empty() {
            return Err(syntax(line, col, "empty term"));
        }
        let split = tok.find(|c: char| !c.is_ascii_digit()).unwrap_or(tok.len());
        let (num, name) = tok.split_at(split);
        if name.is_empty() {
            return Err(syntax(line, col, format!("term `{tok}` names no species")));
        }
        if !is_identifier(name) {
            return Err(ParseError::UnknownToken {
                line,
                column: col,
                token: tok.clone(),
            });
        }
        let coefficient = if num.is_empty() {
            1
        } else {
            num.parse::<i64>()
                .map_err(|_| syntax(line, col, "coefficient out of range"))?
        };
        if coefficient == 0 {
            return Err(syntax(line, col, "zero coefficient"));
        }
        terms.push(Term {
            coefficient,
            species: name.to_string(),
        });
    }
    Ok(terms)
}

/// A rate field: label and optional value.
fn parse_rate_value(
    text: &str,
    default_label: &str,
    line: usize,
    column: usize,
) -> Result<(String, Option<BigRational>), ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(syntax(line, column, "missing rate value"));
    }
    let (label, value_text) = match text.split_once(':') {
        Some((l, v)) => (l.trim(), Some(v.trim())),
        None if is_label(text) => (text, None),
        None => (default_label, Some(text)),
    };
    if !is_label(label) {
        return Err(ParseError::UnknownToken {
            line,
            column,
            token: label.to_string(),
        });
    }
    let value = match value_text {
        None => None,
        Some(v) => {
            let value = parse_rational(v).ok_or_else(|| ParseError::UnknownToken {
                line,
                column,
                token: v.to_string(),
            })?;
            if !value.is_positive() {
                return Err(ParseError::NegativeOrZeroRate {
                    line,
                    label: label.to_string(),
                });
            }
            Some(value)
        }
    };
    Ok((label.to_string(), value))
}

pub fn parse_network(text: &str) -> Result<(ReactionNetwork, RateAssignment), ParseError> {
    let mut species: Vec<String> = Vec::new();
    let mut raw: Vec<(Vec<Term>, Vec<Term>, String, String)> = Vec::new();
    let mut rates = RateAssignment::new();

    for (line_idx, full) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let body = full.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let (rxn_text, rate_text) = match body.split_once(';') {
            Some((r, k)) => (r, Some(k)),
            None => (body, None),
        };
        let Some(arrow) = rxn_text.find("<->") else {
            let col = rxn_text
                .find("->")
                .or_else(|| rxn_text.find("<-"))
                .map_or(1, |p| p + 1);
            let message = if col > 1 || rxn_text.contains("->") {
                "only reversible reactions `<->` are supported"
            } else {
                "expected `<->`"
            };
            return Err(syntax(line_no, col, message));
        };
        let lhs = &rxn_text[..arrow];
        let rhs = &rxn_text[arrow + 3..];
        if rhs.contains("<->") || rhs.contains("->") || rhs.contains("<-") {
            return Err(syntax(line_no, arrow + 4, "more than one arrow"));
        }
        let reactant = parse_complex(lhs, line_no, 0)?;
        let product = parse_complex(rhs, line_no, arrow + 3)?;
        for t in reactant.iter().chain(&product) {
            if !species.contains(&t.species) {
                species.push(t.species.clone());
            }
        }

        let index = raw.len() + 1;
        let mut kf = (format!("k{index}"), None);
        let mut kr = (format!("k-{index}"), None);
        let mut seen = (false, false);
        if let Some(rate_text) = rate_text {
            let base = rxn_text.len() + 1;
            let mut pos = base;
            for field in rate_text.split(',') {
                let col = pos + field.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
                pos += field.len() + 1;
                if field.trim().is_empty() {
                    continue;
                }
                let Some((key, value)) = field.split_once('=') else {
                    return Err(syntax(line_no, col, "expected `kf=` or `kr=`"));
                };
                match key.trim() {
                    "kf" if !seen.0 => {
                        kf = parse_rate_value(value, &kf.0, line_no, col)?;
                        seen.0 = true;
                    }
                    "kr" if !seen.1 => {
                        kr = parse_rate_value(value, &kr.0, line_no, col)?;
                        seen.1 = true;
                    }
                    "kf" | "kr" => {
                        return Err(syntax(line_no, col, format!("`{}` given twice", key.trim())))
                    }
                    other => {
                        return Err(ParseError::UnknownToken {
                            line: line_no,
                            column: col,
                            token: other.to_string(),
                        })
                    }
                }
            }
        }
        for (label, value) in [&kf, &kr] {
            if let Some(v) = value {
                rates.insert(label.clone(), v.clone());
            }
        }
        raw.push((reactant, product, kf.0, kr.0));
    }

    let s = species.len();
    let to_vec = |terms: &[Term]| {
        let mut v = vec![0i64; s];
        for t in terms {
            let j = species.iter().position(|n| *n == t.species).expect("collected");
            v[j] += t.coefficient;
        }
        v
    };
    let reactions = raw
        .iter()
        .map(|(y, yp, f, b)| ReversibleReaction::new(to_vec(y), to_vec(yp), f.clone(), b.clone()))
        .collect();
    let net = build_network(species, reactions)?;
    Ok((net, rates))
}

fn format_rate(label: &str, default: &str, value: Option<&BigRational>) -> String {
    match value {
        None => label.to_string(),
        Some(v) if label == default => format_rational(v),
        Some(v) => format!("{label}:{}", format_rational(v)),
    }
}

/// Canonical text; `parse_network` of the output reproduces the input.
pub fn serialize_network(net: &ReactionNetwork, rates: &RateAssignment) -> String {
    let mut out = String::new();
    for (i, r) in net.reactions().iter().enumerate() {
        let idx = i + 1;
        let kf = format_rate(&r.forward_label, &format!("k{idx}"), rates.get(&r.forward_label));
        let kr = format_rate(&r.backward_label, &format!("k-{idx}"), rates.get(&r.backward_label));
        let _ = writeln!(
            out,
            "{} <-> {} ; kf={kf}, kr={kr}",
            net.format_complex(&r.reactant.coefficients),
            net.format_complex(&r.product.coefficients)
        );
    }
    out
}

/// Parses `label = value` lines (comments with `#`).
pub fn parse_rates(text: &str) -> Result<RateAssignment, ParseError> {
    let mut rates = RateAssignment::new();
    for (idx, full) in text.lines().enumerate() {
        let line = idx + 1;
        let body = full.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((label, value)) = body.split_once('=') else {
            return Err(syntax(line, 1, "expected `label = value`"));
        };
        let label = label.trim();
        if !is_label(label) {
            return Err(ParseError::UnknownToken {
                line,
                column: 1,
                token: label.to_string(),
            });
        }
        let v = parse_rational(value).ok_or_else(|| ParseError::UnknownToken {
            line,
            column: body.find('=').unwrap_or(0) + 2,
            token: value.trim().to_string(),
        })?;
        if !v.is_positive() {
            return Err(ParseError::NegativeOrZeroRate {
                line,
                label: label.to_string(),
            });
        }
        rates.insert(label, v);
    }
    Ok(rates)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn bistable_rates_are_exact() {
        let (net, rates) =
            parse_network("0 <-> A ; kf=13.5, kr=3.335\n2A <-> 3A ; kf=0.132, kr=0.001\n").unwrap();
        assert_eq!(net.num_species(), 1);
        assert_eq!(rates.get("k1"), Some(&q(27, 2)));
        assert_eq!(rates.get("k-1"), Some(&q(667, 200)));
        assert_eq!(rates.get("k2"), Some(&q(33, 250)));
        assert_eq!(rates.get("k-2"), Some(&q(1, 1000)));
    }

    #[test]
    fn symbolic_labels() {
        let (net, rates) = parse_network("2A <-> A+B ; kf=k2, kr=k-2").unwrap();
        assert!(rates.is_empty());
        assert_eq!(net.reactions()[0].backward_label, "k-2");
        assert_eq!(rates.missing(&net), vec!["k2".to_string(), "k-2".to_string()]);
    }

    #[test]
    fn self_loop_surfaces() {
        assert_eq!(
            parse_network("A <-> A ; kf=1, kr=1").unwrap_err(),
            ParseError::Network(NetworkError::SelfLoop(1))
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse_network("# c\nA -> B ; kf=1, kr=1").unwrap_err() {
            ParseError::SyntaxError { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 3);
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(
            parse_network("A <-> B ; kf=-1, kr=1").unwrap_err(),
            ParseError::NegativeOrZeroRate { line: 1, .. }
        ));
        assert!(matches!(
            parse_network("A <-> B ; kf=0, kr=1").unwrap_err(),
            ParseError::NegativeOrZeroRate { .. }
        ));
        assert!(matches!(
            parse_network("A <-> B ; kx=1").unwrap_err(),
            ParseError::UnknownToken { .. }
        ));
        assert!(matches!(
            parse_network("A <-> B$ ; kf=1").unwrap_err(),
            ParseError::UnknownToken { .. }
        ));
    }

    #[test]
    fn whitespace_and_comments_are_ignored() {
        let a = parse_network("0<->A;kf=1,kr=2").unwrap();
        let b = parse_network("\n  # header\n0   <->   A  ;  kf = 1 ,  kr = 2   # trailing\n\n").unwrap();
        assert_eq!(a.1, b.1);
        assert_eq!(serialize_network(&a.0, &a.1), serialize_network(&b.0, &b.1));
    }

    #[test]
    fn serializer_round_trip() {
        let text = "2A <-> A + B ; kf=1/3, kr=2\nA + B <-> 2B ; kf=k2, kr=k-2\nA + C <-> D + E ; kf=x:0.25, kr=k-3\n0 <-> C\n";
        let (net, rates) = parse_network(text).unwrap();
        let once = serialize_network(&net, &rates);
        assert!(once.contains("kf=1/3"));
        assert!(once.contains("kf=x:0.25"));
        assert!(once.contains("0 <-> C"));
        let (net2, rates2) = parse_network(&once).unwrap();
        assert_eq!(rates, rates2);
        assert_eq!(net.reactions(), net2.reactions());
        assert_eq!(serialize_network(&net2, &rates2), once);
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&q(27, 2)), "13.5");
        assert_eq!(format_rational(&q(667, 200)), "3.335");
        assert_eq!(format_rational(&q(1, 1000)), "0.001");
        assert_eq!(format_rational(&q(1, 3)), "1/3");
        assert_eq!(format_rational(&q(5, 1)), "5");
        assert_eq!(parse_rational("1.5e2"), Some(q(150, 1)));
        assert_eq!(parse_rational("2/4"), Some(q(1, 2)));
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn rates_file() {
        let r = parse_rates("# override\nk1 = 2\nk-1=1/2\n").unwrap();
        assert_eq!(r.get("k-1"), Some(&q(1, 2)));
        assert!(parse_rates("k1 = -2").is_err());
    }
}

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::{GenKind, Generator, LambdaError};

/// A word in the generators. The empty word is the unit `1`.
///
/// Text form: letters `l<i>` and `m<j>` separated by single spaces, or `1`
/// for the empty word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<Generator>);

/// An unreduced linear combination of words, coefficients in `0..p`.
pub type FormalSum = Vec<(u32, Monomial)>;

impl Monomial {
    pub fn new(letters: Vec<Generator>) -> Self {
        Monomial(letters)
    }

    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Generator> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<&Generator> {
        self.0.first()
    }

    pub fn last(&self) -> Option<&Generator> {
        self.0.last()
    }

    pub fn degree(&self, p: u32) -> u32 {
        self.0.iter().map(|g| g.degree(p)).sum()
    }

    /// Number of `λ` letters; equals the degree mod 2.
    pub fn lambda_count(&self) -> usize {
        self.0.iter().filter(|g| g.is_lambda()).count()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Monomial(v)
    }

    /// The split `(self[..at], self[at..])`.
    pub fn split_at(&self, at: usize) -> (Monomial, Monomial) {
        let (a, b) = self.0.split_at(at);
        (Monomial(a.to_vec()), Monomial(b.to_vec()))
    }

    /// Canonical order: length, then degree, then lexicographic on
    /// `(kind, index)` pairs.
    pub fn canonical_cmp(&self, other: &Monomial, p: u32) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.degree(p).cmp(&other.degree(p)))
            .then_with(|| self.0.cmp(&other.0))
    }

    pub fn parse(text: &str) -> Result<Self, LambdaError> {
        if text == "1" {
            return Ok(Monomial::unit());
        }
        if text.is_empty() {
            return Err(LambdaError::Parse("empty monomial (use `1`)".into()));
        }
        let mut letters = Vec::new();
        for tok in text.split(' ') {
            letters.push(parse_letter(tok)?);
        }
        Ok(Monomial(letters))
    }
}

fn parse_letter(tok: &str) -> Result<Generator, LambdaError> {
    let bad = || LambdaError::Parse(format!("bad letter `{tok}`"));
    let (kind, digits) = match tok.as_bytes().first() {
        Some(b'l') => (GenKind::Lambda, &tok[1..]),
        Some(b'm') => (GenKind::Mu, &tok[1..]),
        _ => return Err(bad()),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    // Reject leading zeros so that the text form is canonical.
    if digits.len() > 1 && digits.starts_with('0') {
        return Err(bad());
    }
    let index: u32 = digits.parse().map_err(|_| bad())?;
    match kind {
        GenKind::Lambda => Generator::lambda(index),
        GenKind::Mu => Ok(Generator::mu(index)),
    }
}

impl FromStr for Monomial {
    type Err = LambdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Monomial::parse(s)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl From<Vec<Generator>> for Monomial {
    fn from(v: Vec<Generator>) -> Self {
        Monomial(v)
    }
}

/// Parse formal text `<coeff> <word> + <coeff> <word> ...` (or a bare word,
/// or `0`) into an unreduced sum. Coefficients must lie in `0..p`.
pub(crate) fn parse_formal(text: &str, p: u32) -> Result<FormalSum, LambdaError> {
    let text = text.trim();
    if text == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for term in text.split(" + ") {
        let term = term.trim();
        let (first, rest) = match term.split_once(' ') {
            Some((a, b)) => (a, Some(b)),
            None => (term, None),
        };
        let is_number = !first.is_empty() && first.bytes().all(|b| b.is_ascii_digit());
        match (is_number, rest) {
            (true, Some(word)) => {
                let c: u32 = first
                    .parse()
                    .map_err(|_| LambdaError::Parse(format!("bad coefficient `{first}`")))?;
                if c >= p {
                    return Err(LambdaError::Parse(format!(
                        "coefficient {c} outside 0..{p}"
                    )));
                }
                out.push((c, Monomial::parse(word)?));
            }
            // A bare `1` is the unit word.
            (true, None) if first == "1" => out.push((1, Monomial::unit())),
            (true, None) => {
                return Err(LambdaError::Parse(format!("term `{term}` has no word")))
            }
            (false, _) => out.push((1, Monomial::parse(term)?)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for s in ["1", "l1", "m0", "l2 l3", "m1 l1 m0"] {
            assert_eq!(Monomial::parse(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn rejects_malformed_words() {
        for s in ["", "l0", "x1", "l", "l1  l2", "l01", "l-1", " l1"] {
            assert!(Monomial::parse(s).is_err(), "{s:?}");
        }
    }

    #[test]
    fn degree_and_length() {
        let w = Monomial::parse("l1 m1 l2").unwrap();
        assert_eq!(w.len(), 3);
        // p=3: 3 + 4 + 7
        assert_eq!(w.degree(3), 14);
        assert_eq!(Monomial::unit().degree(3), 0);
    }

    #[test]
    fn formal_text() {
        let f = parse_formal("2 l2 l3 + 1 l1", 3).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].0, 2);
        assert!(parse_formal("3 l1", 3).is_err());
        assert!(parse_formal("0", 3).unwrap().is_empty());
        assert_eq!(parse_formal("1", 3).unwrap(), vec![(1, Monomial::unit())]);
        assert_eq!(parse_formal("2 1", 3).unwrap(), vec![(2, Monomial::unit())]);
    }
}

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::operator::{Operator, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Single-qubit Pauli label. The discriminant is the row index used by
/// b-matrices (I=0, X=1, Y=2, Z=3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(Error::InvalidPauli(c)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> Operator {
        let i = C64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -i, i, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        Operator::from_rows(2, &entries).expect("2x2")
    }
}

/// The standard 2x2 Pauli matrix for a label in `IXYZ` (case-insensitive).
pub fn pauli_matrix(label: char) -> Result<Operator> {
    Pauli::from_char(label).map(Pauli::matrix)
}

/// A tensor product of single-qubit Paulis; position 0 is the leftmost
/// factor and the most significant bit of basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        PauliString(vec![Pauli::I; num_qubits])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Dense matrix, built directly from the bit-flip and phase masks.
    pub fn matrix(&self) -> Operator {
        let n = self.len();
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        self.accumulate_into(&mut m, 1.0);
        Operator::from_matrix_unchecked(m)
    }

    fn masks(&self) -> (usize, usize, u32) {
        let n = self.len();
        let (mut flip, mut sign, mut ys) = (0usize, 0usize, 0u32);
        for (q, &p) in self.0.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    ys += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        (flip, sign, ys)
    }

    /// `m += coeff * self` in place.
    pub(crate) fn accumulate_into(&self, m: &mut DMatrix<C64>, coeff: f64) {
        let (flip, sign, ys) = self.masks();
        let base = match ys % 4 {
            0 => C64::new(coeff, 0.0),
            1 => C64::new(0.0, coeff),
            2 => C64::new(-coeff, 0.0),
            _ => C64::new(0.0, -coeff),
        };
        for col in 0..m.ncols() {
            let phase = if (col & sign).count_ones() % 2 == 1 {
                -base
            } else {
                base
            };
            m[(col ^ flip, col)] += phase;
        }
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>().map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// A real-weighted sum of distinct Pauli strings on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliObservable {
    num_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliObservable {
    pub fn new(num_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::invalid("observable", "zero qubits"));
        }
        let mut seen = HashSet::new();
        for (c, s) in &terms {
            if s.len() != num_qubits {
                return Err(Error::DimensionMismatch(format!(
                    "Pauli word {s} on a {num_qubits}-qubit observable"
                )));
            }
            if !c.is_finite() {
                return Err(Error::invalid("observable", format!("coefficient of {s} is {c}")));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::invalid("observable", format!("duplicate Pauli string {s}")));
            }
        }
        Ok(PauliObservable { num_qubits, terms })
    }

    /// Convenience constructor from `(coefficient, word)` pairs.
    pub fn from_terms(terms: &[(f64, &str)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|(c, w)| w.parse::<PauliString>().map(|s| (*c, s)))
            .collect::<Result<Vec<_>>>()?;
        let n = parsed.first().map(|(_, s)| s.len()).unwrap_or(0);
        Self::new(n, parsed)
    }

    /// Parses the fixture format: one `<coefficient> <word>` per line, `#`
    /// starts a comment, words are case-insensitive.
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(c), Some(w), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected `<coefficient> <word>`, got {line:?}"),
                });
            };
            let coeff: f64 = c.parse().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("bad coefficient {c:?}: {e}"),
            })?;
            let word: PauliString = w.parse().map_err(|e: Error| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
            match n {
                None => n = Some(word.len()),
                Some(k) if k != word.len() => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("word {w} has {} qubits, expected {k}", word.len()),
                    })
                }
                _ => {}
            }
            terms.push((coeff, word));
        }
        let n = n.ok_or(Error::Empty("observable file has no terms"))?;
        Self::new(n, terms)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_fixture_string(&self) -> String {
        self.terms
            .iter()
            .map(|(c, s)| format!("{c:e} {s}\n"))
            .collect()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn matrix(&self) -> Operator {
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, s) in &self.terms {
            s.accumulate_into(&mut m, *c);
        }
        Operator::from_matrix_unchecked(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::tensor;

    #[test]
    fn pauli_definitions() {
        let z = pauli_matrix('Z').unwrap();
        assert_eq!(z, Operator::diag(&[1.0, -1.0]));
        let x = pauli_matrix('x').unwrap();
        assert_eq!(x, Operator::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap());
        let y = pauli_matrix('Y').unwrap();
        assert_eq!(y.get(0, 1), C64::new(0.0, -1.0));
        assert_eq!(y.get(1, 0), C64::new(0.0, 1.0));
        assert!(matches!(pauli_matrix('Q'), Err(Error::InvalidPauli('Q'))));
    }

    #[test]
    fn string_matrix_matches_kronecker() {
        for word in ["XYZI", "YY", "ZXY", "IIY", "Y"] {
            let s: PauliString = word.parse().unwrap();
            let kron = tensor(&s.0.iter().map(|p| p.matrix()).collect::<Vec<_>>()).unwrap();
            assert!(s.matrix().distance(&kron) < 1e-15, "{word}");
        }
    }

    #[test]
    fn fixture_parsing() {
        let text = "# H\n-0.5 iz\n0.25 XX # trailing\n\n";
        let obs = PauliObservable::parse(text).unwrap();
        assert_eq!(obs.num_qubits(), 2);
        assert_eq!(obs.terms()[0].1.to_string(), "IZ");
        assert!(PauliObservable::parse("1.0 XX\n2.0 X\n").is_err());
        assert!(PauliObservable::parse("1.0 XX\n2.0 xx\n").is_err());
        assert!(PauliObservable::parse("abc XX\n").is_err());
        assert!(PauliObservable::parse("# nothing\n").is_err());
    }
}

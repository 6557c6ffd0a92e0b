use crate::error::{Error, Result};

/// Mixed-radix packing of outcome words `(m_1, ..., m_N)` into one integer,
/// qubit 0 most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeSpace {
    radices: Vec<usize>,
}

impl OutcomeSpace {
    pub fn new(radices: Vec<usize>) -> Result<Self> {
        if radices.is_empty() {
            return Err(Error::Empty("outcome space with no qubits"));
        }
        if radices.contains(&0) {
            return Err(Error::invalid("outcome space", "qubit with zero outcomes"));
        }
        let mut total: u64 = 1;
        for &r in &radices {
            total = total
                .checked_mul(r as u64)
                .ok_or_else(|| Error::TooLarge("outcome words do not fit in 64 bits".into()))?;
        }
        Ok(OutcomeSpace { radices })
    }

    pub fn uniform(num_qubits: usize, m: usize) -> Result<Self> {
        Self::new(vec![m; num_qubits])
    }

    pub fn num_qubits(&self) -> usize {
        self.radices.len()
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    /// Number of distinct words.
    pub fn size(&self) -> u64 {
        self.radices.iter().map(|&r| r as u64).product()
    }

    pub fn encode(&self, word: &[usize]) -> Result<u64> {
        if word.len() != self.radices.len() {
            return Err(Error::DimensionMismatch(format!(
                "outcome word of length {} for {} qubits",
                word.len(),
                self.radices.len()
            )));
        }
        let mut idx = 0u64;
        for (q, (&m, &r)) in word.iter().zip(&self.radices).enumerate() {
            if m >= r {
                return Err(Error::invalid("outcome word", format!("qubit {q} outcome {m} >= {r}")));
            }
            idx = idx * r as u64 + m as u64;
        }
        Ok(idx)
    }

    pub fn decode(&self, mut idx: u64) -> Vec<usize> {
        let mut word = vec![0; self.radices.len()];
        for (slot, &r) in word.iter_mut().zip(&self.radices).rev() {
            *slot = (idx % r as u64) as usize;
            idx /= r as u64;
        }
        word
    }

    /// Text form: one digit per qubit when every radix is at most 10,
    /// otherwise comma-separated integers.
    pub fn format(&self, idx: u64) -> String {
        let word = self.decode(idx);
        if self.radices.iter().all(|&r| r <= 10) {
            word.iter().map(|m| char::from(b'0' + *m as u8)).collect()
        } else {
            word.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    pub fn parse(&self, text: &str) -> Result<u64> {
        let text = text.trim();
        let word: Vec<usize> = if text.contains(',') || self.radices.iter().any(|&r| r > 10) {
            text.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::invalid("outcome word", format!("{text:?}: {e}")))?
        } else {
            text.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::invalid("outcome word", format!("{text:?}")))?
        };
        self.encode(&word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode() {
        let s = OutcomeSpace::new(vec![4, 6, 2]).unwrap();
        assert_eq!(s.size(), 48);
        for idx in 0..48 {
            assert_eq!(s.encode(&s.decode(idx)).unwrap(), idx);
        }
        assert_eq!(s.encode(&[1, 0, 1]).unwrap(), 13);
        assert!(s.encode(&[4, 0, 0]).is_err());
        assert!(s.encode(&[0, 0]).is_err());
        assert_eq!(s.format(13), "101");
        assert_eq!(s.parse("101").unwrap(), 13);
        let wide = OutcomeSpace::new(vec![12, 3]).unwrap();
        assert_eq!(wide.format(wide.encode(&[11, 2]).unwrap()), "11,2");
        assert_eq!(wide.parse("11,2").unwrap(), 35);
        assert!(OutcomeSpace::new(vec![]).is_err());
        assert!(OutcomeSpace::new(vec![1 << 20; 4]).is_err());
    }
}

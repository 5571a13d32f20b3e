use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A pair `C^perp ⊆ C` of binary linear codes on `m <= 32` bits that corrects
/// `d` errors between the classes `C^perp` and `C^perp xor 1`.
///
/// Words are little-endian: position `i` of a block is bit `i` of the `u64`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BaseCodeJson", into = "BaseCodeJson")]
pub struct BaseCode {
    m: usize,
    gen_c: Vec<u64>,
    gen_dual: Vec<u64>,
    d: usize,
    dual_words: Vec<u64>,
}

/// On-disk form: generator rows as `'0'/'1'` strings, position 0 first.
#[derive(Serialize, Deserialize)]
struct BaseCodeJson {
    m: usize,
    c: Vec<String>,
    c_perp: Vec<String>,
    d: usize,
}

fn parse_row(s: &str, m: usize) -> Result<u64> {
    if s.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: s.len() });
    }
    s.chars().enumerate().try_fold(0u64, |acc, (i, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << i),
        _ => Err(Error::invalid(format!("invalid bit {c:?} in generator row"))),
    })
}

fn format_row(w: u64, m: usize) -> String {
    (0..m).map(|i| if w >> i & 1 == 1 { '1' } else { '0' }).collect()
}

impl TryFrom<BaseCodeJson> for BaseCode {
    type Error = Error;

    fn try_from(j: BaseCodeJson) -> Result<Self> {
        let rows = |v: &[String]| v.iter().map(|s| parse_row(s, j.m)).collect::<Result<Vec<_>>>();
        BaseCode::new(j.m, rows(&j.c)?, rows(&j.c_perp)?, j.d)
    }
}

impl From<BaseCode> for BaseCodeJson {
    fn from(b: BaseCode) -> Self {
        BaseCodeJson {
            m: b.m,
            c: b.gen_c.iter().map(|&w| format_row(w, b.m)).collect(),
            c_perp: b.gen_dual.iter().map(|&w| format_row(w, b.m)).collect(),
            d: b.d,
        }
    }
}

/// Row-reduces `rows` and returns a basis of their span.
fn basis(rows: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for &r in rows {
        let reduced = out.iter().fold(r, |v, &b| v.min(v ^ b));
        if reduced != 0 {
            out.push(reduced);
            out.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    out
}

fn span(basis: &[u64]) -> Vec<u64> {
    let mut words = vec![0u64];
    for &b in basis {
        let extra: Vec<u64> = words.iter().map(|&w| w ^ b).collect();
        words.extend(extra);
    }
    words.sort_unstable();
    words
}

impl BaseCode {
    /// Validates duality, `C^perp ⊆ C`, and the `2d + 1` class distance.
    pub fn new(m: usize, gen_c: Vec<u64>, gen_dual: Vec<u64>, d: usize) -> Result<Self> {
        if m == 0 || m > 32 {
            return Err(Error::invalid(format!("block length {m} outside 1..=32")));
        }
        let mask = (1u64 << m) - 1;
        if gen_c.iter().chain(&gen_dual).any(|&w| w & !mask != 0) {
            return Err(Error::invalid("generator row wider than the block"));
        }
        let bc = basis(&gen_c);
        let bd = basis(&gen_dual);
        if bc.len() + bd.len() != m {
            return Err(Error::invalid(format!(
                "dimensions {} + {} do not add up to {m}",
                bc.len(),
                bd.len()
            )));
        }
        if bc.iter().any(|&a| bd.iter().any(|&b| (a & b).count_ones() % 2 == 1)) {
            return Err(Error::invalid("codes are not orthogonal"));
        }
        if bd.len() > 20 {
            return Err(Error::invalid("dual code too large to enumerate"));
        }
        let dual_words = span(&bd);
        let c_basis_words = bc.clone();
        if dual_words
            .iter()
            .any(|&w| c_basis_words.iter().fold(w, |v, &b| v.min(v ^ b)) != 0)
        {
            return Err(Error::invalid("C^perp is not contained in C"));
        }
        let class_distance = dual_words.iter().map(|&w| m - w.count_ones() as usize).min().unwrap_or(m);
        if class_distance < 2 * d + 1 {
            return Err(Error::invalid(format!(
                "classes are {class_distance} apart, need {} to correct {d} errors",
                2 * d + 1
            )));
        }
        Ok(BaseCode {
            m,
            gen_c,
            gen_dual,
            d,
            dual_words,
        })
    }

    /// `C` = [7,4,3] Hamming code, `C^perp` = its [7,3,4] simplex dual, `d = 1`.
    pub fn hamming_7_4() -> Self {
        let c = ["1110000", "1001100", "0101010", "1101001"];
        let dual = ["0001111", "0110011", "1010101"];
        let rows = |v: &[&str]| v.iter().map(|s| parse_row(s, 7).unwrap()).collect();
        BaseCode::new(7, rows(&c), rows(&dual), 1).expect("Hamming pair is valid")
    }

    /// `C^perp = {0}` and `C` everything on `m` bits, so the two classes are
    /// the repetition codewords; corrects `(m - 1) / 2` errors.
    pub fn repetition(m: usize) -> Result<Self> {
        BaseCode::new(m, (0..m).map(|i| 1 << i).collect(), Vec::new(), m.saturating_sub(1) / 2)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("base codes always serialize")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// All-ones word of the block.
    pub fn ones(&self) -> u64 {
        (1u64 << self.m) - 1
    }

    /// Every word of `C^perp`, sorted.
    pub fn dual_words(&self) -> &[u64] {
        &self.dual_words
    }

    /// Words of class `b`: `C^perp` for 0, `C^perp xor 1` for 1.
    pub fn class_words(&self, b: bool) -> impl Iterator<Item = u64> + '_ {
        let shift = if b { self.ones() } else { 0 };
        self.dual_words.iter().map(move |&w| w ^ shift)
    }
}

impl Default for BaseCode {
    fn default() -> Self {
        BaseCode::hamming_7_4()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_pair() {
        let b = BaseCode::hamming_7_4();
        assert_eq!(b.dual_words().len(), 8);
        assert!(b.dual_words()[1..].iter().all(|w| w.count_ones() == 4));
        let back = BaseCode::from_json(&b.to_json()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn rejects_bad_codes() {
        // Not dual: dimensions too small.
        assert!(BaseCode::new(3, vec![0b011], vec![0b111], 0).is_err());
        // Distance too small for the requested d.
        assert!(BaseCode::new(7, BaseCode::hamming_7_4().gen_c.clone(), BaseCode::hamming_7_4().gen_dual.clone(), 2).is_err());
        assert!(BaseCode::from_json(r#"{"m":3,"c":["102"],"c_perp":[],"d":0}"#).is_err());
        assert_eq!(BaseCode::repetition(5).unwrap().d(), 2);
    }
}

//! Numerical checks of the structural facts about the concatenated code sets,
//! each returned as a [`CheckReport`]. At `r = 1` the sets `A_b`, `B_b` are
//! built by brute force from the class words, independently of the decoder.

use std::collections::BTreeSet;

use rand::Rng;

use super::{robust_simon_eval, BaseCode, ConcatCodeSpec, DecodedBit};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::metrics::CheckReport;
use crate::oracles::{make_simon, SimonSpec};
use crate::qsim::trajectory_rng;

/// Largest base length for the exhaustive `r = 1` checks.
pub const MAX_EXHAUSTIVE_M: usize = 20;

fn word(x: u64, m: usize) -> BitString {
    BitString::from_bools((0..m).map(|i| x >> i & 1 == 1))
}

/// Exhaustive checks at `r = 1` and sampled checks at `r = 2`, with
/// `trials` random strings and `trials` encoded words with sparse flips.
pub fn code_lemma_checks(base: &BaseCode, trials: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let m = base.m();
    if m > MAX_EXHAUSTIVE_M {
        return Err(Error::Capacity {
            backend: "exhaustive code check",
            max: MAX_EXHAUSTIVE_M,
            requested: m,
        });
    }
    let spec1 = ConcatCodeSpec::new(base.clone(), 1)?;
    let d = base.d() as u32;
    let class = |b: bool| base.class_words(b).collect::<BTreeSet<u64>>();
    let (b0, b1) = (class(false), class(true));
    let near = |set: &BTreeSet<u64>| -> BTreeSet<u64> {
        (0..1u64 << m).filter(|x| set.iter().any(|w| (x ^ w).count_ones() <= d)).collect()
    };
    let (a0, a1) = (near(&b0), near(&b1));
    let ones = base.ones();

    let mut mismatches = 0usize;
    for x in 0..1u64 << m {
        let expect = if a0.contains(&x) {
            DecodedBit::Zero
        } else if a1.contains(&x) {
            DecodedBit::One
        } else {
            DecodedBit::Bottom
        };
        if spec1.membership_a(&word(x, m))? != expect {
            mismatches += 1;
        }
    }

    let mut out = vec![
        CheckReport::eq("A_0 and A_1 are disjoint (r=1)", a0.intersection(&a1).count() as f64, 0.0, 0.0)
            .with_note(format!("|A_0| = {}, |A_1| = {}", a0.len(), a1.len())),
        CheckReport::boolean(
            "A_1 = A_0 + 1 (r=1)",
            a0.iter().map(|x| x ^ ones).collect::<BTreeSet<_>>() == a1,
        ),
        CheckReport::boolean("B_b lies inside A_b (r=1)", b0.is_subset(&a0) && b1.is_subset(&a1)),
        CheckReport::eq("membership decoder matches brute force (r=1)", mismatches as f64, 0.0, 0.0),
    ];

    let spec2 = ConcatCodeSpec::new(base.clone(), 2)?;
    let len = spec2.block_len();
    let mut rng = trajectory_rng(seed, 0);
    let mut contradictions = 0usize;
    for _ in 0..trials {
        let x = BitString::from_bools((0..len).map(|_| rng.random_bool(0.5)));
        let a = spec2.membership_a(&x)?;
        let c = spec2.membership_a(&x.complement())?;
        let symmetric = match a {
            DecodedBit::Zero => c == DecodedBit::One,
            DecodedBit::One => c == DecodedBit::Zero,
            DecodedBit::Bottom => c == DecodedBit::Bottom,
        };
        let majority_agrees = match a.bit() {
            Some(b) => spec2.recursive_majority_decode(&x)? == b,
            None => true,
        };
        if !(symmetric && majority_agrees) {
            contradictions += 1;
        }
    }
    out.push(
        CheckReport::eq("membership is complement symmetric and agrees with majority (r=2)", contradictions as f64, 0.0, 0.0)
            .with_note(format!("{trials} random strings")),
    );

    let f = make_simon(&SimonSpec::new(2, 0b11, seed)?)?;
    let mut changed = 0usize;
    for _ in 0..trials {
        let z: u64 = rng.random_range(0..4);
        let x = spec2.encode_word(&[z >> 1 == 1, z & 1 == 1], &mut rng);
        let flips = BitString::concat(&[spec2.random_sparse_flips(&mut rng), spec2.random_sparse_flips(&mut rng)]);
        if robust_simon_eval(&x, &spec2, &f)? != robust_simon_eval(&x.xor(&flips)?, &spec2, &f)? {
            changed += 1;
        }
    }
    out.push(
        CheckReport::eq("robust Simon output is unchanged by sparse flips (r=2)", changed as f64, 0.0, 0.0)
            .with_note(format!("{trials} encoded words")),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_passes_all_checks() {
        let reports = code_lemma_checks(&BaseCode::hamming_7_4(), 500, 1).unwrap();
        assert_eq!(reports.len(), 6);
        assert!(reports.iter().all(|r| r.holds), "{reports:?}");
    }
}

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::simon::random_bijection;
use super::{ClassicalOracle, QueryCounter};
use crate::bits::low_mask;
use crate::error::{Error, Result};
use crate::qsim::kernels::{gather, scatter};
use crate::qsim::{check_wires, DensityMatrix, PureState, QuantumOracle};

/// Default number of sampled shuffles used to approximate the oracle mixture.
pub const DEFAULT_SAMPLES: usize = 64;
/// Largest level width `(d + 2) n` for which shuffles are tabulated.
pub const MAX_LEVEL_BITS: usize = 16;

/// One draw `(f_0, ..., f_d)` of the shuffle distribution.
#[derive(Clone, Debug)]
pub struct Shuffle {
    /// `maps[i][x] = f_i(x)` on `(d + 2) n` bits.
    maps: Vec<Vec<u32>>,
}

impl Shuffle {
    pub fn level(&self, i: usize) -> &[u32] {
        &self.maps[i]
    }

    pub fn depth(&self) -> usize {
        self.maps.len() - 1
    }

    /// `f_{d-1} o ... o f_0 (x)`.
    pub fn compose_prefix(&self, x: u64) -> u64 {
        self.maps[..self.depth()].iter().fold(x, |v, m| m[v as usize] as u64)
    }

    /// The set `S_d` as a sorted list.
    pub fn support(&self, n: usize) -> Vec<u64> {
        let mut s: Vec<u64> = (0..1u64 << n).map(|x| self.compose_prefix(x)).collect();
        s.sort_unstable();
        s
    }
}

/// Mixture of `K` sampled shuffles of a base function `f: {0,1}^n -> {0,1}^n`.
///
/// Levels act on `(d + 2) n`-bit strings. The level index `i` of each
/// `|i, x_i>|y_i>` slot is fixed by which view is applied, so a slot uses
/// `2 (d + 2) n` wires.
pub struct ShufflingOracle {
    n: usize,
    d: usize,
    samples: Vec<Shuffle>,
    counter: QueryCounter,
}

impl ShufflingOracle {
    /// Eagerly draws `k` shuffles; sample `j` uses RNG stream `j` of `seed`.
    pub fn new(f: &ClassicalOracle, d: usize, k: usize, seed: u64) -> Result<Self> {
        let n = f.n_in();
        if f.m_out() != n {
            return Err(Error::invalid("shuffling needs an n -> n base function"));
        }
        if d == 0 {
            return Err(Error::invalid("shuffling depth must be at least 1"));
        }
        if k == 0 {
            return Err(Error::invalid("need at least one sampled shuffle"));
        }
        let w = (d + 2) * n;
        if w > MAX_LEVEL_BITS {
            return Err(Error::Capacity {
                backend: "shuffling table",
                max: MAX_LEVEL_BITS,
                requested: w,
            });
        }
        let samples = (0..k)
            .map(|j| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(j as u64);
                let mut maps: Vec<Vec<u32>> = (0..d)
                    .map(|_| random_bijection(w, &mut rng).into_iter().map(|v| v as u32).collect())
                    .collect();
                let mut last = vec![0u32; 1 << w];
                for x in 0..1u64 << n {
                    let p = maps.iter().fold(x, |v, m| m[v as usize] as u64);
                    last[p as usize] = f.peek(x) as u32;
                }
                maps.push(last);
                Shuffle { maps }
            })
            .collect();
        Ok(ShufflingOracle {
            n,
            d,
            samples,
            counter: QueryCounter::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.d
    }

    /// Level width `(d + 2) n`.
    pub fn width(&self) -> usize {
        (self.d + 2) * self.n
    }

    pub fn samples(&self) -> &[Shuffle] {
        &self.samples
    }

    pub fn counter(&self) -> &QueryCounter {
        &self.counter
    }

    /// Oracle acting on slot `i` only, `|x_i>|y_i> -> |x_i>|y_i xor f_i(x_i)>`.
    pub fn slot_view(self: &Arc<Self>, i: usize) -> Result<Arc<dyn QuantumOracle>> {
        if i > self.d {
            return Err(Error::invalid(format!("slot {i} exceeds depth {}", self.d)));
        }
        Ok(Arc::new(ShuffleView {
            inner: Arc::clone(self),
            levels: vec![i],
        }))
    }

    /// Oracle acting on all `d + 1` slots at once with one shared draw.
    pub fn full_view(self: &Arc<Self>) -> Arc<dyn QuantumOracle> {
        Arc::new(ShuffleView {
            inner: Arc::clone(self),
            levels: (0..=self.d).collect(),
        })
    }
}

struct ShuffleView {
    inner: Arc<ShufflingOracle>,
    levels: Vec<usize>,
}

impl ShuffleView {
    fn index_map<'a>(&'a self, sample: &'a Shuffle, n: usize, wires: &[usize]) -> impl Fn(usize) -> usize + 'a {
        let w = self.inner.width();
        let slots: Vec<(usize, Vec<usize>, Vec<usize>)> = self
            .levels
            .iter()
            .zip(wires.chunks(2 * w))
            .map(|(&lvl, c)| (lvl, c[..w].to_vec(), c[w..].to_vec()))
            .collect();
        move |mut i| {
            for (lvl, xs, ys) in &slots {
                let x = gather(i, n, xs);
                let y = gather(i, n, ys);
                i = scatter(i, n, ys, (y ^ sample.level(*lvl)[x as usize] as u64) & low_mask(w));
            }
            i
        }
    }
}

impl QuantumOracle for ShuffleView {
    fn n_wires(&self) -> usize {
        2 * self.inner.width() * self.levels.len()
    }

    /// Applies one uniformly chosen sampled shuffle.
    fn apply_pure(&self, state: &mut PureState, wires: &[usize], rng: &mut dyn RngCore) -> Result<()> {
        check_wires(self.n_wires(), wires)?;
        crate::qsim::check_register(wires, state.n_qubits())?;
        let k = rng.random_range(0..self.inner.samples.len());
        state.permute(self.index_map(&self.inner.samples[k], state.n_qubits(), wires));
        self.inner.counter.increment();
        Ok(())
    }

    /// Uniform mixture over every sampled shuffle.
    fn apply_density(&self, rho: &mut DensityMatrix, wires: &[usize]) -> Result<()> {
        check_wires(self.n_wires(), wires)?;
        crate::qsim::check_register(wires, rho.n_qubits())?;
        let n = rho.n_qubits();
        let k = self.inner.samples.len() as f64;
        let mut acc = vec![C64::new(0.0, 0.0); rho.entries().len()];
        for sample in &self.inner.samples {
            let mut term = rho.clone();
            term.permute(self.index_map(sample, n, wires));
            for (a, v) in acc.iter_mut().zip(term.entries()) {
                *a += v / k;
            }
        }
        *rho = DensityMatrix::from_raw(n, acc)?;
        self.inner.counter.increment();
        Ok(())
    }

    fn label(&self) -> String {
        format!("shuffling(n={}, d={}, levels={:?})", self.inner.n, self.inner.d, self.levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{make_simon, SimonSpec};

    fn base(n: usize, s: u64) -> ClassicalOracle {
        make_simon(&SimonSpec::new(n, s, 5).unwrap()).unwrap()
    }

    #[test]
    fn levels_are_bijections_and_support_has_size_2n() {
        let so = ShufflingOracle::new(&base(1, 1), 2, 8, 1).unwrap();
        for s in so.samples() {
            for lvl in 0..2 {
                let mut seen = s.level(lvl).to_vec();
                seen.sort_unstable();
                assert_eq!(seen, (0..16).collect::<Vec<u32>>());
            }
            let support = s.support(1);
            assert_eq!(support.len(), 2);
            assert_ne!(support[0], support[1]);
            for x in 0..16u64 {
                if !support.contains(&x) {
                    assert_eq!(s.level(2)[x as usize], 0);
                }
            }
        }
    }

    #[test]
    fn depth_one_support_is_image_of_first_strings() {
        let so = ShufflingOracle::new(&base(1, 0), 1, 4, 3).unwrap();
        for s in so.samples() {
            let mut expected = vec![s.level(0)[0] as u64, s.level(0)[1] as u64];
            expected.sort_unstable();
            assert_eq!(s.support(1), expected);
        }
    }

    #[test]
    fn composition_recovers_base_function() {
        for secret in [0, 1] {
            let f = base(1, secret);
            let so = ShufflingOracle::new(&f, 2, 16, 9).unwrap();
            for s in so.samples() {
                for x in 0..2u64 {
                    assert_eq!(s.level(2)[s.compose_prefix(x) as usize] as u64, f.peek(x));
                }
            }
        }
    }

    #[test]
    fn density_view_is_mixture_of_pure_views() {
        let so = Arc::new(ShufflingOracle::new(&base(1, 1), 1, 3, 2).unwrap());
        let view = so.slot_view(0).unwrap();
        let wires: Vec<usize> = (0..6).collect();
        let mut psi = PureState::new(6).unwrap();
        for q in 0..3 {
            psi.apply_gate(&crate::qsim::Gate::h(q)).unwrap();
        }
        let mut rho = DensityMatrix::from_pure(&psi).unwrap();
        view.apply_density(&mut rho, &wires).unwrap();
        let parts: Vec<(f64, DensityMatrix)> = so
            .samples()
            .iter()
            .map(|s| {
                let mut p = psi.clone();
                p.permute(ShuffleView { inner: Arc::clone(&so), levels: vec![0] }.index_map(s, 6, &wires));
                (1.0 / 3.0, DensityMatrix::from_pure(&p).unwrap())
            })
            .collect();
        let expected = DensityMatrix::mix(&parts).unwrap();
        assert!(crate::metrics::trace_distance(&rho, &expected).unwrap() < 1e-12);
        assert_eq!(so.counter().get(), 1);
        assert!(so.slot_view(2).is_err());
        assert!(ShufflingOracle::new(&base(1, 1), 0, 3, 2).is_err());
    }
}

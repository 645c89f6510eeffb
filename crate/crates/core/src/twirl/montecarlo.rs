use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{canonical_systems, resolve_pairs, SenderPair};
use crate::error::{Error, Result};
use crate::random::{haar_unitary, seeded_rng, stream_rng};
use crate::tensor::{strides, MultipartiteOperator, SystemLabel, C64};

/// Samples per work unit. Chunk sums are combined in index order, so the
/// result does not depend on how chunks are scheduled.
pub const CHUNK: usize = 64;

/// Haar unitary on one system, as an operator on that system.
pub fn sample_haar(system: &SystemLabel, seed: u64) -> Result<MultipartiteOperator> {
    let u = haar_unitary(system.dim(), &mut seeded_rng(seed));
    MultipartiteOperator::new(vec![system.clone()], u)
}

/// Row-major square matrix stored as separate real and imaginary planes,
/// with a digit structure on the row index.
struct Planes {
    side: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Planes {
    fn load(&mut self, re: &[f64], im: &[f64]) {
        self.re.copy_from_slice(re);
        self.im.copy_from_slice(im);
    }

    /// `x <- (I ⊗ u ⊗ I) x` with `u` (d x d) acting on the row digit of stride `st`.
    fn left_apply(&mut self, d: usize, st: usize, u: &DMatrix<C64>, scratch: &mut Planes) {
        let n = self.side;
        let pre = n / (d * st);
        for p in 0..pre {
            for q in 0..st {
                for b in 0..d {
                    let r = (p * d + b) * st + q;
                    scratch.re[b * n..(b + 1) * n].copy_from_slice(&self.re[r * n..(r + 1) * n]);
                    scratch.im[b * n..(b + 1) * n].copy_from_slice(&self.im[r * n..(r + 1) * n]);
                }
                for a in 0..d {
                    let r = (p * d + a) * st + q;
                    let dre = &mut self.re[r * n..(r + 1) * n];
                    let dim = &mut self.im[r * n..(r + 1) * n];
                    for b in 0..d {
                        let (cr, ci) = (u[(a, b)].re, u[(a, b)].im);
                        let sre = &scratch.re[b * n..(b + 1) * n];
                        let sim = &scratch.im[b * n..(b + 1) * n];
                        if b == 0 {
                            for j in 0..n {
                                dre[j] = cr * sre[j] - ci * sim[j];
                                dim[j] = cr * sim[j] + ci * sre[j];
                            }
                        } else {
                            for j in 0..n {
                                dre[j] += cr * sre[j] - ci * sim[j];
                                dim[j] += cr * sim[j] + ci * sre[j];
                            }
                        }
                    }
                }
            }
        }
    }

    fn adjoint_in_place(&mut self) {
        let n = self.side;
        for i in 0..n {
            self.im[i * n + i] = -self.im[i * n + i];
            for j in (i + 1)..n {
                self.re.swap(i * n + j, j * n + i);
                let t = self.im[i * n + j];
                self.im[i * n + j] = -self.im[j * n + i];
                self.im[j * n + i] = -t;
            }
        }
    }
}

/// Empirical twirl `(1/N) sum_s W_s M W_s^dag`, `W_s = ⊗_i U_i ⊗ U_i`, where
/// sample `s` draws its unitaries (sender order) from `stream_rng(seed, s)`.
pub fn monte_carlo_twirl<S: AsRef<str>>(
    m: &MultipartiteOperator,
    pairs: &[(S, S)],
    samples: usize,
    seed: u64,
) -> Result<MultipartiteOperator> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let pairs: Vec<SenderPair> = resolve_pairs(m, pairs)?;
    let layout = canonical_systems(&pairs);
    let names: Vec<&str> = layout.iter().map(SystemLabel::name).collect();
    let mc = m.reorder(&names)?;
    let n = mc.side();
    let (base_re, base_im): (Vec<f64>, Vec<f64>) = {
        let t = mc.matrix().transpose();
        (t.iter().map(|z| z.re).collect(), t.iter().map(|z| z.im).collect())
    };
    let full: Vec<usize> = pairs.iter().flat_map(|p| [p.dim(), p.dim()]).collect();
    let st = strides(&full);
    let dmax = full.iter().copied().max().unwrap_or(1);
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc_re = vec![0.0; n * n];
            let mut acc_im = vec![0.0; n * n];
            let mut x = Planes {
                side: n,
                re: vec![0.0; n * n],
                im: vec![0.0; n * n],
            };
            let mut scratch = Planes {
                side: n,
                re: vec![0.0; dmax * n],
                im: vec![0.0; dmax * n],
            };
            for s in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let mut rng = stream_rng(seed, s as u64);
                let us: Vec<DMatrix<C64>> = pairs.iter().map(|p| haar_unitary(p.dim(), &mut rng)).collect();
                x.load(&base_re, &base_im);
                // W X, then (W (W X)^dag)^dag = W X W^dag
                for _ in 0..2 {
                    for (i, u) in us.iter().enumerate() {
                        x.left_apply(full[2 * i], st[2 * i], u, &mut scratch);
                        x.left_apply(full[2 * i + 1], st[2 * i + 1], u, &mut scratch);
                    }
                    x.adjoint_in_place();
                }
                for (a, v) in acc_re.iter_mut().zip(&x.re) {
                    *a += v;
                }
                for (a, v) in acc_im.iter_mut().zip(&x.im) {
                    *a += v;
                }
            }
            (acc_re, acc_im)
        })
        .collect();
    let mut total_re = vec![0.0; n * n];
    let mut total_im = vec![0.0; n * n];
    for (pr, pi) in &partial {
        for (t, v) in total_re.iter_mut().zip(pr) {
            *t += v;
        }
        for (t, v) in total_im.iter_mut().zip(pi) {
            *t += v;
        }
    }
    let total = total_re.into_iter().zip(total_im).map(|(r, i)| C64::new(r, i));
    let inv = 1.0 / samples as f64;
    let avg = DMatrix::from_row_iterator(n, n, total.map(|z| z * inv));
    MultipartiteOperator::new(layout, avg)?.reorder(&m.names())
}

//! Information measures on finite distributions. All values are in nats.

use crate::error::{BeliefError, Result};
use crate::space::{same_space, Distribution};

/// Shannon entropy `-Σ q log q`, with `0 log 0 = 0`.
pub fn entropy(q: &Distribution) -> f64 {
    let h: f64 = q
        .mass()
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| -m * m.ln())
        .sum();
    h.max(0.0)
}

/// Kullback-Leibler divergence `D(q‖p)`.
///
/// Returns `f64::INFINITY` when `q` puts mass on a state where `p` has none.
/// Terms with `q(s) = 0` contribute nothing.
pub fn relative_entropy(q: &Distribution, p: &Distribution) -> Result<f64> {
    same_space(q.space(), p.space())?;
    let mut d = 0.0;
    for (&qs, &ps) in q.mass().iter().zip(p.mass()) {
        if qs == 0.0 {
            continue;
        }
        if ps == 0.0 {
            return Ok(f64::INFINITY);
        }
        if qs != ps {
            d += qs * (qs / ps).ln();
        }
    }
    // Rounding can leave a tiny negative sum near q = p.
    Ok(d.max(0.0))
}

/// `Σ q(s) g(s)` over the support of `q`. Values of `g` off the support are
/// never read, so they may be infinite.
pub fn expectation(q: &Distribution, g: &[f64]) -> Result<f64> {
    if g.len() != q.len() {
        return Err(BeliefError::LengthMismatch {
            what: "potential".into(),
            expected: q.len(),
            got: g.len(),
        });
    }
    let mut acc = 0.0;
    for (i, (&qs, &gs)) in q.mass().iter().zip(g).enumerate() {
        if qs > 0.0 {
            if !gs.is_finite() {
                return Err(BeliefError::NonFiniteOnSupport { index: i });
            }
            acc += qs * gs;
        }
    }
    Ok(acc)
}

/// Normalizes log-weights into probabilities with a max shift.
///
/// Entries equal to `-inf` map to exactly zero. Returns `None` when every
/// entry is `-inf`.
pub fn softmax_log_weights(log_w: &[f64]) -> Option<Vec<f64>> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let mut out: Vec<f64> = log_w
        .iter()
        .map(|&l| {
            if l == f64::NEG_INFINITY {
                0.0
            } else {
                (l - max).exp()
            }
        })
        .collect();
    let z: f64 = out.iter().sum();
    for o in &mut out {
        *o /= z;
    }
    Some(out)
}

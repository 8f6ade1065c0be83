use std::sync::Arc;

use rand::Rng;

use super::grid::WindowLayout;
use crate::error::{Error, Result};
use crate::kinematics::{closure_residual, KickSequence};

/// Pulse-picking choice: one bit per candidate slot, `M_max` bits per window.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    genes: Vec<bool>,
    layout: Arc<WindowLayout>,
}

impl Chromosome {
    pub(crate) fn from_parts(genes: Vec<bool>, layout: Arc<WindowLayout>) -> Self {
        Self { genes, layout }
    }

    /// Build from explicit genes; every window must hold exactly `M` active bits.
    pub fn new(genes: Vec<bool>, layout: Arc<WindowLayout>) -> Result<Self> {
        let ch = Self { genes, layout };
        ch.check()?;
        Ok(ch)
    }

    pub fn genes(&self) -> &[bool] {
        &self.genes
    }

    pub fn layout(&self) -> &Arc<WindowLayout> {
        &self.layout
    }

    pub fn window_genes(&self, window: usize) -> &[bool] {
        let m_max = self.layout.m_max;
        &self.genes[window * m_max..(window + 1) * m_max]
    }

    pub fn active_count(&self) -> usize {
        self.genes.iter().filter(|g| **g).count()
    }

    pub fn check(&self) -> Result<()> {
        let l = &self.layout;
        if self.genes.len() != l.n_windows() * l.m_max {
            return Err(Error::Contract(format!(
                "chromosome has {} genes, layout needs {}",
                self.genes.len(),
                l.n_windows() * l.m_max
            )));
        }
        for w in 0..l.n_windows() {
            let count = self.window_genes(w).iter().filter(|g| **g).count();
            if count != l.m {
                return Err(Error::Contract(format!("window {w} holds {count} picked pulses, expected {}", l.m)));
            }
        }
        Ok(())
    }

    pub fn active_slots(&self) -> Vec<i64> {
        let m_max = self.layout.m_max;
        self.genes
            .iter()
            .enumerate()
            .filter(|(_, g)| **g)
            .map(|(i, _)| self.layout.slot(i / m_max, i % m_max))
            .collect()
    }

    /// Grid phases of the picked pulses in slot order.
    pub fn decode_raw(&self) -> Vec<f64> {
        self.active_slots().into_iter().map(|s| self.layout.grid.slot_phase(s)).collect()
    }

    /// Picked pulses as a canonical kick sequence.
    pub fn decode(&self) -> KickSequence {
        KickSequence::canonical(&self.decode_raw()).expect("grid phases are finite")
    }

    /// Restore `M` picks in every window: missing picks go to the free slots
    /// nearest the window target, surplus picks are dropped farthest first.
    fn repair(&mut self) {
        let l = Arc::clone(&self.layout);
        for w in 0..l.n_windows() {
            let base = w * l.m_max;
            let count = self.window_genes(w).iter().filter(|g| **g).count();
            if count == l.m {
                continue;
            }
            let by_distance = l.offsets_by_distance(w);
            if count < l.m {
                let free = by_distance.iter().filter(|&&o| !self.genes[base + o]).copied();
                for o in free.take(l.m - count).collect::<Vec<_>>() {
                    self.genes[base + o] = true;
                }
            } else {
                let picked = by_distance.iter().rev().filter(|&&o| self.genes[base + o]).copied();
                for o in picked.take(count - l.m).collect::<Vec<_>>() {
                    self.genes[base + o] = false;
                }
            }
        }
    }
}

/// Closure error `ε_dimless` of the decoded pulse sequence.
pub fn fitness(ch: &Chromosome) -> Result<f64> {
    ch.check()?;
    Ok(closure_residual(&KickSequence::canonical(&ch.decode_raw()).expect("finite")).epsilon_dimless)
}

/// One-point crossover at the middle of the gene string.
///
/// The first child takes the first half of `a` and the second half of `b`,
/// the second child the other way round. A window cut by the midpoint is
/// repaired back to `M` picks.
pub fn crossover(a: &Chromosome, b: &Chromosome) -> Result<(Chromosome, Chromosome)> {
    if a.genes.len() != b.genes.len() || *a.layout != *b.layout {
        return Err(Error::Contract("crossover parents have different window layouts".into()));
    }
    let mid = a.genes.len() / 2;
    let splice = |head: &Chromosome, tail: &Chromosome| {
        let mut genes = head.genes[..mid].to_vec();
        genes.extend_from_slice(&tail.genes[mid..]);
        let mut child = Chromosome { genes, layout: Arc::clone(&a.layout) };
        child.repair();
        child
    };
    Ok((splice(a, b), splice(b, a)))
}

/// Swap one picked and one free slot inside a uniformly chosen window.
///
/// A saturated window (`M = M_max`) leaves nothing to swap, so the input comes
/// back unchanged.
pub fn mutate<R: Rng + ?Sized>(ch: &Chromosome, rng: &mut R) -> Chromosome {
    let l = &ch.layout;
    let mut out = ch.clone();
    if l.m >= l.m_max || l.n_windows() == 0 {
        return out;
    }
    let w = rng.gen_range(0..l.n_windows());
    let base = w * l.m_max;
    let (on, off): (Vec<usize>, Vec<usize>) = (0..l.m_max).partition(|&o| ch.genes[base + o]);
    let i = on[rng.gen_range(0..on.len())];
    let j = off[rng.gen_range(0..off.len())];
    out.genes.swap(base + i, base + j);
    out
}

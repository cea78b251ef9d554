//! Incremental representation counts.
//!
//! For every subset `S` of coordinates the counter keeps `r_S(n)`, the number
//! of ways to write `n = Σ_{i∈S} k_i a_i` with every `a_i` in the current set.
//! Adding a fresh element `x` turns `r_S` into `Σ_{T⊆S} r_{S\T}(n − x·k_T)`,
//! where `T` is the set of coordinates equal to `x`. Subsets are updated in
//! decreasing size, so every right-hand side still holds the old values;
//! removal runs the same recurrence backwards in increasing size.

pub(crate) struct Counter {
    /// `(mask, Σ_{i∈mask} k_i)` for every nonempty mask, largest first.
    masks: Vec<(usize, u64)>,
    ksum: Vec<u64>,
    r: Vec<Vec<u64>>,
    len: usize,
}

impl Counter {
    pub fn new(ks: &[u64], hmax: usize) -> Self {
        let d = ks.len();
        let full = 1usize << d;
        let ksum: Vec<u64> = (0..full)
            .map(|mask| (0..d).filter(|i| mask >> i & 1 == 1).map(|i| ks[i]).sum())
            .collect();
        let mut masks: Vec<(usize, u64)> = (1..full).map(|m| (m, ksum[m])).collect();
        masks.sort_by_key(|&(m, _)| std::cmp::Reverse(m.count_ones()));
        let len = hmax + 1;
        let mut r = vec![vec![0; len]; full];
        r[0][0] = 1;
        Self { masks, ksum, r, len }
    }

    /// `r(n)` over all coordinates.
    pub fn full(&self) -> &[u64] {
        &self.r[self.r.len() - 1]
    }

    fn step(&mut self, mask: usize, x: u64, sign_add: bool) {
        let mut acc = vec![0u64; self.len];
        // nonempty submasks t of mask
        let mut t = mask;
        while t > 0 {
            let shift = x * self.ksum[t];
            if shift < self.len as u64 {
                let shift = shift as usize;
                let src = &self.r[mask ^ t];
                for n in shift..self.len {
                    acc[n] += src[n - shift];
                }
            }
            t = (t - 1) & mask;
        }
        let dst = &mut self.r[mask];
        for (a, b) in dst.iter_mut().zip(acc) {
            if sign_add {
                *a += b;
            } else {
                *a -= b;
            }
        }
    }

    /// `x` must not already be present.
    pub fn add(&mut self, x: u64) {
        for i in 0..self.masks.len() {
            self.step(self.masks[i].0, x, true);
        }
    }

    /// Inverse of [`Counter::add`] for the most recently added `x`.
    pub fn remove(&mut self, x: u64) {
        for i in (0..self.masks.len()).rev() {
            self.step(self.masks[i].0, x, false);
        }
    }
}

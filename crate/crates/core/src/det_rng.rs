//! Small deterministic generator for reproducible edge sampling. Not a CSPRNG;
//! reports must be byte-identical across runs, so no external entropy.

pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Seed derived from instance parameters so every (p, n, k) samples the
    /// same edges in every run and in every thread interleaving.
    pub fn for_instance(p: usize, n: u32, k: usize) -> Self {
        let mut s = SplitMix64::new(0x9e37_79b9_7f4a_7c15);
        let mix = |r: &mut SplitMix64, v: u64| {
            r.state ^= v.wrapping_mul(0xff51_afd7_ed55_8ccd);
            r.next();
        };
        mix(&mut s, p as u64);
        mix(&mut s, n as u64);
        mix(&mut s, k as u64);
        s
    }

    pub fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in 0..bound via rejection, bound > 0.
    pub fn below(&mut self, bound: usize) -> usize {
        let bound = bound as u64;
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next();
            if v < zone {
                return (v % bound) as usize;
            }
        }
    }
}

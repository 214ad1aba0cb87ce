//! Plain bit vectors with constant-time rank and select.
//!
//! Bits are stored in plain form, one bit per position in ⌈L/64⌉ words.
//! Rank uses a per-word landmark (prefix count of 1-bits before the
//! word) plus a popcount of the masked word. Select keeps the position
//! of every g-th target bit (g = ⌈lg L⌉); a gap spanning at least g²
//! bits stores all its positions explicitly, a narrower gap is resolved
//! by scanning at most g²/64 words with popcount and an in-word select.
//! Both the 1-side and the 0-side get a directory, so `select` and
//! `complement_select` are symmetric.
//!
//! All positions and ranks in the public API are 1-based; `rank(0) = 0`
//! by convention so prefix identities hold without special cases.

use crate::error::Result;
use crate::packed::{index_bits, PackedBits};
use crate::workspace::{Region, WorkspaceMeter};

/// Position (0-based) of the `r`-th (0-based) set bit of `word`.
/// Requires `r < word.count_ones()`.
#[inline]
pub(crate) fn select_in_word(word: u64, mut r: u32) -> u32 {
    debug_assert!(r < word.count_ones());
    let mut pos = 0u32;
    let mut w = word;
    // Byte-wise skip, then bit-wise within the final byte.
    loop {
        let c = (w & 0xFF).count_ones();
        if c > r {
            break;
        }
        r -= c;
        w >>= 8;
        pos += 8;
    }
    let mut byte = w & 0xFF;
    loop {
        let t = byte.trailing_zeros();
        if r == 0 {
            return pos + t;
        }
        r -= 1;
        byte &= byte - 1;
    }
}

/// Append-only metered bit buffer; the writable stage of a bit vector.
/// Freeze it into an [`RsBitVector`] with [`RsBitVector::build`].
pub struct BitBuffer {
    words: Vec<u64>,
    len: u64,
    cap: u64,
    region: Region,
}

impl BitBuffer {
    pub fn new(cap_bits: u64, meter: &WorkspaceMeter, label: &str) -> Result<Self> {
        assert!(cap_bits >= 1, "bit buffer needs at least one bit");
        let region = meter.allocate(cap_bits, label)?;
        Ok(BitBuffer {
            words: vec![0u64; (cap_bits as usize).div_ceil(64)],
            len: 0,
            cap: cap_bits,
            region,
        })
    }

    /// A buffer of `n` one-bits, already full.
    pub fn all_ones(n: u64, meter: &WorkspaceMeter, label: &str) -> Result<Self> {
        let mut buf = Self::new(n, meter, label)?;
        for w in buf.words.iter_mut() {
            *w = u64::MAX;
        }
        buf.len = n;
        buf.mask_tail();
        Ok(buf)
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        assert!(self.len < self.cap, "bit buffer capacity {} exceeded", self.cap);
        if bit {
            self.words[(self.len / 64) as usize] |= 1u64 << (self.len % 64);
        }
        self.len += 1;
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at 1-based position `i`.
    #[inline]
    pub fn get(&self, i: u64) -> bool {
        assert!(i >= 1 && i <= self.len, "bit index {i} out of bounds");
        (self.words[((i - 1) / 64) as usize] >> ((i - 1) % 64)) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Inverts every bit. Word-parallel; used to turn a "smaller than
    /// pivot" mask into its complement without another input scan.
    pub(crate) fn flip_all(&mut self) {
        for w in self.words.iter_mut() {
            *w = !*w;
        }
        self.mask_tail();
    }

    /// Clears the bit at 1-based position `i`.
    pub(crate) fn clear_bit(&mut self, i: u64) {
        assert!(i >= 1 && i <= self.len, "bit index {i} out of bounds");
        self.words[((i - 1) / 64) as usize] &= !(1u64 << ((i - 1) % 64));
    }

    fn mask_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            let last = (self.len / 64) as usize;
            self.words[last] &= (1u64 << tail) - 1;
        }
        for w in self.words.iter_mut().skip((self.len as usize).div_ceil(64)) {
            *w = 0;
        }
    }
}

/// One regime of the select support: sampled positions of every g-th
/// target bit, explicit positions inside wide gaps.
struct SelectDirectory {
    granularity: u32,
    /// Position of the (b*g + 1)-th target bit, per block b.
    samples: PackedBits,
    /// 0 for a dense block, otherwise 1 + index into `sparse_positions`.
    slot_of_block: PackedBits,
    /// Explicit positions for sparse blocks, g entries per slot.
    sparse_positions: PackedBits,
}

impl SelectDirectory {
    fn bit_size(&self) -> u64 {
        self.samples.bit_size() + self.slot_of_block.bit_size() + self.sparse_positions.bit_size()
    }
}

/// Immutable bit vector with constant-time `access`, `rank`, `select`
/// and `complement_select`.
pub struct RsBitVector {
    words: Vec<u64>,
    len: u64,
    ones: u64,
    /// landmarks[j] = number of 1-bits strictly before word j.
    landmarks: Vec<u32>,
    sel1: SelectDirectory,
    sel0: SelectDirectory,
    _bits_region: Region,
    _support_region: Region,
}

impl RsBitVector {
    /// Freezes `buf` and builds the supporting structures in O(L).
    pub fn build(buf: BitBuffer, meter: &WorkspaceMeter) -> Result<Self> {
        let BitBuffer {
            words,
            len,
            cap: _,
            region,
        } = buf;
        assert!(len >= 1, "cannot build an empty bit vector");
        assert!(len < u32::MAX as u64, "bit vector too long for u32 landmarks");
        let n_words = (len as usize).div_ceil(64);
        debug_assert!(words.len() >= n_words);

        let mut landmarks = Vec::with_capacity(n_words);
        let mut ones = 0u64;
        for w in words.iter().take(n_words) {
            landmarks.push(ones as u32);
            ones += w.count_ones() as u64;
        }

        let tail_mask = Self::tail_mask(len);
        let sel1 = Self::build_directory(&words[..n_words], len, ones, false, tail_mask);
        let sel0 = Self::build_directory(&words[..n_words], len, len - ones, true, tail_mask);

        let support_bits = landmarks.len() as u64 * 32 + sel1.bit_size() + sel0.bit_size();
        let support_label = format!("{}-rs", region.label());
        let support_region = meter.allocate(support_bits, &support_label)?;

        Ok(RsBitVector {
            words,
            len,
            ones,
            landmarks,
            sel1,
            sel0,
            _bits_region: region,
            _support_region: support_region,
        })
    }

    #[inline]
    fn tail_mask(len: u64) -> u64 {
        if len % 64 == 0 {
            u64::MAX
        } else {
            (1u64 << (len % 64)) - 1
        }
    }

    #[inline]
    fn target_word(&self, w: usize, complement: bool) -> u64 {
        let mut word = self.words[w];
        if complement {
            word = !word;
            if w == ((self.len as usize - 1) / 64) {
                word &= Self::tail_mask(self.len);
            }
        }
        word
    }

    fn build_directory(
        words: &[u64],
        len: u64,
        total: u64,
        complement: bool,
        tail_mask: u64,
    ) -> SelectDirectory {
        let g = index_bits(len as usize);
        let pos_width = index_bits(len as usize);
        let blocks = (total as usize).div_ceil(g as usize);
        let mut samples = PackedBits::new(blocks, pos_width);
        let mut slot_of_block = PackedBits::new(blocks, index_bits(blocks).max(1));

        let last_word = words.len() - 1;
        let word_at = |w: usize| -> u64 {
            let mut word = words[w];
            if complement {
                word = !word;
                if w == last_word {
                    word &= tail_mask;
                }
            }
            word
        };

        // Pass 1: sample every g-th target bit, track each block's span.
        let sparse_span = (g as u64) * (g as u64);
        let mut seen = 0u64;
        let mut block_start = 0u64;
        let mut sparse_blocks: Vec<bool> = Vec::with_capacity(blocks);
        let mut last_pos = 0u64;
        for w in 0..words.len() {
            let mut word = word_at(w);
            while word != 0 {
                let bit = word.trailing_zeros();
                let pos = w as u64 * 64 + bit as u64 + 1;
                if seen % g as u64 == 0 {
                    if seen > 0 {
                        // Previous block closes at the bit before this one.
                        sparse_blocks.push(last_pos - block_start + 1 >= sparse_span);
                    }
                    samples.push(pos);
                    block_start = pos;
                }
                seen += 1;
                last_pos = pos;
                word &= word - 1;
            }
        }
        debug_assert_eq!(seen, total);
        if total > 0 {
            sparse_blocks.push(last_pos - block_start + 1 >= sparse_span);
        }
        debug_assert_eq!(sparse_blocks.len(), blocks);

        let n_sparse = sparse_blocks.iter().filter(|&&s| s).count();
        let mut sparse_positions = PackedBits::new(n_sparse * g as usize, pos_width);
        let mut slot = 0u64;
        for &is_sparse in &sparse_blocks {
            if is_sparse {
                slot += 1;
                slot_of_block.push(slot);
            } else {
                slot_of_block.push(0);
            }
        }

        // Pass 2: explicit positions for sparse blocks.
        if n_sparse > 0 {
            let mut seen = 0u64;
            for w in 0..words.len() {
                let mut word = word_at(w);
                while word != 0 {
                    let bit = word.trailing_zeros();
                    let pos = w as u64 * 64 + bit as u64 + 1;
                    let block = (seen / g as u64) as usize;
                    if sparse_blocks[block] {
                        sparse_positions.push(pos);
                    }
                    seen += 1;
                    word &= word - 1;
                }
            }
            // Pad the final sparse block to g entries so slots stay aligned.
            while sparse_positions.len() < sparse_positions.capacity() {
                sparse_positions.push(0);
            }
        }

        SelectDirectory {
            granularity: g,
            samples,
            slot_of_block,
            sparse_positions,
        }
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false // construction rejects empty vectors
    }

    #[inline]
    pub fn ones_total(&self) -> u64 {
        self.ones
    }

    #[inline]
    pub fn zeros_total(&self) -> u64 {
        self.len - self.ones
    }

    /// Bit at 1-based position `i`.
    #[inline]
    pub fn access(&self, i: u64) -> bool {
        assert!(i >= 1 && i <= self.len, "bit index {i} out of bounds (L={})", self.len);
        (self.words[((i - 1) / 64) as usize] >> ((i - 1) % 64)) & 1 == 1
    }

    /// Up to 64 bits starting at 1-based position `i`, lowest bit first.
    pub fn bits(&self, i: u64, width: u32) -> u64 {
        assert!(width >= 1 && width <= 64);
        assert!(i >= 1 && i + width as u64 - 1 <= self.len, "bit range out of bounds");
        let off = i - 1;
        let word = (off / 64) as usize;
        let shift = (off % 64) as u32;
        let low = self.words[word] >> shift;
        let have = 64 - shift;
        let v = if have >= width {
            low
        } else {
            low | (self.words[word + 1] << have)
        };
        if width == 64 {
            v
        } else {
            v & ((1u64 << width) - 1)
        }
    }

    /// Number of 1-bits among positions 1..=i; `rank(0) = 0`.
    #[inline]
    pub fn rank(&self, i: u64) -> u64 {
        assert!(i <= self.len, "rank index {i} out of bounds (L={})", self.len);
        if i == 0 {
            return 0;
        }
        let word = ((i - 1) / 64) as usize;
        let within = i - 64 * word as u64; // 1..=64
        let mask = if within == 64 {
            u64::MAX
        } else {
            (1u64 << within) - 1
        };
        self.landmarks[word] as u64 + (self.words[word] & mask).count_ones() as u64
    }

    /// Number of 0-bits among positions 1..=i.
    #[inline]
    pub fn rank_zero(&self, i: u64) -> u64 {
        i - self.rank(i)
    }

    /// Position of the j-th 1-bit (1-based).
    ///
    /// Panics with "no such one" if `j` is out of range.
    #[inline]
    pub fn select(&self, j: u64) -> u64 {
        assert!(j >= 1 && j <= self.ones, "no such one: j={j}, ones={}", self.ones);
        self.select_dir(&self.sel1, j, false)
    }

    /// Position of the j-th 0-bit (1-based).
    ///
    /// Panics with "no such zero" if `j` is out of range.
    #[inline]
    pub fn complement_select(&self, j: u64) -> u64 {
        assert!(
            j >= 1 && j <= self.zeros_total(),
            "no such zero: j={j}, zeros={}",
            self.zeros_total()
        );
        self.select_dir(&self.sel0, j, true)
    }

    fn select_dir(&self, dir: &SelectDirectory, j: u64, complement: bool) -> u64 {
        let g = dir.granularity as u64;
        let block = ((j - 1) / g) as usize;
        let within = (j - 1) % g; // 0-based rank inside the block
        let start = dir.samples.get(block);
        if within == 0 {
            return start;
        }
        let slot = dir.slot_of_block.get(block);
        if slot > 0 {
            return dir
                .sparse_positions
                .get((slot as usize - 1) * g as usize + within as usize);
        }
        // Dense block: scan from the sampled position.
        let mut w = ((start - 1) / 64) as usize;
        let bit = (start - 1) % 64;
        let mut word = self.target_word(w, complement);
        // Drop bits at or before the sampled position.
        word &= if bit == 63 { 0 } else { !0u64 << (bit + 1) };
        let mut remaining = (within - 1) as u32;
        loop {
            let c = word.count_ones();
            if c > remaining {
                return w as u64 * 64 + select_in_word(word, remaining) as u64 + 1;
            }
            remaining -= c;
            w += 1;
            word = self.target_word(w, complement);
        }
    }

    /// Total bits charged for the supporting structures (landmarks and
    /// both select directories).
    pub fn support_bits(&self) -> u64 {
        self.landmarks.len() as u64 * 32 + self.sel1.bit_size() + self.sel0.bit_size()
    }

    #[cfg(test)]
    pub(crate) fn landmark(&self, word: usize) -> u32 {
        self.landmarks[word]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn from_str(s: &str) -> RsBitVector {
        let m = WorkspaceMeter::unlimited();
        let mut buf = BitBuffer::new(s.len() as u64, &m, "test-bits").unwrap();
        for c in s.chars() {
            buf.push(c == '1');
        }
        RsBitVector::build(buf, &m).unwrap()
    }

    fn random_vector(len: u64, density: f64, seed: u64) -> (RsBitVector, Vec<bool>) {
        let m = WorkspaceMeter::unlimited();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut buf = BitBuffer::new(len, &m, "test-bits").unwrap();
        let mut raw = Vec::with_capacity(len as usize);
        for _ in 0..len {
            let bit = rng.gen_bool(density);
            buf.push(bit);
            raw.push(bit);
        }
        (RsBitVector::build(buf, &m).unwrap(), raw)
    }

    #[test]
    fn hand_example_rank_and_select() {
        let v = from_str("10110100");
        assert_eq!(v.ones_total(), 4);
        assert_eq!(v.landmark(0), 0);
        assert!(v.access(3));
        assert!(!v.access(8));
        assert_eq!(v.rank(0), 0);
        assert_eq!(v.rank(1), 1);
        assert_eq!(v.rank(4), 3);
        assert_eq!(v.rank(8), 4);
        assert_eq!(v.select(2), 3);
        assert_eq!(v.select(4), 6);
    }

    #[test]
    fn complement_select_hand_example() {
        let v = from_str("1100111");
        // Zeros sit at positions 3 and 4.
        assert_eq!(v.complement_select(1), 3);
        assert_eq!(v.complement_select(2), 4);
    }

    #[test]
    fn all_zero_vector() {
        let v = from_str("0000000000");
        assert_eq!(v.ones_total(), 0);
        for j in 1..=10 {
            assert_eq!(v.complement_select(j), j);
        }
    }

    #[test]
    fn all_ones_vector() {
        let m = WorkspaceMeter::unlimited();
        let buf = BitBuffer::all_ones(321, &m, "ones").unwrap();
        assert_eq!(buf.count_ones(), 321);
        let v = RsBitVector::build(buf, &m).unwrap();
        for j in [1u64, 2, 64, 65, 100, 321] {
            assert_eq!(v.select(j), j);
        }
        assert_eq!(v.rank(321), 321);
    }

    #[test]
    #[should_panic(expected = "no such one")]
    fn select_out_of_range_panics() {
        let v = from_str("10110100");
        v.select(5);
    }

    #[test]
    #[should_panic(expected = "no such zero")]
    fn complement_select_out_of_range_panics() {
        let v = from_str("111");
        v.complement_select(1);
    }

    #[test]
    #[should_panic(expected = "out of bounds")]
    fn access_out_of_range_panics() {
        let v = from_str("101");
        v.access(4);
    }

    #[test]
    fn rank_matches_prefix_sum_oracle_large() {
        let len = 1_000_000u64;
        let (v, raw) = random_vector(len, 0.37, 99);
        let mut prefix = vec![0u64; len as usize + 1];
        for i in 0..len as usize {
            prefix[i + 1] = prefix[i] + raw[i] as u64;
        }
        assert_eq!(v.ones_total(), prefix[len as usize]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let i = rng.gen_range(0..=len);
            assert_eq!(v.rank(i), prefix[i as usize]);
        }
    }

    #[test]
    fn select_rank_identities_exhaustive() {
        for (len, density, seed) in [(1u64 << 14, 0.5, 1), (5000, 0.03, 2), (5000, 0.97, 3)] {
            let (v, raw) = random_vector(len, density, seed);
            let mut ones_seen = 0u64;
            let mut zeros_seen = 0u64;
            for i in 1..=len {
                if raw[i as usize - 1] {
                    ones_seen += 1;
                    assert_eq!(v.select(ones_seen), i, "select({ones_seen})");
                    assert_eq!(v.rank(v.select(ones_seen)), ones_seen);
                } else {
                    zeros_seen += 1;
                    assert_eq!(v.complement_select(zeros_seen), i);
                }
            }
        }
    }

    #[test]
    fn sparse_blocks_hit_explicit_positions() {
        // A handful of ones spread very far apart forces the sparse
        // regime of the select directory.
        let m = WorkspaceMeter::unlimited();
        let len = 200_000u64;
        let mut buf = BitBuffer::new(len, &m, "sparse").unwrap();
        let positions: Vec<u64> = (0..40).map(|i| 1 + i * 5000).collect();
        let mut next = 0;
        for i in 1..=len {
            let bit = next < positions.len() && positions[next] == i;
            buf.push(bit);
            if bit {
                next += 1;
            }
        }
        let v = RsBitVector::build(buf, &m).unwrap();
        for (j, &p) in positions.iter().enumerate() {
            assert_eq!(v.select(j as u64 + 1), p);
        }
    }

    #[test]
    fn support_stays_within_documented_constant() {
        let (v, _) = random_vector(1 << 20, 0.5, 7);
        let c = crate::constants::RS_SUPPORT_FACTOR;
        assert!(
            v.support_bits() <= c * v.len(),
            "support {} exceeds {c}x length {}",
            v.support_bits(),
            v.len()
        );
    }

    proptest! {
        #[test]
        fn rank_access_select_invariants(
            bits in prop::collection::vec(any::<bool>(), 1..600),
        ) {
            let m = WorkspaceMeter::unlimited();
            let mut buf = BitBuffer::new(bits.len() as u64, &m, "prop").unwrap();
            for &b in &bits {
                buf.push(b);
            }
            let v = RsBitVector::build(buf, &m).unwrap();
            for i in 1..=bits.len() as u64 {
                // rank(i) - rank(i-1) = access(i)
                prop_assert_eq!(v.rank(i) - v.rank(i - 1), v.access(i) as u64);
                // zero-side prefix identity
                prop_assert_eq!(v.rank_zero(i), i - v.rank(i));
            }
            for j in 1..=v.ones_total() {
                let p = v.select(j);
                prop_assert!(v.access(p));
                prop_assert_eq!(v.rank(p), j);
            }
            for j in 1..=v.zeros_total() {
                let p = v.complement_select(j);
                prop_assert!(!v.access(p));
                prop_assert_eq!(p - v.rank(p), j);
            }
        }
    }
}

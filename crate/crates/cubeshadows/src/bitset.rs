//! Fixed-size bitset used for cell sets and projection bitmaps.

/// A fixed-universe bitset over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    len: u64,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: u64) -> Self {
        let nwords = usize::try_from(len.div_ceil(64)).expect("bitset too large");
        BitSet {
            len,
            words: vec![0; nwords],
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn set(&mut self, i: u64) {
        debug_assert!(i < self.len);
        self.words[(i >> 6) as usize] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        debug_assert!(i < self.len);
        self.words[(i >> 6) as usize] & (1u64 << (i & 63)) != 0
    }

    /// Sets `count` consecutive bits starting at `start`.
    pub fn set_range(&mut self, start: u64, count: u64) {
        if count == 0 {
            return;
        }
        let end = start + count; // exclusive
        debug_assert!(end <= self.len);
        let (first_word, last_word) = ((start >> 6) as usize, ((end - 1) >> 6) as usize);
        let head_mask = !0u64 << (start & 63);
        let tail_mask = !0u64 >> (63 - ((end - 1) & 63));
        if first_word == last_word {
            self.words[first_word] |= head_mask & tail_mask;
        } else {
            self.words[first_word] |= head_mask;
            for w in &mut self.words[first_word + 1..last_word] {
                *w = !0;
            }
            self.words[last_word] |= tail_mask;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn or_assign(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// First index not in the set, if any.
    pub fn first_unset(&self) -> Option<u64> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != !0 {
                let i = (wi as u64) * 64 + w.trailing_ones() as u64;
                if i < self.len {
                    return Some(i);
                }
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let base = (wi as u64) * 64;
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let t = bits.trailing_zeros() as u64;
                    bits &= bits - 1;
                    Some(base + t)
                }
            })
        })
    }
}

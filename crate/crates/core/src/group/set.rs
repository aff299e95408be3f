use super::Element;

/// Fixed-capacity bitset over element ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    words: Vec<u64>,
}

impl ElementSet {
    pub fn new(capacity: usize) -> Self {
        Self { words: vec![0; capacity.div_ceil(64)] }
    }

    #[inline]
    pub fn contains(&self, e: Element) -> bool {
        let e = e as usize;
        self.words[e >> 6] >> (e & 63) & 1 == 1
    }

    /// Inserts `e`, returning `true` if it was absent.
    #[inline]
    pub fn insert(&mut self, e: Element) -> bool {
        let e = e as usize;
        let w = &mut self.words[e >> 6];
        let bit = 1u64 << (e & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros();
                w &= w - 1;
                Some((i * 64 + t as usize) as Element)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_and_iterate() {
        let mut s = ElementSet::new(130);
        assert!(s.insert(0));
        assert!(s.insert(129));
        assert!(!s.insert(129));
        s.insert(64);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(s.len(), 3);
        let mut t = s.clone();
        t.insert(5);
        assert!(s.is_subset(&t));
        assert!(!t.is_subset(&s));
    }
}

/// Fenwick tree over non-negative integer weights with weighted selection.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u64>,
    total: u64,
    top_bit: usize,
}

impl Fenwick {
    pub fn from_weights(weights: &[u64]) -> Self {
        let n = weights.len();
        let mut tree = vec![0u64; n + 1];
        tree[1..].copy_from_slice(weights);
        for i in 1..=n {
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        let top_bit = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        Self { tree, total: weights.iter().sum(), top_bit }
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    #[inline]
    pub fn add(&mut self, index: usize, delta: u64) {
        self.total += delta;
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    #[inline]
    pub fn sub(&mut self, index: usize, delta: u64) {
        self.total -= delta;
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] -= delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Index `i` with `prefix(i) <= r < prefix(i + 1)`, for `r < total`.
    #[inline]
    pub fn find(&self, mut r: u64) -> usize {
        debug_assert!(r < self.total);
        let mut pos = 0usize;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= r {
                pos = next;
                r -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_matches_prefix_sums() {
        let w = [3u64, 0, 2, 5, 0, 1, 4];
        let mut f = Fenwick::from_weights(&w);
        let mut expect = Vec::new();
        for (i, &x) in w.iter().enumerate() {
            expect.extend(std::iter::repeat_n(i, x as usize));
        }
        for (r, &e) in expect.iter().enumerate() {
            assert_eq!(f.find(r as u64), e);
        }
        f.sub(3, 5);
        f.add(1, 2);
        assert_eq!(f.total(), 12);
        assert_eq!(f.find(3), 1);
        assert_eq!(f.find(5), 2);
        assert_eq!(f.find(7), 5);
    }
}

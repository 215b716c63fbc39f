//! Linear algebra over GF(2) with vectors packed into `u128`.

/// Rank of the span of `vectors`.
pub fn rank(vectors: &[u128]) -> u32 {
    Basis::from_vectors(vectors.iter().copied()).len() as u32
}

pub fn parity(x: u128) -> bool {
    x.count_ones() % 2 == 1
}

/// Row-echelon basis that remembers, for each basis vector, which input
/// vectors were XORed to produce it.
#[derive(Clone, Debug, Default)]
pub struct Basis {
    /// `(pivot bit, vector, combination of inputs)`.
    rows: Vec<(u32, u128, u128)>,
}

impl Basis {
    pub fn from_vectors<I: IntoIterator<Item = u128>>(vectors: I) -> Self {
        let mut basis = Basis::default();
        for (i, v) in vectors.into_iter().enumerate() {
            debug_assert!(i < 128, "at most 128 input vectors");
            basis.insert(v, 1u128 << i);
        }
        basis
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn reduce(&self, mut v: u128, mut combo: u128) -> (u128, u128) {
        for &(pivot, row, row_combo) in &self.rows {
            if v >> pivot & 1 == 1 {
                v ^= row;
                combo ^= row_combo;
            }
        }
        (v, combo)
    }

    fn insert(&mut self, v: u128, combo: u128) {
        let (v, combo) = self.reduce(v, combo);
        if v == 0 {
            return;
        }
        let pivot = 127 - v.leading_zeros();
        for row in &mut self.rows {
            if row.1 >> pivot & 1 == 1 {
                row.1 ^= v;
                row.2 ^= combo;
            }
        }
        self.rows.push((pivot, v, combo));
    }

    /// Which inputs XOR to `target`, or `None` if it is outside the span.
    pub fn express(&self, target: u128) -> Option<u128> {
        let (rest, combo) = self.reduce(target, 0);
        (rest == 0).then_some(combo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[0b11, 0b01, 0b10]), 2);
        assert_eq!(rank(&[1, 2, 4, 8]), 4);
    }

    proptest! {
        #[test]
        fn expressions_reconstruct_targets(vs in proptest::collection::vec(0u128..256, 0..10), t in 0u128..256) {
            let b = Basis::from_vectors(vs.iter().copied());
            match b.express(t) {
                Some(combo) => {
                    let got = (0..vs.len()).filter(|i| combo >> i & 1 == 1).fold(0, |acc, i| acc ^ vs[i]);
                    prop_assert_eq!(got, t);
                }
                None => prop_assert_eq!(rank(&vs) + 1, rank(&[vs.clone(), vec![t]].concat())),
            }
        }
    }
}

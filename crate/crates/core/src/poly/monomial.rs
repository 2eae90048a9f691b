use std::cmp::Ordering;

/// Exponent vector, one slot per variable.
///
/// Ordered graded-lexicographically: total degree first, then the exponent of
/// `x0`, then `x1`, and so on. Larger monomials are printed first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Monomial(exps.into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// Lowers the exponent of `index` by one. Caller ensures it is positive.
    pub(crate) fn lowered(&self, index: usize) -> Monomial {
        let mut exps = self.0.clone();
        exps[index] -= 1;
        Monomial(exps)
    }

    pub(crate) fn raised(&self, index: usize) -> Monomial {
        let mut exps = self.0.clone();
        exps[index] += 1;
        Monomial(exps)
    }

    /// Pads with zero exponents up to `nvars` slots.
    pub(crate) fn padded(&self, nvars: usize) -> Monomial {
        let mut exps = self.0.to_vec();
        exps.resize(nvars, 0);
        Monomial(exps.into_boxed_slice())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

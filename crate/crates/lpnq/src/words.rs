//! Free-group words in reduced syllable form and endomorphisms of free
//! groups given by generator images.
//!
//! Conventions used across the crate: generator indices are 1-based,
//! x^y = y^-1 x y, [x,y] = x^-1 y^-1 x y, and abelianized row vectors are
//! acted on by endomorphism matrices from the right.

use crate::intlat::IntegerMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// A freely reduced word: adjacent syllables carry distinct generators and
/// no syllable has exponent zero. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FreeWord {
    syllables: Vec<(u32, BigInt)>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord::default()
    }

    /// The single generator `i` (1-based).
    pub fn gen(i: u32) -> Self {
        assert!(i >= 1, "generator indices are 1-based");
        FreeWord { syllables: vec![(i, BigInt::from(1))] }
    }

    pub fn gen_pow(i: u32, e: impl Into<BigInt>) -> Self {
        assert!(i >= 1, "generator indices are 1-based");
        let e = e.into();
        if e.is_zero() {
            FreeWord::identity()
        } else {
            FreeWord { syllables: vec![(i, e)] }
        }
    }

    /// Build from arbitrary syllables, reducing freely.
    pub fn from_syllables(syllables: impl IntoIterator<Item = (u32, BigInt)>) -> Self {
        let mut w = FreeWord::identity();
        for (g, e) in syllables {
            w.push_syllable(g, e);
        }
        w
    }

    pub(crate) fn push_syllable(&mut self, g: u32, e: BigInt) {
        assert!(g >= 1, "generator indices are 1-based");
        if e.is_zero() {
            return;
        }
        match self.syllables.last_mut() {
            Some((h, f)) if *h == g => {
                *f += e;
                if f.is_zero() {
                    self.syllables.pop();
                }
            }
            _ => self.syllables.push((g, e)),
        }
    }

    pub fn syllables(&self) -> &[(u32, BigInt)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Largest generator index appearing, or 0 for the identity.
    pub fn max_gen(&self) -> u32 {
        self.syllables.iter().map(|(g, _)| *g).max().unwrap_or(0)
    }

    /// Number of letters, i.e. the sum of |exponents|; None on overflow.
    pub fn length(&self) -> Option<u64> {
        let mut total: u64 = 0;
        for (_, e) in &self.syllables {
            total = total.checked_add(e.abs().to_u64()?)?;
        }
        Some(total)
    }

    pub fn multiply(&self, other: &FreeWord) -> FreeWord {
        let mut w = self.clone();
        for (g, e) in &other.syllables {
            w.push_syllable(*g, e.clone());
        }
        w
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            syllables: self.syllables.iter().rev().map(|(g, e)| (*g, -e)).collect(),
        }
    }

    /// self raised to an integer power. A single-syllable base is handled in
    /// closed form; otherwise repeated multiplication (the exponent must fit
    /// in a machine word).
    pub fn pow(&self, k: &BigInt) -> FreeWord {
        if k.is_zero() || self.is_identity() {
            return FreeWord::identity();
        }
        if self.syllables.len() == 1 {
            let (g, e) = &self.syllables[0];
            return FreeWord::gen_pow(*g, e * k);
        }
        let base = if k.is_negative() { self.inverse() } else { self.clone() };
        let n = k.abs().to_u64().expect("word power exponent out of range");
        let mut out = FreeWord::identity();
        for _ in 0..n {
            out = out.multiply(&base);
        }
        out
    }

    /// y^-1 * self * y.
    pub fn conjugated_by(&self, y: &FreeWord) -> FreeWord {
        y.inverse().multiply(self).multiply(y)
    }

    /// The word read backwards, letter signs kept. Reversal is an
    /// anti-automorphism of the free group fixing each generator, so it
    /// swaps the two conjugation conventions x^y = y^-1*x*y and y*x*y^-1.
    pub fn reversed(&self) -> FreeWord {
        FreeWord::from_syllables(self.syllables.iter().rev().cloned())
    }

    /// Exponent-sum vector over m generators.
    pub fn abelianized(&self, m: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); m];
        for (g, e) in &self.syllables {
            let idx = (*g - 1) as usize;
            assert!(idx < m, "generator {} out of range 1..={}", g, m);
            v[idx] += e;
        }
        v
    }

    /// Iterate single letters as (generator, sign). Exponents must fit u64.
    pub fn letters(&self) -> impl Iterator<Item = (u32, i8)> + '_ {
        self.syllables.iter().flat_map(|(g, e)| {
            let n = e.abs().to_u64().expect("letter iteration exponent out of range");
            let s: i8 = if e.is_negative() { -1 } else { 1 };
            (0..n).map(move |_| (*g, s))
        })
    }
}

/// y^-1 x y.
pub fn conjugate(x: &FreeWord, y: &FreeWord) -> FreeWord {
    x.conjugated_by(y)
}

/// x^-1 y^-1 x y.
pub fn commutator(x: &FreeWord, y: &FreeWord) -> FreeWord {
    x.inverse().multiply(&y.inverse()).multiply(x).multiply(y)
}

impl std::fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|(g, e)| {
                if e == &BigInt::from(1) {
                    format!("x{}", g)
                } else {
                    format!("x{}^{}", g, e)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// An endomorphism of the free group on m generators: images[i-1] is the
/// image of generator i.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeEndomorphism {
    images: Vec<FreeWord>,
}

impl FreeEndomorphism {
    pub fn new(images: Vec<FreeWord>) -> Self {
        let m = images.len() as u32;
        for w in &images {
            assert!(w.max_gen() <= m, "image uses a generator outside the ambient set");
        }
        FreeEndomorphism { images }
    }

    pub fn identity(m: usize) -> Self {
        FreeEndomorphism { images: (1..=m as u32).map(FreeWord::gen).collect() }
    }

    pub fn ambient(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, i: u32) -> &FreeWord {
        &self.images[(i - 1) as usize]
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.syllables() == [(i as u32 + 1, BigInt::from(1))])
    }

    /// Homomorphic substitution.
    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        let mut out = FreeWord::identity();
        for (g, e) in w.syllables() {
            out = out.multiply(&self.image(*g).pow(e));
        }
        out
    }

    /// (self . other)(w) = self(other(w)).
    pub fn compose(&self, other: &FreeEndomorphism) -> FreeEndomorphism {
        assert_eq!(self.ambient(), other.ambient());
        FreeEndomorphism { images: other.images.iter().map(|w| self.apply(w)).collect() }
    }

    /// The induced matrix on the abelianization: row i is the exponent-sum
    /// vector of the image of generator i, so that
    /// abelianized(apply(phi, w)) = abelianized(w) * endo_matrix(phi).
    pub fn endo_matrix(&self) -> IntegerMatrix {
        let m = self.ambient();
        IntegerMatrix::from_rows(self.images.iter().map(|w| w.abelianized(m)).collect())
    }
}

pub fn apply(phi: &FreeEndomorphism, w: &FreeWord) -> FreeWord {
    phi.apply(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn w(syls: &[(u32, i64)]) -> FreeWord {
        FreeWord::from_syllables(syls.iter().map(|&(g, e)| (g, BigInt::from(e))))
    }

    #[test]
    fn multiply_cancels_inverses() {
        let a = FreeWord::gen(1);
        assert!(a.multiply(&a.inverse()).is_identity());
        let u = w(&[(1, 2), (2, 1)]);
        let v = w(&[(2, -1), (1, 1)]);
        assert_eq!(u.multiply(&v), w(&[(1, 3)]));
    }

    #[test]
    fn multiplication_is_associative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let rand_word = |rng: &mut rand_chacha::ChaCha8Rng| {
                let n = rng.gen_range(0..5);
                FreeWord::from_syllables(
                    (0..n).map(|_| (rng.gen_range(1..4u32), BigInt::from(rng.gen_range(-3..=3i64)))),
                )
            };
            let (u, v, t) = (rand_word(&mut rng), rand_word(&mut rng), rand_word(&mut rng));
            assert_eq!(u.multiply(&v).multiply(&t), u.multiply(&v.multiply(&t)));
            // group axioms: identity and inverses
            assert_eq!(u.multiply(&FreeWord::identity()), u);
            assert!(u.multiply(&u.inverse()).is_identity());
        }
    }

    #[test]
    fn reduction_is_idempotent() {
        let u = w(&[(1, 2), (2, -1), (2, 1), (1, -2), (3, 1)]);
        assert_eq!(u, w(&[(3, 1)]));
        let again = FreeWord::from_syllables(u.syllables().to_vec());
        assert_eq!(again, u);
    }

    #[test]
    fn conjugate_and_commutator_conventions() {
        let a = FreeWord::gen(1);
        let b = FreeWord::gen(2);
        assert_eq!(conjugate(&a, &FreeWord::identity()), a);
        assert!(commutator(&a, &a.pow(&BigInt::from(5))).is_identity());
        assert_eq!(commutator(&a, &b), w(&[(1, -1), (2, -1), (1, 1), (2, 1)]));
    }

    #[test]
    fn apply_is_homomorphic() {
        let id = FreeEndomorphism::identity(2);
        let u = w(&[(1, 1), (2, -1)]);
        assert_eq!(id.apply(&u), u);

        // the substitution a -> c^a, c -> cd, d -> c on the word a^2
        let sigma = FreeEndomorphism::new(vec![
            conjugate(&FreeWord::gen(2), &FreeWord::gen(1)),
            FreeWord::gen(2).multiply(&FreeWord::gen(3)),
            FreeWord::gen(2),
        ]);
        let a2 = w(&[(1, 2)]);
        let expect = w(&[(1, -1), (2, 1), (1, 1)]).pow(&BigInt::from(2));
        assert_eq!(sigma.apply(&a2), expect);
    }

    #[test]
    fn composition_matches_sequential_application() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rand_word = |rng: &mut rand_chacha::ChaCha8Rng| {
            let n = rng.gen_range(0..4);
            FreeWord::from_syllables(
                (0..n).map(|_| (rng.gen_range(1..4u32), BigInt::from(rng.gen_range(-2..=2i64)))),
            )
        };
        for _ in 0..100 {
            let phi = FreeEndomorphism::new(
                (0..3).map(|_| rand_word(&mut rng)).collect::<Vec<_>>(),
            );
            let psi = FreeEndomorphism::new(
                (0..3).map(|_| rand_word(&mut rng)).collect::<Vec<_>>(),
            );
            let u = rand_word(&mut rng);
            assert_eq!(phi.compose(&psi).apply(&u), phi.apply(&psi.apply(&u)));
        }
    }

    #[test]
    fn abelianized_examples() {
        assert_eq!(
            w(&[(1, 2)]).abelianized(3),
            vec![BigInt::from(2), BigInt::zero(), BigInt::zero()]
        );
        // commutators abelianize to zero
        let d = FreeWord::gen(3);
        let da = conjugate(&d, &FreeWord::gen(1));
        let c = commutator(&d, &da);
        assert!(c.abelianized(3).iter().all(|x| x.is_zero()));
        assert_eq!(
            w(&[(1, 1), (2, 1), (1, -1), (2, 3)]).abelianized(2),
            vec![BigInt::zero(), BigInt::from(4)]
        );
    }

    #[test]
    fn endo_matrix_examples() {
        let id = FreeEndomorphism::identity(3);
        assert_eq!(id.endo_matrix(), IntegerMatrix::identity(3));

        // a -> c^a, c -> cd, d -> c over (a, c, d)
        let sigma = FreeEndomorphism::new(vec![
            conjugate(&FreeWord::gen(2), &FreeWord::gen(1)),
            FreeWord::gen(2).multiply(&FreeWord::gen(3)),
            FreeWord::gen(2),
        ]);
        assert_eq!(
            sigma.endo_matrix(),
            IntegerMatrix::from_i64_rows(&[&[0, 1, 0], &[0, 1, 1], &[0, 1, 0]])
        );

        // alpha -> rho^(alpha^-1), rho -> rho over (alpha, rho)
        let phi = FreeEndomorphism::new(vec![
            conjugate(&FreeWord::gen(2), &FreeWord::gen(1).inverse()),
            FreeWord::gen(2),
        ]);
        assert_eq!(phi.endo_matrix(), IntegerMatrix::from_i64_rows(&[&[0, 1], &[0, 1]]));
    }

    #[test]
    fn abelianization_commutes_with_endomorphisms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let rand_word = |rng: &mut rand_chacha::ChaCha8Rng| {
            let n = rng.gen_range(0..5);
            FreeWord::from_syllables(
                (0..n).map(|_| (rng.gen_range(1..4u32), BigInt::from(rng.gen_range(-3..=3i64)))),
            )
        };
        for _ in 0..200 {
            let phi = FreeEndomorphism::new(
                (0..3).map(|_| rand_word(&mut rng)).collect::<Vec<_>>(),
            );
            let u = rand_word(&mut rng);
            let lhs = phi.apply(&u).abelianized(3);
            let m = phi.endo_matrix();
            let a = u.abelianized(3);
            let rhs: Vec<BigInt> = (0..3)
                .map(|j| (0..3).map(|i| &a[i] * m.get(i, j)).sum::<BigInt>())
                .collect();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pow_special_cases() {
        let a = FreeWord::gen(1);
        assert_eq!(a.pow(&BigInt::from(5)), w(&[(1, 5)]));
        assert!(a.pow(&BigInt::zero()).is_identity());
        let u = w(&[(1, 1), (2, 1)]);
        assert_eq!(u.pow(&BigInt::from(-2)), u.inverse().multiply(&u.inverse()));
        assert!(BigInt::one().is_one());
    }
}

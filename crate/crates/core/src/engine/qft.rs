use std::f64::consts::PI;

use num_complex::Complex64;

/// Iterative radix-2 evaluation of the unitary `Q`-point transform
/// `y -> Q^{-1/2} sum_x f(x) omega^{xy}` with `omega = e^{+2 pi i / Q}`.
#[derive(Debug, Clone)]
pub struct Radix2Plan {
    size: usize,
    bits: u32,
    // omega^k for k < size / 2
    twiddles: Vec<Complex64>,
}

impl Radix2Plan {
    /// Panics unless `size` is a power of two.
    pub fn new(size: usize) -> Self {
        assert!(
            size.is_power_of_two(),
            "transform size {size} is not a power of two"
        );
        let twiddles = (0..size / 2)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / size as f64))
            .collect();
        Radix2Plan {
            size,
            bits: size.trailing_zeros(),
            twiddles,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn process(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.size);
        let n = self.size;
        if n == 1 {
            return;
        }
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - self.bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for chunk in buf.chunks_exact_mut(len) {
                let (lo, hi) = chunk.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let t = *b * self.twiddles[k * stride];
                    *b = *a - t;
                    *a += t;
                }
            }
            len <<= 1;
        }
        let scale = 1.0 / (n as f64).sqrt();
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_transform(input: &[Complex64]) -> Vec<Complex64> {
        let q = input.len();
        let scale = 1.0 / (q as f64).sqrt();
        (0..q)
            .map(|y| {
                input
                    .iter()
                    .enumerate()
                    .map(|(x, &fx)| {
                        // reduce x*y mod Q before forming the angle
                        let k = (x * y) % q;
                        fx * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / q as f64)
                    })
                    .sum::<Complex64>()
                    * scale
            })
            .collect()
    }

    #[test]
    fn matches_dense_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for bits in 0..=8 {
            let q = 1usize << bits;
            let input: Vec<Complex64> = (0..q)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let expected = dense_transform(&input);
            let mut got = input.clone();
            Radix2Plan::new(q).process(&mut got);
            for (g, e) in got.iter().zip(&expected) {
                assert!((g - e).norm() < 1e-12, "Q = {q}");
            }
        }
    }

    #[test]
    fn two_point_is_hadamard() {
        let mut buf = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        Radix2Plan::new(2).process(&mut buf);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((buf[0] - h).norm() < 1e-15 && (buf[1] - h).norm() < 1e-15);
    }
}

//! Arithmetic in O_K / p^M for the tower O_K = W[π]/(E(π)), W = Z_p[θ]/(h(θ)).
//!
//! A ring element is a flat vector of `e * f` integers; index `j * f + i`
//! holds the coefficient of `θ^i π^j`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

#[derive(Debug)]
pub(crate) struct Ring {
    pub p: BigInt,
    pub digits: u32,
    pub modulus: BigInt,
    pub e: usize,
    pub f: usize,
    /// Lower coefficients of the monic unramified modulus h (length f).
    pub h: Vec<BigInt>,
    /// Lower coefficients of the monic Eisenstein polynomial E (length e).
    pub eis: Vec<BigInt>,
}

pub(crate) type Vector = Vec<BigInt>;

impl Ring {
    pub fn len(&self) -> usize {
        self.e * self.f
    }

    pub fn zero(&self) -> Vector {
        vec![BigInt::zero(); self.len()]
    }

    pub fn one(&self) -> Vector {
        let mut v = self.zero();
        v[0] = BigInt::one();
        v
    }

    pub fn int(&self, x: &BigInt) -> Vector {
        let mut v = self.zero();
        v[0] = x.mod_floor(&self.modulus);
        v
    }

    /// The uniformizer π as a vector (only meaningful when e > 1).
    pub fn pi(&self) -> Vector {
        let mut v = self.zero();
        if self.e > 1 {
            v[self.f] = BigInt::one();
        } else {
            // π^1 = -E_0 when e = 1.
            v[0] = (-&self.eis[0]).mod_floor(&self.modulus);
        }
        v
    }

    pub fn reduce(&self, v: &mut [BigInt]) {
        for c in v.iter_mut() {
            *c = c.mod_floor(&self.modulus);
        }
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Vector {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + y).mod_floor(&self.modulus))
            .collect()
    }

    pub fn sub(&self, a: &[BigInt], b: &[BigInt]) -> Vector {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).mod_floor(&self.modulus))
            .collect()
    }

    pub fn neg(&self, a: &[BigInt]) -> Vector {
        a.iter().map(|x| (-x).mod_floor(&self.modulus)).collect()
    }

    pub fn scale(&self, a: &[BigInt], k: &BigInt) -> Vector {
        a.iter().map(|x| (x * k).mod_floor(&self.modulus)).collect()
    }

    /// Product in W = Z_p[θ]/(h), unreduced modulo p^M.
    fn w_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let f = self.f;
        if f == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut prod = vec![BigInt::zero(); 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for k in (f..2 * f - 1).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for i in 0..f {
                prod[k - f + i] -= &c * &self.h[i];
            }
        }
        prod.truncate(f);
        prod
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vector {
        let (e, f) = (self.e, self.f);
        let mut prod: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); f]; 2 * e - 1];
        for j1 in 0..e {
            let x = &a[j1 * f..(j1 + 1) * f];
            if x.iter().all(Zero::is_zero) {
                continue;
            }
            for j2 in 0..e {
                let y = &b[j2 * f..(j2 + 1) * f];
                if y.iter().all(Zero::is_zero) {
                    continue;
                }
                let w = self.w_mul(x, y);
                for (acc, t) in prod[j1 + j2].iter_mut().zip(w) {
                    *acc += t;
                }
            }
        }
        // π^e = -Σ E_j π^j
        for k in (e..2 * e - 1).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.iter().all(Zero::is_zero) {
                continue;
            }
            for j in 0..e {
                if self.eis[j].is_zero() {
                    continue;
                }
                for i in 0..f {
                    let t = &c[i] * &self.eis[j];
                    prod[k - e + j][i] -= t;
                }
            }
        }
        let mut out: Vector = prod.into_iter().take(e).flatten().collect();
        self.reduce(&mut out);
        out
    }

    pub fn pow(&self, a: &[BigInt], n: &BigUint) -> Vector {
        let mut result = self.one();
        let mut base = a.to_vec();
        let bits = n.bits();
        for i in 0..bits {
            if n.bit(i) {
                result = self.mul(&result, &base);
            }
            if i + 1 < bits {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// v_p of a reduced integer, `None` when it is zero mod p^M.
    pub fn vp(&self, x: &BigInt) -> Option<u32> {
        if x.is_zero() {
            return None;
        }
        let mut k = 0;
        let mut y = x.clone();
        loop {
            let (q, r) = y.div_rem(&self.p);
            if !r.is_zero() {
                return Some(k);
            }
            y = q;
            k += 1;
        }
    }

    /// Smallest v_p over all coefficients.
    pub fn min_vp(&self, v: &[BigInt]) -> Option<u32> {
        v.iter().filter_map(|x| self.vp(x)).min()
    }

    /// Valuation in π-units: min over j of e * v_p(c_j) + j.
    pub fn vpi(&self, v: &[BigInt]) -> Option<i64> {
        let (e, f) = (self.e, self.f);
        (0..e)
            .filter_map(|j| {
                self.min_vp(&v[j * f..(j + 1) * f])
                    .map(|k| e as i64 * i64::from(k) + j as i64)
            })
            .min()
    }

    /// Exact division of every coefficient by p^k (the caller guarantees divisibility).
    pub fn div_p_pow(&self, v: &[BigInt], k: u32) -> Vector {
        let d = num_traits::pow(self.p.clone(), k as usize);
        v.iter().map(|x| x / &d).collect()
    }

    pub fn mul_p_pow(&self, v: &[BigInt], k: u32) -> Vector {
        let d = num_traits::pow(self.p.clone(), k as usize);
        self.scale(v, &d)
    }

    /// Residue-field order p^f.
    pub fn residue_size(&self) -> BigUint {
        num_traits::pow(self.p.to_biguint().unwrap(), self.f)
    }

    /// Inverse of a unit of O_K modulo p^M (Newton iteration from a residue inverse).
    pub fn inv_unit(&self, b: &[BigInt]) -> Vector {
        let q = self.residue_size();
        // b^(q-1) ≡ 1 mod π, so b^(q-2) inverts b modulo π.
        let mut x = self.pow(b, &(q - 2u32));
        let target = self.e as i64 * i64::from(self.digits);
        let mut correct = 1i64;
        let two = self.int(&BigInt::from(2));
        while correct < target {
            let bx = self.mul(b, &x);
            x = self.mul(&x, &self.sub(&two, &bx));
            correct *= 2;
        }
        x
    }

    /// Truncate coefficient `j` of a vector representing p^shift * v to absolute
    /// precision `prec` (π-units).
    pub fn truncate(&self, v: &mut [BigInt], shift: i64, prec: i64) {
        let (e, f) = (self.e as i64, self.f);
        for j in 0..self.e {
            let keep = ((prec - j as i64) + e - 1).div_euclid(e) - shift;
            let keep = keep.clamp(0, i64::from(self.digits)) as usize;
            if keep >= self.digits as usize {
                continue;
            }
            let m = num_traits::pow(self.p.clone(), keep);
            for c in &mut v[j * f..(j + 1) * f] {
                *c = c.mod_floor(&m);
            }
        }
    }
}

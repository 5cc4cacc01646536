//! Finite fields `F_q`, `q = p^r`, with elements packed as base-`p` integers.
//!
//! An element `c_0 + c_1 t + ... + c_{r-1} t^{r-1}` of `F_p[t]/(m(t))` is stored
//! as the integer `c_0 + c_1 p + ... + c_{r-1} p^{r-1}`. That packing is the
//! canonical form, so equality and hashing of [`Scalar`] are bitwise.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// An element of some [`FieldSpec`], in canonical packed form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Scalar(pub(crate) u32);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// The packed integer `sum c_i p^i`.
    #[inline]
    pub fn raw(self) -> u32 {
        self.0
    }
}

// Irreducible moduli, low-to-high coefficients, monic. These are the Conway
// polynomials for the listed primes.
const SHIPPED_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (5, 4, &[2, 4, 4, 0, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (7, 4, &[3, 4, 5, 0, 1]),
    (11, 2, &[2, 7, 1]),
    (11, 3, &[9, 2, 0, 1]),
    (11, 4, &[2, 10, 8, 0, 1]),
    (13, 2, &[2, 12, 1]),
    (13, 3, &[11, 2, 0, 1]),
    (13, 4, &[2, 12, 3, 0, 1]),
];

/// The shipped modulus for `F_{p^r}`, if there is one.
pub fn shipped_modulus(p: u32, r: u32) -> Option<&'static [u32]> {
    SHIPPED_MODULI
        .iter()
        .find(|(pp, rr, _)| *pp == p && *rr == r)
        .map(|(_, _, m)| *m)
}

/// All `(p, r)` pairs covered by the shipped modulus table.
pub fn shipped_table() -> impl Iterator<Item = (u32, u32)> {
    SHIPPED_MODULI.iter().map(|(p, r, _)| (*p, *r))
}

struct Tables {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    // log/exp tables for r > 1; exp has length 2(q-1) so sums of logs index directly
    log: Vec<u32>,
    exp: Vec<u32>,
    inv: Vec<u32>,
    neg: Vec<u32>,
    // full addition table when r > 1 and q <= 256
    add: Vec<u32>,
}

/// The field `F_q` together with its modulus. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec {
    t: Arc<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.t, &other.t)
            || (self.t.p == other.t.p && self.t.r == other.t.r && self.t.modulus == other.t.modulus)
    }
}
impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.r == 1 {
            write!(f, "F_{}", self.t.p)
        } else {
            write!(f, "F_{}^{}[{:?}]", self.t.p, self.t.r, self.t.modulus)
        }
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

// Dense polynomial helpers over F_p (low-to-high coefficient vectors).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut a: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = pow_mod(m[dm], p - 2, p);
    while a.len() > dm {
        let top = *a.last().unwrap();
        let shift = a.len() - 1 - dm;
        if top != 0 {
            let c = (top as u64 * lead_inv as u64 % p as u64) as u32;
            for (k, &mk) in m.iter().enumerate() {
                let sub = (c as u64 * mk as u64 % p as u64) as u32;
                a[shift + k] = (a[shift + k] + p - sub) % p;
            }
        }
        a.pop();
    }
    a
}

fn pow_mod(b: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = b as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Brute-force irreducibility: no monic factor of degree `1..=deg/2`.
pub(crate) fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for k in 1..=deg / 2 {
        let count = (p as u64).pow(k as u32);
        for code in 0..count {
            let mut f = vec![0u32; k + 1];
            let mut c = code;
            for slot in f.iter_mut().take(k) {
                *slot = (c % p as u64) as u32;
                c /= p as u64;
            }
            f[k] = 1;
            if poly_rem(m, &f, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// Build and validate `F_{p^r}`. For `r > 1` the modulus is a low-to-high
    /// monic coefficient list of length `r + 1`; when omitted the shipped table
    /// is consulted. The modulus is ignored for prime fields.
    pub fn new(p: u32, r: u32, modulus: Option<&[u32]>) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = (p as u64).checked_pow(r).filter(|&q| r >= 1 && q <= MAX_ORDER as u64);
        let q = q.ok_or(Error::UnsupportedDegree { p, r })? as u32;
        let modulus: Vec<u32> = if r == 1 {
            vec![0, 1]
        } else {
            let m = match modulus {
                Some(m) => m.to_vec(),
                None => shipped_modulus(p, r)
                    .ok_or(Error::NoShippedModulus { p, r })?
                    .to_vec(),
            };
            if m.len() != r as usize + 1 {
                return Err(Error::BadModulus(format!(
                    "expected {} coefficients, got {}",
                    r + 1,
                    m.len()
                )));
            }
            if m.iter().any(|&c| c >= p) {
                return Err(Error::BadModulus("coefficient out of range".into()));
            }
            if m[r as usize] != 1 {
                return Err(Error::BadModulus("modulus must be monic".into()));
            }
            if !is_irreducible(&m, p) {
                return Err(Error::ReducibleModulus(p));
            }
            m
        };
        Ok(Self::build(p, r, q, modulus))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<FieldSpec> {
        Self::new(p, 1, None)
    }

    fn build(p: u32, r: u32, q: u32, modulus: Vec<u32>) -> FieldSpec {
        let mut t = Tables {
            p,
            r,
            q,
            modulus,
            log: Vec::new(),
            exp: Vec::new(),
            inv: vec![0; q as usize],
            neg: vec![0; q as usize],
            add: Vec::new(),
        };
        if r == 1 {
            for a in 1..q {
                t.inv[a as usize] = pow_mod(a, p - 2, p);
                t.neg[a as usize] = p - a;
            }
        } else {
            let digits = |mut v: u32| -> Vec<u32> {
                let mut d = vec![0u32; r as usize];
                for slot in d.iter_mut() {
                    *slot = v % p;
                    v /= p;
                }
                d
            };
            let pack = |d: &[u32]| -> u32 { d.iter().rev().fold(0u32, |acc, &c| acc * p + c) };
            let slow_mul = |a: u32, b: u32| -> u32 {
                let (da, db) = (digits(a), digits(b));
                let mut prod = vec![0u32; 2 * r as usize - 1];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                    }
                }
                let mut rem = poly_rem(&prod, &t.modulus, p);
                rem.resize(r as usize, 0);
                pack(&rem)
            };
            // primitive element by brute force
            let order = q - 1;
            let mut exp = vec![0u32; 2 * order as usize];
            let mut log = vec![0u32; q as usize];
            'search: for g in 2..q {
                let mut x = 1u32;
                for k in 0..order {
                    if k > 0 && x == 1 {
                        continue 'search;
                    }
                    exp[k as usize] = x;
                    x = slow_mul(x, g);
                }
                if x == 1 {
                    break;
                }
            }
            for k in 0..order as usize {
                exp[k + order as usize] = exp[k];
                log[exp[k] as usize] = k as u32;
            }
            for a in 1..q {
                let la = log[a as usize];
                t.inv[a as usize] = exp[((order - la) % order) as usize];
            }
            for a in 0..q {
                let d: Vec<u32> = digits(a).into_iter().map(|c| (p - c) % p).collect();
                t.neg[a as usize] = pack(&d);
            }
            if q <= 256 {
                t.add = vec![0; (q * q) as usize];
                for a in 0..q {
                    let da = digits(a);
                    for b in 0..q {
                        let db = digits(b);
                        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                        t.add[(a * q + b) as usize] = pack(&s);
                    }
                }
            }
            t.exp = exp;
            t.log = log;
        }
        FieldSpec { t: Arc::new(t) }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.t.p
    }
    #[inline]
    pub fn r(&self) -> u32 {
        self.t.r
    }
    #[inline]
    pub fn q(&self) -> u32 {
        self.t.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }
    pub fn is_prime_field(&self) -> bool {
        self.t.r == 1
    }

    /// All field elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = Scalar> {
        (0..self.t.q).map(Scalar)
    }

    /// Reduce an integer into the prime subfield.
    pub fn from_int(&self, v: i64) -> Scalar {
        Scalar(v.rem_euclid(self.t.p as i64) as u32)
    }

    /// Checked construction from a packed value.
    pub fn from_raw(&self, v: u32) -> Result<Scalar> {
        if v < self.t.q {
            Ok(Scalar(v))
        } else {
            Err(Error::Input(format!("{v} is not an element of F_{}", self.t.q)))
        }
    }

    /// Construct from low-to-high coefficients in `t` (at most `r` of them).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Scalar> {
        if coeffs.len() > self.t.r as usize {
            return Err(Error::Input(format!(
                "{} coefficients for a degree-{} extension",
                coeffs.len(),
                self.t.r
            )));
        }
        let p = self.t.p;
        if coeffs.iter().any(|&c| c >= p) {
            return Err(Error::Input(format!("coefficient out of range for F_{p}")));
        }
        Ok(Scalar(coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)))
    }

    /// Low-to-high coefficients in `t`, always of length `r`.
    pub fn coeffs(&self, a: Scalar) -> Vec<u32> {
        let mut v = a.0;
        (0..self.t.r)
            .map(|_| {
                let c = v % self.t.p;
                v /= self.t.p;
                c
            })
            .collect()
    }

    /// The class of `t`; zero in a prime field, where `t` is not defined.
    pub fn generator_t(&self) -> Scalar {
        if self.t.r == 1 {
            Scalar(0)
        } else {
            Scalar(self.t.p)
        }
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        let t = &*self.t;
        if t.r == 1 {
            if t.p == 2 {
                return Scalar(a.0 ^ b.0);
            }
            let s = a.0 + b.0;
            Scalar(if s >= t.p { s - t.p } else { s })
        } else if !t.add.is_empty() {
            Scalar(t.add[(a.0 * t.q + b.0) as usize])
        } else {
            let (mut x, mut y) = (a.0, b.0);
            let mut out = 0u32;
            let mut place = 1u32;
            for _ in 0..t.r {
                out += ((x % t.p + y % t.p) % t.p) * place;
                x /= t.p;
                y /= t.p;
                place *= t.p;
            }
            Scalar(out)
        }
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        Scalar(self.t.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        let t = &*self.t;
        if a.0 == 0 || b.0 == 0 {
            return Scalar::ZERO;
        }
        if t.r == 1 {
            if t.p == 2 {
                return Scalar(1);
            }
            Scalar((a.0 as u64 * b.0 as u64 % t.p as u64) as u32)
        } else {
            let l = t.log[a.0 as usize] + t.log[b.0 as usize];
            Scalar(t.exp[l as usize])
        }
    }

    /// `a * b + c`.
    #[inline]
    pub fn mul_add(&self, a: Scalar, b: Scalar, c: Scalar) -> Scalar {
        self.add(self.mul(a, b), c)
    }

    pub fn inv(&self, a: Scalar) -> Result<Scalar> {
        if a.is_zero() {
            Err(Error::ZeroInverse)
        } else {
            Ok(Scalar(self.t.inv[a.0 as usize]))
        }
    }

    /// Inverse of a value already known to be nonzero.
    #[inline]
    pub(crate) fn inv_nz(&self, a: Scalar) -> Scalar {
        debug_assert!(!a.is_zero());
        Scalar(self.t.inv[a.0 as usize])
    }

    pub fn pow(&self, a: Scalar, mut e: u64) -> Scalar {
        let mut acc = Scalar::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The Frobenius map `a -> a^p`.
    pub fn frobenius(&self, a: Scalar) -> Scalar {
        self.pow(a, self.t.p as u64)
    }

    /// Checks that `a` is a valid element of this field.
    pub fn check(&self, a: Scalar) -> Result<()> {
        if a.0 < self.t.q {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Text form: an integer in the prime subfield, otherwise `(c*t^k+...)`.
    pub fn format(&self, a: Scalar) -> String {
        if a.0 < self.t.p {
            return a.0.to_string();
        }
        let mut parts = Vec::new();
        for (k, &c) in self.coeffs(a).iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            parts.push(match (c, k) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        format!("({})", parts.join("+"))
    }
}

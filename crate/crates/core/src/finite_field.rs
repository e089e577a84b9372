//! Deterministic construction of GF(p^n) for odd p, with table-driven
//! arithmetic and the multiplicative-subgroup queries the graph layer needs.
//!
//! An element is its canonical index in `0..q`: digit i of the index, base p
//! little-endian, is the coefficient of the i-th basis power in the quotient
//! representation F_p[x]/(modulus). Addition is digit arithmetic; products go
//! through discrete-log tables built once at construction, with an independent
//! polynomial-reduction path kept around for cross-checking.

use serde::Serialize;
use thiserror::Error;

/// Canonical element index in `0..q`. Digit i (base p, little-endian) is the
/// i-th coordinate of the element.
pub type Element = usize;

/// Default cap on q; bounds the dlog/exp table memory.
pub const DEFAULT_Q_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("p = {0} is not prime")]
    CompositeP(usize),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("q = p^n = {q} exceeds the table cap {cap}")]
    SizeExceeded { q: u128, cap: usize },
    #[error("k = {k} does not divide {target}")]
    BadK { k: usize, target: usize },
    #[error("0 has no multiplicative inverse")]
    ZeroInverse,
    #[error("argument must be a nonzero element")]
    ZeroArgument,
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
}

/// Size parameters of a constructed field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FieldParams {
    pub p: usize,
    pub n: u32,
    pub q: usize,
}

/// GF(p^n) with its chosen modulus, primitive element and log tables.
pub struct FieldStructure {
    params: FieldParams,
    /// Monic modulus, little-endian: modulus[i] is the coefficient of x^i,
    /// length n + 1, last entry 1.
    modulus: Vec<usize>,
    /// Smallest element index with multiplicative order q - 1.
    theta: Element,
    /// dlog[x] = e with theta^e = x; usize::MAX at index 0.
    dlog: Vec<usize>,
    /// exp[e] = theta^e for e in 0..q-1.
    exp: Vec<Element>,
}

/// Builds GF(p^n) under the default size cap.
pub fn build_field(p: usize, n: u32) -> Result<FieldStructure, FieldError> {
    build_field_with_cap(p, n, DEFAULT_Q_CAP)
}

/// Builds GF(p^n), rejecting q above `cap`.
///
/// The modulus is the lexicographically smallest monic irreducible polynomial
/// of degree n over F_p, ordering tuples (c_0, ..., c_{n-1}) with c_0 most
/// significant. The primitive element theta is the smallest element index of
/// multiplicative order q - 1. Both choices are deterministic, so element
/// indices are reproducible across runs and machines.
pub fn build_field_with_cap(p: usize, n: u32, cap: usize) -> Result<FieldStructure, FieldError> {
    if p == 2 {
        return Err(FieldError::EvenCharacteristic);
    }
    if !is_prime(p) {
        return Err(FieldError::CompositeP(p));
    }
    if n == 0 {
        return Err(FieldError::PreconditionViolated("n must be at least 1"));
    }
    let q128 = (p as u128)
        .checked_pow(n)
        .ok_or(FieldError::SizeExceeded { q: u128::MAX, cap })?;
    if q128 > cap as u128 {
        return Err(FieldError::SizeExceeded { q: q128, cap });
    }
    let q = q128 as usize;
    let modulus = smallest_irreducible(p, n as usize);
    let theta = smallest_primitive(p, n as usize, q, &modulus);
    Ok(assemble(p, n, q, modulus, theta))
}

/// Rebuilds a field from recorded modulus and theta, validating both. Used by
/// the cache layer; invalid parts are reported rather than trusted.
pub fn field_from_parts(
    p: usize,
    n: u32,
    modulus: Vec<usize>,
    theta: Element,
    cap: usize,
) -> Result<FieldStructure, FieldError> {
    if p == 2 {
        return Err(FieldError::EvenCharacteristic);
    }
    if !is_prime(p) {
        return Err(FieldError::CompositeP(p));
    }
    if n == 0 {
        return Err(FieldError::PreconditionViolated("n must be at least 1"));
    }
    let q128 = (p as u128)
        .checked_pow(n)
        .ok_or(FieldError::SizeExceeded { q: u128::MAX, cap })?;
    if q128 > cap as u128 {
        return Err(FieldError::SizeExceeded { q: q128, cap });
    }
    let q = q128 as usize;
    let nu = n as usize;
    if modulus.len() != nu + 1 || modulus[nu] != 1 {
        return Err(FieldError::PreconditionViolated(
            "modulus must be monic of degree n",
        ));
    }
    if modulus.iter().any(|&c| c >= p) {
        return Err(FieldError::PreconditionViolated(
            "modulus coefficients must lie in 0..p",
        ));
    }
    if !poly_is_irreducible(&modulus, p) {
        return Err(FieldError::PreconditionViolated("modulus is reducible"));
    }
    if theta == 0 || theta >= q {
        return Err(FieldError::PreconditionViolated(
            "theta is out of range",
        ));
    }
    let radicals = distinct_prime_factors(q - 1);
    if !has_full_order(theta, q, &modulus, p, nu, &radicals) {
        return Err(FieldError::PreconditionViolated(
            "theta does not have multiplicative order q - 1",
        ));
    }
    Ok(assemble(p, n, q, modulus, theta))
}

fn assemble(p: usize, n: u32, q: usize, modulus: Vec<usize>, theta: Element) -> FieldStructure {
    let nu = n as usize;
    let mut dlog = vec![usize::MAX; q];
    let mut exp = vec![0usize; q - 1];
    let mut acc: Element = 1;
    for (e, slot) in exp.iter_mut().enumerate() {
        *slot = acc;
        debug_assert_eq!(dlog[acc], usize::MAX, "theta order is below q - 1");
        dlog[acc] = e;
        acc = mul_mod_raw(acc, theta, &modulus, p, nu);
    }
    debug_assert_eq!(acc, 1);
    FieldStructure {
        params: FieldParams { p, n, q },
        modulus,
        theta,
        dlog,
        exp,
    }
}

impl FieldStructure {
    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn p(&self) -> usize {
        self.params.p
    }

    pub fn n(&self) -> u32 {
        self.params.n
    }

    pub fn q(&self) -> usize {
        self.params.q
    }

    pub fn theta(&self) -> Element {
        self.theta
    }

    /// Monic modulus, little-endian, length n + 1.
    pub fn modulus_coeffs(&self) -> &[usize] {
        &self.modulus
    }

    /// Coordinate vector of x, length n, entry i the coefficient of the i-th
    /// basis power.
    pub fn coeffs(&self, x: Element) -> Vec<usize> {
        let p = self.params.p;
        let mut x = x;
        (0..self.params.n)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[usize]) -> Element {
        let p = self.params.p;
        debug_assert!(coeffs.len() <= self.params.n as usize);
        coeffs.iter().rev().fold(0, |acc, &c| {
            debug_assert!(c < p);
            acc * p + c
        })
    }

    pub fn add(&self, x: Element, y: Element) -> Element {
        let p = self.params.p;
        let (mut x, mut y) = (x, y);
        let mut out = 0;
        let mut pw = 1;
        for _ in 0..self.params.n {
            let s = x % p + y % p;
            out += if s >= p { s - p } else { s } * pw;
            x /= p;
            y /= p;
            pw *= p;
        }
        out
    }

    pub fn neg(&self, x: Element) -> Element {
        let p = self.params.p;
        let mut x = x;
        let mut out = 0;
        let mut pw = 1;
        for _ in 0..self.params.n {
            let d = x % p;
            out += if d == 0 { 0 } else { p - d } * pw;
            x /= p;
            pw *= p;
        }
        out
    }

    pub fn sub(&self, x: Element, y: Element) -> Element {
        self.add(x, self.neg(y))
    }

    /// Product through the discrete-log tables.
    pub fn mul(&self, x: Element, y: Element) -> Element {
        if x == 0 || y == 0 {
            return 0;
        }
        let m = self.params.q - 1;
        let e = self.dlog[x] + self.dlog[y];
        self.exp[if e >= m { e - m } else { e }]
    }

    /// Product through polynomial reduction, independent of the log tables.
    pub fn mul_via_polynomials(&self, x: Element, y: Element) -> Element {
        mul_mod_raw(x, y, &self.modulus, self.params.p, self.params.n as usize)
    }

    pub fn inv(&self, x: Element) -> Result<Element, FieldError> {
        if x == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let m = self.params.q - 1;
        let e = self.dlog[x];
        Ok(self.exp[if e == 0 { 0 } else { m - e }])
    }

    pub fn pow(&self, x: Element, e: u64) -> Element {
        if x == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let m = (self.params.q - 1) as u128;
        let r = (self.dlog[x] as u128 * e as u128 % m) as usize;
        self.exp[r]
    }

    /// Discrete log base theta; None at 0.
    pub fn dlog(&self, x: Element) -> Option<usize> {
        if x == 0 {
            None
        } else {
            Some(self.dlog[x])
        }
    }

    /// theta^e, any e (reduced mod q - 1).
    pub fn exp_theta(&self, e: usize) -> Element {
        self.exp[e % (self.params.q - 1)]
    }

    /// Multiplicative order of x; None at 0.
    pub fn element_order(&self, x: Element) -> Option<usize> {
        let e = self.dlog(x)?;
        let m = self.params.q - 1;
        Some(m / gcd(m, e))
    }

    /// Evaluates a polynomial with F_p coefficients (little-endian) at x.
    pub fn eval_poly(&self, coeffs: &[usize], x: Element) -> Element {
        coeffs.iter().rev().fold(0, |acc, &c| {
            debug_assert!(c < self.params.p);
            self.add(self.mul(acc, x), c)
        })
    }

    /// The subgroup of k-th powers of the unit group, as a sorted member list.
    /// Requires k >= 1 and k | q - 1.
    pub fn kth_power_subgroup(&self, k: usize) -> Result<KPowerSubgroup, FieldError> {
        self.require_k_divides_order(k)?;
        let m = self.params.q - 1;
        let mut members: Vec<Element> = (0..m / k).map(|i| self.exp[k * i]).collect();
        members.sort_unstable();
        Ok(KPowerSubgroup { k, members })
    }

    /// Whether nonzero x is a k-th power, decided by k | dlog(x).
    pub fn is_kth_power(&self, x: Element, k: usize) -> Result<bool, FieldError> {
        self.require_k_divides_order(k)?;
        if x == 0 {
            return Err(FieldError::ZeroArgument);
        }
        Ok(self.dlog[x] % k == 0)
    }

    /// Whether every unit of the prime subfield F_p is a k-th power, decided
    /// by the index divisibility k | (q - 1)/(p - 1). Requires 2k | q - 1.
    pub fn prime_subfield_in_kpowers(&self, k: usize) -> Result<bool, FieldError> {
        self.require_2k_divides_order(k)?;
        let idx = (self.params.q - 1) / (self.params.p - 1);
        Ok(idx % k == 0)
    }

    /// Same containment decided through the extension degree: requires
    /// k | p - 1 on top of 2k | q - 1, and then holds iff k | n.
    pub fn prime_subfield_in_kpowers_by_degree(&self, k: usize) -> Result<bool, FieldError> {
        self.require_2k_divides_order(k)?;
        if (self.params.p - 1) % k != 0 {
            return Err(FieldError::PreconditionViolated("k must divide p - 1"));
        }
        Ok(self.params.n as usize % k == 0)
    }

    /// Degree of the smallest subfield containing all k-th powers: the least
    /// divisor a of n with (q - 1)/k dividing p^a - 1. Requires 2k | q - 1.
    pub fn kpowers_subfield_degree(&self, k: usize) -> Result<u32, FieldError> {
        self.require_2k_divides_order(k)?;
        let target = (self.params.q - 1) / k;
        for a in divisors(self.params.n as usize) {
            let pa = self.params.p.pow(a as u32);
            if (pa - 1) % target == 0 {
                return Ok(a as u32);
            }
        }
        unreachable!("a = n always satisfies the divisibility");
    }

    /// Elements of the subfield of order p^a, i.e. fixed points of the a-fold
    /// Frobenius x -> x^(p^a). Sorted ascending. Requires a | n.
    pub fn subfield_elements(&self, a: u32) -> Vec<Element> {
        debug_assert_eq!(self.params.n % a, 0);
        let pa = self.params.p.pow(a) as u64;
        (0..self.params.q)
            .filter(|&x| self.pow(x, pa) == x)
            .collect()
    }

    fn require_k_divides_order(&self, k: usize) -> Result<(), FieldError> {
        let m = self.params.q - 1;
        if k == 0 || m % k != 0 {
            return Err(FieldError::BadK { k, target: m });
        }
        Ok(())
    }

    fn require_2k_divides_order(&self, k: usize) -> Result<(), FieldError> {
        let half = (self.params.q - 1) / 2;
        if k == 0 || half % k != 0 {
            return Err(FieldError::BadK { k, target: half });
        }
        Ok(())
    }
}

/// Sorted member list of the k-th power subgroup of the unit group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KPowerSubgroup {
    pub k: usize,
    /// Sorted ascending; length (q - 1)/k.
    pub members: Vec<Element>,
}

impl KPowerSubgroup {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: Element) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

pub fn is_prime(m: usize) -> bool {
    if m < 2 {
        return false;
    }
    if m % 2 == 0 {
        return m == 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Divisors of m, ascending.
pub fn divisors(m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            if d != m / d {
                out.push(m / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn distinct_prime_factors(mut m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Product of element indices x, y through polynomial reduction modulo the
/// given monic modulus (little-endian, length n + 1).
fn mul_mod_raw(x: Element, y: Element, modulus: &[usize], p: usize, n: usize) -> Element {
    let mut prod = vec![0usize; 2 * n - 1];
    let mut xi = x;
    for i in 0..n {
        let a = xi % p;
        xi /= p;
        if a != 0 {
            let mut yj = y;
            for j in 0..n {
                let b = yj % p;
                yj /= p;
                if b != 0 {
                    prod[i + j] = (prod[i + j] + a * b) % p;
                }
            }
        }
    }
    for i in (n..2 * n - 1).rev() {
        let c = prod[i];
        if c != 0 {
            prod[i] = 0;
            // x^i = -c * modulus_tail * x^(i-n) once the leading term cancels
            for (j, &mj) in modulus.iter().take(n).enumerate() {
                if mj != 0 {
                    prod[i - n + j] = (prod[i - n + j] + c * (p - mj)) % p;
                }
            }
        }
    }
    let mut out = 0;
    let mut pw = 1;
    for &digit in prod.iter().take(n) {
        out += digit * pw;
        pw *= p;
    }
    out
}

fn pow_mod_raw(x: Element, mut e: u64, modulus: &[usize], p: usize, n: usize) -> Element {
    let mut base = x;
    let mut out: Element = 1;
    while e > 0 {
        if e & 1 == 1 {
            out = mul_mod_raw(out, base, modulus, p, n);
        }
        base = mul_mod_raw(base, base, modulus, p, n);
        e >>= 1;
    }
    out
}

fn has_full_order(
    x: Element,
    q: usize,
    modulus: &[usize],
    p: usize,
    n: usize,
    radicals: &[usize],
) -> bool {
    // ord(x) = q - 1 iff x^((q-1)/r) != 1 for every prime r | q - 1
    radicals
        .iter()
        .all(|&r| pow_mod_raw(x, ((q - 1) / r) as u64, modulus, p, n) != 1)
}

fn smallest_primitive(p: usize, n: usize, q: usize, modulus: &[usize]) -> Element {
    let radicals = distinct_prime_factors(q - 1);
    (2..q)
        .find(|&cand| has_full_order(cand, q, modulus, p, n, &radicals))
        .expect("the unit group of a finite field is cyclic")
}

/// Lexicographically smallest monic irreducible of degree n over F_p, with
/// the constant coefficient most significant in the ordering.
fn smallest_irreducible(p: usize, n: usize) -> Vec<usize> {
    let total = p.pow(n as u32);
    for m in 0..total {
        // decode m into (c_0, ..., c_{n-1}), c_0 most significant
        let mut f = vec![0usize; n + 1];
        f[n] = 1;
        let mut rest = m;
        for i in 0..n {
            // c_i sits at positional weight p^(n-1-i)
            let w = p.pow((n - 1 - i) as u32);
            f[i] = rest / w;
            rest %= w;
        }
        if poly_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}

/// Irreducibility by exhaustive trial division: no monic divisor of degree
/// 1..=deg/2 leaves remainder zero.
fn poly_is_irreducible(f: &[usize], p: usize) -> bool {
    let deg = f.len() - 1;
    debug_assert!(deg >= 1 && f[deg] == 1);
    if deg == 1 {
        return true;
    }
    for dg in 1..=deg / 2 {
        let count = p.pow(dg as u32);
        let mut g = vec![0usize; dg + 1];
        g[dg] = 1;
        for m in 0..count {
            let mut rest = m;
            for slot in g.iter_mut().take(dg) {
                *slot = rest % p;
                rest /= p;
            }
            if poly_divides(&g, f, p) {
                return false;
            }
        }
    }
    true
}

fn poly_divides(g: &[usize], f: &[usize], p: usize) -> bool {
    let dg = g.len() - 1;
    let mut rem: Vec<usize> = f.to_vec();
    for i in (dg..rem.len()).rev() {
        let c = rem[i];
        if c != 0 {
            for (j, &gj) in g.iter().enumerate() {
                rem[i - dg + j] = (rem[i - dg + j] + c * (p - gj) % p) % p;
            }
        }
    }
    rem[..dg].iter().all(|&c| c == 0)
}

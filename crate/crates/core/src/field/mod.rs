//! Finite fields `GF(p^n)`, their extensions, and the character data the
//! curve counts are built from.
//!
//! Elements are packed base-`p` digit vectors of the polynomial
//! representative, so values are dense in `0..p^n` and can index tables.
//! Fields up to a size cap carry exp/log tables (multiplication, inversion
//! and the quadratic character become lookups); larger fields fall back to
//! direct polynomial arithmetic modulo the same deterministically chosen
//! irreducible, so both paths represent identical fields.

pub mod poly;

use crate::arith::{divisors, factorize};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Default cap on table-backed field size.
pub const TABLE_CAP: u64 = 1 << 22;

/// A prime power `q = p^k` small enough that `q^7` fits in 63 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimePower {
    pub p: u64,
    pub k: u32,
    pub q: u64,
}

impl PrimePower {
    pub fn new(q: u64) -> Result<Self> {
        let (p, k) = crate::arith::prime_power(q)
            .ok_or_else(|| Error::Parse(format!("{} is not a prime power", q)))?;
        if q > 511 {
            return Err(Error::Unsupported(format!(
                "field size {} too large (q^7 must fit in 63 bits)",
                q
            )));
        }
        Ok(PrimePower { p, k, q })
    }

    pub fn is_even(&self) -> bool {
        self.p == 2
    }
}

/// Working data for `GF(p^n)`.
pub struct Gf {
    pub p: u64,
    pub n: u32,
    pub size: u64,
    /// Monic irreducible modulus over `GF(p)`, ascending coefficients,
    /// length `n + 1`.
    pub modulus: Vec<u64>,
    tables: Option<Tables>,
}

struct Tables {
    /// `exp[i]` is the packed value of `generator^i`, `i < size - 1`.
    exp: Vec<u64>,
    /// `log[a]` for packed `a >= 1`; `log[exp[i]] = i`.
    log: Vec<u32>,
    /// Quadratic character: 0 at zero, else +1 for squares, -1 otherwise.
    /// Only meaningful for odd `p` (all nonzero elements are squares when
    /// `p = 2`, and the table then holds +1).
    chi: Vec<i8>,
    /// Absolute trace to `GF(p)` as a digit `0..p`.
    trace: Vec<u16>,
}

// ---- packed digit arithmetic over GF(p), used with or without tables ----

fn unpack(p: u64, n: u32, mut a: u64) -> Vec<u64> {
    let mut d = vec![0u64; n as usize];
    for slot in d.iter_mut() {
        *slot = a % p;
        a /= p;
    }
    d
}

fn pack(p: u64, d: &[u64]) -> u64 {
    let mut a = 0u64;
    for &c in d.iter().rev() {
        a = a * p + c;
    }
    a
}

fn digits_add(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0);
            x % p
        })
        .collect()
}

fn digits_mul_mod(p: u64, a: &[u64], b: &[u64], modulus: &[u64]) -> Vec<u64> {
    let n = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
    }
    // Reduce: modulus is monic, so x^n = -(lower part).
    for i in (n..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &m) in modulus.iter().enumerate().take(n) {
            if m != 0 {
                let idx = i - n + j;
                prod[idx] = (prod[idx] + c * (p - m)) % p;
            }
        }
    }
    prod.truncate(n);
    prod.resize(n, 0);
    prod
}

// ---- GF(p) polynomial helpers for modulus construction ----

fn gfp_poly_trim(a: &mut Vec<u64>) {
    while matches!(a.last(), Some(0)) {
        a.pop();
    }
}

fn gfp_poly_mul_mod(p: u64, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    let mut out = digits_mul_mod(p, a, b, m);
    gfp_poly_trim(&mut out);
    out
}

fn gfp_poly_pow_mod(p: u64, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = gfp_poly_mul_mod(p, &acc, &b, m);
        }
        b = gfp_poly_mul_mod(p, &b, &b, m);
        e >>= 1;
    }
    acc
}

fn gfp_poly_sub(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    gfp_poly_trim(&mut out);
    out
}

fn gfp_poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    gfp_poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inverse(b[db], p);
    while r.len() > db {
        let c = (r[r.len() - 1] * lead_inv) % p;
        let shift = r.len() - 1 - db;
        if c != 0 {
            for (j, &m) in b.iter().enumerate() {
                if m != 0 {
                    let idx = shift + j;
                    r[idx] = (r[idx] + p - (c * m) % p) % p;
                }
            }
        }
        gfp_poly_trim(&mut r);
    }
    r
}

fn gfp_poly_gcd_is_const(p: u64, a: &[u64], b: &[u64]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    gfp_poly_trim(&mut x);
    gfp_poly_trim(&mut y);
    while !y.is_empty() {
        let r = gfp_poly_rem(p, &x, &y);
        x = y;
        y = r;
    }
    x.len() == 1
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat inverse; p is prime and a nonzero mod p.
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// True when `x^n + candidate` (packed lower part) is irreducible over `GF(p)`.
fn irreducible(p: u64, n: u32, lower_packed: u64) -> bool {
    let mut m = unpack(p, n, lower_packed);
    m.push(1);
    let x = vec![0, 1];
    // x^{p^n} must equal x mod m.
    let mut fr = x.clone();
    for _ in 0..n {
        fr = gfp_poly_pow_mod(p, &fr, p, &m);
    }
    if gfp_poly_sub(p, &fr, &x) != Vec::<u64>::new() {
        return false;
    }
    // gcd(x^{p^{n/l}} - x, m) must be constant for every prime l | n.
    for (l, _) in factorize(n as u64) {
        let reps = n as u64 / l;
        let mut fr = x.clone();
        for _ in 0..reps {
            fr = gfp_poly_pow_mod(p, &fr, p, &m);
        }
        let diff = gfp_poly_sub(p, &fr, &x);
        if diff.is_empty() {
            return false;
        }
        if !gfp_poly_gcd_is_const(p, &diff, &m) {
            return false;
        }
    }
    true
}

/// The deterministic modulus for `GF(p^n)`: smallest packed lower part whose
/// `x^n + lower` is irreducible.
fn choose_modulus(p: u64, n: u32) -> Vec<u64> {
    if n == 1 {
        return vec![0, 1];
    }
    let bound = p.pow(n);
    for lower in 0..bound {
        if irreducible(p, n, lower) {
            let mut m = unpack(p, n, lower);
            m.push(1);
            return m;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists");
}

impl Gf {
    /// Builds `GF(p^n)`; tables are constructed when `p^n <= table_cap`.
    pub fn new(p: u64, n: u32, table_cap: u64) -> Result<Arc<Gf>> {
        assert!(n >= 1);
        let size = p
            .checked_pow(n)
            .filter(|&s| s < (1u64 << 63))
            .ok_or_else(|| Error::Unsupported(format!("field size {}^{} overflows", p, n)))?;
        let modulus = choose_modulus(p, n);
        let mut gf = Gf {
            p,
            n,
            size,
            modulus,
            tables: None,
        };
        if size <= table_cap {
            gf.build_tables();
        }
        Ok(Arc::new(gf))
    }

    fn build_tables(&mut self) {
        let size = self.size;
        let factors = factorize(size - 1);
        // Smallest packed value generating the multiplicative group.
        let mut generator = 0;
        'cand: for cand in 1..size {
            for &(l, _) in &factors {
                if self.pow_direct(cand, (size - 1) / l) == 1 {
                    continue 'cand;
                }
            }
            generator = cand;
            break;
        }
        assert!(generator != 0, "multiplicative group has a generator");

        let mut exp = vec![0u64; (size - 1) as usize];
        let mut log = vec![0u32; size as usize];
        let mut acc = 1u64;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = acc;
            log[acc as usize] = i as u32;
            acc = self.mul_direct(acc, generator);
        }
        debug_assert_eq!(acc, 1);

        let mut chi = vec![0i8; size as usize];
        if self.p == 2 {
            for a in 1..size {
                chi[a as usize] = 1;
            }
        } else {
            for (i, &v) in exp.iter().enumerate() {
                chi[v as usize] = if i % 2 == 0 { 1 } else { -1 };
            }
        }

        let mut trace = vec![0u16; size as usize];
        for a in 0..size {
            let mut t = vec![0u64; self.n as usize];
            let mut x = a;
            for _ in 0..self.n {
                t = digits_add(self.p, &t, &unpack(self.p, self.n, x));
                x = self.pow_direct(x, self.p);
            }
            // The trace lies in the prime field: all higher digits vanish.
            debug_assert!(t.iter().skip(1).all(|&d| d == 0));
            trace[a as usize] = t[0] as u16;
        }

        self.tables = Some(Tables {
            exp,
            log,
            chi,
            trace,
        });
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    fn mul_direct(&self, a: u64, b: u64) -> u64 {
        let prod = digits_mul_mod(
            self.p,
            &unpack(self.p, self.n, a),
            &unpack(self.p, self.n, b),
            &self.modulus,
        );
        pack(self.p, &prod)
    }

    fn pow_direct(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_direct(acc, b);
            }
            b = self.mul_direct(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.n == 1 {
            return (a + b) % self.p;
        }
        pack(
            self.p,
            &digits_add(
                self.p,
                &unpack(self.p, self.n, a),
                &unpack(self.p, self.n, b),
            ),
        )
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.p == 2 {
            return a;
        }
        if self.n == 1 {
            return (self.p - a) % self.p;
        }
        let d: Vec<u64> = unpack(self.p, self.n, a)
            .iter()
            .map(|&c| (self.p - c) % self.p)
            .collect();
        pack(self.p, &d)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => {
                let l = t.log[a as usize] as u64 + t.log[b as usize] as u64;
                let l = if l >= self.size - 1 { l - (self.size - 1) } else { l };
                t.exp[l as usize]
            }
            None => self.mul_direct(a, b),
        }
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        match &self.tables {
            Some(t) => {
                let l = t.log[a as usize] as u64;
                if l == 0 {
                    1
                } else {
                    t.exp[(self.size - 1 - l) as usize]
                }
            }
            None => self.pow_direct(a, self.size - 2),
        }
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        match &self.tables {
            Some(t) => {
                let l = (t.log[a as usize] as u128 * e as u128 % (self.size - 1) as u128) as u64;
                t.exp[l as usize]
            }
            None => self.pow_direct(a, e),
        }
    }

    /// Frobenius `x -> x^p`.
    pub fn frob_p(&self, a: u64) -> u64 {
        self.pow(a, self.p)
    }

    /// Integer scalar as a prime-field element.
    pub fn scalar(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    /// Quadratic character: 0 at zero, otherwise whether `a` is a square in
    /// the multiplicative group. Exponentiation by `(size-1)/2` when no
    /// table is present.
    pub fn chi(&self, a: u64) -> i8 {
        assert!(self.p != 2, "quadratic character needs odd characteristic");
        if a == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => t.chi[a as usize],
            None => {
                let r = self.pow_direct(a, (self.size - 1) / 2);
                if r == 1 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Absolute trace to `GF(p)`, returned as a digit in `0..p`.
    pub fn trace_p(&self, a: u64) -> u64 {
        match &self.tables {
            Some(t) => t.trace[a as usize] as u64,
            None => {
                let mut t = vec![0u64; self.n as usize];
                let mut x = a;
                for _ in 0..self.n {
                    t = digits_add(self.p, &t, &unpack(self.p, self.n, x));
                    x = self.pow_direct(x, self.p);
                }
                t[0]
            }
        }
    }
}

impl std::fmt::Debug for Gf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Gf({}^{})", self.p, self.n)
    }
}

/// A point of the projective line over an extension field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Infinity,
    Affine(u64),
}

/// The degree-`m` extension of a base field `GF(q)`, with the embedding of
/// base-field coefficients needed for polynomial evaluation.
pub struct Ext {
    pub base: Arc<Gf>,
    pub ext: Arc<Gf>,
    pub m: u32,
    /// Base field size `q`.
    pub q: u64,
    embed: Vec<u64>,
}

impl Ext {
    pub fn new(base: Arc<Gf>, m: u32, table_cap: u64) -> Result<Ext> {
        assert!(m >= 1);
        let q = base.size;
        if m == 1 {
            let embed = (0..base.size).collect();
            return Ok(Ext {
                ext: base.clone(),
                base,
                m,
                q,
                embed,
            });
        }
        let ext = Gf::new(base.p, base.n * m, table_cap)?;
        if !base.has_tables() || !ext.has_tables() {
            return Err(Error::Budget {
                task: format!("extension field GF({}^{})", base.size, m),
                needed: ext.size as u128,
                budget: table_cap as u128,
            });
        }
        // Image of the base generator's companion root: the smallest root of
        // the base modulus inside the unique subfield of order q.
        let stride = (ext.size - 1) / (q - 1);
        let mut root = None;
        let candidates =
            std::iter::once(0).chain((0..(q - 1)).map(|j| ext.pow_generator(j * stride)));
        for cand in candidates {
            if eval_prime_poly(&ext, &base.modulus, cand) == 0 {
                root = Some(root.map_or(cand, |r: u64| r.min(cand)));
            }
        }
        let mu = root.ok_or_else(|| {
            Error::Internal("base modulus has no root in extension".to_string())
        })?;
        let mut powers = vec![1u64];
        for _ in 1..base.n {
            let last = *powers.last().unwrap();
            powers.push(ext.mul(last, mu));
        }
        let mut embed = vec![0u64; base.size as usize];
        for a in 0..base.size {
            let digits = unpack(base.p, base.n, a);
            let mut acc = 0u64;
            for (i, &d) in digits.iter().enumerate() {
                if d != 0 {
                    acc = ext.add(acc, ext.mul(d, powers[i]));
                }
            }
            embed[a as usize] = acc;
        }
        Ok(Ext {
            base,
            ext,
            m,
            q,
            embed,
        })
    }

    pub fn size(&self) -> u64 {
        self.ext.size
    }

    pub fn embed(&self, a: u64) -> u64 {
        self.embed[a as usize]
    }

    /// Frobenius over the base field: `x -> x^q`.
    pub fn frob_q(&self, a: u64) -> u64 {
        self.ext.pow(a, self.q)
    }

    /// Smallest `d` with `x^{q^d} = x`; always divides `m`.
    pub fn exact_degree(&self, a: u64) -> u32 {
        for d in divisors(self.m as u64) {
            let mut x = a;
            for _ in 0..d {
                x = self.frob_q(x);
            }
            if x == a {
                return d as u32;
            }
        }
        unreachable!("exact degree divides m")
    }

    pub fn exact_degree_point(&self, pt: ProjPoint) -> u32 {
        match pt {
            ProjPoint::Infinity => 1,
            ProjPoint::Affine(a) => self.exact_degree(a),
        }
    }

    /// Quadratic character of the extension field (odd characteristic).
    pub fn chi2(&self, a: u64) -> i8 {
        self.ext.chi(a)
    }

    /// Number of roots of `y^2 + a y + b` in the field, minus one
    /// (characteristic two only).
    pub fn tau(&self, a: u64, b: u64) -> i8 {
        debug_assert_eq!(self.ext.p, 2);
        if a == 0 {
            // y -> y^2 is a bijection: exactly one root.
            return 0;
        }
        let ainv = self.ext.inv(a);
        let c = self.ext.mul(b, self.ext.mul(ainv, ainv));
        if self.ext.trace_p(c) == 0 {
            1
        } else {
            -1
        }
    }

    /// Evaluates a base-coefficient polynomial at an extension element.
    pub fn eval_poly(&self, coeffs: &[u64], x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in coeffs.iter().rev() {
            acc = self.ext.add(self.ext.mul(acc, x), self.embed(c));
        }
        acc
    }

    /// All points of the projective line with their exact degrees.
    pub fn proj_points(&self) -> Vec<(ProjPoint, u32)> {
        let mut pts = Vec::with_capacity(self.ext.size as usize + 1);
        pts.push((ProjPoint::Infinity, 1));
        for a in 0..self.ext.size {
            pts.push((ProjPoint::Affine(a), self.exact_degree(a)));
        }
        pts
    }

    /// One representative per Frobenius orbit of exact degree `m` (the full
    /// extension degree), in deterministic order.
    pub fn orbit_reps_of_full_degree(&self) -> Vec<ProjPoint> {
        let mut reps = Vec::new();
        if self.m == 1 {
            reps.push(ProjPoint::Infinity);
            for a in 0..self.ext.size {
                reps.push(ProjPoint::Affine(a));
            }
            return reps;
        }
        let mut seen = vec![false; self.ext.size as usize];
        for a in 0..self.ext.size {
            if seen[a as usize] || self.exact_degree(a) != self.m {
                continue;
            }
            reps.push(ProjPoint::Affine(a));
            let mut x = a;
            for _ in 0..self.m {
                seen[x as usize] = true;
                x = self.frob_q(x);
            }
        }
        reps
    }

    /// Orbit identifier for same-degree distinctness tests: the smallest
    /// packed value in the Frobenius orbit (infinity maps to `u64::MAX`).
    pub fn orbit_id(&self, pt: ProjPoint) -> u64 {
        match pt {
            ProjPoint::Infinity => u64::MAX,
            ProjPoint::Affine(a) => {
                let mut min = a;
                let mut x = self.frob_q(a);
                while x != a {
                    min = min.min(x);
                    x = self.frob_q(x);
                }
                min
            }
        }
    }
}

impl Gf {
    fn pow_generator(&self, e: u64) -> u64 {
        let t = self.tables.as_ref().expect("tabled field");
        t.exp[(e % (self.size - 1)) as usize]
    }
}

fn eval_prime_poly(gf: &Gf, coeffs: &[u64], x: u64) -> u64 {
    // Coefficients are prime-field digits, which embed as themselves.
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = gf.add(gf.mul(acc, x), c);
    }
    acc
}

/// The family of extensions of one base field needed to talk about points of
/// several exact degrees at once.
pub struct PointUniverse {
    pub base: Arc<Gf>,
    exts: BTreeMap<u32, Arc<Ext>>,
}

impl PointUniverse {
    pub fn new(base: Arc<Gf>, degrees: &[u32], table_cap: u64) -> Result<PointUniverse> {
        let mut exts = BTreeMap::new();
        for &d in degrees {
            if !exts.contains_key(&d) {
                exts.insert(d, Arc::new(Ext::new(base.clone(), d, table_cap)?));
            }
        }
        Ok(PointUniverse { base, exts })
    }

    pub fn ext(&self, degree: u32) -> &Arc<Ext> {
        self.exts
            .get(&degree)
            .expect("extension was requested at construction")
    }

    /// Points of exact degree `d`, each as `(point, orbit id)`.
    pub fn exact_degree_points(&self, d: u32) -> Vec<(ProjPoint, u64)> {
        let ext = self.ext(d);
        let mut out = Vec::new();
        for (pt, deg) in ext.proj_points() {
            if deg == d {
                out.push((pt, ext.orbit_id(pt)));
            }
        }
        out
    }
}

/// All tuples of projective points with prescribed exact degrees and
/// pairwise distinct Frobenius orbits. Returned per-slot in the order of
/// `degrees`; points of degree `d` live in the degree-`d` extension.
pub fn enumerate_a_tuples(
    universe: &PointUniverse,
    degrees: &[u32],
    max_tuples: u64,
) -> Result<Vec<Vec<ProjPoint>>> {
    let per_degree: BTreeMap<u32, Vec<(ProjPoint, u64)>> = degrees
        .iter()
        .map(|&d| (d, universe.exact_degree_points(d)))
        .collect();
    let mut bound: u128 = 1;
    for &d in degrees {
        bound = bound.saturating_mul(per_degree[&d].len() as u128);
    }
    if bound > max_tuples as u128 {
        return Err(Error::Budget {
            task: "point tuple enumeration".to_string(),
            needed: bound,
            budget: max_tuples as u128,
        });
    }
    let mut out = Vec::new();
    let mut current: Vec<(ProjPoint, u64)> = Vec::with_capacity(degrees.len());
    fn rec(
        degrees: &[u32],
        per_degree: &BTreeMap<u32, Vec<(ProjPoint, u64)>>,
        current: &mut Vec<(ProjPoint, u64)>,
        out: &mut Vec<Vec<ProjPoint>>,
    ) {
        let slot = current.len();
        if slot == degrees.len() {
            out.push(current.iter().map(|&(p, _)| p).collect());
            return;
        }
        let d = degrees[slot];
        for &(pt, orbit) in &per_degree[&d] {
            let clash = current
                .iter()
                .zip(degrees)
                .any(|(&(_, o), &deg)| deg == d && o == orbit);
            if !clash {
                current.push((pt, orbit));
                rec(degrees, per_degree, current, out);
                current.pop();
            }
        }
    }
    rec(degrees, &per_degree, &mut current, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, n: u32) -> Arc<Gf> {
        Gf::new(p, n, TABLE_CAP).unwrap()
    }

    #[test]
    fn modulus_is_deterministic_and_irreducible() {
        // Smallest packed lower part wins: x^2 + 1 for GF(9),
        // x^2 + x + 1 (the only option) for GF(4).
        let f9 = gf(3, 2);
        assert_eq!(f9.modulus, vec![1, 0, 1]);
        let f4 = gf(2, 2);
        assert_eq!(f4.modulus, vec![1, 1, 1]);
    }

    #[test]
    fn field_axioms_small() {
        for (p, n) in [(2u64, 4u32), (3, 2), (5, 1), (7, 1)] {
            let f = gf(p, n);
            let size = f.size;
            for a in 0..size.min(32) {
                for b in 0..size.min(32) {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(a, b), f.add(b, a));
                    if b != 0 {
                        assert_eq!(f.mul(f.mul(a, b), f.inv(b)), a);
                    }
                }
                assert_eq!(f.add(a, f.neg(a)), 0);
            }
        }
    }

    #[test]
    fn direct_mode_matches_tables() {
        let tabled = gf(3, 4);
        let direct = Gf::new(3, 4, 1).unwrap();
        assert!(!direct.has_tables());
        assert_eq!(tabled.modulus, direct.modulus);
        for a in (0..tabled.size).step_by(7) {
            for b in (0..tabled.size).step_by(13) {
                assert_eq!(tabled.mul(a, b), direct.mul(a, b));
                assert_eq!(tabled.add(a, b), direct.add(a, b));
            }
            if a != 0 {
                assert_eq!(tabled.inv(a), direct.inv(a));
                assert_eq!(tabled.chi(a), direct.chi(a));
            }
            assert_eq!(tabled.trace_p(a), direct.trace_p(a));
        }
    }

    #[test]
    fn chi_multiplicative_and_balanced() {
        for (p, n) in [(3u64, 1u32), (3, 2), (5, 1), (7, 1)] {
            let f = gf(p, n);
            let mut sum = 0i64;
            for a in 0..f.size {
                sum += f.chi(a) as i64;
                for b in 0..f.size {
                    assert_eq!(f.chi(f.mul(a, b)), f.chi(a) * f.chi(b));
                }
            }
            assert_eq!(sum, 0, "character sums to zero over GF({}^{})", p, n);
        }
    }

    #[test]
    fn chi_against_brute_square_test() {
        // Independent oracle: squares enumerated directly.
        for (p, n) in [(3u64, 2u32), (5, 1), (7, 1), (3, 1)] {
            let f = gf(p, n);
            let mut squares = vec![false; f.size as usize];
            for a in 0..f.size {
                squares[f.mul(a, a) as usize] = true;
            }
            for a in 1..f.size {
                let expect = if squares[a as usize] { 1 } else { -1 };
                assert_eq!(f.chi(a), expect);
            }
            assert_eq!(f.chi(0), 0);
        }
    }

    #[test]
    fn chi_via_exponentiation_agrees() {
        let f = gf(3, 2);
        for a in 1..f.size {
            let r = f.pow(a, (f.size - 1) / 2);
            let expect = if r == 1 { 1i8 } else { -1 };
            assert_eq!(f.chi(a), expect);
        }
    }

    #[test]
    fn embedding_is_a_field_homomorphism() {
        let base = gf(3, 1);
        let ext = Ext::new(base.clone(), 2, TABLE_CAP).unwrap();
        for a in 0..base.size {
            for b in 0..base.size {
                assert_eq!(
                    ext.embed(base.add(a, b)),
                    ext.ext.add(ext.embed(a), ext.embed(b))
                );
                assert_eq!(
                    ext.embed(base.mul(a, b)),
                    ext.ext.mul(ext.embed(a), ext.embed(b))
                );
            }
        }
        // Base elements land in the fixed field of x -> x^q.
        for a in 0..base.size {
            assert_eq!(ext.frob_q(ext.embed(a)), ext.embed(a));
        }
        let f9_over_f9 = Ext::new(gf(3, 2), 3, TABLE_CAP).unwrap();
        let b9 = f9_over_f9.base.clone();
        for a in 0..b9.size {
            for b in 0..b9.size {
                assert_eq!(
                    f9_over_f9.embed(b9.mul(a, b)),
                    f9_over_f9.ext.mul(f9_over_f9.embed(a), f9_over_f9.embed(b))
                );
            }
        }
    }

    #[test]
    fn chi_lift_through_extension() {
        // For a in the base field, the extension character is the base
        // character raised to the relative-degree parity.
        let base = gf(3, 1);
        for m in [2u32, 3, 4] {
            let ext = Ext::new(base.clone(), m, TABLE_CAP).unwrap();
            for a in 1..base.size {
                let lifted = ext.chi2(ext.embed(a));
                let expect = if m % 2 == 0 {
                    1
                } else {
                    base.chi(a)
                };
                assert_eq!(lifted, expect, "m = {}, a = {}", m, a);
            }
        }
    }

    #[test]
    fn tau_matches_root_enumeration() {
        // Independent oracle: count the roots of y^2 + ay + b directly.
        for (p, n) in [(2u64, 1u32), (2, 2), (2, 3), (2, 4)] {
            let base = gf(p, n);
            let ext = Ext::new(base.clone(), 1, TABLE_CAP).unwrap();
            for a in 0..base.size {
                for b in 0..base.size {
                    let mut roots = 0i8;
                    for y in 0..base.size {
                        let v = base.add(base.add(base.mul(y, y), base.mul(a, y)), b);
                        if v == 0 {
                            roots += 1;
                        }
                    }
                    assert_eq!(ext.tau(a, b), roots - 1, "GF(2^{}), a={}, b={}", n, a, b);
                }
            }
        }
    }

    #[test]
    fn tau_lift_through_extension() {
        // tau over GF(4) of GF(2)-coefficients matches the parity rule.
        let base = gf(2, 1);
        for m in [2u32, 3] {
            let ext = Ext::new(base.clone(), m, TABLE_CAP).unwrap();
            let base_ext = Ext::new(base.clone(), 1, TABLE_CAP).unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    let t0 = base_ext.tau(a, b);
                    let lifted = ext.tau(ext.embed(a), ext.embed(b));
                    let expect = if m % 2 == 0 { t0 * t0 } else { t0 };
                    assert_eq!(lifted, expect);
                }
            }
        }
    }

    #[test]
    fn proj_points_by_exact_degree() {
        // P^1(F_9) over F_3: 10 points, 4 rational and 6 of exact degree 2.
        let ext = Ext::new(gf(3, 1), 2, TABLE_CAP).unwrap();
        let pts = ext.proj_points();
        assert_eq!(pts.len(), 10);
        assert_eq!(pts.iter().filter(|(_, d)| *d == 1).count(), 4);
        assert_eq!(pts.iter().filter(|(_, d)| *d == 2).count(), 6);
        // P^1(F_8) over F_2: 9 points, 3 rational, none quadratic, 6 cubic.
        let ext = Ext::new(gf(2, 1), 3, TABLE_CAP).unwrap();
        let pts = ext.proj_points();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts.iter().filter(|(_, d)| *d == 1).count(), 3);
        assert_eq!(pts.iter().filter(|(_, d)| *d == 2).count(), 0);
        assert_eq!(pts.iter().filter(|(_, d)| *d == 3).count(), 6);
    }

    #[test]
    fn orbit_reps_cover_each_orbit_once() {
        let ext = Ext::new(gf(3, 1), 4, TABLE_CAP).unwrap();
        let reps = ext.orbit_reps_of_full_degree();
        // 3^4 - 3^2 = 72 points of exact degree 4, in orbits of size 4.
        assert_eq!(reps.len(), 18);
        let mut ids: Vec<u64> = reps.iter().map(|&r| ext.orbit_id(r)).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 18);
    }

    #[test]
    fn a_tuple_counts_match_examples() {
        // (1,1) over F_3: ordered pairs of distinct rational points: 4 * 3.
        let base = gf(3, 1);
        let u = PointUniverse::new(base.clone(), &[1, 1], TABLE_CAP).unwrap();
        assert_eq!(enumerate_a_tuples(&u, &[1, 1], 1 << 20).unwrap().len(), 12);
        // (2) over F_3: the 6 points of exact degree 2.
        let u = PointUniverse::new(base.clone(), &[2], TABLE_CAP).unwrap();
        assert_eq!(enumerate_a_tuples(&u, &[2], 1 << 20).unwrap().len(), 6);
        // (1,1,1) over F_2: 3 * 2 * 1.
        let u = PointUniverse::new(gf(2, 1), &[1, 1, 1], TABLE_CAP).unwrap();
        assert_eq!(
            enumerate_a_tuples(&u, &[1, 1, 1], 1 << 20).unwrap().len(),
            6
        );
    }

    #[test]
    fn a_tuple_budget_is_enforced() {
        let base = gf(3, 1);
        let u = PointUniverse::new(base, &[1, 1], TABLE_CAP).unwrap();
        assert!(matches!(
            enumerate_a_tuples(&u, &[1, 1], 3),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn prime_power_validation() {
        assert!(PrimePower::new(9).is_ok());
        assert!(PrimePower::new(12).is_err());
        assert!(PrimePower::new(1024).is_err());
        let pp = PrimePower::new(8).unwrap();
        assert!(pp.is_even());
        assert_eq!((pp.p, pp.k), (2, 3));
    }
}

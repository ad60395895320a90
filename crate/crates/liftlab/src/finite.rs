//! Arithmetic mod a prime q, the projective plane P²(F_q), complete flags
//! of F_q³, the reduction action, and exact fixed-point analysis.
//!
//! Projective points are kept in a unique canonical form (first nonzero
//! coordinate scaled to 1), flags as a pair (line spanning vector, dual
//! functional whose kernel is the plane). Fixed-point sets come in two
//! independent flavors, a brute scan of the enumerated space and an
//! eigenspace-based construction, which tests hold set-equal.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::exact::IntMat;
use crate::{Error, Result};

/// Largest modulus accepted for space enumeration (desk bound).
pub const MAX_SPACE_Q: u64 = 2000;

/// Moduli must fit in 31 bits so products of residues stay inside u64.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q % 2 == 0 {
        return q == 2;
    }
    let mut d = 3u64;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn check_prime(q: u64) -> Result<()> {
    if q > MAX_MODULUS || !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    Ok(())
}

/// Inverse of `a` mod prime `q` by the extended Euclidean algorithm.
pub fn inv_mod(a: u64, q: u64) -> u64 {
    debug_assert!(a % q != 0, "zero has no inverse");
    let (mut old_r, mut r) = (a as i64 % q as i64, q as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let quot = old_r / r;
        let tmp = old_r - quot * r;
        old_r = r;
        r = tmp;
        let tmp = old_s - quot * s;
        old_s = s;
        s = tmp;
    }
    old_s.rem_euclid(q as i64) as u64
}

/// Table of inverses 1..q, used by the canonicalization hot path.
pub(crate) struct InvTable {
    q: u64,
    inv: Vec<u64>,
}

impl InvTable {
    pub(crate) fn new(q: u64) -> Self {
        // inv[i] for 1 <= i < q via the standard recurrence.
        let mut inv = vec![0u64; q as usize];
        if q > 1 {
            inv[1] = 1;
            for i in 2..q as usize {
                inv[i] = (q - q / i as u64) * inv[(q % i as u64) as usize] % q;
            }
        }
        InvTable { q, inv }
    }

    #[inline]
    pub(crate) fn canon(&self, mut c: [u64; 3]) -> [u64; 3] {
        let q = self.q;
        if c[0] != 0 {
            if c[0] != 1 {
                let f = self.inv[c[0] as usize];
                c = [1, c[1] * f % q, c[2] * f % q];
            }
        } else if c[1] != 0 {
            if c[1] != 1 {
                let f = self.inv[c[1] as usize];
                c = [0, 1, c[2] * f % q];
            }
        } else {
            debug_assert!(c[2] != 0, "projective coordinates must be nonzero");
            c = [0, 0, 1];
        }
        c
    }
}

/// Index of a canonical coordinate triple in the standard point ordering:
/// [1:y:z] first (y major), then [0:1:z], then [0:0:1].
#[inline]
pub(crate) fn point_index_raw(q: u64, c: [u64; 3]) -> usize {
    if c[0] == 1 {
        (c[1] * q + c[2]) as usize
    } else if c[1] == 1 {
        (q * q + c[2]) as usize
    } else {
        (q * q + q) as usize
    }
}

/// Point of the projective plane P²(F_q) in canonical form: the first
/// nonzero coordinate equals 1. Also reused for dual points (coefficient
/// vectors of linear functionals cutting out planes).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    q: u64,
    c: [u64; 3],
}

impl ProjPoint {
    /// Canonicalize arbitrary (not all zero) residue coordinates.
    pub fn new(q: u64, coords: [i64; 3]) -> Result<Self> {
        check_prime(q)?;
        let c = [
            coords[0].rem_euclid(q as i64) as u64,
            coords[1].rem_euclid(q as i64) as u64,
            coords[2].rem_euclid(q as i64) as u64,
        ];
        if c == [0, 0, 0] {
            return Err(Error::Parse("projective point must be nonzero".into()));
        }
        Ok(Self::canon_raw(q, c))
    }

    fn canon_raw(q: u64, c: [u64; 3]) -> Self {
        let c = if c[0] != 0 {
            let f = inv_mod(c[0], q);
            [1, c[1] * f % q, c[2] * f % q]
        } else if c[1] != 0 {
            let f = inv_mod(c[1], q);
            [0, 1, c[2] * f % q]
        } else {
            [0, 0, 1]
        };
        ProjPoint { q, c }
    }

    pub(crate) fn from_canonical(q: u64, c: [u64; 3]) -> Self {
        debug_assert_eq!(ProjPoint::canon_raw(q, c).c, c);
        ProjPoint { q, c }
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn coords(&self) -> [u64; 3] {
        self.c
    }

    /// The basepoint 𝟏 = [0:0:1].
    pub fn basepoint(q: u64) -> Result<Self> {
        check_prime(q)?;
        Ok(ProjPoint { q, c: [0, 0, 1] })
    }

    /// Position in the canonical enumeration order.
    pub fn index(&self) -> usize {
        point_index_raw(self.q, self.c)
    }

    /// Pairing with a functional coefficient vector.
    pub fn pair(&self, functional: &ProjPoint) -> u64 {
        debug_assert_eq!(self.q, functional.q);
        let q = self.q;
        (self.c[0] * functional.c[0] + self.c[1] * functional.c[1] + self.c[2] * functional.c[2])
            % q
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}:{} mod {}]", self.c[0], self.c[1], self.c[2], self.q)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.c[0], self.c[1], self.c[2])
    }
}

/// Parse a point literal `x:y:z` for a given modulus.
pub fn parse_point(s: &str, q: u64) -> Result<ProjPoint> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("expected x:y:z, got {s:?}")));
    }
    let mut c = [0i64; 3];
    for (i, p) in parts.iter().enumerate() {
        c[i] = p
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad coordinate {p:?}")))?;
    }
    ProjPoint::new(q, c)
}

/// Complete flag of F_q³: a line inside a plane, stored as the line's
/// spanning vector plus the functional whose kernel is the plane. The
/// incidence invariant is that the functional annihilates the line vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flag {
    pub line: ProjPoint,
    pub plane: ProjPoint,
}

impl Flag {
    pub fn new(line: ProjPoint, plane: ProjPoint) -> Result<Self> {
        if line.q != plane.q {
            return Err(Error::ModulusMismatch(line.q, plane.q));
        }
        if line.pair(&plane) != 0 {
            return Err(Error::Parse(format!(
                "flag incidence violated: {line} not on plane {plane}"
            )));
        }
        Ok(Flag { line, plane })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.line.q
    }

    /// The base flag: line [0:0:1] inside the plane x₁ = 0.
    pub fn base(q: u64) -> Result<Self> {
        Ok(Flag {
            line: ProjPoint::basepoint(q)?,
            plane: ProjPoint { q, c: [1, 0, 0] },
        })
    }
}

impl fmt::Debug for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Flag({}|{})", self.line, self.plane)
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.line, self.plane)
    }
}

/// Parse a flag literal `x:y:z|u:v:w`.
pub fn parse_flag(s: &str, q: u64) -> Result<Flag> {
    let (l, p) = s
        .split_once('|')
        .ok_or_else(|| Error::Parse(format!("expected x:y:z|u:v:w, got {s:?}")))?;
    Flag::new(parse_point(l, q)?, parse_point(p, q)?)
}

fn check_space_q(q: u64) -> Result<()> {
    check_prime(q)?;
    if q > MAX_SPACE_Q {
        return Err(Error::BoundTooLarge(format!(
            "space enumeration supports q <= {MAX_SPACE_Q}, got {q}"
        )));
    }
    Ok(())
}

/// All q²+q+1 points of P²(F_q) in canonical index order.
pub fn enumerate_points(q: u64) -> Result<Vec<ProjPoint>> {
    check_space_q(q)?;
    let mut pts = Vec::with_capacity((q * q + q + 1) as usize);
    for y in 0..q {
        for z in 0..q {
            pts.push(ProjPoint { q, c: [1, y, z] });
        }
    }
    for z in 0..q {
        pts.push(ProjPoint { q, c: [0, 1, z] });
    }
    pts.push(ProjPoint { q, c: [0, 0, 1] });
    Ok(pts)
}

/// All (q²+q+1)(q+1) complete flags, grouped by line in point order.
pub fn enumerate_flags(q: u64) -> Result<Vec<Flag>> {
    check_space_q(q)?;
    let points = enumerate_points(q)?;
    let mut flags = Vec::with_capacity(points.len() * (q as usize + 1));
    for line in &points {
        for plane in &points {
            if line.pair(plane) == 0 {
                flags.push(Flag {
                    line: *line,
                    plane: *plane,
                });
            }
        }
    }
    Ok(flags)
}

/// Precomputed point space with O(1) indexing.
pub struct PointSpace {
    q: u64,
    points: Vec<ProjPoint>,
}

impl PointSpace {
    pub fn new(q: u64) -> Result<Self> {
        Ok(PointSpace {
            q,
            points: enumerate_points(q)?,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn index(&self, p: &ProjPoint) -> usize {
        p.index()
    }
}

/// Precomputed flag space with hashed indexing.
pub struct FlagSpace {
    q: u64,
    flags: Vec<Flag>,
    idx: HashMap<(u32, u32), u32>,
}

impl FlagSpace {
    pub fn new(q: u64) -> Result<Self> {
        let flags = enumerate_flags(q)?;
        let mut idx = HashMap::with_capacity(flags.len());
        for (i, f) in flags.iter().enumerate() {
            idx.insert((f.line.index() as u32, f.plane.index() as u32), i as u32);
        }
        Ok(FlagSpace { q, flags, idx })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn index(&self, f: &Flag) -> usize {
        self.idx[&(f.line.index() as u32, f.plane.index() as u32)] as usize
    }
}

/// Reduction of an integer matrix mod a prime, entries in [0, q).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatModQ {
    q: u64,
    dim: u8,
    e: [u64; 9],
}

/// Reduce an integer matrix mod a prime q; the reduction must land in
/// SL(F_q), i.e. det ≡ 1 (mod q).
pub fn reduce_mod(m: &IntMat, q: u64) -> Result<MatModQ> {
    check_prime(q)?;
    let d = m.det()?;
    if d.rem_euclid(q as i64) != 1 {
        return Err(Error::NotUnimodular(d));
    }
    let mut e = [0u64; 9];
    let n = m.dim() as usize;
    for (i, &v) in m.entries().iter().enumerate() {
        e[i] = v.rem_euclid(q as i64) as u64;
    }
    let _ = n;
    Ok(MatModQ {
        q,
        dim: m.dim(),
        e,
    })
}

impl MatModQ {
    /// Build directly from residues (used e.g. for full censuses of
    /// SL₃(F_q)); no determinant requirement is imposed here.
    pub fn from_entries(q: u64, dim: u8, entries: &[u64]) -> Result<Self> {
        check_prime(q)?;
        if !(dim == 2 || dim == 3) || entries.len() != (dim as usize).pow(2) {
            return Err(Error::DimMismatch {
                expected: dim,
                got: entries.len() as u8,
            });
        }
        let mut e = [0u64; 9];
        for (i, &v) in entries.iter().enumerate() {
            e[i] = v % q;
        }
        Ok(MatModQ { q, dim, e })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn dim(&self) -> u8 {
        self.dim
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.e[i * self.dim as usize + j]
    }

    pub fn entries(&self) -> &[u64] {
        &self.e[..(self.dim as usize).pow(2)]
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim as usize;
        for i in 0..n {
            for j in 0..n {
                let want = u64::from(i == j);
                if self.e[i * n + j] != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn det(&self) -> u64 {
        let q = self.q;
        match self.dim {
            2 => (self.e[0] * self.e[3] % q + q - self.e[1] * self.e[2] % q) % q,
            3 => {
                let m = &self.e;
                let c0 = (m[4] * m[8] % q + q - m[5] * m[7] % q) % q;
                let c1 = (m[3] * m[8] % q + q - m[5] * m[6] % q) % q;
                let c2 = (m[3] * m[7] % q + q - m[4] * m[6] % q) % q;
                (m[0] * c0 % q + q - m[1] * c1 % q + m[2] * c2 % q) % q
            }
            _ => unreachable!(),
        }
    }

    pub fn trace(&self) -> u64 {
        let q = self.q;
        match self.dim {
            2 => (self.e[0] + self.e[3]) % q,
            3 => (self.e[0] + self.e[4] + self.e[8]) % q,
            _ => unreachable!(),
        }
    }

    pub fn mul(&self, other: &MatModQ) -> Result<MatModQ> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q, other.q));
        }
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let n = self.dim as usize;
        let q = self.q;
        let mut e = [0u64; 9];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u64;
                for k in 0..n {
                    acc = (acc + self.e[i * n + k] * other.e[k * n + j]) % q;
                }
                e[i * n + j] = acc;
            }
        }
        Ok(MatModQ {
            q,
            dim: self.dim,
            e,
        })
    }

    pub fn transpose(&self) -> MatModQ {
        let n = self.dim as usize;
        let mut e = [0u64; 9];
        for i in 0..n {
            for j in 0..n {
                e[j * n + i] = self.e[i * n + j];
            }
        }
        MatModQ {
            q: self.q,
            dim: self.dim,
            e,
        }
    }

    /// Cofactor matrix C with C[i][j] = cofactor(i, j); for det ≡ 1 this is
    /// the inverse transposed, which is how the dual (plane) action is
    /// implemented. Dim 3 only.
    pub(crate) fn cofactor_matrix(&self) -> MatModQ {
        assert_eq!(self.dim, 3, "cofactor matrix is for dim 3");
        let q = self.q;
        let m = &self.e;
        let minor = |a: u64, b: u64, c: u64, d: u64| (a * d % q + q - b * c % q) % q;
        let neg = |x: u64| (q - x) % q;
        let e = [
            minor(m[4], m[5], m[7], m[8]),
            neg(minor(m[3], m[5], m[6], m[8])),
            minor(m[3], m[4], m[6], m[7]),
            neg(minor(m[1], m[2], m[7], m[8])),
            minor(m[0], m[2], m[6], m[8]),
            neg(minor(m[0], m[1], m[6], m[7])),
            minor(m[1], m[2], m[4], m[5]),
            neg(minor(m[0], m[2], m[3], m[5])),
            minor(m[0], m[1], m[3], m[4]),
        ];
        MatModQ { q, dim: 3, e }
    }

    #[inline]
    pub(crate) fn apply_vec(&self, v: [u64; 3]) -> [u64; 3] {
        debug_assert_eq!(self.dim, 3);
        let q = self.q;
        let m = &self.e;
        [
            (m[0] * v[0] + m[1] * v[1] + m[2] * v[2]) % q,
            (m[3] * v[0] + m[4] * v[1] + m[5] * v[2]) % q,
            (m[6] * v[0] + m[7] * v[1] + m[8] * v[2]) % q,
        ]
    }

    /// Image of a projective point under the reduced matrix.
    pub fn act_point(&self, p: &ProjPoint) -> Result<ProjPoint> {
        if p.q != self.q {
            return Err(Error::ModulusMismatch(self.q, p.q));
        }
        assert_eq!(self.dim, 3, "the projective action is for dim 3");
        Ok(ProjPoint::canon_raw(self.q, self.apply_vec(p.c)))
    }

    /// Image of a flag: the line maps directly, the plane functional by the
    /// inverse-transpose action; incidence is preserved.
    pub fn act_flag(&self, f: &Flag) -> Result<Flag> {
        let line = self.act_point(&f.line)?;
        let cof = self.cofactor_matrix();
        let plane = ProjPoint::canon_raw(self.q, cof.apply_vec(f.plane.c));
        debug_assert_eq!(line.pair(&plane), 0, "action must preserve incidence");
        Ok(Flag { line, plane })
    }

    /// Rank over F_q by Gaussian elimination.
    pub fn rank(&self) -> u8 {
        let n = self.dim as usize;
        let q = self.q;
        let mut rows: Vec<[u64; 3]> = (0..n)
            .map(|i| {
                let mut r = [0u64; 3];
                r[..n].copy_from_slice(&self.e[i * n..i * n + n]);
                r
            })
            .collect();
        let mut rank = 0usize;
        for col in 0..n {
            if let Some(p) = (rank..n).find(|&r| rows[r][col] != 0) {
                rows.swap(rank, p);
                let inv = inv_mod(rows[rank][col], q);
                for x in rows[rank].iter_mut() {
                    *x = *x * inv % q;
                }
                for r in 0..n {
                    if r != rank && rows[r][col] != 0 {
                        let f = rows[r][col];
                        for c in 0..n {
                            rows[r][c] = (rows[r][c] + (q - f) * rows[rank][c]) % q;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank as u8
    }

    /// Basis of the kernel over F_q (dim 3 only).
    pub fn nullspace(&self) -> Vec<[u64; 3]> {
        assert_eq!(self.dim, 3);
        let q = self.q;
        let mut rows: Vec<[u64; 3]> = (0..3).map(|i| self.row_arr(i)).collect();
        // reduced row echelon form, tracking pivot columns
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0usize;
        for col in 0..3 {
            if let Some(p) = (rank..3).find(|&r| rows[r][col] != 0) {
                rows.swap(rank, p);
                let inv = inv_mod(rows[rank][col], q);
                for x in rows[rank].iter_mut() {
                    *x = *x * inv % q;
                }
                for r in 0..3 {
                    if r != rank && rows[r][col] != 0 {
                        let f = rows[r][col];
                        for c in 0..3 {
                            rows[r][c] = (rows[r][c] + (q - f) * rows[rank][c]) % q;
                        }
                    }
                }
                pivots.push(col);
                rank += 1;
            }
        }
        let mut basis = Vec::new();
        for free in 0..3 {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = [0u64; 3];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                // pivot row gives x_pc = -sum coef * x_free
                v[pc] = (q - rows[r][free] % q) % q;
            }
            basis.push(v);
        }
        basis
    }

    fn row_arr(&self, i: usize) -> [u64; 3] {
        [self.e[3 * i], self.e[3 * i + 1], self.e[3 * i + 2]]
    }

    /// m − λI as a matrix mod q.
    fn shifted(&self, lambda: u64) -> MatModQ {
        let q = self.q;
        let mut e = self.e;
        let n = self.dim as usize;
        for i in 0..n {
            e[i * n + i] = (e[i * n + i] + q - lambda % q) % q;
        }
        MatModQ {
            q,
            dim: self.dim,
            e,
        }
    }

    /// Eigenvalues in F_q with geometric multiplicities, found by scanning
    /// the characteristic polynomial over the field (dim 3, invertible).
    pub fn eigen_structure(&self) -> Vec<(u64, u8)> {
        assert_eq!(self.dim, 3, "eigen analysis is for dim 3");
        assert!(self.det() != 0, "eigen analysis needs an invertible matrix");
        let q = self.q;
        let m = &self.e;
        // det(xI − m) = x³ − c2 x² + c1 x − c0
        let c2 = self.trace();
        let c1 = ((m[0] * m[4] % q + q - m[1] * m[3] % q)
            + (m[0] * m[8] % q + q - m[2] * m[6] % q)
            + (m[4] * m[8] % q + q - m[5] * m[7] % q))
            % q;
        let c0 = self.det();
        let mut out = Vec::new();
        for lam in 1..q {
            // Horner: ((λ − c2)·λ + c1)·λ − c0
            let v = (((lam + q - c2) % q * lam + c1) % q * lam + q - c0) % q;
            if v == 0 {
                let mult = 3 - self.shifted(lam).rank();
                debug_assert!(mult >= 1);
                out.push((lam, mult));
            }
        }
        out
    }

    /// Coarse classification of the reduction.
    pub fn classify(&self) -> ReductionClass {
        if self.is_identity() {
            return ReductionClass::Identity;
        }
        for (lam, mult) in self.eigen_structure() {
            if mult >= 2 {
                return ReductionClass::BadDimTwo(lam);
            }
        }
        ReductionClass::Other
    }

    /// Refined fixed-point kind used by the counting tabulations.
    pub fn fix_kind(&self) -> FixKind {
        if self.is_identity() {
            return FixKind::Identity;
        }
        let eig = self.eigen_structure();
        for &(lam, mult) in &eig {
            if mult == 3 {
                return FixKind::Scalar(lam);
            }
            if mult == 2 {
                return if eig.len() > 1 {
                    FixKind::BadSplit(lam)
                } else {
                    FixKind::BadUnipotent(lam)
                };
            }
        }
        FixKind::Other
    }

    /// Projective points of the span of an eigenbasis.
    fn span_points(&self, basis: &[[u64; 3]]) -> Vec<ProjPoint> {
        let q = self.q;
        match basis.len() {
            0 => Vec::new(),
            1 => vec![ProjPoint::canon_raw(q, basis[0])],
            2 => {
                let (b0, b1) = (basis[0], basis[1]);
                let mut pts = Vec::with_capacity(q as usize + 1);
                for t in 0..q {
                    let v = [
                        (b0[0] + t * b1[0]) % q,
                        (b0[1] + t * b1[1]) % q,
                        (b0[2] + t * b1[2]) % q,
                    ];
                    pts.push(ProjPoint::canon_raw(q, v));
                }
                pts.push(ProjPoint::canon_raw(q, b1));
                pts
            }
            _ => enumerate_points(q).expect("space bound checked upstream"),
        }
    }

    /// Fixed points built from eigenspaces.
    pub fn fixed_points_eigen(&self) -> Vec<ProjPoint> {
        let mut out = Vec::new();
        for (lam, _) in self.eigen_structure() {
            out.extend(self.span_points(&self.shifted(lam).nullspace()));
        }
        out.sort();
        out
    }

    /// Fixed points by scanning the whole enumerated space.
    pub fn fixed_points_brute(&self, space: &PointSpace) -> Vec<ProjPoint> {
        assert_eq!(space.q, self.q);
        let mut out: Vec<ProjPoint> = space
            .points
            .iter()
            .filter(|p| self.act_point(p).expect("same modulus") == **p)
            .copied()
            .collect();
        out.sort();
        out
    }

    /// Number of fixed projective points, from eigenspace dimensions alone:
    /// an eigenspace of dimension d holds (q^d − 1)/(q − 1) points.
    pub fn fixed_point_count(&self) -> u64 {
        let q = self.q;
        self.eigen_structure()
            .iter()
            .map(|&(_, d)| proj_count(q, d as u64))
            .sum()
    }

    /// Fixed flags built from eigen data: invariant lines are fixed points
    /// of the matrix, invariant planes are fixed points of its transpose,
    /// and a fixed flag is an incident pair.
    pub fn fixed_flags_eigen(&self) -> Vec<Flag> {
        let lines = self.fixed_points_eigen();
        let duals = self.transpose().fixed_points_eigen();
        let mut out = Vec::new();
        for v in &lines {
            for u in &duals {
                if v.pair(u) == 0 {
                    out.push(Flag {
                        line: *v,
                        plane: *u,
                    });
                }
            }
        }
        out.sort();
        out
    }

    pub fn fixed_flags_brute(&self, space: &FlagSpace) -> Vec<Flag> {
        assert_eq!(space.q, self.q);
        let mut out: Vec<Flag> = space
            .flags
            .iter()
            .filter(|f| self.act_flag(f).expect("same modulus") == **f)
            .copied()
            .collect();
        out.sort();
        out
    }

    /// Number of fixed flags from eigen data, without materializing sets.
    ///
    /// For an eigenspace E of the matrix and an eigenspace F of its
    /// transpose, the incident pairs in P(E) × P(F) are counted through the
    /// rank r of the pairing matrix between their bases:
    /// N(d−r)·N(e) + (N(d) − N(d−r))·N(e−1), with N(k) = (q^k − 1)/(q − 1).
    pub fn fixed_flag_count(&self) -> u64 {
        let q = self.q;
        let eig = self.eigen_structure();
        let teig = self.transpose().eigen_structure();
        let mut total = 0u64;
        for &(lam, _) in &eig {
            let e_basis = self.shifted(lam).nullspace();
            for &(mu, _) in &teig {
                let f_basis = self.transpose().shifted(mu).nullspace();
                let d = e_basis.len() as u64;
                let e = f_basis.len() as u64;
                let r = pairing_rank(q, &f_basis, &e_basis);
                total += proj_count(q, d - r) * proj_count(q, e)
                    + (proj_count(q, d) - proj_count(q, d - r)) * proj_count(q, e.saturating_sub(1));
            }
        }
        total
    }
}

impl fmt::Debug for MatModQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatModQ(q={}, {:?})", self.q, self.entries())
    }
}

/// (q^d − 1)/(q − 1): number of projective points of a d-dim subspace.
fn proj_count(q: u64, d: u64) -> u64 {
    let mut total = 0u64;
    let mut pow = 1u64;
    for _ in 0..d {
        total += pow;
        pow *= q;
    }
    total
}

/// Rank of the pairing matrix B[i][j] = f_i · e_j over F_q.
fn pairing_rank(q: u64, f_basis: &[[u64; 3]], e_basis: &[[u64; 3]]) -> u64 {
    let mut rows: Vec<Vec<u64>> = f_basis
        .iter()
        .map(|f| {
            e_basis
                .iter()
                .map(|e| (f[0] * e[0] + f[1] * e[1] + f[2] * e[2]) % q)
                .collect()
        })
        .collect();
    let ncols = e_basis.len();
    let mut rank = 0usize;
    for col in 0..ncols {
        if let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] != 0) {
            rows.swap(rank, p);
            let inv = inv_mod(rows[rank][col], q);
            for x in rows[rank].iter_mut() {
                *x = *x * inv % q;
            }
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let f = rows[r][col];
                    for c in 0..ncols {
                        rows[r][c] = (rows[r][c] + (q - f) * rows[rank][c]) % q;
                    }
                }
            }
            rank += 1;
        }
    }
    rank as u64
}

/// Classification of a reduction mod q.
///
/// `BadDimTwo(α)` covers any eigenspace of dimension ≥ 2 on a non-identity
/// matrix (the dimension-3 case is a non-identity scalar, which exists only
/// for q ≡ 1 mod 3); the remaining eigenvalue is then α⁻².
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionClass {
    Identity,
    BadDimTwo(u64),
    Other,
}

/// Refinement of [`ReductionClass`] distinguishing the fixed-point laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixKind {
    Identity,
    /// Non-identity scalar λI (λ³ = 1, λ ≠ 1); fixes everything.
    Scalar(u64),
    /// Diagonalizable with eigenvalues (α, α, α⁻²), α³ ≠ 1.
    BadSplit(u64),
    /// Single eigenvalue α (α³ = 1) with a 2-dimensional eigenspace.
    BadUnipotent(u64),
    Other,
}

impl FixKind {
    pub fn reduction_class(&self) -> ReductionClass {
        match *self {
            FixKind::Identity => ReductionClass::Identity,
            FixKind::Scalar(a) | FixKind::BadSplit(a) | FixKind::BadUnipotent(a) => {
                ReductionClass::BadDimTwo(a)
            }
            FixKind::Other => ReductionClass::Other,
        }
    }

    /// Fixed-point count this kind forces on P²(F_q), when it is constant;
    /// `None` for the residual kind.
    pub fn law_point_count(&self, q: u64) -> Option<u64> {
        match self {
            FixKind::Identity | FixKind::Scalar(_) => Some(q * q + q + 1),
            FixKind::BadSplit(_) => Some(q + 2),
            FixKind::BadUnipotent(_) => Some(q + 1),
            FixKind::Other => None,
        }
    }

    /// Fixed-flag count this kind forces on the flag space, when constant.
    pub fn law_flag_count(&self, q: u64) -> Option<u64> {
        match self {
            FixKind::Identity | FixKind::Scalar(_) => Some((q * q + q + 1) * (q + 1)),
            FixKind::BadSplit(_) => Some(3 * q + 3),
            FixKind::BadUnipotent(_) => Some(2 * q + 1),
            FixKind::Other => None,
        }
    }
}

/// Which basepoint-stabilizer congruence pattern to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilizerPattern {
    /// Fixes the projective basepoint [0:0:1]; entries (1,3), (2,3) ≡ 0 mod q.
    Point,
    /// Fixes the base flag; entries (1,2), (1,3), (2,3) ≡ 0 mod q.
    Flag,
}

/// Whether γ lies in the congruence stabilizer of the basepoint (point or
/// flag pattern), decided via the action and cross-checked against the
/// entry-congruence description.
pub fn in_stabilizer(gamma: &IntMat, q: u64, which: StabilizerPattern) -> Result<bool> {
    if gamma.dim() != 3 {
        return Err(Error::DimMismatch {
            expected: 3,
            got: gamma.dim(),
        });
    }
    let m = reduce_mod(gamma, q)?;
    let by_action = match which {
        StabilizerPattern::Point => {
            let b = ProjPoint::basepoint(q)?;
            m.act_point(&b)? == b
        }
        StabilizerPattern::Flag => {
            let b = Flag::base(q)?;
            m.act_flag(&b)? == b
        }
    };
    let by_entries = match which {
        StabilizerPattern::Point => m.at(0, 2) == 0 && m.at(1, 2) == 0,
        StabilizerPattern::Flag => m.at(0, 1) == 0 && m.at(0, 2) == 0 && m.at(1, 2) == 0,
    };
    debug_assert_eq!(
        by_action, by_entries,
        "action and congruence pattern disagree for {gamma}"
    );
    Ok(by_action)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3(s: &str) -> IntMat {
        s.parse().unwrap()
    }

    fn modq(s: &str, q: u64) -> MatModQ {
        reduce_mod(&m3(s), q).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let m = modq("1 5 0; 0 1 0; 0 0 1", 5);
        assert!(m.is_identity());
        let m = modq("-1 0 0; 0 -1 0; 0 0 1", 5);
        assert_eq!(m.entries(), &[4, 0, 0, 0, 4, 0, 0, 0, 1]);
        let m = reduce_mod(&"2 1; 1 1".parse().unwrap(), 2).unwrap();
        assert_eq!(m.entries(), &[0, 1, 1, 1]);
        assert!(reduce_mod(&m3("1 0 0; 0 1 0; 0 0 1"), 4).is_err());
    }

    #[test]
    fn space_sizes() {
        assert_eq!(enumerate_points(2).unwrap().len(), 7);
        assert_eq!(enumerate_flags(2).unwrap().len(), 21);
        assert_eq!(enumerate_points(7).unwrap().len(), 57);
        assert_eq!(enumerate_flags(3).unwrap().len(), 52);
        assert!(enumerate_points(2003).is_err());
    }

    #[test]
    fn points_are_canonical_and_indexed() {
        for q in [2u64, 3, 5, 7] {
            let pts = enumerate_points(q).unwrap();
            for (i, p) in pts.iter().enumerate() {
                assert_eq!(p.index(), i);
            }
            let mut dedup = pts.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), pts.len());
        }
    }

    #[test]
    fn action_examples() {
        let q = 5;
        let p = parse_point("1:0:0", q).unwrap();
        let id = modq("1 0 0; 0 1 0; 0 0 1", q);
        assert_eq!(id.act_point(&p).unwrap(), p);
        // e1 -> e2 signed permutation with det 1
        let perm = modq("0 -1 0; 1 0 0; 0 0 1", q);
        assert_eq!(
            perm.act_point(&p).unwrap(),
            parse_point("0:1:0", q).unwrap()
        );
    }

    #[test]
    fn action_is_bijective() {
        let q = 5;
        let space = PointSpace::new(q).unwrap();
        let m = modq("2 1 0; 1 1 0; 3 0 1", q);
        assert_eq!(reduce_mod(&m3("2 1 0; 1 1 0; 3 0 1"), q).unwrap().det(), 1);
        let mut seen = vec![false; space.len()];
        for p in space.points() {
            let i = m.act_point(p).unwrap().index();
            assert!(!seen[i]);
            seen[i] = true;
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn flag_action_preserves_incidence() {
        let q = 3;
        let fs = FlagSpace::new(q).unwrap();
        let m = modq("1 1 0; 0 1 1; 0 0 1", q);
        for f in fs.flags() {
            let g = m.act_flag(f).unwrap();
            assert_eq!(g.line.pair(&g.plane), 0);
        }
    }

    #[test]
    fn eigen_examples() {
        let id = modq("1 0 0; 0 1 0; 0 0 1", 5);
        assert_eq!(id.eigen_structure(), vec![(1, 3)]);
        let d = modq("2 0 0; 0 2 0; 0 0 4", 5);
        assert_eq!(d.eigen_structure(), vec![(2, 2), (4, 1)]);
        let n = modq("1 0 1; 0 1 0; 0 0 1", 5);
        assert_eq!(n.eigen_structure(), vec![(1, 2)]);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            modq("1 0 0; 0 1 0; 0 0 1", 5).classify(),
            ReductionClass::Identity
        );
        assert_eq!(
            modq("2 0 0; 0 2 0; 0 0 4", 5).classify(),
            ReductionClass::BadDimTwo(2)
        );
        // distinct eigenvalues 1, 2, 3: 1*2*3 = 6 = 1 mod 5
        assert_eq!(
            modq("1 0 0; 0 2 0; 0 0 3", 5).classify(),
            ReductionClass::Other
        );
    }

    #[test]
    fn bad_third_eigenvalue_is_alpha_inverse_squared() {
        let q = 5;
        let m = modq("2 0 0; 0 2 0; 0 0 4", q);
        let eig = m.eigen_structure();
        let alpha = eig.iter().find(|&&(_, d)| d == 2).unwrap().0;
        let third = eig.iter().find(|&&(_, d)| d == 1).unwrap().0;
        let inv2 = inv_mod(alpha * alpha % q, q);
        assert_eq!(third, inv2);
    }

    #[test]
    fn fixed_point_examples() {
        let q2 = PointSpace::new(2).unwrap();
        let f2 = FlagSpace::new(2).unwrap();
        let id = modq("1 0 0; 0 1 0; 0 0 1", 2);
        assert_eq!(id.fixed_points_brute(&q2).len(), 7);
        assert_eq!(id.fixed_flags_brute(&f2).len(), 21);
        assert_eq!(id.fixed_point_count(), 7);
        assert_eq!(id.fixed_flag_count(), 21);

        let q5 = PointSpace::new(5).unwrap();
        let d = modq("2 0 0; 0 2 0; 0 0 4", 5);
        let brute = d.fixed_points_brute(&q5);
        assert_eq!(brute.len(), 7); // q + 2
        let eigen = d.fixed_points_eigen();
        assert_eq!(brute, eigen);
        assert_eq!(d.fixed_point_count(), 7);
        assert_eq!(d.fixed_flag_count(), 18); // 3q + 3

        // three distinct eigenvalues: at most 3 points, at most 6 flags
        let o = modq("1 0 0; 0 2 0; 0 0 3", 5);
        assert_eq!(o.fixed_point_count(), 3);
        assert_eq!(o.fixed_flag_count(), 6);
        assert_eq!(o.fixed_points_brute(&q5).len(), 3);
    }

    #[test]
    fn unipotent_fixed_counts() {
        let q = 5;
        let m = modq("1 1 0; 0 1 0; 0 0 1", q);
        assert_eq!(m.fix_kind(), FixKind::BadUnipotent(1));
        assert_eq!(m.fixed_point_count(), q + 1);
        assert_eq!(m.fixed_flag_count(), 2 * q + 1);
        let fs = FlagSpace::new(q).unwrap();
        assert_eq!(m.fixed_flags_brute(&fs).len(), (2 * q + 1) as usize);
        assert_eq!(m.fixed_flags_eigen(), m.fixed_flags_brute(&fs));
    }

    #[test]
    fn scalar_reduction_fixes_everything() {
        // 2³ = 8 = 1 mod 7, so 2I is in SL3(F7)
        let m = MatModQ::from_entries(7, 3, &[2, 0, 0, 0, 2, 0, 0, 0, 2]).unwrap();
        assert_eq!(m.det(), 1);
        assert_eq!(m.fix_kind(), FixKind::Scalar(2));
        assert_eq!(m.classify(), ReductionClass::BadDimTwo(2));
        assert_eq!(m.fixed_point_count(), 57);
        assert_eq!(m.fixed_flag_count(), 57 * 8);
    }

    #[test]
    fn stabilizer_examples() {
        let q = 5;
        let g = m3("1 0 5; 0 1 0; 0 0 1");
        assert!(in_stabilizer(&g, q, StabilizerPattern::Point).unwrap());
        let g = m3("1 0 1; 0 1 0; 0 0 1");
        assert!(!in_stabilizer(&g, q, StabilizerPattern::Point).unwrap());
        let g = m3("1 5 0; 0 1 0; 0 0 1");
        assert!(in_stabilizer(&g, q, StabilizerPattern::Flag).unwrap());
        let g = m3("1 1 0; 0 1 0; 0 0 1");
        assert!(!in_stabilizer(&g, q, StabilizerPattern::Flag).unwrap());
    }

    #[test]
    fn flag_literals() {
        let f = parse_flag("0:0:1|1:0:0", 5).unwrap();
        assert_eq!(f, Flag::base(5).unwrap());
        assert!(parse_flag("0:0:1|0:0:1", 5).is_err()); // not incident
        assert_eq!(f.to_string(), "0:0:1|1:0:0");
    }

    #[test]
    fn flag_space_index_roundtrip() {
        let fs = FlagSpace::new(3).unwrap();
        for (i, f) in fs.flags().iter().enumerate() {
            assert_eq!(fs.index(f), i);
        }
    }
}

//! Molecular integrals and the FCIDUMP interchange format.
//!
//! Two-body integrals are stored in the `[12|21]` convention used by every
//! Hamiltonian builder in this crate:
//!
//! ```text
//! g[i,j,k,l] = ∫∫ φi(x1) φj(x2) φk(x2) φl(x1) / r12
//! ```
//!
//! FCIDUMP files use chemist notation `(ij|kl)`; the index map is applied once
//! at parse time by [`from_chemist`].

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Tolerance for treating two FCIDUMP lines for the same symmetry-unique entry as equal.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Entries at or below this magnitude are not written to FCIDUMP files.
pub const WRITE_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum IntegralError {
    #[error("malformed FCIDUMP header: {0}")]
    Header(String),
    #[error("line {line}: index {index} out of range [0, {n_orb}]")]
    IndexOutOfRange { line: usize, index: i64, n_orb: usize },
    #[error("line {line}: cannot parse `{token}` as a number")]
    NotNumeric { line: usize, token: String },
    #[error("line {line}: expected `value i j k l`, found {found} fields")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: unsupported index pattern {indices:?}")]
    IndexPattern { line: usize, indices: [usize; 4] },
    #[error("line {line}: conflicting duplicate entry {indices:?}: {old} vs {new}")]
    ConflictingDuplicate { line: usize, indices: [usize; 4], old: f64, new: f64 },
    #[error("tensor shape mismatch: expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("electron count {n_elec} outside [0, {max}]")]
    ElectronCount { n_elec: usize, max: usize },
}

/// One- and two-body molecular integrals plus electron count and core energy.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    n_orb: usize,
    n_elec: usize,
    ms2: i32,
    core: f64,
    h: Vec<f64>,
    g: Vec<f64>,
}

impl IntegralSet {
    /// Builds a set from a one-body matrix (row-major `n×n`) and a two-body tensor
    /// already in `[12|21]` convention (row-major `n⁴`).
    pub fn new(
        n_orb: usize,
        n_elec: usize,
        ms2: i32,
        core: f64,
        h: Vec<f64>,
        g: Vec<f64>,
    ) -> Result<Self, IntegralError> {
        if h.len() != n_orb * n_orb {
            return Err(IntegralError::Shape { expected: n_orb * n_orb, found: h.len() });
        }
        let n4 = n_orb.pow(4);
        if g.len() != n4 {
            return Err(IntegralError::Shape { expected: n4, found: g.len() });
        }
        if n_elec > 2 * n_orb {
            return Err(IntegralError::ElectronCount { n_elec, max: 2 * n_orb });
        }
        Ok(Self { n_orb, n_elec, ms2, core, h, g })
    }

    /// Builds a set from a chemist-notation `(ij|kl)` tensor.
    pub fn from_chemist_tensor(
        n_orb: usize,
        n_elec: usize,
        ms2: i32,
        core: f64,
        h: Vec<f64>,
        g_chem: &[f64],
    ) -> Result<Self, IntegralError> {
        let g = from_chemist(g_chem, n_orb)?;
        Self::new(n_orb, n_elec, ms2, core, h, g)
    }

    /// All-zero integrals of the given size.
    pub fn zeros(n_orb: usize, n_elec: usize, ms2: i32) -> Self {
        Self {
            n_orb,
            n_elec,
            ms2,
            core: 0.0,
            h: vec![0.0; n_orb * n_orb],
            g: vec![0.0; n_orb.pow(4)],
        }
    }

    /// Seeded random integrals with real-orbital symmetry.
    ///
    /// Entries are uniform in [-1, 1]; two-body entries `(pq|rs)` are damped by
    /// `1 / (1 + |p-q| + |r-s|)`. The set is half filled (`n_elec = n_orb`) when
    /// `n_elec` is `None`. Not physical: meant for scaling studies and property tests.
    pub fn random(n_orb: usize, n_elec: Option<usize>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = n_orb;
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.gen_range(-1.0..=1.0);
                h[i * n + j] = v;
                h[j * n + i] = v;
            }
        }
        let mut chem = vec![0.0; n.pow(4)];
        for (p, q, r, s) in unique_chemist_indices(n) {
            let decay = 1.0 / (1.0 + p.abs_diff(q) as f64 + r.abs_diff(s) as f64);
            let v: f64 = rng.gen_range(-1.0..=1.0) * decay;
            for (a, b, c, d) in chemist_images(p, q, r, s) {
                chem[((a * n + b) * n + c) * n + d] = v;
            }
        }
        let n_elec = n_elec.unwrap_or(n).min(2 * n);
        let ms2 = (n_elec % 2) as i32;
        Self::from_chemist_tensor(n, n_elec, ms2, 0.0, h, &chem)
            .expect("random tensor shapes are consistent")
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }

    pub fn n_elec(&self) -> usize {
        self.n_elec
    }

    pub fn ms2(&self) -> i32 {
        self.ms2
    }

    pub fn core(&self) -> f64 {
        self.core
    }

    #[inline]
    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.n_orb + j]
    }

    /// Two-body integral `g_{ij}^{kl}` in `[12|21]` convention.
    #[inline]
    pub fn g(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n_orb;
        self.g[((i * n + j) * n + k) * n + l]
    }

    /// Chemist-notation view `(pq|rs)`.
    #[inline]
    pub fn chemist(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        // (pq|rs) = g[p, r, s, q]
        self.g(p, r, s, q)
    }

    pub fn h_matrix(&self) -> &[f64] {
        &self.h
    }

    pub fn g_tensor(&self) -> &[f64] {
        &self.g
    }

    pub fn with_core(mut self, core: f64) -> Self {
        self.core = core;
        self
    }

    pub fn with_electrons(mut self, n_elec: usize, ms2: i32) -> Result<Self, IntegralError> {
        if n_elec > 2 * self.n_orb {
            return Err(IntegralError::ElectronCount { n_elec, max: 2 * self.n_orb });
        }
        self.n_elec = n_elec;
        self.ms2 = ms2;
        Ok(self)
    }

    /// Reorders orbitals so that new orbital `p` is old orbital `order[p]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let n = self.n_orb;
        assert_eq!(order.len(), n, "permutation length must equal n_orb");
        let mut h = vec![0.0; n * n];
        let mut g = vec![0.0; n.pow(4)];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = self.h(order[i], order[j]);
                for k in 0..n {
                    for l in 0..n {
                        g[((i * n + j) * n + k) * n + l] =
                            self.g(order[i], order[j], order[k], order[l]);
                    }
                }
            }
        }
        Self { h, g, ..self.clone() }
    }

    /// Largest violation of the symmetry invariants of `h` and `g`.
    pub fn max_symmetry_violation(&self) -> f64 {
        let n = self.n_orb;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.h(i, j) - self.h(j, i)).abs());
                for k in 0..n {
                    for l in 0..n {
                        let v = self.g(i, j, k, l);
                        worst = worst
                            .max((v - self.g(l, k, j, i)).abs())
                            .max((v - self.g(j, i, l, k)).abs())
                            .max((v - self.g(l, j, k, i)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Converts a chemist `(ij|kl)` tensor to `[12|21]` convention:
/// `g[i,j,k,l] = g_chem[i,l,j,k]`.
pub fn from_chemist(g_chem: &[f64], n: usize) -> Result<Vec<f64>, IntegralError> {
    let n4 = n.pow(4);
    if g_chem.len() != n4 {
        return Err(IntegralError::Shape { expected: n4, found: g_chem.len() });
    }
    let mut g = vec![0.0; n4];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    g[((i * n + j) * n + k) * n + l] = g_chem[((i * n + l) * n + j) * n + k];
                }
            }
        }
    }
    Ok(g)
}

/// Inverse of [`from_chemist`].
pub fn to_chemist(g: &[f64], n: usize) -> Result<Vec<f64>, IntegralError> {
    let n4 = n.pow(4);
    if g.len() != n4 {
        return Err(IntegralError::Shape { expected: n4, found: g.len() });
    }
    let mut chem = vec![0.0; n4];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    chem[((i * n + l) * n + j) * n + k] = g[((i * n + j) * n + k) * n + l];
                }
            }
        }
    }
    Ok(chem)
}

/// The eight real-orbital images of a chemist index `(pq|rs)`.
fn chemist_images(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
    [
        (p, q, r, s),
        (q, p, r, s),
        (p, q, s, r),
        (q, p, s, r),
        (r, s, p, q),
        (s, r, p, q),
        (r, s, q, p),
        (s, r, q, p),
    ]
}

/// Canonical representative of the 8-fold orbit: `p≥q`, `r≥s`, `pq ≥ rs`.
fn canonical_chemist(p: usize, q: usize, r: usize, s: usize) -> (usize, usize, usize, usize) {
    let (p, q) = if p >= q { (p, q) } else { (q, p) };
    let (r, s) = if r >= s { (r, s) } else { (s, r) };
    if (p, q) >= (r, s) {
        (p, q, r, s)
    } else {
        (r, s, p, q)
    }
}

fn unique_chemist_indices(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..n).flat_map(move |p| {
        (0..=p).flat_map(move |q| {
            (0..=p).flat_map(move |r| {
                let s_max = if r == p { q } else { r };
                (0..=s_max).map(move |s| (p, q, r, s))
            })
        })
    })
}

#[derive(Debug, Default)]
struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: Option<i32>,
}

fn parse_header(body: &str) -> Result<Header, IntegralError> {
    let upper = body.to_ascii_uppercase();
    let lookup = |key: &str| -> Result<Option<i64>, IntegralError> {
        let mut search = 0;
        while let Some(pos) = upper[search..].find(key) {
            let at = search + pos;
            search = at + key.len();
            // reject matches inside a longer identifier
            if at > 0 && upper.as_bytes()[at - 1].is_ascii_alphanumeric() {
                continue;
            }
            let rest = upper[search..].trim_start();
            let Some(rest) = rest.strip_prefix('=') else {
                continue;
            };
            let rest = rest.trim_start();
            let digits: String = rest
                .char_indices()
                .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+')))
                .map(|(_, c)| c)
                .collect();
            return digits
                .parse()
                .map(Some)
                .map_err(|_| IntegralError::Header(format!("bad value for {key}")));
        }
        Ok(None)
    };
    let to_usize = |v: Option<i64>, key: &str| -> Result<Option<usize>, IntegralError> {
        v.map(|v| usize::try_from(v).map_err(|_| IntegralError::Header(format!("negative {key}"))))
            .transpose()
    };
    Ok(Header {
        norb: to_usize(lookup("NORB")?, "NORB")?,
        nelec: to_usize(lookup("NELEC")?, "NELEC")?,
        ms2: lookup("MS2")?.map(|v| v as i32),
    })
}

fn parse_value(token: &str, line: usize) -> Result<f64, IntegralError> {
    token
        .replace(['D', 'd'], "E")
        .parse::<f64>()
        .map_err(|_| IntegralError::NotNumeric { line, token: token.to_string() })
}

fn parse_index(token: &str, line: usize, n_orb: usize) -> Result<usize, IntegralError> {
    let index: i64 = token
        .parse()
        .map_err(|_| IntegralError::NotNumeric { line, token: token.to_string() })?;
    if index < 0 || index as usize > n_orb {
        return Err(IntegralError::IndexOutOfRange { line, index, n_orb });
    }
    Ok(index as usize)
}

/// Parses FCIDUMP text.
///
/// Header: `&FCI NORB=n,NELEC=m,MS2=s,... &END` (or `/`). Body: `value i j k l`
/// with 1-based chemist indices. `i j 0 0` lines are one-body, `0 0 0 0` is the
/// core energy. Orbital-energy lines (`i 0 0 0`) are ignored. ORBSYM and ISYM
/// are read but ignored.
pub fn parse_fcidump(text: &str) -> Result<IntegralSet, IntegralError> {
    let start = text
        .find("&FCI")
        .or_else(|| text.find("&fci"))
        .ok_or_else(|| IntegralError::Header("missing &FCI".into()))?;
    let after = &text[start + 4..];
    let (end_rel, end_len) = find_terminator(after)
        .ok_or_else(|| IntegralError::Header("missing &END or / terminator".into()))?;
    let header = parse_header(&after[..end_rel])?;
    let n_orb = header.norb.ok_or_else(|| IntegralError::Header("missing NORB".into()))?;
    let n_elec = header.nelec.ok_or_else(|| IntegralError::Header("missing NELEC".into()))?;
    let ms2 = header.ms2.unwrap_or(0);

    let body_offset = start + 4 + end_rel + end_len;
    let first_body_line = text[..body_offset].lines().count();
    let n = n_orb;
    let mut chem = vec![0.0; n.pow(4)];
    let mut chem_set = vec![false; n.pow(4)];
    let mut h = vec![0.0; n * n];
    let mut h_set = vec![false; n * n];
    let mut core: Option<f64> = None;

    // the terminator may be followed by the first integral line on the same line
    for (offset, raw) in text[body_offset..].lines().enumerate() {
        let line = first_body_line + offset;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(IntegralError::FieldCount { line, found: fields.len() });
        }
        let value = parse_value(fields[0], line)?;
        let mut idx = [0usize; 4];
        for (slot, token) in idx.iter_mut().zip(&fields[1..]) {
            *slot = parse_index(token, line, n)?;
        }
        let check = |old: f64, set: bool| -> Result<(), IntegralError> {
            if set && (old - value).abs() > DUPLICATE_TOLERANCE {
                Err(IntegralError::ConflictingDuplicate { line, indices: idx, old, new: value })
            } else {
                Ok(())
            }
        };
        match idx {
            [0, 0, 0, 0] => {
                check(core.unwrap_or(0.0), core.is_some())?;
                core = Some(value);
            }
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (i, j) = (i - 1, j - 1);
                check(h[i * n + j], h_set[i * n + j])?;
                for (a, b) in [(i, j), (j, i)] {
                    h[a * n + b] = value;
                    h_set[a * n + b] = true;
                }
            }
            [_, 0, 0, 0] => {}
            [p, q, r, s] if p > 0 && q > 0 && r > 0 && s > 0 => {
                let (p, q, r, s) = canonical_chemist(p - 1, q - 1, r - 1, s - 1);
                let flat = ((p * n + q) * n + r) * n + s;
                check(chem[flat], chem_set[flat])?;
                for (a, b, c, d) in chemist_images(p, q, r, s) {
                    let f = ((a * n + b) * n + c) * n + d;
                    chem[f] = value;
                    chem_set[f] = true;
                }
            }
            _ => return Err(IntegralError::IndexPattern { line, indices: idx }),
        }
    }
    IntegralSet::from_chemist_tensor(n, n_elec, ms2, core.unwrap_or(0.0), h, &chem)
}

fn find_terminator(s: &str) -> Option<(usize, usize)> {
    let upper = s.to_ascii_uppercase();
    let amp = upper.find("&END").map(|p| (p, 4));
    let slash = s.find('/').map(|p| (p, 1));
    match (amp, slash) {
        (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
        (a, b) => a.or(b),
    }
}

/// Formats like C's `%.16E`: 17 significant digits, signed two-digit exponent.
fn format_c_exponent(value: f64) -> String {
    let rust = format!("{value:.16E}");
    let (mantissa, exp) = rust.split_once('E').expect("E format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

/// Writes FCIDUMP text: symmetry-unique entries above [`WRITE_THRESHOLD`] only.
pub fn write_fcidump(set: &IntegralSet) -> String {
    let n = set.n_orb;
    let mut out = String::new();
    let _ = writeln!(out, " &FCI NORB={},NELEC={},MS2={},", n, set.n_elec, set.ms2);
    let _ = writeln!(out, " &END");
    for (p, q, r, s) in unique_chemist_indices(n) {
        let v = set.chemist(p, q, r, s);
        if v.abs() > WRITE_THRESHOLD {
            let _ = writeln!(out, "{} {} {} {} {}", format_c_exponent(v), p + 1, q + 1, r + 1, s + 1);
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = set.h(i, j);
            if v.abs() > WRITE_THRESHOLD {
                let _ = writeln!(out, "{} {} {} 0 0", format_c_exponent(v), i + 1, j + 1);
            }
        }
    }
    if set.core.abs() > WRITE_THRESHOLD {
        let _ = writeln!(out, "{} 0 0 0 0", format_c_exponent(set.core));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_orbital_field_mapping() {
        let text = "&FCI NORB=1,NELEC=2,MS2=0 &END\n0.5 1 1 1 1\n-1.0 1 1 0 0\n0.7 0 0 0 0\n";
        let s = parse_fcidump(text).unwrap();
        assert_eq!(s.n_orb(), 1);
        assert_eq!(s.n_elec(), 2);
        assert_eq!(s.g(0, 0, 0, 0), 0.5);
        assert_eq!(s.h(0, 0), -1.0);
        assert_eq!(s.core(), 0.7);
    }

    #[test]
    fn header_only_gives_zero_tensors() {
        let s = parse_fcidump("&FCI NORB=3,NELEC=2,MS2=0,\n&END\n").unwrap();
        assert_eq!(s.h_matrix().len(), 9);
        assert_eq!(s.g_tensor().len(), 81);
        assert!(s.h_matrix().iter().chain(s.g_tensor()).all(|&v| v == 0.0));
        assert_eq!(s.core(), 0.0);
    }

    #[test]
    fn slash_terminator_and_fortran_exponent() {
        let s = parse_fcidump("&FCI NORB=1, NELEC=1, MS2=1 /\n 2.5D-01 1 1 1 1\n").unwrap();
        assert_eq!(s.g(0, 0, 0, 0), 0.25);
        assert_eq!(s.ms2(), 1);
    }

    #[test]
    fn whitespace_separated_header() {
        let s = parse_fcidump("&FCI NORB = 2 NELEC=1 MS2=-1\n&END\n").unwrap();
        assert_eq!((s.n_orb(), s.n_elec(), s.ms2()), (2, 1, -1));
    }

    #[test]
    fn orbsym_list_is_skipped() {
        let s = parse_fcidump(" &FCI NORB=   2,NELEC= 2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n").unwrap();
        assert_eq!(s.n_orb(), 2);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_fcidump("NORB=1"), Err(IntegralError::Header(_))));
        assert!(matches!(parse_fcidump("&FCI NELEC=2 &END"), Err(IntegralError::Header(_))));
        assert!(matches!(parse_fcidump("&FCI NORB=2 &END"), Err(IntegralError::Header(_))));
        assert!(matches!(parse_fcidump("&FCI NORB=2,NELEC=2"), Err(IntegralError::Header(_))));
    }

    #[test]
    fn body_errors() {
        let head = "&FCI NORB=2,NELEC=2 &END\n";
        assert!(matches!(
            parse_fcidump(&format!("{head}0.1 3 1 1 1\n")),
            Err(IntegralError::IndexOutOfRange { index: 3, .. })
        ));
        assert!(matches!(
            parse_fcidump(&format!("{head}abc 1 1 1 1\n")),
            Err(IntegralError::NotNumeric { .. })
        ));
        assert!(matches!(
            parse_fcidump(&format!("{head}0.1 1 1 1\n")),
            Err(IntegralError::FieldCount { found: 4, .. })
        ));
        assert!(matches!(
            parse_fcidump(&format!("{head}0.1 1 2 1 2\n0.2 2 1 2 1\n")),
            Err(IntegralError::ConflictingDuplicate { .. })
        ));
        assert!(matches!(
            parse_fcidump(&format!("{head}0.1 1 2 1 0\n")),
            Err(IntegralError::IndexPattern { .. })
        ));
    }

    #[test]
    fn near_equal_duplicates_accepted() {
        let head = "&FCI NORB=2,NELEC=2 &END\n";
        let s = parse_fcidump(&format!("{head}0.6637114013508135 1 1 2 2\n0.6637114013508136 2 2 1 1\n")).unwrap();
        assert_eq!(s.chemist(0, 0, 1, 1), 0.6637114013508136);
        assert_eq!(s.chemist(1, 1, 0, 0), 0.6637114013508136);
    }

    #[test]
    fn from_chemist_identity_for_one_orbital() {
        assert_eq!(from_chemist(&[0.625], 1).unwrap(), vec![0.625]);
    }

    #[test]
    fn from_chemist_delta_tensor() {
        let n = 2;
        let mut chem = vec![0.0; 16];
        // (01|01)
        chem[n * n + 1] = 1.0;
        let g = from_chemist(&chem, n).unwrap();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let expect = if (i, j, k, l) == (0, 0, 1, 1) { 1.0 } else { 0.0 };
                        assert_eq!(g[((i * n + j) * n + k) * n + l], expect);
                    }
                }
            }
        }
    }

    #[test]
    fn from_chemist_shape_mismatch() {
        assert_eq!(
            from_chemist(&[0.0; 15], 2),
            Err(IntegralError::Shape { expected: 16, found: 15 })
        );
    }

    #[test]
    fn random_set_is_symmetric() {
        for seed in 0..4 {
            let s = IntegralSet::random(3, None, seed);
            assert_eq!(s.max_symmetry_violation(), 0.0);
        }
    }

    #[test]
    fn c_style_exponent() {
        assert_eq!(format_c_exponent(0.5), "5.0000000000000000E-01");
        assert_eq!(format_c_exponent(-1.25e12), "-1.2500000000000000E+12");
        assert_eq!(format_c_exponent(0.0), "0.0000000000000000E+00");
    }

    #[test]
    fn zero_set_writes_header_only() {
        let text = write_fcidump(&IntegralSet::zeros(2, 2, 0));
        assert_eq!(text.lines().count(), 2);
        assert_eq!(parse_fcidump(&text).unwrap(), IntegralSet::zeros(2, 2, 0));
    }

    #[test]
    fn single_orbital_round_trip() {
        let text = "&FCI NORB=1,NELEC=2,MS2=0 &END\n0.5 1 1 1 1\n-1.0 1 1 0 0\n0.7 0 0 0 0\n";
        let s = parse_fcidump(text).unwrap();
        assert_eq!(parse_fcidump(&write_fcidump(&s)).unwrap(), s);
    }

    #[test]
    fn electron_count_bound() {
        assert!(matches!(
            IntegralSet::new(1, 3, 1, 0.0, vec![0.0], vec![0.0]),
            Err(IntegralError::ElectronCount { .. })
        ));
    }
}

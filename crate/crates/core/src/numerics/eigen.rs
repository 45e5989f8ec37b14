//! Eigenvalues of small real matrices.
//!
//! Balancing, Householder reduction to upper Hessenberg form, then the
//! Francis double-shift QR iteration (after the EISPACK `hqr` routine as
//! published in JAMA). Only eigenvalues are computed.

use alloc::vec::Vec;

use super::matrix::{SquareMatrix, MAX_DIM};
use crate::error::{Error, Result};

/// A complex eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    /// |λ|
    #[inline]
    pub fn modulus(&self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    /// log |λ|
    #[inline]
    pub fn ln_modulus(&self) -> f64 {
        libm::log(self.modulus())
    }

    /// Principal argument in (-π, π].
    #[inline]
    pub fn arg(&self) -> f64 {
        libm::atan2(self.im, self.re)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::real(1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn recip(&self) -> Self {
        let d = self.re * self.re + self.im * self.im;
        Self { re: self.re / d, im: -self.im / d }
    }

    pub fn dist(&self, o: &Self) -> f64 {
        libm::hypot(self.re - o.re, self.im - o.im)
    }
}

type Work = [[f64; MAX_DIM]; MAX_DIM];

/// Relative tolerance under which two moduli count as tied for ordering.
const TIE_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 200;

/// All `dim` eigenvalues with multiplicity, sorted by descending modulus and
/// then ascending argument.
pub fn eigenvalues(m: &SquareMatrix) -> Result<Vec<Eigenvalue>> {
    let n = m.dim();
    let mut h: Work = [[0.0; MAX_DIM]; MAX_DIM];
    for (i, row) in h.iter_mut().enumerate().take(n) {
        for (j, v) in row.iter_mut().enumerate().take(n) {
            *v = m.get(i, j);
            if !v.is_finite() {
                return Err(Error::NoConvergence);
            }
        }
    }
    balance(&mut h, n);
    hessenberg(&mut h, n);
    let mut vals = hqr(&mut h, n)?;
    sort_spectrum(&mut vals);
    Ok(vals)
}

/// Sort by descending modulus; moduli within a relative 1e-9 form a tie
/// group ordered by ascending argument.
pub fn sort_spectrum(vals: &mut [Eigenvalue]) {
    vals.sort_by(|a, b| b.modulus().total_cmp(&a.modulus()));
    let mut start = 0;
    while start < vals.len() {
        let lead = vals[start].modulus();
        let mut end = start + 1;
        while end < vals.len() && lead - vals[end].modulus() <= TIE_TOL * lead.max(f64::MIN_POSITIVE) {
            end += 1;
        }
        vals[start..end].sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        start = end;
    }
}

// Diagonal similarity by powers of two (exact in floating point).
fn balance(a: &mut Work, n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut().take(n) {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

fn hessenberg(h: &mut Work, n: usize) {
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = [0.0f64; MAX_DIM];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = libm::sqrt(hh);
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[i][j];
            }
            f /= hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut().take(high + 1) {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * row[j];
            }
            f /= hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[m][m - 1] = scale * g;
    }
}

fn hqr(h: &mut Work, nn: usize) -> Result<Vec<Eigenvalue>> {
    let mut d = [0.0f64; MAX_DIM];
    let mut e = [0.0f64; MAX_DIM];
    let low: isize = 0;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
    let (mut s, mut z): (f64, f64);
    let (mut w, mut x, mut y);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[i][j].abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    while n >= low {
        let nu = n as usize;
        // look for a single small sub-diagonal element
        let mut l = n;
        while l > low {
            let lu = l as usize;
            s = h[lu - 1][lu - 1].abs() + h[lu][lu].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[lu][lu - 1].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            d[nu] = h[nu][nu] + exshift;
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            w = h[nu][nu - 1] * h[nu - 1][nu];
            p = (h[nu - 1][nu - 1] - h[nu][nu]) / 2.0;
            q = p * p + w;
            z = libm::sqrt(q.abs());
            x = h[nu][nu] + exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[nu][nu];
            y = 0.0;
            w = 0.0;
            if l < n {
                y = h[nu - 1][nu - 1];
                w = h[nu][nu - 1] * h[nu - 1][nu];
            }
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[i][i] -= x;
                }
                s = h[nu][nu - 1].abs() + h[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = libm::sqrt(s);
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[i][i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::NoConvergence);
            }

            // look for two consecutive small sub-diagonal elements
            let mut m = n - 2;
            while m >= l {
                let mu = m as usize;
                z = h[mu][mu];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[mu + 1][mu] + h[mu][mu + 1];
                q = h[mu + 1][mu + 1] - z - r - s;
                r = h[mu + 2][mu + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[mu][mu - 1].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[mu - 1][mu - 1].abs() + z.abs() + h[mu + 1][mu + 1].abs()))
                {
                    break;
                }
                m -= 1;
            }
            let mu = m as usize;
            for i in mu + 2..=nu {
                h[i][i - 2] = 0.0;
                if i > mu + 2 {
                    h[i][i - 3] = 0.0;
                }
            }

            // double QR step on rows l..=n and columns m..=n
            for k in mu..nu {
                let notlast = k != nu - 1;
                if k != mu {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if notlast { h[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = libm::sqrt(p * p + q * q + r * r);
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != mu {
                        h[k][k - 1] = -s * x;
                    } else if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..nn {
                        p = h[k][j] + q * h[k + 1][j];
                        if notlast {
                            p += r * h[k + 2][j];
                            h[k + 2][j] -= p * z;
                        }
                        h[k][j] -= p * x;
                        h[k + 1][j] -= p * y;
                    }
                    for row in h.iter_mut().take(nu.min(k + 3) + 1) {
                        p = x * row[k] + y * row[k + 1];
                        if notlast {
                            p += z * row[k + 2];
                            row[k + 2] -= p * r;
                        }
                        row[k] -= p;
                        row[k + 1] -= p * q;
                    }
                }
            }
        }
    }
    let vals: Vec<Eigenvalue> = (0..nn).map(|i| Eigenvalue { re: d[i], im: e[i] }).collect();
    if vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NoConvergence);
    }
    Ok(vals)
}

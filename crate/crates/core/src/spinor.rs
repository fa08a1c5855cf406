use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One analytic piece `amp * exp(rate * (x - origin))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub rate: Complex64,
    pub amp: [Complex64; 2],
    pub origin: f64,
}

impl Term {
    pub fn eval(&self, x: f64) -> [Complex64; 2] {
        let f = (self.rate * (x - self.origin)).exp();
        [self.amp[0] * f, self.amp[1] * f]
    }
}

/// Interval `[lo, hi]` (possibly infinite) carrying a sum of terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<Term>,
}

impl Segment {
    pub fn eval(&self, x: f64) -> [Complex64; 2] {
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for t in &self.terms {
            let v = t.eval(x);
            out[0] += v[0];
            out[1] += v[1];
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NormKind {
    /// `∫|ψ|² = 1` on the real line.
    Unit,
    /// `∫|ψ|² = 1` on `[-L, L]`.
    Box { half_length: f64 },
    /// `δ(k - k')` normalization.
    Continuum,
    /// Threshold states whose tail does not decay.
    Unnormalized,
}

/// Spinor built from three analytic segments: left exterior, interior, right exterior.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSpinor {
    pub segments: Vec<Segment>,
    pub norm_kind: NormKind,
}

fn cnorm2(v: [Complex64; 2]) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

/// `∫_0^T exp(mu s) ds`, with `T` possibly infinite.
fn exp_integral(mu: Complex64, t: f64) -> Complex64 {
    if t.is_infinite() {
        debug_assert!(mu.re < 0.0);
        return -mu.inv();
    }
    let z = mu * t;
    if z.norm() < 1e-3 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(t, 0.0);
        for n in 1..8 {
            sum += term;
            term = term * z / (n as f64 + 1.0);
        }
        sum
    } else {
        (z.exp() - 1.0) / mu
    }
}

/// `∫ conj(t1)·t2` over `[lo, hi]`.
fn term_overlap(t1: &Term, t2: &Term, lo: f64, hi: f64) -> Complex64 {
    let r1 = t1.rate.conj();
    let mu = r1 + t2.rate;
    let dot = t1.amp[0].conj() * t2.amp[0] + t1.amp[1].conj() * t2.amp[1];
    if dot == Complex64::new(0.0, 0.0) {
        return dot;
    }
    if lo.is_finite() && hi.is_finite() && mu.re > 0.0 {
        // Growing integrand: anchor at the upper end so nothing overflows.
        let c = r1 * (hi - t1.origin) + t2.rate * (hi - t2.origin);
        dot * c.exp() * exp_integral(-mu, hi - lo)
    } else if lo.is_finite() {
        let c = r1 * (lo - t1.origin) + t2.rate * (lo - t2.origin);
        dot * c.exp() * exp_integral(mu, hi - lo)
    } else {
        // Integrate from hi downward: s = hi - x.
        let c = r1 * (hi - t1.origin) + t2.rate * (hi - t2.origin);
        dot * c.exp() * exp_integral(-mu, f64::INFINITY)
    }
}

impl PiecewiseSpinor {
    pub fn new(segments: Vec<Segment>, norm_kind: NormKind) -> Self {
        PiecewiseSpinor { segments, norm_kind }
    }

    pub fn eval(&self, x: f64) -> [Complex64; 2] {
        for s in &self.segments {
            if x >= s.lo && x <= s.hi {
                return s.eval(x);
            }
        }
        [Complex64::new(0.0, 0.0); 2]
    }

    pub fn boundaries(&self) -> Vec<f64> {
        self.segments.windows(2).map(|w| w[0].hi).collect()
    }

    /// Largest relative jump of either component across the segment joints.
    pub fn continuity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.segments.windows(2) {
            let b = w[0].hi;
            let l = w[0].eval(b);
            let r = w[1].eval(b);
            let scale = cnorm2(l).max(cnorm2(r)).sqrt().max(f64::MIN_POSITIVE);
            let d = ((l[0] - r[0]).norm_sqr() + (l[1] - r[1]).norm_sqr()).sqrt();
            worst = worst.max(d / scale);
        }
        worst
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for s in &mut out.segments {
            for t in &mut s.terms {
                t.amp[0] *= c;
                t.amp[1] *= c;
            }
        }
        out
    }

    /// Sum of two spinors sharing the same segment layout.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.segments.len(), other.segments.len());
        let mut out = self.clone();
        for (s, o) in out.segments.iter_mut().zip(&other.segments) {
            assert!(s.lo == o.lo && s.hi == o.hi, "segment layouts differ");
            s.terms.extend_from_slice(&o.terms);
        }
        out
    }

    /// `σ3 ψ(-x)`.
    pub fn parity_image(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| Segment {
                lo: -s.hi,
                hi: -s.lo,
                terms: s
                    .terms
                    .iter()
                    .map(|t| Term { rate: -t.rate, amp: [t.amp[0], -t.amp[1]], origin: -t.origin })
                    .collect(),
            })
            .collect();
        PiecewiseSpinor { segments, norm_kind: self.norm_kind }
    }

    /// `⟨self|other⟩` in closed form. Segment layouts must match.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (s, o) in self.segments.iter().zip(&other.segments) {
            debug_assert!(s.lo == o.lo && s.hi == o.hi);
            for t1 in &s.terms {
                for t2 in &o.terms {
                    total += term_overlap(t1, t2, s.lo, s.hi);
                }
            }
        }
        total
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    /// Weight of `|ψ|²` outside `[-x0, x0]`, assuming the outer segments extend past `x0`.
    pub fn tail_weight(&self, x0: f64) -> f64 {
        let mut w = 0.0;
        for s in &self.segments {
            let (lo, hi) = (s.lo.max(x0), s.hi);
            if hi > lo {
                let seg = Segment { lo, hi, terms: s.terms.clone() };
                w += segment_inner(&seg, &seg).re;
            }
            let (lo, hi) = (s.lo, s.hi.min(-x0));
            if hi > lo {
                let seg = Segment { lo, hi, terms: s.terms.clone() };
                w += segment_inner(&seg, &seg).re;
            }
        }
        w
    }

    /// Max over `xs` of `|ψ(x) - sign·σ3ψ(-x)|`, relative to max `|ψ|`.
    pub fn parity_residual(&self, sign: f64, xs: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = f64::MIN_POSITIVE;
        for &x in xs {
            let a = self.eval(x);
            let b = self.eval(-x);
            let d = ((a[0] - b[0] * sign).norm_sqr() + (a[1] + b[1] * sign).norm_sqr()).sqrt();
            worst = worst.max(d);
            scale = scale.max(cnorm2(a).sqrt());
        }
        worst / scale
    }

    /// `⟨self|other⟩` by double-exponential quadrature, panel by panel.
    ///
    /// Infinite segments are truncated where the slowest decaying term has fallen by `e^-40`.
    pub fn inner_quadrature(&self, other: &Self, tol: f64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (s, o) in self.segments.iter().zip(&other.segments) {
            let slowest = s
                .terms
                .iter()
                .chain(&o.terms)
                .map(|t| t.rate.re.abs())
                .fold(f64::INFINITY, f64::min);
            let reach = if slowest > 0.0 { 40.0 / slowest } else { 0.0 };
            let lo = if s.lo.is_finite() { s.lo } else { s.hi - reach };
            let hi = if s.hi.is_finite() { s.hi } else { s.lo + reach };
            let fastest = s
                .terms
                .iter()
                .chain(&o.terms)
                .map(|t| t.rate.norm())
                .fold(1.0, f64::max);
            let panels = (((hi - lo) * fastest / 4.0).ceil() as usize).clamp(1, 20_000);
            let h = (hi - lo) / panels as f64;
            for i in 0..panels {
                let (x0, x1) = (lo + i as f64 * h, lo + (i + 1) as f64 * h);
                let re = quadrature::double_exponential::integrate(
                    |x| {
                        let (a, b) = (s.eval(x), o.eval(x));
                        (a[0].conj() * b[0] + a[1].conj() * b[1]).re
                    },
                    x0,
                    x1,
                    tol / panels as f64,
                )
                .integral;
                let im = quadrature::double_exponential::integrate(
                    |x| {
                        let (a, b) = (s.eval(x), o.eval(x));
                        (a[0].conj() * b[0] + a[1].conj() * b[1]).im
                    },
                    x0,
                    x1,
                    tol / panels as f64,
                )
                .integral;
                total += Complex64::new(re, im);
            }
        }
        total
    }
}

fn segment_inner(a: &Segment, b: &Segment) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for t1 in &a.terms {
        for t2 in &b.terms {
            total += term_overlap(t1, t2, a.lo, a.hi);
        }
    }
    total
}

/// Terms of the solution that equals `s0` at `origin` in a region of kinetic energy `wk`.
///
/// Fails (returns `None`) when the local wavevector is too close to zero for the
/// exponential split to be accurate.
pub fn propagator_terms(s0: [Complex64; 2], wk: f64, m: f64, origin: f64) -> Option<Vec<Term>> {
    let p2 = (wk - m) * (wk + m);
    let ip = if p2 >= 0.0 { Complex64::new(0.0, p2.sqrt()) } else { Complex64::new((-p2).sqrt(), 0.0) };
    if ip.norm() < 1e-9 * m {
        return None;
    }
    let (u0, w0) = (s0[0], s0[1]);
    let a1 = [(u0 - w0 * (wk + m) / ip) * 0.5, (w0 + u0 * (wk - m) / ip) * 0.5];
    let a2 = [(u0 + w0 * (wk + m) / ip) * 0.5, (w0 - u0 * (wk - m) / ip) * 0.5];
    Some(vec![Term { rate: ip, amp: a1, origin }, Term { rate: -ip, amp: a2, origin }])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::propagate;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn propagator_terms_match_transfer_matrix() {
        for &wk in &[3.0, 0.4, -2.5, -0.3] {
            let terms = propagator_terms([c(0.7), c(-0.2)], wk, 1.0, 0.3).unwrap();
            let seg = Segment { lo: -2.0, hi: 2.0, terms };
            for &x in &[-1.5, 0.0, 0.3, 1.1] {
                let want = propagate([0.7, -0.2], wk, 1.0, x - 0.3);
                let got = seg.eval(x);
                assert!((got[0] - want[0]).norm() < 1e-12, "{wk} {x}");
                assert!((got[1] - want[1]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_overlap_matches_quadrature() {
        let a = propagator_terms([c(1.0), c(0.0)], 2.0, 1.0, 0.0).unwrap();
        let b = propagator_terms([c(0.3), Complex64::new(0.0, 1.0)], 0.2, 1.0, 0.0).unwrap();
        let tail = vec![Term { rate: c(-0.8), amp: [c(1.0), c(-0.5)], origin: 1.0 }];
        let tail2 = vec![Term { rate: Complex64::new(-0.3, 2.0), amp: [c(0.2), c(0.1)], origin: 1.0 }];
        let s1 = PiecewiseSpinor::new(
            vec![
                Segment { lo: f64::NEG_INFINITY, hi: -1.0, terms: vec![] },
                Segment { lo: -1.0, hi: 1.0, terms: a },
                Segment { lo: 1.0, hi: f64::INFINITY, terms: tail },
            ],
            NormKind::Unnormalized,
        );
        let s2 = PiecewiseSpinor::new(
            vec![
                Segment { lo: f64::NEG_INFINITY, hi: -1.0, terms: vec![] },
                Segment { lo: -1.0, hi: 1.0, terms: b },
                Segment { lo: 1.0, hi: f64::INFINITY, terms: tail2 },
            ],
            NormKind::Unnormalized,
        );
        let exact = s1.inner(&s2);
        let quad = s1.inner_quadrature(&s2, 1e-12);
        assert!((exact - quad).norm() < 1e-9, "{exact} vs {quad}");
        let img = s1.parity_image();
        let exact = img.inner(&img);
        let quad = img.inner_quadrature(&img, 1e-12);
        assert!((exact - quad).norm() < 1e-9);
        assert!((img.norm_sqr() - s1.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn small_exponent_series_is_smooth() {
        let t = 2.0;
        for &e in &[1e-5, 1e-4, 5e-4, 2e-3] {
            let mu = Complex64::new(e, 0.0);
            let a = exp_integral(mu, t);
            let b = ((mu * t).exp() - 1.0) / mu;
            assert!((a - b).norm() < 1e-10);
        }
    }
}

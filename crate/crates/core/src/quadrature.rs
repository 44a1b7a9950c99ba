#![allow(clippy::excessive_precision)]
//! Globally adaptive Gauss-Kronrod (10/21 point) integration.

use crate::error::{ensure, Error, Result};
use crate::scalar::Real;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_734_012_946_447,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Weights of the embedded 10-point Gauss rule at XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Accuracy controls for the analytic integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
    /// Upper tail mass of the fading gain discarded when truncating the
    /// inner integral of the average rate.
    pub gain_tail_mass: T,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-8),
            abs_tol: T::lit(1e-12),
            max_subdivisions: 200,
            gain_tail_mass: T::lit(1e-10),
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.rel_tol > T::zero(),
            "rel_tol",
            self.rel_tol.to_f64_lossy(),
            "must be positive",
        )?;
        ensure(
            self.abs_tol > T::zero(),
            "abs_tol",
            self.abs_tol.to_f64_lossy(),
            "must be positive",
        )?;
        ensure(
            self.max_subdivisions >= 1,
            "max_subdivisions",
            self.max_subdivisions as f64,
            "must be at least 1",
        )?;
        ensure(
            self.gain_tail_mass > T::zero() && self.gain_tail_mass <= T::lit(1e-4),
            "gain_tail_mass",
            self.gain_tail_mass.to_f64_lossy(),
            "must lie in (0, 1e-4]",
        )
    }

    /// Same spec with tolerances scaled by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_error: T,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn kronrod21<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Segment<T> {
    let two = T::lit(2.0);
    let center = (a + b) / two;
    let half = (b - a) / two;
    let fc = f(center);
    let mut lo = [T::zero(); 10];
    let mut hi = [T::zero(); 10];
    let mut kronrod = fc * T::lit(WGK[10]);
    let mut gauss = T::zero();
    let mut res_abs = kronrod.abs();
    for j in 0..10 {
        let dx = half * T::lit(XGK[j]);
        lo[j] = f(center - dx);
        hi[j] = f(center + dx);
        let pair = lo[j] + hi[j];
        kronrod = kronrod + T::lit(WGK[j]) * pair;
        res_abs = res_abs + T::lit(WGK[j]) * (lo[j].abs() + hi[j].abs());
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    let mean = kronrod / two;
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((lo[j] - mean).abs() + (hi[j] - mean).abs());
    }
    let h = half.abs();
    res_abs = res_abs * h;
    res_asc = res_asc * h;

    // QUADPACK rescaling of the raw Gauss/Kronrod difference.
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != T::zero() && error != T::zero() {
        error = res_asc * T::one().min((T::lit(200.0) * error / res_asc).powf(T::lit(1.5)));
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && floor > error {
        error = floor;
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error,
    }
}

/// Integrates `f` over `[a, b]`, bisecting the segment with the largest error
/// until `error <= max(abs_tol, rel_tol * |value|)`.
///
/// Non-convergence within `max_subdivisions` is an error that carries the
/// best value and its error estimate.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<Integral<T>> {
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            abs_error: T::zero(),
            subdivisions: 0,
        });
    }
    let mut segments = vec![kronrod21(&mut f, a, b)];
    loop {
        let value = segments.iter().fold(T::zero(), |s, g| s + g.value);
        let error = segments.iter().fold(T::zero(), |s, g| s + g.error);
        let target = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= target {
            return Ok(Integral {
                value,
                abs_error: error,
                subdivisions: segments.len(),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |(bi, be), (i, g)| {
                if g.error > be {
                    (i, g.error)
                } else {
                    (bi, be)
                }
            });
        let seg = segments[worst];
        let mid = (seg.a + seg.b) / T::lit(2.0);
        let too_narrow = mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b);
        if segments.len() >= spec.max_subdivisions || too_narrow {
            return Err(Error::QuadratureNotConverged {
                value: value.to_f64_lossy(),
                abs_error: error.to_f64_lossy(),
                subdivisions: segments.len(),
            });
        }
        segments[worst] = kronrod21(&mut f, seg.a, mid);
        segments.push(kronrod21(&mut f, mid, seg.b));
    }
}

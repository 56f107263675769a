//! Gaussian-blob classification benchmarks with label noise.
//!
//! The generator is Xoshiro256++ seeded through SplitMix64
//! (`seed_from_u64`). Geometry (centres, samples, shuffles) uses that stream;
//! label flips use a copy advanced by one `jump()` (2¹²⁸ steps), so changing
//! the noise level never moves a sample. Uniform reals are
//! `(x >> 11) · 2⁻⁵³`; normals come from Box-Muller with both outputs used.

use diva_core::{Dataset, Matrix, SampleWeights};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// Samples per class before the 50/50 train/test split.
    pub n_per_class: usize,
    pub k: usize,
    pub m: usize,
    pub class_separation: f64,
    /// Fraction of training labels moved to a uniformly chosen other class.
    pub noise_fraction: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn two_blobs(
        n_per_class: usize,
        class_separation: f64,
        noise_fraction: f64,
        seed: u64,
    ) -> Self {
        SyntheticSpec {
            n_per_class,
            k: 2,
            m: 10,
            class_separation,
            noise_fraction,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_per_class < 2 {
            return Err(Error::Invalid("n_per_class must be at least 2".into()));
        }
        if self.k < 1 || self.m < 1 {
            return Err(Error::Invalid("k and m must be at least 1".into()));
        }
        if !(self.class_separation > 0.0) || !self.class_separation.is_finite() {
            return Err(Error::Invalid(
                "class_separation must be positive and finite".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.noise_fraction) {
            return Err(Error::Invalid("noise_fraction must lie in [0, 1)".into()));
        }
        if self.noise_fraction > 0.0 && self.k < 2 {
            return Err(Error::Invalid(
                "label noise needs at least two classes".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    /// Training set with noisy labels.
    pub train: Dataset,
    pub test: Dataset,
    /// Training indices whose label was changed, ascending.
    pub flipped_indices: Vec<usize>,
    /// Training classes before flipping.
    pub clean_train_classes: Vec<usize>,
    /// Fallbacks taken while generating.
    pub notes: Vec<String>,
}

struct Stream {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl Stream {
    fn new(rng: Xoshiro256PlusPlus) -> Self {
        Stream { rng, spare: None }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` by rejection.
    fn below(&mut self, n: usize) -> usize {
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.rng.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    fn normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        self.spare = Some(r * t.sin());
        r * t.cos()
    }

    fn shuffle<T>(&mut self, v: &mut [T]) {
        for i in (1..v.len()).rev() {
            let j = self.below(i + 1);
            v.swap(i, j);
        }
    }
}

/// Generates `(train, test, flipped)` as a pure function of `spec`.
///
/// Class `c` is centred at `class_separation · e_c` with unit covariance. When
/// `m < k` the centres are random unit vectors instead, and a note says so.
/// Each class is split in half (train gets the extra sample when odd), both
/// splits are shuffled, and exactly `round(noise_fraction · n_train)`
/// training labels are flipped.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Synthetic> {
    spec.validate()?;
    let base = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let mut flip_rng = base.clone();
    flip_rng.jump();
    let mut geo = Stream::new(base);
    let mut flips = Stream::new(flip_rng);
    let (k, m) = (spec.k, spec.m);
    let mut notes = Vec::new();

    let mut centres = Matrix::zeros(k, m);
    if m >= k {
        for c in 0..k {
            centres[(c, c)] = spec.class_separation;
        }
    } else {
        notes.push(format!(
            "m = {m} < k = {k}: orthogonal centres impossible, using random unit centres"
        ));
        for c in 0..k {
            let dir: Vec<f64> = (0..m).map(|_| geo.normal()).collect();
            let norm = dir
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt()
                .max(f64::MIN_POSITIVE);
            for (j, v) in dir.iter().enumerate() {
                centres[(c, j)] = spec.class_separation * v / norm;
            }
        }
    }

    let n_train_c = spec.n_per_class - spec.n_per_class / 2;
    let mut train_rows = Vec::new();
    let mut test_rows = Vec::new();
    for c in 0..k {
        for i in 0..spec.n_per_class {
            let x: Vec<f64> = (0..m).map(|j| centres[(c, j)] + geo.normal()).collect();
            if i < n_train_c {
                train_rows.push((x, c));
            } else {
                test_rows.push((x, c));
            }
        }
    }
    geo.shuffle(&mut train_rows);
    geo.shuffle(&mut test_rows);

    let n_train = train_rows.len();
    let n_flip = (spec.noise_fraction * n_train as f64).round() as usize;
    let mut order: Vec<usize> = (0..n_train).collect();
    for i in 0..n_flip {
        let j = i + flips.below(n_train - i);
        order.swap(i, j);
    }
    let mut flipped_indices = order[..n_flip].to_vec();
    flipped_indices.sort_unstable();

    let clean_train_classes: Vec<usize> = train_rows.iter().map(|(_, c)| *c).collect();
    let mut noisy = clean_train_classes.clone();
    for &i in &flipped_indices {
        let shift = 1 + flips.below(k - 1);
        noisy[i] = (noisy[i] + shift) % k;
    }

    let to_matrix = |rows: &[(Vec<f64>, usize)]| -> Result<Matrix> {
        Ok(Matrix::from_vec(
            rows.len(),
            m,
            rows.iter().flat_map(|(x, _)| x.iter().copied()).collect(),
        )?)
    };
    let train = Dataset::from_classes(to_matrix(&train_rows)?, &noisy, k)?;
    let test_classes: Vec<usize> = test_rows.iter().map(|(_, c)| *c).collect();
    let test = Dataset::from_classes(to_matrix(&test_rows)?, &test_classes, k)?;
    Ok(Synthetic {
        train,
        test,
        flipped_indices,
        clean_train_classes,
        notes,
    })
}

/// A small random problem for gradient checks: standard normal features,
/// uniform classes, and weights uniform in `[0.5, 1.5)`. Returns
/// `(train, validation, weights)`.
pub fn random_instance(
    seed: u64,
    n: usize,
    m: usize,
    k: usize,
    q: usize,
) -> Result<(Dataset, Dataset, SampleWeights)> {
    if n < 2 || m < 1 || k < 1 || q < 1 {
        return Err(Error::Invalid(
            "random instance needs n >= 2 and m, k, q >= 1".into(),
        ));
    }
    let mut s = Stream::new(Xoshiro256PlusPlus::seed_from_u64(seed));
    let mut draw = |rows: usize| -> Result<Dataset> {
        let z = Matrix::from_vec(rows, m, (0..rows * m).map(|_| s.normal()).collect())?;
        let classes: Vec<usize> = (0..rows).map(|_| s.below(k)).collect();
        Ok(Dataset::from_classes(z, &classes, k)?)
    };
    let train = draw(n)?;
    let val = draw(q)?;
    let alpha = (0..n).map(|_| 0.5 + s.uniform()).collect();
    Ok((train, val, SampleWeights::new(alpha)?))
}

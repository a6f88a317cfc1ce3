//! Random objects of the Gaussian linear model: design matrices,
//! coefficient vectors, conditional means and responses.
//!
//! The model is `y_i = x_i^T beta + eps_i` with `eps_i ~ N(0, sigma2)` and
//! design rows drawn i.i.d. standard normal. All samplers are pure functions
//! of their dimensions, parameters and a [`SeedSpec`]; matrix entries are
//! drawn in row-major order, so output is reproducible across runs and
//! thread counts.

use ndarray::{ArcArray2, Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::seed::SeedSpec;
use crate::Result;

/// Dense row-major n x p design matrix with its standardization state.
///
/// Entries are shared behind an atomic refcount, so cloning is cheap and a
/// design can be read from many threads at once.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    entries: ArcArray2<f64>,
    standardized: bool,
}

impl DesignMatrix {
    /// Wrap raw entries as an unstandardized design.
    pub fn from_entries(entries: Array2<f64>) -> Result<Self> {
        let (n, p) = entries.dim();
        if n == 0 || p == 0 {
            return Err(Error::InvalidDimension(format!(
                "design must be at least 1x1, got {n}x{p}"
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design entries"));
        }
        Ok(Self {
            entries: entries.into_shared(),
            standardized: false,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn p(&self) -> usize {
        self.entries.ncols()
    }

    pub fn standardized(&self) -> bool {
        self.standardized
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }
}

/// Coefficient vector beta and noise variance sigma2.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLinearModel {
    beta: Array1<f64>,
    sigma2: f64,
}

impl GaussianLinearModel {
    pub fn new(beta: Array1<f64>, sigma2: f64) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be positive and finite, got {sigma2}"
            )));
        }
        if beta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("beta"));
        }
        Ok(Self { beta, sigma2 })
    }

    pub fn beta(&self) -> &Array1<f64> {
        &self.beta
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

/// The conditional means mu = X beta.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMeans {
    mu: Array1<f64>,
}

impl ConditionalMeans {
    pub fn mu(&self) -> &Array1<f64> {
        &self.mu
    }

    pub fn norm2(&self) -> f64 {
        self.mu.dot(&self.mu)
    }

    pub fn into_inner(self) -> Array1<f64> {
        self.mu
    }
}

/// A design together with a response vector of matching length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    design: DesignMatrix,
    response: Array1<f64>,
}

impl Dataset {
    pub fn new(design: DesignMatrix, response: Array1<f64>) -> Result<Self> {
        if response.len() != design.n() {
            return Err(Error::DimensionMismatch(format!(
                "response length {} does not match design rows {}",
                response.len(),
                design.n()
            )));
        }
        if response.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response"));
        }
        Ok(Self { design, response })
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.design
    }

    pub fn response(&self) -> &Array1<f64> {
        &self.response
    }
}

/// `len` independent N(0, sd^2) draws from an already-positioned stream.
pub(crate) fn draw_normal_vec(rng: &mut ChaCha8Rng, len: usize, sd: f64) -> Array1<f64> {
    Array1::from_iter((0..len).map(|_| {
        let z: f64 = rng.sample(StandardNormal);
        z * sd
    }))
}

/// Sample an n x p matrix of i.i.d. standard normal entries.
///
/// Entries are drawn in row-major order from the stream of `seed`.
pub fn sample_design(n: usize, p: usize, seed: &SeedSpec) -> Result<DesignMatrix> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidDimension(format!(
            "design dimensions must be positive, got {n}x{p}"
        )));
    }
    let mut rng = seed.rng();
    let data: Vec<f64> = (0..n * p)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let entries = Array2::from_shape_vec((n, p), data).expect("length matches shape");
    Ok(DesignMatrix {
        entries: entries.into_shared(),
        standardized: false,
    })
}

/// Center and rescale every row so that `sum_j x_ij = 0` and
/// `sum_j x_ij^2 = p`.
///
/// Undefined for constant rows and for p < 2; both are hard errors.
pub fn standardize_rows(design: &DesignMatrix) -> Result<DesignMatrix> {
    let p = design.p();
    if p < 2 {
        return Err(Error::InvalidDimension(format!(
            "row standardization needs p >= 2, got p = {p}"
        )));
    }
    let mut out = design.entries.to_owned();
    for (i, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
        let mean = row.sum() / p as f64;
        row.mapv_inplace(|v| v - mean);
        let ss: f64 = row.iter().map(|v| v * v).sum();
        if ss <= 0.0 {
            return Err(Error::ConstantRow(i));
        }
        let scale = (p as f64 / ss).sqrt();
        row.mapv_inplace(|v| v * scale);
    }
    Ok(DesignMatrix {
        entries: out.into_shared(),
        standardized: true,
    })
}

/// Sample beta with i.i.d. N(0, eta2 / p) entries.
///
/// Under a standardized design each conditional mean `x_i^T beta` is then
/// exactly N(0, eta2). Returns the zero vector when `eta2 = 0`.
pub fn sample_beta_spherical(p: usize, eta2: f64, seed: &SeedSpec) -> Result<Array1<f64>> {
    if p == 0 {
        return Err(Error::InvalidDimension("p must be positive".into()));
    }
    if !eta2.is_finite() || eta2 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eta2 must be nonnegative and finite, got {eta2}"
        )));
    }
    if eta2 == 0.0 {
        return Ok(Array1::zeros(p));
    }
    let sd = (eta2 / p as f64).sqrt();
    let mut rng = seed.rng();
    Ok(draw_normal_vec(&mut rng, p, sd))
}

/// Sample beta with exact squared norm `beta_norm2` and direction uniform on
/// the sphere. Returns the zero vector when `beta_norm2 = 0`.
pub fn sample_beta_fixed_norm(p: usize, beta_norm2: f64, seed: &SeedSpec) -> Result<Array1<f64>> {
    if p == 0 {
        return Err(Error::InvalidDimension("p must be positive".into()));
    }
    if !beta_norm2.is_finite() || beta_norm2 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "beta_norm2 must be nonnegative and finite, got {beta_norm2}"
        )));
    }
    if beta_norm2 == 0.0 {
        return Ok(Array1::zeros(p));
    }
    let mut rng = seed.rng();
    let u = draw_normal_vec(&mut rng, p, 1.0);
    let norm2 = u.dot(&u);
    if norm2 <= 0.0 {
        return Err(Error::InvalidParameter(
            "degenerate direction draw; all components zero".into(),
        ));
    }
    Ok(u * (beta_norm2 / norm2).sqrt())
}

/// Sample a response `Y = X beta + eps` with `eps_i` i.i.d. N(0, sigma2).
pub fn sample_response(
    design: &DesignMatrix,
    model: &GaussianLinearModel,
    seed: &SeedSpec,
) -> Result<Dataset> {
    if model.beta().len() != design.p() {
        return Err(Error::DimensionMismatch(format!(
            "beta length {} does not match design columns {}",
            model.beta().len(),
            design.p()
        )));
    }
    let mut rng = seed.rng();
    let eps = draw_normal_vec(&mut rng, design.n(), model.sigma2().sqrt());
    let mut y = design.view().dot(model.beta());
    y += &eps;
    Dataset::new(design.clone(), y)
}

/// The conditional means mu = X beta.
pub fn conditional_means(design: &DesignMatrix, beta: &Array1<f64>) -> Result<ConditionalMeans> {
    if beta.len() != design.p() {
        return Err(Error::DimensionMismatch(format!(
            "beta length {} does not match design columns {}",
            beta.len(),
            design.p()
        )));
    }
    Ok(ConditionalMeans {
        mu: design.view().dot(beta),
    })
}

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::spectral_core::{MultiplierSymbol, SpectralField, TorusGrid};

/// One period (on `[0, 1)`) of the oscillating coefficient `h`.
#[derive(Clone, Debug, PartialEq)]
pub enum HSpec {
    Constant(f64),
    /// `h(y) = 1 + cos(2 pi y)`.
    OnePlusCos,
    /// Samples at `y_j = j / m`; evaluated by trigonometric interpolation.
    Samples(Vec<f64>),
}

impl HSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant(c) if !c.is_finite() => Err(invalid("h", "non-finite constant")),
            Self::Samples(s) if s.is_empty() => Err(invalid("h", "empty sample table")),
            Self::Samples(s) if s.iter().any(|v| !v.is_finite()) => Err(invalid("h", "non-finite sample")),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::OnePlusCos => 1.0 + (2.0 * PI * y).cos(),
            Self::Samples(s) => trig_interp(s, y),
        }
    }

    /// Period average; exact for the sample table (it is the zero mode).
    pub fn mean(&self) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::OnePlusCos => 1.0,
            Self::Samples(s) => s.iter().sum::<f64>() / s.len() as f64,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant(_) => true,
            Self::OnePlusCos => false,
            Self::Samples(s) => s.iter().all(|v| *v == s[0]),
        }
    }
}

fn trig_interp(s: &[f64], y: f64) -> f64 {
    let m = s.len();
    let mf = m as f64;
    let mut acc = 0.0;
    // Real trigonometric interpolant; the Nyquist term (even m) is halved.
    for k in 0..=m / 2 {
        let (mut a, mut b) = (0.0, 0.0);
        for (j, v) in s.iter().enumerate() {
            let th = 2.0 * PI * (k * j) as f64 / mf;
            a += v * th.cos();
            b += v * th.sin();
        }
        let w = if k == 0 || (m % 2 == 0 && k == m / 2) { 1.0 } else { 2.0 };
        let th = 2.0 * PI * k as f64 * y;
        acc += w * (a * th.cos() + b * th.sin()) / mf;
    }
    acc
}

/// Equation variant. The sign is defocusing throughout.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Free,
    Quintic { lambda: f64 },
    /// `alpha^6 P(|P u|^4 P u)`.
    AlphaTruncated { alpha: f64, symbol: MultiplierSymbol },
    DTruncated { d: u64 },
    RescaledTruncated { d: u64, k: f64 },
    /// `P_{<=n_cut} P_K(|P_K u|^4 P_K u)` with `P_K = m_D(. / K)`.
    TorusTruncated { n_cut: u64, d: u64, k: f64 },
    /// `lambda * h(n x) |u|^4 u`.
    Inhomogeneous { h: HSpec, n: u32, lambda: f64 },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        let md = |d: u64| MultiplierSymbol::Md(d).validate();
        match self {
            Self::Free => Ok(()),
            Self::Quintic { lambda } | Self::Inhomogeneous { lambda, .. } if !(*lambda > 0.0 && lambda.is_finite()) => {
                Err(invalid("lambda", format!("must be positive, got {lambda}")))
            }
            Self::Quintic { .. } => Ok(()),
            Self::AlphaTruncated { alpha, symbol } => {
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return Err(invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
                }
                symbol.validate()
            }
            Self::DTruncated { d } => md(*d),
            Self::RescaledTruncated { d, k } => MultiplierSymbol::MdRescaled { d: *d, k: *k }.validate(),
            Self::TorusTruncated { n_cut, d, k } => {
                if !n_cut.is_power_of_two() {
                    return Err(invalid("n_cut", format!("{n_cut} is not dyadic")));
                }
                MultiplierSymbol::MdRescaled { d: *d, k: *k }.validate()
            }
            Self::Inhomogeneous { h, n, .. } => {
                if *n == 0 {
                    return Err(invalid("n", "must be >= 1"));
                }
                h.validate()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::Quintic { .. } => "quintic",
            Self::AlphaTruncated { .. } => "alpha_truncated",
            Self::DTruncated { .. } => "d_truncated",
            Self::RescaledTruncated { .. } => "rescaled_truncated",
            Self::TorusTruncated { .. } => "torus_truncated",
            Self::Inhomogeneous { .. } => "inhomogeneous",
        }
    }

    /// Inner projection `P` in `|P u|^4 P u`, if any.
    pub fn projection(&self) -> Option<MultiplierSymbol> {
        match self {
            Self::AlphaTruncated { symbol, .. } if *symbol != MultiplierSymbol::Identity => Some(symbol.clone()),
            Self::DTruncated { d } => Some(MultiplierSymbol::Md(*d)),
            Self::RescaledTruncated { d, k } | Self::TorusTruncated { d, k, .. } => {
                Some(MultiplierSymbol::MdRescaled { d: *d, k: *k })
            }
            _ => None,
        }
    }

    /// True when the nonlinearity is `w(x) |u|^4 u` with no projection.
    pub fn is_pointwise(&self) -> bool {
        self.projection().is_none()
    }

    fn coupling(&self) -> f64 {
        match self {
            Self::Free => 0.0,
            Self::Quintic { lambda } | Self::Inhomogeneous { lambda, .. } => *lambda,
            Self::AlphaTruncated { alpha, .. } => alpha.powi(6),
            _ => 1.0,
        }
    }

    /// Node weights `w(x_j)` of a pointwise model.
    pub fn phase_weight(&self, nodes: &[f64]) -> Option<PhaseWeight> {
        if !self.is_pointwise() {
            return None;
        }
        Some(match self {
            Self::Inhomogeneous { h, n, lambda } => {
                PhaseWeight::Nodes(nodes.iter().map(|x| lambda * h.eval(*n as f64 * x)).collect())
            }
            other => PhaseWeight::Uniform(other.coupling()),
        })
    }

    /// Mass outside `|xi| <= n_cut` for the torus-truncated system; zero otherwise.
    pub fn subspace_leak(&self, field: &SpectralField) -> f64 {
        match self {
            Self::TorusTruncated { n_cut, .. } => field.mass_above(*n_cut as f64),
            _ => 0.0,
        }
    }
}

/// Weight of the exact pointwise phase substep.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseWeight {
    Uniform(f64),
    Nodes(Vec<f64>),
}

/// Precomputed pieces of `N(u)` for one (model, grid) pair.
#[derive(Clone, Debug)]
pub(crate) struct Nonlinearity {
    coupling: f64,
    inner: Option<Vec<f64>>,
    outer: Option<Vec<f64>>,
    padded_weight: Option<Vec<f64>>,
    free: bool,
}

impl Nonlinearity {
    pub(crate) fn new(model: &ModelSpec, grid: &TorusGrid) -> Self {
        let inner = model.projection().map(|p| p.on_grid(grid));
        let outer = match model {
            ModelSpec::TorusTruncated { n_cut, .. } => {
                let cut = MultiplierSymbol::SharpLow(*n_cut as f64).on_grid(grid);
                Some(cut.iter().zip(inner.as_ref().expect("projected")).map(|(a, b)| a * b).collect())
            }
            _ => inner.clone(),
        };
        let padded_weight = match model {
            ModelSpec::Inhomogeneous { h, n, .. } => {
                Some(grid.padded_nodes().iter().map(|x| h.eval(*n as f64 * x)).collect())
            }
            _ => None,
        };
        Self { coupling: model.coupling(), inner, outer, padded_weight, free: *model == ModelSpec::Free }
    }

    fn projected(&self, u: &SpectralField) -> SpectralField {
        match &self.inner {
            None => u.clone(),
            Some(m) => {
                let mut v = u.clone();
                for (c, w) in v.coefficients_mut().iter_mut().zip(m) {
                    *c *= w;
                }
                v
            }
        }
    }

    pub(crate) fn apply(&self, u: &SpectralField) -> SpectralField {
        if self.free {
            return SpectralField::zeros(u.grid());
        }
        let mut s = self.projected(u).padded_samples();
        for (j, z) in s.iter_mut().enumerate() {
            let w = self.padded_weight.as_ref().map_or(1.0, |h| h[j]);
            *z *= self.coupling * w * z.norm_sqr() * z.norm_sqr();
        }
        let mut out = SpectralField::from_padded_samples(u.grid(), s).expect("padded length");
        if let Some(m) = &self.outer {
            for (c, w) in out.coefficients_mut().iter_mut().zip(m) {
                *c *= w;
            }
        }
        out
    }

    /// `(1/6) * integral of w |P u|^6`, evaluated on the padded nodes.
    pub(crate) fn potential(&self, u: &SpectralField) -> f64 {
        if self.free {
            return 0.0;
        }
        let s = self.projected(u).padded_samples();
        let h = u.grid().length() / s.len() as f64;
        let sum: f64 = s
            .iter()
            .enumerate()
            .map(|(j, z)| self.padded_weight.as_ref().map_or(1.0, |w| w[j]) * z.norm_sqr().powi(3))
            .sum();
        self.coupling * h * sum / 6.0
    }
}

/// `N(u)` with the quintic product computed on the 3x padded grid.
pub fn nonlinear_term(model: &ModelSpec, field: &SpectralField) -> SpectralField {
    Nonlinearity::new(model, field.grid()).apply(field)
}

pub fn mass(field: &SpectralField) -> f64 {
    field.mass()
}

pub(crate) fn kinetic(field: &SpectralField) -> f64 {
    let l = field.grid().length();
    0.5 * l
        * field
            .coefficients()
            .iter()
            .enumerate()
            .map(|(i, c)| (2.0 * PI * field.grid().frequency(i)).powi(2) * c.norm_sqr())
            .sum::<f64>()
}

/// `E = (1/2) integral |u_x|^2 + (1/6) integral w |P u|^6`.
pub fn energy(field: &SpectralField, model: &ModelSpec) -> f64 {
    kinetic(field) + Nonlinearity::new(model, field.grid()).potential(field)
}

use super::field::SpectralField;
use super::grid::TorusGrid;
use crate::error::{invalid, Error, Result};

/// Quintic smoothstep `6r^5 - 15r^4 + 10r^3`, clamped to `[0, 1]`.
pub fn smoothstep(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else if r >= 1.0 {
        1.0
    } else {
        r * r * r * (10.0 + r * (-15.0 + 6.0 * r))
    }
}

/// The fixed bump: 1 on `|xi| <= 1`, 0 on `|xi| >= 2`, C^2 in between.
pub fn bump(xi: f64) -> f64 {
    1.0 - smoothstep(xi.abs() - 1.0)
}

fn dyadic_exponent(d: u64) -> Result<u32> {
    if d >= 2 && d.is_power_of_two() {
        Ok(d.trailing_zeros())
    } else {
        Err(Error::NotDyadic(d as f64))
    }
}

fn md(xi: f64, levels: u32) -> f64 {
    let s: f64 = (0..=levels).map(|j| bump(xi / (1u64 << j) as f64)).sum();
    s / (levels + 1) as f64
}

/// `m_D(xi) = (1 / log2(2D)) * sum over dyadic 1 <= N <= D of bump(xi / N)`.
pub fn eval_md(xi: f64, d: u64) -> Result<f64> {
    Ok(md(xi, dyadic_exponent(d)?))
}

#[derive(Clone, Debug, PartialEq)]
pub enum MultiplierSymbol {
    Identity,
    /// Indicator of `|xi| <= N`.
    SharpLow(f64),
    /// `bump(xi / N)`, the smooth low-pass projection.
    SmoothLow(f64),
    /// Sharp dyadic shell `N/2 < |xi| <= N`.
    Dyadic(f64),
    Md(u64),
    /// `m_D(xi / K)`.
    MdRescaled { d: u64, k: f64 },
    /// `m_D(xi) - m_D(2 xi)`.
    MdDifference(u64),
    /// `(1 + 4 pi^2 xi^2)^-1`, the symbol of `(1 - d_xx)^-1`.
    HelmholtzInverse,
    /// Piecewise-linear table of `(xi, value)` pairs, constant beyond the ends.
    Custom(Vec<(f64, f64)>),
}

impl MultiplierSymbol {
    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be positive, got {v}")))
            }
        };
        match self {
            Self::Identity | Self::HelmholtzInverse => Ok(()),
            Self::SharpLow(n) | Self::SmoothLow(n) | Self::Dyadic(n) => positive("N", *n),
            Self::Md(d) | Self::MdDifference(d) => dyadic_exponent(*d).map(|_| ()),
            Self::MdRescaled { d, k } => {
                dyadic_exponent(*d)?;
                positive("K", *k)
            }
            Self::Custom(t) => {
                if t.is_empty() {
                    return Err(invalid("table", "empty"));
                }
                if t.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
                    return Err(invalid("table", "non-finite entry"));
                }
                if t.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(invalid("table", "abscissae must increase strictly"));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            Self::Identity => 1.0,
            Self::SharpLow(n) => f64::from(u8::from(xi.abs() <= *n)),
            Self::SmoothLow(n) => bump(xi / n),
            Self::Dyadic(n) => f64::from(u8::from(xi.abs() <= *n && xi.abs() > 0.5 * n)),
            Self::Md(d) => md(xi, d.trailing_zeros()),
            Self::MdRescaled { d, k } => md(xi / k, d.trailing_zeros()),
            Self::MdDifference(d) => {
                let l = d.trailing_zeros();
                md(xi, l) - md(2.0 * xi, l)
            }
            Self::HelmholtzInverse => {
                let w = 2.0 * std::f64::consts::PI * xi;
                1.0 / (1.0 + w * w)
            }
            Self::Custom(t) => {
                let first = t[0];
                let last = t[t.len() - 1];
                if xi <= first.0 {
                    return first.1;
                }
                if xi >= last.0 {
                    return last.1;
                }
                let j = t.partition_point(|(x, _)| *x <= xi);
                let (x0, v0) = t[j - 1];
                let (x1, v1) = t[j];
                v0 + (v1 - v0) * (xi - x0) / (x1 - x0)
            }
        }
    }

    pub fn on_grid(&self, grid: &TorusGrid) -> Vec<f64> {
        grid.frequencies().into_iter().map(|xi| self.eval(xi)).collect()
    }

    /// Largest `|m|` on the grid's lattice.
    pub fn sup_on(&self, grid: &TorusGrid) -> f64 {
        self.on_grid(grid).into_iter().map(f64::abs).fold(0.0, f64::max)
    }
}

/// `u_hat_k -> m(xi_k) u_hat_k`.
pub fn apply_multiplier(field: &SpectralField, symbol: &MultiplierSymbol) -> SpectralField {
    if *symbol == MultiplierSymbol::Identity {
        return field.clone();
    }
    field.map_coefficients(|xi, c| c * symbol.eval(xi))
}

//! Connectivity and wafer-area scaling.
//!
//! Relates the mean shortest path of a random network to the node degree and
//! then to the photonic and electronic area each neuron needs on a wafer.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantities::{cast, constants::EULER_GAMMA, positive, Area, Length, TypedQuantity};

/// A 300 mm wafer with a usable-area fill factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wafer {
    #[serde(rename = "diameter_m")]
    pub diameter: Length,
    pub fill_factor: f64,
}

impl Default for Wafer {
    fn default() -> Self {
        Self { diameter: Length::new(0.3), fill_factor: 1.0 }
    }
}

impl Wafer {
    pub fn usable_area(&self) -> Result<Area> {
        positive("wafer diameter", self.diameter.value())?;
        if !(self.fill_factor > 0.0 && self.fill_factor <= 1.0) {
            return Err(Error::domain("fill_factor", format!("must be in (0, 1], got {}", self.fill_factor)));
        }
        let r = self.diameter.value() / 2.0;
        Ok(Area::new(std::f64::consts::PI * r * r * self.fill_factor))
    }
}

/// Default waveguide pitch.
pub const DEFAULT_WAVEGUIDE_PITCH: Length = Length::new(2e-6);

/// Mean degree a random network of `n_total` nodes needs for mean shortest
/// path `path_length`: exp[(ln N − γ)/(L − ½)].
pub fn required_degree(n_total: f64, path_length: f64) -> Result<f64> {
    if !(n_total >= 2.0) {
        return Err(Error::domain("n_total", format!("must be >= 2, got {n_total}")));
    }
    if !(path_length > 0.5) {
        return Err(Error::domain("path_length", format!("must exceed 1/2, got {path_length}")));
    }
    Ok(((n_total.ln() - EULER_GAMMA) / (path_length - 0.5)).exp())
}

/// Mean shortest path reachable with mean degree `degree`: ½ + (ln N − γ)/ln k.
pub fn achievable_path_length(n_total: f64, degree: f64) -> Result<f64> {
    if !(degree > 1.0) {
        return Err(Error::domain("degree", format!("must exceed 1, got {degree}")));
    }
    positive("n_total", n_total)?;
    Ok(0.5 + (n_total.ln() - EULER_GAMMA) / degree.ln())
}

/// Passive photonic area per neuron, (k·w_wg/p_p)².
pub fn photonic_area(degree: f64, w_wg: Length, p_p: f64) -> Result<Area> {
    positive("p_p", p_p)?;
    let side = w_wg.q() * (degree / p_p);
    Ok(cast(side * side))
}

/// Electronic synapse area per neuron, k·w_sy²/p_e.
pub fn electronic_area(degree: f64, w_sy: Length, p_e: f64) -> Result<Area> {
    positive("p_e", p_e)?;
    Ok(cast(w_sy.q() * w_sy * (degree / p_e)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneRequirement {
    pub degree: f64,
    pub p_p: f64,
    pub p_e: f64,
}

/// Photonic and electronic planes needed for `n_300` neurons on one wafer to
/// keep the given mean path length. Continuous; round up when reporting.
pub fn required_planes(
    n_300: f64,
    path_length: f64,
    w_wg: Length,
    w_sy: Length,
    wafer: &Wafer,
) -> Result<PlaneRequirement> {
    positive("w_wg", w_wg.value())?;
    positive("w_sy", w_sy.value())?;
    let k = required_degree(n_300, path_length)?;
    let area_per_neuron = wafer.usable_area()?.value() / n_300;
    let p_p = k * w_wg.value() / area_per_neuron.sqrt();
    let p_e = k * w_sy.value().powi(2) / area_per_neuron;
    Ok(PlaneRequirement { degree: k, p_p, p_e })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthAxis {
    /// Electronic synapse width; planes are electronic planes.
    SynapseWidth,
    /// Waveguide pitch; planes are photonic planes.
    WaveguidePitch,
}

impl WidthAxis {
    pub fn label(self) -> &'static str {
        match self {
            WidthAxis::SynapseWidth => "w_sy",
            WidthAxis::WaveguidePitch => "w_wg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLengthPoint {
    pub axis: WidthAxis,
    pub n_300: f64,
    pub planes: f64,
    pub width: Length,
    /// Largest degree that fits the wafer at this width.
    pub max_degree: f64,
    /// `None` when the wafer cannot support a degree above one.
    pub path_length: Option<f64>,
}

impl PathLengthPoint {
    pub fn feasible(&self) -> bool {
        self.path_length.is_some()
    }
}

/// Largest degree that fits a wafer for one width/plane combination.
pub fn max_supported_degree(axis: WidthAxis, n_300: f64, planes: f64, width: Length, wafer: &Wafer) -> Result<f64> {
    positive("n_300", n_300)?;
    positive("planes", planes)?;
    positive("width", width.value())?;
    let area_per_neuron = wafer.usable_area()?.value() / n_300;
    Ok(match axis {
        WidthAxis::SynapseWidth => planes * area_per_neuron / width.value().powi(2),
        WidthAxis::WaveguidePitch => planes * area_per_neuron.sqrt() / width.value(),
    })
}

/// Achievable path length over a grid of (n_300, planes, width). Points that
/// cannot reach a degree above one are kept with `path_length = None`.
/// Rows come back ordered by n_300, then planes, then width.
pub fn sweep_path_length_vs_width(
    axis: WidthAxis,
    n_300: &[f64],
    planes: &[f64],
    widths: &[Length],
    wafer: &Wafer,
) -> Result<Vec<PathLengthPoint>> {
    if n_300.is_empty() || planes.is_empty() || widths.is_empty() {
        return Err(Error::domain("sweep grid", "every grid axis must be non-empty"));
    }
    let grid: Vec<(f64, f64, Length)> = n_300
        .iter()
        .flat_map(|&n| planes.iter().flat_map(move |&p| widths.iter().map(move |&w| (n, p, w))))
        .collect();
    grid.par_iter()
        .map(|&(n, p, w)| {
            let max_degree = max_supported_degree(axis, n, p, w, wafer)?;
            let path_length = if max_degree > 1.0 { Some(achievable_path_length(n, max_degree)?) } else { None };
            Ok(PathLengthPoint { axis, n_300: n, planes: p, width: w, max_degree, path_length })
        })
        .collect()
}

/// Required degree over a grid of network sizes and path lengths.
pub fn degree_sweep(n_total: &[f64], path_lengths: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    path_lengths
        .iter()
        .flat_map(|&l| n_total.iter().map(move |&n| (n, l)))
        .map(|(n, l)| Ok((n, l, required_degree(n, l)?)))
        .collect()
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn degree_examples() {
        assert_relative_eq!(required_degree(1e6, 3.0).unwrap(), 199.40, max_relative = 1e-4);
        assert_relative_eq!(required_degree(1e8, 3.0).unwrap(), 1258.1, max_relative = 1e-4);
        assert_relative_eq!(required_degree(1e6, 2.0).unwrap(), 6805.8, max_relative = 1e-4);
        assert!(required_degree(1e8, 2.0).unwrap() > 1e5);
        assert!(required_degree(1e6, 0.5).is_err());
        assert!(required_degree(1.0, 3.0).is_err());
    }

    #[test]
    fn path_length_examples() {
        assert_relative_eq!(achievable_path_length(1e6, 100.0).unwrap(), 3.3747, max_relative = 1e-4);
        assert_relative_eq!(achievable_path_length(1000.0, 20.0).unwrap(), 2.6132, max_relative = 1e-4);
        assert_relative_eq!(achievable_path_length(2000.0, 16.0).unwrap(), 3.0333, max_relative = 1e-4);
        let k = required_degree(1e6, 3.0).unwrap();
        assert_relative_eq!(achievable_path_length(1e6, k).unwrap(), 3.0, max_relative = 1e-9);
        assert!(achievable_path_length(1e6, 1.0).is_err());
    }

    #[test]
    fn area_examples() {
        assert_relative_eq!(photonic_area(1000.0, Length::new(2e-6), 1.0).unwrap().value(), 4e-6, max_relative = 1e-12);
        let a2 = photonic_area(1000.0, Length::new(2e-6), 2.0).unwrap();
        assert_relative_eq!(a2.value(), 1e-6, max_relative = 1e-12);
        assert_eq!(photonic_area(0.0, Length::new(2e-6), 1.0).unwrap().value(), 0.0);
        assert_relative_eq!(electronic_area(749.0, Length::new(10e-6), 1.0).unwrap().value(), 7.49e-8, max_relative = 1e-12);
        assert_relative_eq!(electronic_area(749.0, Length::new(10e-6), 2.0).unwrap().value(), 3.745e-8, max_relative = 1e-12);
        assert_relative_eq!(electronic_area(749.0, Length::new(30e-6), 1.0).unwrap().value(), 6.741e-7, max_relative = 1e-12);
    }

    #[test]
    fn planes_examples() {
        let wafer = Wafer::default();
        let r = required_planes(1e6, 2.5, DEFAULT_WAVEGUIDE_PITCH, Length::new(10e-6), &wafer).unwrap();
        assert_relative_eq!(r.p_e, 1.060, max_relative = 1e-3);
        assert_relative_eq!(r.p_p, 5.637, max_relative = 1e-3);
        let r30 = required_planes(1e6, 2.5, DEFAULT_WAVEGUIDE_PITCH, Length::new(30e-6), &wafer).unwrap();
        assert_relative_eq!(r30.p_e, 9.54, max_relative = 1e-3);
    }

    #[test]
    fn planes_saturate_the_wafer() {
        let wafer = Wafer { fill_factor: 0.8, ..Wafer::default() };
        let (n, w_wg, w_sy) = (3e5, Length::new(1.3e-6), Length::new(17e-6));
        let r = required_planes(n, 2.7, w_wg, w_sy, &wafer).unwrap();
        let budget = wafer.usable_area().unwrap().value() / n;
        let ap = photonic_area(r.degree, w_wg, r.p_p).unwrap().value();
        let ae = electronic_area(r.degree, w_sy, r.p_e).unwrap().value();
        assert_relative_eq!(ap, budget, max_relative = 1e-9);
        assert_relative_eq!(ae, budget, max_relative = 1e-9);
    }

    #[test]
    fn sweep_matches_single_plane_claim() {
        let wafer = Wafer::default();
        let pts = sweep_path_length_vs_width(WidthAxis::SynapseWidth, &[1e6], &[1.0], &[Length::new(10e-6)], &wafer)
            .unwrap();
        let l = pts[0].path_length.unwrap();
        assert!((l - 2.5).abs() < 0.05, "{l}");
    }

    #[test]
    fn sweep_flags_infeasible_points() {
        let wafer = Wafer::default();
        let pts = sweep_path_length_vs_width(WidthAxis::SynapseWidth, &[1e7], &[1.0], &[Length::new(1e-3)], &wafer)
            .unwrap();
        assert_eq!(pts.len(), 1);
        assert!(!pts[0].feasible());
        assert!(sweep_path_length_vs_width(WidthAxis::SynapseWidth, &[], &[1.0], &[Length::new(1e-6)], &wafer).is_err());
    }

    #[test]
    fn sweep_monotonicity() {
        let wafer = Wafer::default();
        let widths: Vec<Length> = log_grid(1e-6, 1e-4, 25).into_iter().map(Length::new).collect();
        for axis in [WidthAxis::SynapseWidth, WidthAxis::WaveguidePitch] {
            let pts = sweep_path_length_vs_width(axis, &[1e5, 1e6, 1e7], &[1.0, 10.0], &widths, &wafer).unwrap();
            for chunk in pts.chunks(widths.len()) {
                let ls: Vec<f64> = chunk.iter().map(|p| p.path_length.unwrap_or(f64::INFINITY)).collect();
                assert!(ls.windows(2).all(|w| w[1] >= w[0]));
            }
            for (one, ten) in pts.iter().filter(|p| p.planes == 1.0).zip(pts.iter().filter(|p| p.planes == 10.0)) {
                assert_eq!(one.width, ten.width);
                let (a, b) = (one.path_length.unwrap_or(f64::INFINITY), ten.path_length.unwrap_or(f64::INFINITY));
                assert!(b <= a);
            }
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1.0, 100.0, 3);
        assert_relative_eq!(g[0], 1.0);
        assert_relative_eq!(g[1], 10.0, max_relative = 1e-12);
        assert_relative_eq!(g[2], 100.0, max_relative = 1e-12);
    }
}

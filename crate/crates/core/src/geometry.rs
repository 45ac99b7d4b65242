//! Emitter layouts: rings, chains, dimers and the ring-plus-center laser
//! geometry, with reproducible positional disorder.
//!
//! All lengths are in units of the transition wavelength `λ0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

/// A point or direction in three dimensions.
pub type Vec3 = [f64; 3];

/// Which family of layout produced a geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutKind {
    Ring,
    Chain,
    Dimer,
    RingWithCenter,
}

/// Dipole orientation relative to a ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    /// All dipoles along `+z`, normal to the ring plane.
    #[default]
    Perpendicular,
    /// Dipoles tangent to the ring.
    Tangential,
    /// Dipoles pointing away from the ring center.
    Radial,
}

/// Emitter positions and dipole orientations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterGeometry {
    /// Positions in units of `λ0`.
    pub positions: Vec<Vec3>,
    /// Unit dipole axes, one per emitter.
    pub dipole_axes: Vec<Vec3>,
    pub layout_kind: LayoutKind,
    /// Number of ring (or chain) emitters, excluding a center emitter.
    pub count: usize,
    /// Nearest-neighbor separation `d` the layout was built with.
    pub separation: f64,
    /// Ring radius `r` for ring-like layouts.
    pub radius: Option<f64>,
}

impl EmitterGeometry {
    /// Total number of emitters including a center emitter, if any.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Index of the center (pump) emitter for `RingWithCenter` layouts.
    pub fn center_index(&self) -> Option<usize> {
        (self.layout_kind == LayoutKind::RingWithCenter).then_some(self.count)
    }

    /// The ring-only part of a `RingWithCenter` geometry (identity otherwise).
    pub fn ring_part(&self) -> EmitterGeometry {
        let mut g = self.clone();
        if g.layout_kind == LayoutKind::RingWithCenter {
            g.positions.truncate(g.count);
            g.dipole_axes.truncate(g.count);
            g.layout_kind = LayoutKind::Ring;
        }
        g
    }
}

/// Positional disorder: every coordinate on an enabled axis receives an
/// independent zero-mean normal displacement of standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    /// Standard deviation `ε` in units of `λ0`.
    pub sigma: f64,
    /// Number of independent realizations to average over.
    pub realizations: usize,
    pub seed: u64,
    /// Which Cartesian axes are displaced; all three by default.
    #[serde(default = "all_axes")]
    pub axes: [bool; 3],
}

fn all_axes() -> [bool; 3] {
    [true; 3]
}

impl DisorderSpec {
    pub fn new(sigma: f64, realizations: usize, seed: u64) -> Self {
        Self { sigma, realizations, seed, axes: all_axes() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::param("disorder.sigma", "must be finite and >= 0"));
        }
        if self.realizations == 0 {
            return Err(Error::param("disorder.realizations", "must be >= 1"));
        }
        Ok(())
    }
}

fn check_separation(d: f64) -> Result<()> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::param("d", format!("separation must be finite and > 0, got {d}")));
    }
    Ok(())
}

/// Ring radius for `n` emitters with nearest-neighbor separation `d`.
pub fn ring_radius(n: usize, d: f64) -> f64 {
    d / (2.0 * (PI / n as f64).sin())
}

fn ring_sites(n: usize, radius: f64, polarization: Polarization) -> (Vec<Vec3>, Vec<Vec3>) {
    (0..n)
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / n as f64;
            let (s, c) = phi.sin_cos();
            let axis = match polarization {
                Polarization::Perpendicular => [0.0, 0.0, 1.0],
                Polarization::Tangential => [-s, c, 0.0],
                Polarization::Radial => [c, s, 0.0],
            };
            ([radius * c, radius * s, 0.0], axis)
        })
        .unzip()
}

/// `n` emitters on a circle of radius `d / (2 sin(π/n))` in the xy-plane,
/// site `j` at azimuth `2πj/n`.
pub fn build_ring(n: usize, d: f64, polarization: Polarization) -> Result<EmitterGeometry> {
    if n < 2 {
        return Err(Error::param("N", "a ring needs at least 2 emitters"));
    }
    check_separation(d)?;
    let radius = ring_radius(n, d);
    let (positions, dipole_axes) = ring_sites(n, radius, polarization);
    Ok(EmitterGeometry {
        positions,
        dipole_axes,
        layout_kind: LayoutKind::Ring,
        count: n,
        separation: d,
        radius: Some(radius),
    })
}

/// Two emitters separated by `d` along `x`, dipoles along `+z`.
pub fn build_dimer(d: f64) -> Result<EmitterGeometry> {
    let mut g = build_ring(2, d, Polarization::Perpendicular)?;
    g.layout_kind = LayoutKind::Dimer;
    Ok(g)
}

/// `n` emitters along `x` with spacing `d`, dipoles along `+z`.
pub fn build_chain(n: usize, d: f64) -> Result<EmitterGeometry> {
    if n < 1 {
        return Err(Error::param("N", "a chain needs at least 1 emitter"));
    }
    check_separation(d)?;
    Ok(EmitterGeometry {
        positions: (0..n).map(|j| [j as f64 * d, 0.0, 0.0]).collect(),
        dipole_axes: vec![[0.0, 0.0, 1.0]; n],
        layout_kind: LayoutKind::Chain,
        count: n,
        separation: d,
        radius: None,
    })
}

/// A perpendicular ring plus one extra emitter (the pump) at the centroid.
///
/// The pump is the last emitter, index `n`.
pub fn build_ring_with_center(n: usize, d: f64) -> Result<EmitterGeometry> {
    let mut g = build_ring(n, d, Polarization::Perpendicular)?;
    g.positions.push([0.0; 3]);
    g.dipole_axes.push([0.0, 0.0, 1.0]);
    g.layout_kind = LayoutKind::RingWithCenter;
    Ok(g)
}

/// Same as [`build_ring_with_center`] but parameterized by the ring radius.
pub fn build_ring_with_center_radius(n: usize, radius: f64) -> Result<EmitterGeometry> {
    if n < 2 {
        return Err(Error::param("N", "a ring needs at least 2 emitters"));
    }
    check_separation(radius)?;
    build_ring_with_center(n, 2.0 * radius * (PI / n as f64).sin())
}

/// Random stream for one disorder realization: a ChaCha20 counter-based
/// generator keyed by `seed`, with the realization index selecting the stream.
pub fn realization_rng(seed: u64, realization_index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(realization_index as u64);
    rng
}

/// Displace every emitter by an independent normal 3-vector (per-axis
/// standard deviation `spec.sigma`, masked by `spec.axes`).
///
/// Deterministic in `(spec.seed, realization_index)`.
pub fn apply_disorder(
    geom: &EmitterGeometry,
    spec: &DisorderSpec,
    realization_index: usize,
) -> Result<EmitterGeometry> {
    spec.validate()?;
    if realization_index >= spec.realizations {
        return Err(Error::param(
            "realization_index",
            format!("{realization_index} >= realizations {}", spec.realizations),
        ));
    }
    let mut out = geom.clone();
    if spec.sigma == 0.0 {
        return Ok(out);
    }
    let mut rng = realization_rng(spec.seed, realization_index);
    for p in out.positions.iter_mut() {
        for (axis, x) in p.iter_mut().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            if spec.axes[axis] {
                *x += spec.sigma * z;
            }
        }
    }
    Ok(out)
}

pub(crate) fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: &Vec3, b: &Vec3) -> f64 {
        norm(&sub(a, b))
    }

    #[test]
    fn dimer_limit_of_ring() {
        let g = build_ring(2, 0.025, Polarization::Perpendicular).unwrap();
        assert!((dist(&g.positions[0], &g.positions[1]) - 0.025).abs() < 1e-15);
    }

    #[test]
    fn ring_of_eight_has_uniform_gaps() {
        let g = build_ring(8, 0.04, Polarization::Perpendicular).unwrap();
        let r = 0.04 / (2.0 * (PI / 8.0).sin());
        assert!((g.radius.unwrap() - r).abs() < 1e-15);
        for j in 0..8 {
            assert!((norm(&g.positions[j]) - r).abs() < 1e-12);
            assert!((dist(&g.positions[j], &g.positions[(j + 1) % 8]) - 0.04).abs() < 1e-12);
            assert_eq!(g.dipole_axes[j], [0.0, 0.0, 1.0]);
        }
    }

    #[test]
    fn four_sites_form_a_square() {
        let g = build_ring(4, 0.1, Polarization::Perpendicular).unwrap();
        let h = 0.1 / 2.0_f64.sqrt();
        let expected = [[h, 0.0], [0.0, h], [-h, 0.0], [0.0, -h]];
        for (p, e) in g.positions.iter().zip(expected) {
            assert!((p[0] - e[0]).abs() < 1e-15 && (p[1] - e[1]).abs() < 1e-15);
        }
        assert!((dist(&g.positions[0], &g.positions[2]) - 0.1 * 2.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn invalid_separation_rejected() {
        assert!(build_ring(4, -0.1, Polarization::Perpendicular).is_err());
        assert!(build_ring(4, f64::NAN, Polarization::Perpendicular).is_err());
        assert!(build_ring(4, 0.0, Polarization::Perpendicular).is_err());
        assert!(build_ring(1, 0.1, Polarization::Perpendicular).is_err());
    }

    #[test]
    fn in_plane_polarizations_are_unit_vectors() {
        for pol in [Polarization::Tangential, Polarization::Radial] {
            let g = build_ring(7, 0.1, pol).unwrap();
            for (a, p) in g.dipole_axes.iter().zip(&g.positions) {
                assert!((norm(a) - 1.0).abs() < 1e-12);
                let radial = dot(a, p) / norm(p);
                let expected = if pol == Polarization::Radial { 1.0 } else { 0.0 };
                assert!((radial - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn center_emitter_sits_at_centroid() {
        let g = build_ring_with_center(5, 0.06).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.count, 5);
        assert_eq!(g.center_index(), Some(5));
        assert_eq!(g.positions[5], [0.0; 3]);
        let r = build_ring_with_center_radius(5, 0.05).unwrap();
        assert!((r.radius.unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(g.ring_part().len(), 5);
    }

    #[test]
    fn zero_sigma_is_identity() {
        let g = build_ring(6, 0.1, Polarization::Perpendicular).unwrap();
        let spec = DisorderSpec::new(0.0, 3, 7);
        assert_eq!(apply_disorder(&g, &spec, 2).unwrap(), g);
    }

    #[test]
    fn disorder_is_deterministic_per_realization() {
        let g = build_ring(6, 0.1, Polarization::Perpendicular).unwrap();
        let spec = DisorderSpec::new(0.01, 4, 42);
        let a = apply_disorder(&g, &spec, 1).unwrap();
        let b = apply_disorder(&g, &spec, 1).unwrap();
        let c = apply_disorder(&g, &spec, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(apply_disorder(&g, &spec, 4).is_err());
    }

    #[test]
    fn disorder_statistics_match_sigma() {
        let g = build_chain(1, 1.0).unwrap();
        let spec = DisorderSpec::new(0.01, 10_000, 2024);
        let mut sums = [0.0; 3];
        let mut sq = [0.0; 3];
        for i in 0..spec.realizations {
            let p = apply_disorder(&g, &spec, i).unwrap().positions[0];
            for a in 0..3 {
                sums[a] += p[a] - g.positions[0][a];
                sq[a] += (p[a] - g.positions[0][a]).powi(2);
            }
        }
        let n = spec.realizations as f64;
        for a in 0..3 {
            let mean = sums[a] / n;
            let sd = (sq[a] / n - mean * mean).sqrt();
            assert!((sd / 0.01 - 1.0).abs() < 0.05, "axis {a}: sd = {sd}");
        }
    }

    #[test]
    fn axis_mask_freezes_masked_axes() {
        let g = build_ring(5, 0.1, Polarization::Perpendicular).unwrap();
        let spec = DisorderSpec { axes: [true, true, false], ..DisorderSpec::new(0.02, 1, 3) };
        let out = apply_disorder(&g, &spec, 0).unwrap();
        assert!(out.positions.iter().all(|p| p[2] == 0.0));
        assert_ne!(out.positions, g.positions);
    }
}

//! Predicted edge counts for a power-law network, by degree pair and by
//! counting interval.
//!
//! With `N_k ≈ A·k^-γ` and followers drawn without degree bias, the number of
//! edges whose in-vertex has in-degree `k` and whose ratio is `R` is
//! `(A²/N)·k^(1−2γ)·R^γ`. Summed over logarithmic intervals this gives four
//! power-law sections:
//!
//! | section      | regime | exponent | coefficient (× A²/N)              |
//! |--------------|--------|----------|-----------------------------------|
//! | `FarBelow`   | R ≪ 1  | γ − 1    | (1 − α^(1−γ)) / ((γ−2)(2γ−3))     |
//! | `NearBelow`  | R ≲ 1  | γ        | 1 / (2γ − 2)                      |
//! | `NearAbove`  | R ≳ 1  | 1 − γ    | 1 / (2γ − 2)                      |
//! | `FarAbove`   | R ≫ 1  | 2 − γ    | (1 − α^(2−γ)) / ((γ−2)(2γ−3))     |
//!
//! Near sections describe the peaks at integer ratios (above one) and at
//! reciprocals of integers (below one); far sections describe whole
//! intervals, stated at the interval edge facing `R = 1`. Both far
//! coefficients are positive only for `γ > 2`; on `(1.5, 2)` the far-below
//! one is negative and below 1.5 the far-above one is.

mod estimate;
mod fit;

pub use estimate::{estimate_gamma, estimate_scale_a, hurwitz_zeta, scale_from_counts, GammaEstimate, GammaMethod};
pub use fit::{
    compare_fits, compare_profiles, fit_section_slopes, BinnedSeries, BinResidual,
    ComparisonReport, FitBoundaries, SectionComparison, SectionFit, Verdict,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::binning::Alpha;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams {
    pub scale_a: f64,
    pub gamma: f64,
    pub n_vertices: u64,
    pub alpha: Alpha,
}

impl TheoryParams {
    pub fn new(scale_a: f64, gamma: f64, n_vertices: u64, alpha: Alpha) -> Result<Self> {
        let p = TheoryParams {
            scale_a,
            gamma,
            n_vertices,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale_a.is_finite() && self.scale_a > 0.0) {
            return Err(Error::Parameter(format!("scale A must be > 0, got {}", self.scale_a)));
        }
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return Err(Error::Parameter(format!("gamma must be > 1, got {}", self.gamma)));
        }
        if self.n_vertices < 2 {
            return Err(Error::Parameter(format!(
                "need N >= 2, got {}",
                self.n_vertices
            )));
        }
        Ok(())
    }

    /// `A² / N`
    pub fn edge_scale(&self) -> f64 {
        self.scale_a * self.scale_a / self.n_vertices as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Section {
    FarBelow,
    NearBelow,
    NearAbove,
    FarAbove,
}

impl Section {
    pub const ALL: [Section; 4] = [
        Section::FarBelow,
        Section::NearBelow,
        Section::NearAbove,
        Section::FarAbove,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Section::FarBelow => "FAR_BELOW",
            Section::NearBelow => "NEAR_BELOW",
            Section::NearAbove => "NEAR_ABOVE",
            Section::FarAbove => "FAR_ABOVE",
        }
    }

    pub fn exponent(self, gamma: f64) -> f64 {
        match self {
            Section::FarBelow => gamma - 1.0,
            Section::NearBelow => gamma,
            Section::NearAbove => 1.0 - gamma,
            Section::FarAbove => 2.0 - gamma,
        }
    }

    pub fn is_near(self) -> bool {
        matches!(self, Section::NearBelow | Section::NearAbove)
    }

    pub fn is_above(self) -> bool {
        matches!(self, Section::NearAbove | Section::FarAbove)
    }

    /// Multiplier of `R^exponent`, including `A²/N`.
    pub fn coefficient(self, params: &TheoryParams) -> Result<f64> {
        let g = params.gamma;
        let near = |g: f64| -> Result<f64> {
            if (2.0 * g - 2.0).abs() < 1e-12 {
                return Err(Error::Singular(
                    "near-section denominator (2γ − 2) vanishes at γ = 1".into(),
                ));
            }
            Ok(1.0 / (2.0 * g - 2.0))
        };
        let far_denominator = |g: f64| -> Result<f64> {
            if (g - 2.0).abs() < 1e-12 {
                return Err(Error::Singular(
                    "far-section denominator (γ − 2)(2γ − 3) vanishes: factor (γ − 2) is zero at γ = 2"
                        .into(),
                ));
            }
            if (2.0 * g - 3.0).abs() < 1e-12 {
                return Err(Error::Singular(
                    "far-section denominator (γ − 2)(2γ − 3) vanishes: factor (2γ − 3) is zero at γ = 1.5"
                        .into(),
                ));
            }
            Ok((g - 2.0) * (2.0 * g - 3.0))
        };
        let a = params.alpha.value();
        let c = match self {
            Section::NearBelow | Section::NearAbove => near(g)?,
            Section::FarBelow => (1.0 - a.powf(1.0 - g)) / far_denominator(g)?,
            Section::FarAbove => (1.0 - a.powf(2.0 - g)) / far_denominator(g)?,
        };
        Ok(params.edge_scale() * c)
    }

    pub fn value_at(self, params: &TheoryParams, r: f64) -> Result<f64> {
        Ok(self.coefficient(params)? * r.powf(self.exponent(params.gamma)))
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Expected number of edges whose in-vertex has in-degree `k` and whose
/// balance ratio is `R` (so the out-vertex has in-degree `k / R`).
pub fn lemma1_count(params: &TheoryParams, k: u64, r: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("in-degree k must be >= 1".into()));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("balance ratio must be > 0, got {r}")));
    }
    let g = params.gamma;
    Ok(params.edge_scale() * (k as f64).powf(1.0 - 2.0 * g) * r.powf(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionLaw {
    pub section: Section,
    pub exponent: f64,
    pub coefficient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub section: Section,
    pub r: f64,
    pub count: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedBin {
    pub s: i32,
    pub section: Section,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoreticalProfile {
    pub params: TheoryParams,
    pub boundaries: FitBoundaries,
    pub sections: [SectionLaw; 4],
    /// Far sections at interval anchors, near sections at peak abscissae,
    /// over `[1/(N−1), N−1]`.
    pub points: Vec<TheoryPoint>,
    /// Predicted count per counting interval.
    pub bins: Vec<PredictedBin>,
}

impl TheoreticalProfile {
    pub fn law(&self, section: Section) -> &SectionLaw {
        &self.sections[Section::ALL.iter().position(|&s| s == section).unwrap()]
    }
}

/// Which section a counting interval belongs to: far when its anchor lies
/// outside `[r_lo, r_hi]`.
pub fn section_of_bin(alpha: &Alpha, s: i32, bounds: &FitBoundaries) -> Section {
    let anchor = alpha.anchor(s);
    let slack = 1e-9;
    match (s >= 0, anchor > bounds.r_hi * (1.0 + slack), anchor < bounds.r_lo * (1.0 - slack)) {
        (true, true, _) => Section::FarAbove,
        (true, false, _) => Section::NearAbove,
        (false, _, true) => Section::FarBelow,
        (false, _, false) => Section::NearBelow,
    }
}

/// Peak abscissae inside interval `s`: integers for `s ≥ 0`, reciprocals of
/// integers for `s < 0`. `limit` bounds the integers considered.
pub fn peak_abscissae(alpha: &Alpha, s: i32, limit: u64) -> Vec<f64> {
    let lo = alpha.lower_edge(s);
    let hi = alpha.upper_edge(s);
    let mut out = Vec::new();
    if s >= 0 {
        let first = lo.floor().max(1.0) as u64;
        let last = (hi.ceil() as u64).min(limit);
        for j in first..=last {
            if alpha.bin_of_ratio(j, 1) == s {
                out.push(j as f64);
            }
        }
    } else {
        let first = (1.0 / hi).floor().max(1.0) as u64;
        let last = ((1.0 / lo).ceil() as u64).min(limit);
        for j in first..=last {
            if alpha.bin_of_ratio(1, j) == s {
                out.push(1.0 / j as f64);
            }
        }
    }
    out
}

pub fn theorem1_profile(params: &TheoryParams) -> Result<TheoreticalProfile> {
    theorem1_profile_with(params, FitBoundaries::default())
}

pub fn theorem1_profile_with(
    params: &TheoryParams,
    boundaries: FitBoundaries,
) -> Result<TheoreticalProfile> {
    params.validate()?;
    boundaries.validate()?;
    let mut sections = [SectionLaw {
        section: Section::FarBelow,
        exponent: 0.0,
        coefficient: 0.0,
    }; 4];
    for (slot, &section) in sections.iter_mut().zip(Section::ALL.iter()) {
        *slot = SectionLaw {
            section,
            exponent: section.exponent(params.gamma),
            coefficient: section.coefficient(params)?,
        };
    }
    let law = |s: Section| sections[Section::ALL.iter().position(|&x| x == s).unwrap()];

    let alpha = params.alpha;
    let r_max = (params.n_vertices - 1).max(1);
    let s_max = alpha.bin_of_ratio(r_max, 1);
    let s_min = alpha.bin_of_ratio(1, r_max);

    let mut bins = Vec::new();
    let mut points = Vec::new();
    for s in s_min..=s_max {
        let section = section_of_bin(&alpha, s, &boundaries);
        let l = law(section);
        let predicted = if section.is_near() {
            peak_abscissae(&alpha, s, r_max)
                .into_iter()
                .map(|r| {
                    let count = l.coefficient * r.powf(l.exponent);
                    let point_section = if r < 1.0 { Section::NearBelow } else { Section::NearAbove };
                    points.push(TheoryPoint {
                        section: point_section,
                        r,
                        count,
                    });
                    count
                })
                .sum()
        } else {
            let r = alpha.anchor(s);
            let count = l.coefficient * r.powf(l.exponent);
            points.push(TheoryPoint { section, r, count });
            count
        };
        bins.push(PredictedBin {
            s,
            section,
            predicted,
        });
    }
    points.sort_by(|a, b| a.r.total_cmp(&b.r));

    Ok(TheoreticalProfile {
        params: *params,
        boundaries,
        sections,
        points,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, gamma: f64, n: u64) -> TheoryParams {
        TheoryParams::new(a, gamma, n, Alpha::default()).unwrap()
    }

    #[test]
    fn lemma_examples() {
        let p = params(1000.0, 2.0, 10_000);
        let v = lemma1_count(&p, 10, 2.0).unwrap();
        assert!((v - 0.4).abs() < 1e-12, "{v}");
        let p = params(321.0, 2.7, 5000);
        assert!((lemma1_count(&p, 1, 1.0).unwrap() - p.edge_scale()).abs() < 1e-12);
        assert!(matches!(lemma1_count(&p, 0, 1.0), Err(Error::Domain(_))));
        assert!(lemma1_count(&p, 1, 0.0).is_err());
    }

    #[test]
    fn exponents_are_linear_in_gamma() {
        let p = theorem1_profile(&params(1e4, 2.3, 100_000)).unwrap();
        let got: Vec<f64> = p.sections.iter().map(|l| l.exponent).collect();
        let want = [1.3, 2.3, -1.3, -0.3];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn near_sections_meet_at_one() {
        for gamma in [1.2, 1.9, 2.3, 2.7, 3.5] {
            let p = params(5000.0, gamma, 50_000);
            let below = Section::NearBelow.value_at(&p, 1.0).unwrap();
            let above = Section::NearAbove.value_at(&p, 1.0).unwrap();
            assert_eq!(below, above);
            assert!((below - p.edge_scale() / (2.0 * gamma - 2.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn gamma_two_is_singular_for_far_sections_only() {
        let p = params(1000.0, 2.0, 10_000);
        assert_eq!(Section::NearAbove.value_at(&p, 1.0).unwrap(), 50.0);
        assert_eq!(Section::NearBelow.value_at(&p, 1.0).unwrap(), 50.0);
        let err = theorem1_profile(&p).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
        assert!(err.to_string().contains("(γ − 2)"), "{err}");
        let err = theorem1_profile(&params(1000.0, 1.5, 10_000)).unwrap_err();
        assert!(err.to_string().contains("(2γ − 3)"), "{err}");
        assert!(TheoryParams::new(1000.0, 1.0, 100, Alpha::default()).is_err());
    }

    #[test]
    fn far_above_sign_follows_gamma_minus_two() {
        for gamma in [1.3, 1.7, 1.9, 2.1, 2.5, 3.0] {
            let e = Section::FarAbove.exponent(gamma);
            assert_eq!(e < 0.0, gamma > 2.0);
        }
        let p = theorem1_profile(&params(1e4, 1.9, 100_000)).unwrap();
        assert!((p.law(Section::FarAbove).exponent - 0.1).abs() < 1e-12);
        // rising tail: later far-above intervals predict more edges
        let far: Vec<_> = p.bins.iter().filter(|b| b.section == Section::FarAbove).collect();
        assert!(far.windows(2).all(|w| w[1].predicted > w[0].predicted));
    }

    #[test]
    fn coefficients_are_positive_away_from_singularities() {
        for gamma in [2.1, 2.3, 2.9, 4.0] {
            let p = params(100.0, gamma, 1000);
            for s in Section::ALL {
                assert!(s.coefficient(&p).unwrap() > 0.0, "{s} at {gamma}");
            }
        }
        // (γ − 2) flips the far-below sign on (1.5, 2); (2γ − 3) flips far-above below 1.5
        let p = params(100.0, 1.7, 1000);
        assert!(Section::FarBelow.coefficient(&p).unwrap() < 0.0);
        assert!(Section::FarAbove.coefficient(&p).unwrap() > 0.0);
        let p = params(100.0, 1.2, 1000);
        assert!(Section::FarAbove.coefficient(&p).unwrap() < 0.0);
    }

    #[test]
    fn peaks_in_default_intervals() {
        let a = Alpha::default();
        assert_eq!(peak_abscissae(&a, 0, 100), vec![1.0]);
        assert!(peak_abscissae(&a, 1, 100).is_empty());
        assert_eq!(peak_abscissae(&a, 3, 100), vec![2.0]);
        assert_eq!(peak_abscissae(&a, 6, 100), vec![4.0, 5.0]);
        assert_eq!(peak_abscissae(&a, 10, 100), vec![10.0, 11.0, 12.0]);
        assert_eq!(peak_abscissae(&a, -4, 100), vec![0.5]);
        assert_eq!(peak_abscissae(&a, -10, 100), vec![1.0 / 8.0, 1.0 / 9.0, 1.0 / 10.0]);
    }

    #[test]
    fn grid_spans_ratio_range() {
        let p = theorem1_profile(&params(700.0, 2.3, 1000)).unwrap();
        let first = p.points.first().unwrap().r;
        let last = p.points.last().unwrap().r;
        assert!(first >= 1.0 / 999.0 * (1.0 - 1e-12));
        assert!(last <= 999.0 * (1.0 + 1e-12));
        assert!(first < 1.0 / 999.0 * Alpha::default().value());
        assert_eq!(p.bins.first().unwrap().section, Section::FarBelow);
        assert_eq!(p.bins.last().unwrap().section, Section::FarAbove);
    }
}

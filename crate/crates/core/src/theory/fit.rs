//! Section slopes of a binned profile and theory-versus-measurement reports.

use serde::{Deserialize, Serialize};

use super::estimate::least_squares;
use super::{peak_abscissae, section_of_bin, Section, TheoreticalProfile};
use crate::binning::Alpha;
use crate::error::{Error, Result};
use crate::metrics::BalanceProfile;

/// Ratios separating the near sections from the far ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitBoundaries {
    pub r_lo: f64,
    pub r_hi: f64,
}

impl Default for FitBoundaries {
    fn default() -> Self {
        FitBoundaries { r_lo: 0.1, r_hi: 10.0 }
    }
}

impl FitBoundaries {
    pub fn validate(&self) -> Result<()> {
        let ok = self.r_lo.is_finite()
            && self.r_hi.is_finite()
            && self.r_lo > 0.0
            && self.r_lo < 1.0
            && self.r_hi > 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "fit boundaries need 0 < r_lo < 1 < r_hi, got ({}, {})",
                self.r_lo, self.r_hi
            )))
        }
    }
}

/// Anything with a count per counting interval.
pub trait BinnedSeries {
    fn alpha(&self) -> Alpha;
    /// `(s, count)` pairs in ascending `s`; absent bins count zero.
    fn values(&self) -> Vec<(i32, f64)>;
}

impl BinnedSeries for BalanceProfile {
    fn alpha(&self) -> Alpha {
        self.alpha
    }

    fn values(&self) -> Vec<(i32, f64)> {
        self.bins.iter().map(|b| (b.s, b.count as f64)).collect()
    }
}

impl BinnedSeries for TheoreticalProfile {
    fn alpha(&self) -> Alpha {
        self.params.alpha
    }

    fn values(&self) -> Vec<(i32, f64)> {
        self.bins.iter().map(|b| (b.s, b.predicted)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionFit {
    pub section: Section,
    /// `None` when fewer than three usable bins.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub slope_std_error: Option<f64>,
    /// Smallest and largest abscissa used.
    pub r_range: Option<(f64, f64)>,
    pub n_points: usize,
}

impl SectionFit {
    pub fn is_fittable(&self) -> bool {
        self.slope.is_some()
    }
}

const MIN_POINTS: usize = 3;

/// Abscissa a bin contributes to the fit of its section, if any.
///
/// Far bins use their anchor. Near bins qualify only when they hold exactly
/// one peak abscissa other than `R = 1`; that abscissa is used.
fn fit_abscissa(alpha: &Alpha, s: i32, section: Section) -> Option<f64> {
    if !section.is_near() {
        return Some(alpha.anchor(s));
    }
    if s == 0 {
        return None;
    }
    match peak_abscissae(alpha, s, u64::MAX).as_slice() {
        [r] => Some(*r),
        _ => None,
    }
}

pub fn fit_section_slopes<S: BinnedSeries + ?Sized>(
    series: &S,
    bounds: &FitBoundaries,
) -> Result<[SectionFit; 4]> {
    bounds.validate()?;
    let alpha = series.alpha();
    let mut xs: [Vec<f64>; 4] = Default::default();
    let mut ys: [Vec<f64>; 4] = Default::default();
    for (s, count) in series.values() {
        // Skips zero, negative and NaN counts alike.
        if count.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            continue;
        }
        let section = section_of_bin(&alpha, s, bounds);
        if let Some(r) = fit_abscissa(&alpha, s, section) {
            let i = index(section);
            xs[i].push(r.ln());
            ys[i].push(count.ln());
        }
    }
    Ok(Section::ALL.map(|section| {
        let i = index(section);
        let n = xs[i].len();
        let line = if n >= MIN_POINTS {
            least_squares(&xs[i], &ys[i])
        } else {
            None
        };
        let range = xs[i].iter().fold(None, |acc: Option<(f64, f64)>, &x| {
            let r = x.exp();
            Some(acc.map_or((r, r), |(lo, hi)| (lo.min(r), hi.max(r))))
        });
        SectionFit {
            section,
            slope: line.map(|l| l.0),
            intercept: line.map(|l| l.1),
            slope_std_error: line.map(|l| l.2),
            r_range: range,
            n_points: n,
        }
    }))
}

fn index(section: Section) -> usize {
    Section::ALL.iter().position(|&s| s == section).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Within,
    Outside,
    Unfittable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionComparison {
    pub label: Section,
    /// Reference slope: the closed-form exponent, or a fitted slope when the
    /// reference is itself a measured profile.
    pub exponent: Option<f64>,
    pub coefficient: Option<f64>,
    pub fitted_slope: Option<f64>,
    /// `fitted_slope − exponent`.
    pub delta: Option<f64>,
    /// Fitted intercept minus `ln coefficient`. Reported, never gated.
    pub intercept_delta: Option<f64>,
    pub n_points: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinResidual {
    pub s: i32,
    pub empirical: f64,
    pub predicted: f64,
    /// `ln empirical − ln predicted`.
    pub log_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub alpha: Alpha,
    pub boundaries: FitBoundaries,
    pub tolerance: f64,
    pub sections: Vec<SectionComparison>,
    pub residuals: Vec<BinResidual>,
}

impl ComparisonReport {
    pub fn all_within(&self) -> bool {
        self.sections.iter().all(|s| s.verdict == Verdict::Within)
    }

    pub fn section(&self, section: Section) -> &SectionComparison {
        &self.sections[index(section)]
    }
}

struct Reference {
    exponent: Option<f64>,
    coefficient: Option<f64>,
    ln_intercept: Option<f64>,
}

fn check_alpha(a: &Alpha, b: &Alpha) -> Result<()> {
    if a.matches(b) {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "interval parameter mismatch: {a} vs {b}"
        )))
    }
}

/// Empirical profile against closed-form sections.
pub fn compare_profiles<S: BinnedSeries + ?Sized>(
    empirical: &S,
    theory: &TheoreticalProfile,
    tolerance: f64,
) -> Result<ComparisonReport> {
    check_alpha(&empirical.alpha(), &theory.params.alpha)?;
    let refs = Section::ALL.map(|s| {
        let law = theory.law(s);
        Reference {
            exponent: Some(law.exponent),
            coefficient: Some(law.coefficient),
            ln_intercept: (law.coefficient > 0.0).then(|| law.coefficient.ln()),
        }
    });
    build_report(empirical, &theory.values(), refs, theory.boundaries, tolerance)
}

/// Empirical profile against the fitted sections of another binned series.
pub fn compare_fits<S: BinnedSeries + ?Sized, T: BinnedSeries + ?Sized>(
    empirical: &S,
    reference: &T,
    bounds: &FitBoundaries,
    tolerance: f64,
) -> Result<ComparisonReport> {
    check_alpha(&empirical.alpha(), &reference.alpha())?;
    let fits = fit_section_slopes(reference, bounds)?;
    let refs = fits.map(|f| Reference {
        exponent: f.slope,
        coefficient: f.intercept.map(f64::exp),
        ln_intercept: f.intercept,
    });
    build_report(empirical, &reference.values(), refs, *bounds, tolerance)
}

fn build_report<S: BinnedSeries + ?Sized>(
    empirical: &S,
    predicted: &[(i32, f64)],
    refs: [Reference; 4],
    bounds: FitBoundaries,
    tolerance: f64,
) -> Result<ComparisonReport> {
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(Error::Parameter(format!("tolerance must be >= 0, got {tolerance}")));
    }
    let fits = fit_section_slopes(empirical, &bounds)?;
    let sections = Section::ALL
        .iter()
        .zip(fits.iter().zip(refs.iter()))
        .map(|(&label, (fit, r))| {
            let delta = fit.slope.zip(r.exponent).map(|(a, b)| a - b);
            let verdict = match delta {
                None => Verdict::Unfittable,
                Some(d) if d.abs() <= tolerance => Verdict::Within,
                Some(_) => Verdict::Outside,
            };
            SectionComparison {
                label,
                exponent: r.exponent,
                coefficient: r.coefficient,
                fitted_slope: fit.slope,
                delta,
                intercept_delta: fit.intercept.zip(r.ln_intercept).map(|(a, b)| a - b),
                n_points: fit.n_points,
                verdict,
            }
        })
        .collect();

    let theory: std::collections::BTreeMap<i32, f64> = predicted.iter().copied().collect();
    let residuals = empirical
        .values()
        .into_iter()
        .filter_map(|(s, e)| {
            let p = *theory.get(&s)?;
            (e > 0.0 && p > 0.0).then(|| BinResidual {
                s,
                empirical: e,
                predicted: p,
                log_residual: e.ln() - p.ln(),
            })
        })
        .collect();

    Ok(ComparisonReport {
        alpha: empirical.alpha(),
        boundaries: bounds,
        tolerance,
        sections,
        residuals,
    })
}

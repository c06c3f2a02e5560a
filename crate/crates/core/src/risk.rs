//! Patient profiles and the environmental risk score derived from them.
//!
//! Each environmental factor is normalized to a risk in `[0, 1]` by a fixed
//! piecewise-linear rule ([`factor_risk`]). A patient profile induces one
//! nonnegative weight per factor ([`derive_weights`]); the per-edge risk
//! score ([`h_env`]) is the weighted sum over the factors a
//! [`HeuristicVariant`] selects.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{lookup_env, EnvError, EnvTimeline, TrafficSample, WeatherSample};
use crate::graph::Edge;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsthmaType {
    Allergic,
    NonAllergic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StressLevel {
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmokeExposure {
    None,
    Secondhand,
    Smoker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObesityLevel {
    None,
    Moderate,
    High,
}

/// Carried for completeness; no weight depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
    Other,
}

/// Asthma-relevant patient attributes. Every field is required on ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatientProfile {
    pub asthma_type: AsthmaType,
    pub stress_level: StressLevel,
    pub smoke_exposure: SmokeExposure,
    pub obesity_level: ObesityLevel,
    pub gender: Gender,
    pub family_history: bool,
    pub plays_sports: bool,
}

impl PatientProfile {
    /// Profile with no modifiers active.
    pub fn baseline() -> Self {
        Self {
            asthma_type: AsthmaType::NonAllergic,
            stress_level: StressLevel::Low,
            smoke_exposure: SmokeExposure::None,
            obesity_level: ObesityLevel::None,
            gender: Gender::Other,
            family_history: false,
            plays_sports: false,
        }
    }

    /// All 648 distinct profiles.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::with_capacity(648);
        for asthma_type in [AsthmaType::Allergic, AsthmaType::NonAllergic] {
            for stress_level in [StressLevel::Low, StressLevel::Medium, StressLevel::High] {
                for smoke_exposure in [SmokeExposure::None, SmokeExposure::Secondhand, SmokeExposure::Smoker] {
                    for obesity_level in [ObesityLevel::None, ObesityLevel::Moderate, ObesityLevel::High] {
                        for gender in [Gender::Female, Gender::Male, Gender::Other] {
                            for family_history in [false, true] {
                                for plays_sports in [false, true] {
                                    out.push(Self {
                                        asthma_type,
                                        stress_level,
                                        smoke_exposure,
                                        obesity_level,
                                        gender,
                                        family_history,
                                        plays_sports,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Aqi,
    Pollen,
    Temperature,
    Humidity,
    Traffic,
    Rainfall,
    Wind,
    Uv,
    Pressure,
}

impl Factor {
    pub const ALL: [Factor; 9] = [
        Factor::Aqi,
        Factor::Pollen,
        Factor::Temperature,
        Factor::Humidity,
        Factor::Traffic,
        Factor::Rainfall,
        Factor::Wind,
        Factor::Uv,
        Factor::Pressure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Factor::Aqi => "aqi",
            Factor::Pollen => "pollen",
            Factor::Temperature => "temperature",
            Factor::Humidity => "humidity",
            Factor::Traffic => "traffic",
            Factor::Rainfall => "rainfall",
            Factor::Wind => "wind",
            Factor::Uv => "uv",
            Factor::Pressure => "pressure",
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("unknown factor {0:?}")]
pub struct UnknownFactor(pub String);

impl FromStr for Factor {
    type Err = UnknownFactor;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Factor::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| UnknownFactor(s.to_owned()))
    }
}

/// One `f64` per [`Factor`], serialized as a map keyed by factor name.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorValues {
    pub aqi: f64,
    pub pollen: f64,
    pub temperature: f64,
    pub humidity: f64,
    pub traffic: f64,
    pub rainfall: f64,
    pub wind: f64,
    pub uv: f64,
    pub pressure: f64,
}

impl FactorValues {
    pub fn iter(&self) -> impl Iterator<Item = (Factor, f64)> + '_ {
        Factor::ALL.into_iter().map(move |f| (f, self[f]))
    }

    pub fn sum(&self) -> f64 {
        self.iter().map(|(_, v)| v).sum()
    }
}

impl Index<Factor> for FactorValues {
    type Output = f64;

    fn index(&self, f: Factor) -> &f64 {
        match f {
            Factor::Aqi => &self.aqi,
            Factor::Pollen => &self.pollen,
            Factor::Temperature => &self.temperature,
            Factor::Humidity => &self.humidity,
            Factor::Traffic => &self.traffic,
            Factor::Rainfall => &self.rainfall,
            Factor::Wind => &self.wind,
            Factor::Uv => &self.uv,
            Factor::Pressure => &self.pressure,
        }
    }
}

impl IndexMut<Factor> for FactorValues {
    fn index_mut(&mut self, f: Factor) -> &mut f64 {
        match f {
            Factor::Aqi => &mut self.aqi,
            Factor::Pollen => &mut self.pollen,
            Factor::Temperature => &mut self.temperature,
            Factor::Humidity => &mut self.humidity,
            Factor::Traffic => &mut self.traffic,
            Factor::Rainfall => &mut self.rainfall,
            Factor::Wind => &mut self.wind,
            Factor::Uv => &mut self.uv,
            Factor::Pressure => &mut self.pressure,
        }
    }
}

/// Normalized per-factor weights; nonnegative and summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SensitivityWeights(FactorValues);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightsError {
    #[error("weight for {0} must be finite and >= 0")]
    Invalid(Factor),
    #[error("weights sum to zero")]
    ZeroSum,
}

impl SensitivityWeights {
    /// Normalizes raw nonnegative weights to sum to one.
    pub fn normalized(raw: FactorValues) -> Result<Self, WeightsError> {
        if let Some((f, _)) = raw.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(WeightsError::Invalid(f));
        }
        let sum = raw.sum();
        if sum <= 0.0 {
            return Err(WeightsError::ZeroSum);
        }
        let mut out = raw;
        for f in Factor::ALL {
            out[f] /= sum;
        }
        Ok(Self(out))
    }

    /// All weight on one factor.
    pub fn only(factor: Factor) -> Self {
        let mut v = FactorValues::default();
        v[factor] = 1.0;
        Self(v)
    }

    pub fn get(&self, f: Factor) -> f64 {
        self.0[f]
    }

    pub fn values(&self) -> &FactorValues {
        &self.0
    }
}

/// Base weights and profile modifiers used by [`derive_weights_with`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightConfig {
    pub base: FactorValues,
    pub allergic_pollen: f64,
    pub secondhand_aqi: f64,
    pub smoker_aqi: f64,
    pub stress_medium_traffic: f64,
    pub stress_high_traffic: f64,
    pub sports_temperature: f64,
    pub obesity_moderate_humidity: f64,
    pub obesity_high_humidity: f64,
    /// Applied to every nonzero weight, so it cancels under normalization.
    pub family_history_all: f64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self {
            base: FactorValues {
                aqi: 0.30,
                pollen: 0.15,
                temperature: 0.15,
                humidity: 0.10,
                traffic: 0.20,
                rainfall: 0.05,
                wind: 0.05,
                uv: 0.0,
                pressure: 0.0,
            },
            allergic_pollen: 2.0,
            secondhand_aqi: 1.25,
            smoker_aqi: 1.5,
            stress_medium_traffic: 1.2,
            stress_high_traffic: 1.5,
            sports_temperature: 1.5,
            obesity_moderate_humidity: 1.25,
            obesity_high_humidity: 1.5,
            family_history_all: 1.2,
        }
    }
}

/// Sensitivity weights for `profile` under the default modifier table.
pub fn derive_weights(profile: &PatientProfile) -> SensitivityWeights {
    derive_weights_with(profile, &WeightConfig::default()).expect("default weight table is valid")
}

pub fn derive_weights_with(profile: &PatientProfile, cfg: &WeightConfig) -> Result<SensitivityWeights, WeightsError> {
    let mut w = cfg.base;
    if profile.asthma_type == AsthmaType::Allergic {
        w.pollen *= cfg.allergic_pollen;
    }
    match profile.smoke_exposure {
        SmokeExposure::None => {}
        SmokeExposure::Secondhand => w.aqi *= cfg.secondhand_aqi,
        SmokeExposure::Smoker => w.aqi *= cfg.smoker_aqi,
    }
    match profile.stress_level {
        StressLevel::Low => {}
        StressLevel::Medium => w.traffic *= cfg.stress_medium_traffic,
        StressLevel::High => w.traffic *= cfg.stress_high_traffic,
    }
    if profile.plays_sports {
        w.temperature *= cfg.sports_temperature;
    }
    match profile.obesity_level {
        ObesityLevel::None => {}
        ObesityLevel::Moderate => w.humidity *= cfg.obesity_moderate_humidity,
        ObesityLevel::High => w.humidity *= cfg.obesity_high_humidity,
    }
    if profile.family_history {
        for f in Factor::ALL {
            if w[f] != 0.0 {
                w[f] *= cfg.family_history_all;
            }
        }
    }
    SensitivityWeights::normalized(w)
}

const AQI_BREAKPOINTS: [(f64, f64); 6] =
    [(0.0, 0.0), (50.0, 0.2), (100.0, 0.4), (150.0, 0.7), (200.0, 0.9), (300.0, 1.0)];

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let (first, last) = (points[0], points[points.len() - 1]);
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = points.partition_point(|&(px, _)| px <= x);
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

fn ramp(x: f64, zero_at: f64, one_at: f64) -> f64 {
    ((x - zero_at) / (one_at - zero_at)).clamp(0.0, 1.0)
}

/// Normalized risk in `[0, 1]` contributed by one factor.
pub fn factor_risk(factor: Factor, weather: &WeatherSample, traffic: &TrafficSample) -> f64 {
    match factor {
        Factor::Aqi => interpolate(&AQI_BREAKPOINTS, weather.aqi),
        Factor::Pollen => (weather.pollen_level / 5.0).clamp(0.0, 1.0),
        Factor::Temperature => {
            let t = weather.temperature_c;
            if t < 15.0 {
                ramp(t, 15.0, -5.0)
            } else if t > 25.0 {
                ramp(t, 25.0, 40.0)
            } else {
                0.0
            }
        }
        Factor::Humidity => {
            let h = weather.humidity_pct;
            if h < 30.0 {
                ramp(h, 30.0, 0.0)
            } else if h > 50.0 {
                ramp(h, 50.0, 100.0)
            } else {
                0.0
            }
        }
        Factor::Traffic => (traffic.vehicle_volume / traffic.capacity).clamp(0.0, 1.0),
        Factor::Rainfall => (weather.rainfall_mm / 20.0).clamp(0.0, 1.0),
        Factor::Wind => ramp(weather.wind_speed_mps, 8.0, 15.0),
        Factor::Uv => (weather.uv_index / 11.0).clamp(0.0, 1.0),
        Factor::Pressure => 0.0,
    }
}

/// Which factors enter the risk score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicVariant {
    DistanceOnly,
    TrafficOnly,
    WeatherOnly,
    Combined,
}

impl HeuristicVariant {
    pub const ALL: [HeuristicVariant; 4] = [
        HeuristicVariant::DistanceOnly,
        HeuristicVariant::TrafficOnly,
        HeuristicVariant::WeatherOnly,
        HeuristicVariant::Combined,
    ];

    pub fn includes(self, f: Factor) -> bool {
        match self {
            HeuristicVariant::DistanceOnly => false,
            HeuristicVariant::TrafficOnly => f == Factor::Traffic,
            HeuristicVariant::WeatherOnly => f != Factor::Traffic,
            HeuristicVariant::Combined => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HeuristicVariant::DistanceOnly => "distance_only",
            HeuristicVariant::TrafficOnly => "traffic_only",
            HeuristicVariant::WeatherOnly => "weather_only",
            HeuristicVariant::Combined => "combined",
        }
    }
}

impl fmt::Display for HeuristicVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeuristicVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
            format!("unknown variant {s:?} (expected distance_only, traffic_only, weather_only or combined)")
        })
    }
}

/// Weighted per-factor contributions and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskBreakdown {
    pub contributions: FactorValues,
    pub total: f64,
}

impl RiskBreakdown {
    pub fn zero() -> Self {
        Self { contributions: FactorValues::default(), total: 0.0 }
    }
}

/// Risk score for one environmental sample, without the timeline lookup.
///
/// Weights of factors outside the variant are dropped, not renormalized, so
/// variant totals are partial sums of the combined total.
pub fn score_sample(
    weights: &SensitivityWeights,
    weather: &WeatherSample,
    traffic: &TrafficSample,
    variant: HeuristicVariant,
) -> RiskBreakdown {
    let mut contributions = FactorValues::default();
    for f in Factor::ALL.into_iter().filter(|&f| variant.includes(f)) {
        let w = weights.get(f);
        if w != 0.0 {
            contributions[f] = w * factor_risk(f, weather, traffic);
        }
    }
    RiskBreakdown { total: contributions.sum(), contributions }
}

/// Environmental risk of traversing `edge` at time `t`.
pub fn h_env(
    edge: &Edge,
    t: f64,
    weights: &SensitivityWeights,
    timeline: &EnvTimeline,
    variant: HeuristicVariant,
) -> Result<RiskBreakdown, EnvError> {
    let sample = lookup_env(timeline, &edge.zone, t)?;
    Ok(score_sample(weights, &sample.weather, &sample.traffic, variant))
}

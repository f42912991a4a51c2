use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{EnvironmentState, VesselParticulars};
use crate::error::{Error, Result};
use crate::units::fold_to_pi;

use super::empirical::{
    kreitner, kreitner_directional, stawave1_unchecked, within_head_sector, HEAD_SECTOR_LIMIT,
};
use super::response::{
    mean_added_resistance, IntegrationSettings, ParametricResponse, ResponseFunction,
};
use super::spectrum::pm_spectrum;

/// Headings a theory is calibrated for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validity {
    AnyHeading,
    /// `|α_rel|` (folded onto `[0, π]`) must not exceed the limit.
    HeadSector(f64),
}

impl Validity {
    pub fn contains(&self, env: &EnvironmentState) -> bool {
        match *self {
            Validity::AnyHeading => true,
            Validity::HeadSector(limit) => within_head_sector(env, limit),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidityMode {
    #[default]
    Strict,
    ExtrapolateWithFlag,
}

pub trait WaveTheory: Send + Sync {
    fn name(&self) -> &str;
    fn validity(&self) -> Validity;
    /// Evaluates without checking validity. Newtons.
    fn raw(&self, v: &VesselParticulars, env: &EnvironmentState, stw: f64) -> Result<f64>;
}

impl fmt::Debug for dyn WaveTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WaveTheory({})", self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryValue {
    pub value: f64,
    pub in_validity: bool,
}

pub fn evaluate_theory(
    t: &dyn WaveTheory,
    v: &VesselParticulars,
    env: &EnvironmentState,
    stw: f64,
    mode: ValidityMode,
) -> Result<TheoryValue> {
    let in_validity = t.validity().contains(env);
    if !in_validity && mode == ValidityMode::Strict {
        return Err(Error::Validity {
            theory: t.name().to_string(),
            reason: format!(
                "|alpha_rel| = {:.1}° is outside the head sector",
                fold_to_pi(env.wave_dir_rel).to_degrees()
            ),
        });
    }
    Ok(TheoryValue {
        value: t.raw(v, env, stw)?,
        in_validity,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Kreitner;

impl WaveTheory for Kreitner {
    fn name(&self) -> &str {
        "kreitner"
    }
    fn validity(&self) -> Validity {
        Validity::HeadSector(HEAD_SECTOR_LIMIT)
    }
    fn raw(&self, v: &VesselParticulars, env: &EnvironmentState, _: f64) -> Result<f64> {
        Ok(kreitner(v, env))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KreitnerDirectional;

impl WaveTheory for KreitnerDirectional {
    fn name(&self) -> &str {
        "kreitner-directional"
    }
    fn validity(&self) -> Validity {
        Validity::AnyHeading
    }
    fn raw(&self, v: &VesselParticulars, env: &EnvironmentState, _: f64) -> Result<f64> {
        Ok(kreitner_directional(v, env))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StaWave1;

impl WaveTheory for StaWave1 {
    fn name(&self) -> &str {
        "stawave1"
    }
    fn validity(&self) -> Validity {
        Validity::HeadSector(HEAD_SECTOR_LIMIT)
    }
    fn raw(&self, v: &VesselParticulars, env: &EnvironmentState, _: f64) -> Result<f64> {
        Ok(stawave1_unchecked(v, env))
    }
}

/// Integrates a response function over a Pierson–Moskowitz spectrum built
/// from the environment's `H_S` and `T_p`.
pub struct SpectralTheory {
    name: String,
    validity: Validity,
    response: Arc<dyn ResponseFunction>,
    pub settings: IntegrationSettings,
}

impl SpectralTheory {
    pub fn new(
        name: impl Into<String>,
        validity: Validity,
        response: Arc<dyn ResponseFunction>,
    ) -> Self {
        Self {
            name: name.into(),
            validity,
            response,
            settings: IntegrationSettings::default(),
        }
    }

    pub fn from_parametric(rf: ParametricResponse) -> Self {
        let validity = rf
            .max_abs_alpha
            .map_or(Validity::AnyHeading, Validity::HeadSector);
        Self::new(rf.theory.clone(), validity, Arc::new(rf))
    }

    pub fn response(&self) -> &dyn ResponseFunction {
        self.response.as_ref()
    }
}

impl WaveTheory for SpectralTheory {
    fn name(&self) -> &str {
        &self.name
    }
    fn validity(&self) -> Validity {
        self.validity
    }
    fn raw(&self, v: &VesselParticulars, env: &EnvironmentState, stw: f64) -> Result<f64> {
        let spec = pm_spectrum(env.sig_wave_height, env.wave_peak_period)?;
        Ok(mean_added_resistance(
            self.response.as_ref(),
            &spec,
            env.wave_dir_rel,
            stw,
            v,
            &self.settings,
        )?
        .value)
    }
}

/// Named collection of wave theories.
#[derive(Clone, Default)]
pub struct TheoryRegistry {
    theories: BTreeMap<String, Arc<dyn WaveTheory>>,
}

impl fmt::Debug for TheoryRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.theories.keys()).finish()
    }
}

impl TheoryRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Kreitner, directional Kreitner and STAwave-1.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Kreitner));
        r.register(Arc::new(KreitnerDirectional));
        r.register(Arc::new(StaWave1));
        r
    }

    /// Adds or replaces a theory under its own name.
    pub fn register(&mut self, theory: Arc<dyn WaveTheory>) {
        self.theories.insert(theory.name().to_string(), theory);
    }

    /// Loads a `rawrf/1` file and registers it; returns the theory name.
    pub fn load_plugin(&mut self, path: impl AsRef<Path>) -> Result<String> {
        let rf = ParametricResponse::load(path)?;
        let name = rf.theory.clone();
        self.register(Arc::new(SpectralTheory::from_parametric(rf)));
        Ok(name)
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn WaveTheory>> {
        self.theories
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownTheory {
                name: name.to_string(),
                registered: self.names(),
            })
    }

    pub fn names(&self) -> Vec<String> {
        self.theories.keys().cloned().collect()
    }

    pub fn evaluate(
        &self,
        name: &str,
        v: &VesselParticulars,
        env: &EnvironmentState,
        stw: f64,
        mode: ValidityMode,
    ) -> Result<TheoryValue> {
        evaluate_theory(self.get(name)?.as_ref(), v, env, stw, mode)
    }
}

/// One row of a directional sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub alpha_deg: f64,
    pub theory: String,
    pub r_aw_newtons: f64,
}

/// Evaluates each theory from head to following seas in `step_deg`
/// increments; headings outside a theory's validity are skipped.
pub fn polar_sweep(
    theories: &[Arc<dyn WaveTheory>],
    v: &VesselParticulars,
    h_s: f64,
    t_p: f64,
    stw: f64,
    step_deg: f64,
) -> Result<Vec<PolarPoint>> {
    if !(step_deg > 0.0 && step_deg <= 180.0) {
        return Err(Error::InvalidParameter(format!(
            "sweep step must lie in (0, 180], got {step_deg}"
        )));
    }
    let n = (180.0 / step_deg).round() as usize;
    let mut out = Vec::new();
    for t in theories {
        for i in 0..=n {
            let alpha_deg = (i as f64 * step_deg).min(180.0);
            let env = EnvironmentState::new(0.0, 0.0, h_s, t_p, alpha_deg.to_radians());
            let value =
                evaluate_theory(t.as_ref(), v, &env, stw, ValidityMode::ExtrapolateWithFlag)?;
            if value.in_validity {
                out.push(PolarPoint {
                    alpha_deg,
                    theory: t.name().to_string(),
                    r_aw_newtons: value.value,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::fixtures::bulk_carrier;
    use crate::units::knots_to_ms;

    fn env(h: f64, deg: f64) -> EnvironmentState {
        EnvironmentState::new(0.0, 0.0, h, 10.0, deg.to_radians())
    }

    #[test]
    fn dispatch_identity() {
        let reg = TheoryRegistry::with_builtins();
        let v = bulk_carrier();
        for deg in [0.0, 45.0, 90.0, 180.0] {
            let e = env(4.0, deg);
            let r = reg
                .evaluate("kreitner-directional", &v, &e, 6.0, ValidityMode::Strict)
                .unwrap();
            assert_eq!(r.value, kreitner_directional(&v, &e));
            assert!(r.in_validity);
        }
    }

    #[test]
    fn strict_and_flag_modes() {
        let reg = TheoryRegistry::with_builtins();
        let v = bulk_carrier();
        let e = env(4.0, 60.0);
        assert!(matches!(
            reg.evaluate("stawave1", &v, &e, 6.0, ValidityMode::Strict),
            Err(Error::Validity { .. })
        ));
        let r = reg
            .evaluate("stawave1", &v, &e, 6.0, ValidityMode::ExtrapolateWithFlag)
            .unwrap();
        assert!(!r.in_validity);
        assert_eq!(r.value, stawave1_unchecked(&v, &e));
    }

    #[test]
    fn unknown_name_lists_registered() {
        let reg = TheoryRegistry::with_builtins();
        match reg.get("mittendorf") {
            Err(Error::UnknownTheory { name, registered }) => {
                assert_eq!(name, "mittendorf");
                assert_eq!(
                    registered,
                    vec!["kreitner", "kreitner-directional", "stawave1"]
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn plugin_matches_direct_integration() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rf.json");
        std::fs::write(&path, super::super::response::EXAMPLE_RAWRF).unwrap();
        let mut reg = TheoryRegistry::with_builtins();
        let name = reg.load_plugin(&path).unwrap();
        let v = bulk_carrier();
        let e = env(3.5, 20.0);
        let stw = knots_to_ms(12.0);
        let via = reg
            .evaluate(&name, &v, &e, stw, ValidityMode::Strict)
            .unwrap()
            .value;
        let spec = pm_spectrum(3.5, 10.0).unwrap();
        let direct = mean_added_resistance(
            &ParametricResponse::example(),
            &spec,
            e.wave_dir_rel,
            stw,
            &v,
            &Default::default(),
        )
        .unwrap()
        .value;
        assert_eq!(via.to_bits(), direct.to_bits());
    }

    #[test]
    fn zero_waves_and_height_scaling() {
        let mut reg = TheoryRegistry::with_builtins();
        reg.register(Arc::new(SpectralTheory::from_parametric(
            ParametricResponse::example(),
        )));
        let v = bulk_carrier();
        for name in reg.names() {
            let z = reg
                .evaluate(&name, &v, &env(0.0, 0.0), 6.0, ValidityMode::Strict)
                .unwrap();
            assert_eq!(z.value, 0.0, "{name}");
            let a = reg
                .evaluate(&name, &v, &env(2.0, 10.0), 6.0, ValidityMode::Strict)
                .unwrap()
                .value;
            let b = reg
                .evaluate(&name, &v, &env(4.0, 10.0), 6.0, ValidityMode::Strict)
                .unwrap()
                .value;
            assert!((b - 4.0 * a).abs() <= 1e-3 * b, "{name}: {a} {b}");
        }
    }

    #[test]
    fn sweep_skips_invalid_headings() {
        let reg = TheoryRegistry::with_builtins();
        let theories = vec![
            reg.get("stawave1").unwrap(),
            reg.get("kreitner-directional").unwrap(),
        ];
        let rows = polar_sweep(&theories, &bulk_carrier(), 4.0, 10.0, 6.0, 15.0).unwrap();
        assert_eq!(rows.iter().filter(|r| r.theory == "stawave1").count(), 4);
        assert_eq!(
            rows.iter()
                .filter(|r| r.theory == "kreitner-directional")
                .count(),
            13
        );
    }
}

//! Estimation of superstructure geometry from overall length and beam.
//!
//! Each parameter `P` has its own regression: a normalised left-hand side
//! (`P`, `P/L_OA`, `P/B`, ...) equal to a linear right-hand side in `B` and
//! `L_OA`. Coefficient sets are grouped by ship type and loading condition.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fujiwara::FujiwaraParams;
use crate::domain::LoadingCondition;
use crate::error::{Error, Result};

pub const SCHEMA: &str = "kitamura/1";

/// Parameters every coefficient set must provide.
pub const REQUIRED_PARAMETERS: [&str; 6] = ["a_xv", "a_yv", "a_od", "c_mc", "h_br", "h_c"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LhsForm {
    #[serde(rename = "P")]
    P,
    #[serde(rename = "P/L_OA")]
    PerLength,
    #[serde(rename = "P/B")]
    PerBeam,
    #[serde(rename = "P/L_OA^2")]
    PerLengthSquared,
    #[serde(rename = "P/(L_OA*B)")]
    PerLengthBeam,
    #[serde(rename = "P/B^2")]
    PerBeamSquared,
}

impl LhsForm {
    /// The factor that multiplies the right-hand side to give `P`.
    fn normaliser(self, l_oa: f64, b: f64) -> f64 {
        match self {
            LhsForm::P => 1.0,
            LhsForm::PerLength => l_oa,
            LhsForm::PerBeam => b,
            LhsForm::PerLengthSquared => l_oa * l_oa,
            LhsForm::PerLengthBeam => l_oa * b,
            LhsForm::PerBeamSquared => b * b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RhsForm {
    #[serde(rename = "aB+bL_OA+c")]
    BeamAndLength,
    #[serde(rename = "aB+c")]
    Beam,
    #[serde(rename = "bL_OA+c")]
    Length,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KitamuraEntry {
    pub lhs_form: LhsForm,
    pub rhs_form: RhsForm,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub c: f64,
}

impl KitamuraEntry {
    pub fn evaluate(&self, l_oa: f64, beam: f64) -> f64 {
        let rhs = match self.rhs_form {
            RhsForm::BeamAndLength => self.a * beam + self.b * l_oa + self.c,
            RhsForm::Beam => self.a * beam + self.c,
            RhsForm::Length => self.b * l_oa + self.c,
        };
        self.lhs_form.normaliser(l_oa, beam) * rhs
    }
}

/// Coefficients for one ship type in one loading condition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KitamuraCoefficients {
    pub ship_type: String,
    pub entries: BTreeMap<String, KitamuraEntry>,
}

/// Estimated parameters plus notes about any clamped values.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub params: FujiwaraParams,
    pub diagnostics: Vec<String>,
}

pub fn estimate_fujiwara_params(
    l_oa: f64,
    b: f64,
    coeffs: &KitamuraCoefficients,
) -> Result<Estimate> {
    if !(l_oa > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "L_OA and B must be > 0 (got {l_oa}, {b})"
        )));
    }
    let mut diagnostics = Vec::new();
    let mut value = |name: &str| -> Result<f64> {
        let entry = coeffs
            .entries
            .get(name)
            .ok_or_else(|| Error::IncompleteCoefficients(name.to_string()))?;
        let v = entry.evaluate(l_oa, b);
        // c_mc is a signed offset; everything else is a length or area
        if v < 0.0 && name != "c_mc" {
            diagnostics.push(format!("{name} estimated as {v:.4}, clamped to 0"));
            return Ok(0.0);
        }
        Ok(v)
    };
    let params = FujiwaraParams {
        ship_type: coeffs.ship_type.clone(),
        length_overall: l_oa,
        beam: b,
        a_xv: value("a_xv")?,
        a_yv: value("a_yv")?,
        a_od: value("a_od")?,
        c_mc: value("c_mc")?,
        h_br: value("h_br")?,
        h_c: value("h_c")?,
    };
    Ok(Estimate {
        params,
        diagnostics,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct KitamuraFileRepr {
    schema: String,
    #[serde(default)]
    provenance: String,
    ship_types: BTreeMap<String, BTreeMap<LoadingCondition, BTreeMap<String, KitamuraEntry>>>,
}

/// A validated coefficient file.
#[derive(Debug, Clone)]
pub struct KitamuraFile {
    pub provenance: String,
    sets: BTreeMap<String, BTreeMap<LoadingCondition, BTreeMap<String, KitamuraEntry>>>,
}

impl KitamuraFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: KitamuraFileRepr = serde_json::from_str(text)?;
        if repr.schema != SCHEMA {
            return Err(Error::Schema(format!(
                "expected `{SCHEMA}`, found `{}`",
                repr.schema
            )));
        }
        for (ship, conditions) in &repr.ship_types {
            for (condition, entries) in conditions {
                for name in REQUIRED_PARAMETERS {
                    if !entries.contains_key(name) {
                        return Err(Error::IncompleteCoefficients(format!(
                            "{ship}/{}/{name}",
                            condition.as_str()
                        )));
                    }
                }
                if let Some((name, _)) = entries
                    .iter()
                    .find(|(_, e)| ![e.a, e.b, e.c].iter().all(|x| x.is_finite()))
                {
                    return Err(Error::Schema(format!(
                        "non-finite coefficient for {ship}/{name}"
                    )));
                }
            }
        }
        Ok(Self {
            provenance: repr.provenance,
            sets: repr.ship_types,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn ship_types(&self) -> impl Iterator<Item = &str> {
        self.sets.keys().map(String::as_str)
    }

    pub fn coefficients(
        &self,
        ship_type: &str,
        condition: LoadingCondition,
    ) -> Result<KitamuraCoefficients> {
        let entries = self
            .sets
            .get(ship_type)
            .and_then(|c| c.get(&condition))
            .ok_or_else(|| {
                Error::IncompleteCoefficients(format!("{ship_type}/{}", condition.as_str()))
            })?;
        Ok(KitamuraCoefficients {
            ship_type: ship_type.to_string(),
            entries: entries.clone(),
        })
    }
}

/// Example coefficient set bundled with the crate.
pub const EXAMPLE_FILE: &str = include_str!("../../data/kitamura_example.json");

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn single(name: &str, entry: KitamuraEntry) -> KitamuraCoefficients {
        let mut c = KitamuraCoefficients::default();
        for n in REQUIRED_PARAMETERS {
            c.entries.insert(
                n.into(),
                KitamuraEntry {
                    lhs_form: LhsForm::P,
                    rhs_form: RhsForm::Beam,
                    a: 0.0,
                    b: 0.0,
                    c: 1.0,
                },
            );
        }
        c.entries.insert(name.into(), entry);
        c
    }

    #[test]
    fn direct_substitution() {
        let c = single(
            "a_xv",
            KitamuraEntry {
                lhs_form: LhsForm::P,
                rhs_form: RhsForm::BeamAndLength,
                a: 1.0,
                b: 1.0,
                c: 0.0,
            },
        );
        assert_relative_eq!(
            estimate_fujiwara_params(190.0, 32.0, &c)
                .unwrap()
                .params
                .a_xv,
            222.0
        );
        let c = single(
            "a_xv",
            KitamuraEntry {
                lhs_form: LhsForm::PerLength,
                rhs_form: RhsForm::Beam,
                a: 0.1,
                b: 0.0,
                c: 0.0,
            },
        );
        assert_relative_eq!(
            estimate_fujiwara_params(190.0, 32.0, &c)
                .unwrap()
                .params
                .a_xv,
            608.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn every_lhs_form() {
        let cases = [
            (LhsForm::P, 2.0),
            (LhsForm::PerLength, 2.0 * 190.0),
            (LhsForm::PerBeam, 2.0 * 32.0),
            (LhsForm::PerLengthSquared, 2.0 * 190.0 * 190.0),
            (LhsForm::PerLengthBeam, 2.0 * 190.0 * 32.0),
            (LhsForm::PerBeamSquared, 2.0 * 32.0 * 32.0),
        ];
        for (form, expected) in cases {
            let e = KitamuraEntry {
                lhs_form: form,
                rhs_form: RhsForm::Length,
                a: 99.0,
                b: 0.0,
                c: 2.0,
            };
            assert_relative_eq!(e.evaluate(190.0, 32.0), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn negative_values_clamped_with_note() {
        let c = single(
            "h_c",
            KitamuraEntry {
                lhs_form: LhsForm::P,
                rhs_form: RhsForm::Beam,
                a: 0.0,
                b: 0.0,
                c: -3.0,
            },
        );
        let est = estimate_fujiwara_params(190.0, 32.0, &c).unwrap();
        assert_eq!(est.params.h_c, 0.0);
        assert_eq!(est.diagnostics.len(), 1);
        assert!(est.diagnostics[0].starts_with("h_c"));
    }

    #[test]
    fn missing_entry_is_named() {
        let mut c = single(
            "a_xv",
            KitamuraEntry {
                lhs_form: LhsForm::P,
                rhs_form: RhsForm::Beam,
                a: 0.0,
                b: 0.0,
                c: 1.0,
            },
        );
        c.entries.remove("h_br");
        match estimate_fujiwara_params(190.0, 32.0, &c) {
            Err(Error::IncompleteCoefficients(name)) => assert_eq!(name, "h_br"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bundled_bulk_file_matches_hand_evaluation() {
        let file = KitamuraFile::from_json(EXAMPLE_FILE).unwrap();
        let laden = file.coefficients("bulk", LoadingCondition::Laden).unwrap();
        let est = estimate_fujiwara_params(190.0, 32.0, &laden).unwrap();
        // laden A_XV: P/B = 0.05·L_OA + 5.5  ->  32 · (9.5 + 5.5)
        let hand = 32.0 * (0.05 * 190.0 + 5.5);
        assert!((est.params.a_xv - hand).abs() <= 0.1 * hand);
        let ballast = file
            .coefficients("bulk", LoadingCondition::Ballast)
            .unwrap();
        let est_b = estimate_fujiwara_params(190.0, 32.0, &ballast).unwrap();
        assert!(est_b.params.a_xv > est.params.a_xv);
        assert!(est.diagnostics.is_empty());
    }

    #[test]
    fn file_validation() {
        let bad = EXAMPLE_FILE.replace("kitamura/1", "kitamura/2");
        assert!(matches!(
            KitamuraFile::from_json(&bad),
            Err(Error::Schema(_))
        ));
        let missing = EXAMPLE_FILE.replacen("\"h_c\"", "\"h_x\"", 1);
        assert!(matches!(
            KitamuraFile::from_json(&missing),
            Err(Error::IncompleteCoefficients(_))
        ));
        let file = KitamuraFile::from_json(EXAMPLE_FILE).unwrap();
        assert!(file
            .coefficients("tanker", LoadingCondition::Laden)
            .is_err());
    }
}

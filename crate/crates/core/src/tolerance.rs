//! Named tolerances for every check, overridable by name.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance ladder: identities 1e-10..1e-8, single-derivative conditions
/// 1e-7, double-derivative chains 1e-5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub homogeneity: f64,
    pub euler: f64,
    pub positive_definiteness: f64,
    pub cartan_annihilation: f64,
    pub identity: f64,
    pub metricity: f64,
    pub classify: f64,
    pub antisymmetry: f64,
    pub reconstruction: f64,
    pub constant_flag: f64,
    pub flag_coherence: f64,
    pub defn1: f64,
    pub eq1: f64,
    pub eq2: f64,
    pub eq3: f64,
    pub eq4: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            homogeneity: 1e-9,
            euler: 1e-9,
            positive_definiteness: 1e-10,
            cartan_annihilation: 1e-9,
            identity: 1e-9,
            metricity: 1e-8,
            classify: 1e-7,
            antisymmetry: 1e-10,
            reconstruction: 1e-5,
            constant_flag: 1e-6,
            flag_coherence: 1e-6,
            defn1: 1e-5,
            eq1: 1e-7,
            eq2: 1e-5,
            eq3: 1e-5,
            eq4: 1e-7,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 16] = [
        "homogeneity",
        "euler",
        "positive_definiteness",
        "cartan_annihilation",
        "identity",
        "metricity",
        "classify",
        "antisymmetry",
        "reconstruction",
        "constant_flag",
        "flag_coherence",
        "defn1",
        "eq1",
        "eq2",
        "eq3",
        "eq4",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "homogeneity" => &mut self.homogeneity,
            "euler" => &mut self.euler,
            "positive_definiteness" => &mut self.positive_definiteness,
            "cartan_annihilation" => &mut self.cartan_annihilation,
            "identity" => &mut self.identity,
            "metricity" => &mut self.metricity,
            "classify" => &mut self.classify,
            "antisymmetry" => &mut self.antisymmetry,
            "reconstruction" => &mut self.reconstruction,
            "constant_flag" => &mut self.constant_flag,
            "flag_coherence" => &mut self.flag_coherence,
            "defn1" => &mut self.defn1,
            "eq1" => &mut self.eq1,
            "eq2" => &mut self.eq2,
            "eq3" => &mut self.eq3,
            "eq4" => &mut self.eq4,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let mut copy = *self;
        copy.slot(name).map(|v| *v)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Config(format!("tolerance {name} must be positive and finite, got {value}")));
        }
        match self.slot(name) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(Error::Config(format!(
                "unknown tolerance {name:?}; expected one of {}",
                Tolerances::NAMES.join(", ")
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut copy = *self;
        for name in Tolerances::NAMES {
            let v = self.get(name).expect("listed name");
            copy.set(name, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_get_by_name() {
        let mut t = Tolerances::default();
        for name in Tolerances::NAMES {
            assert!(t.get(name).is_some(), "{name}");
        }
        t.set("eq3", 1e-4).unwrap();
        assert_eq!(t.eq3, 1e-4);
        assert!(t.set("eq9", 1.0).is_err());
        assert!(t.set("eq1", 0.0).is_err());
        assert!(t.set("eq1", f64::NAN).is_err());
    }

    #[test]
    fn toml_rejects_unknown_names() {
        let ok: Tolerances = toml::from_str("eq1 = 1e-6").unwrap();
        assert_eq!(ok.eq1, 1e-6);
        assert_eq!(ok.eq2, Tolerances::default().eq2);
        assert!(toml::from_str::<Tolerances>("eq_1 = 1e-6").is_err());
    }
}

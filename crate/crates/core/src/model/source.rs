use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied intensity law together with its exact derivative.
#[derive(Clone)]
pub struct CustomIntensity {
    pub value: ScalarFn,
    pub rate: ScalarFn,
}

impl fmt::Debug for CustomIntensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomIntensity { .. }")
    }
}

/// Source intensity `q(t)`. Every variant knows its derivative in closed form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Intensity {
    Constant {
        q: f64,
    },
    Linear {
        q0: f64,
        rate: f64,
    },
    Harmonic {
        mean: f64,
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    #[serde(skip)]
    Custom(CustomIntensity),
}

impl Intensity {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Intensity::Constant { q } => *q,
            Intensity::Linear { q0, rate } => q0 + rate * t,
            Intensity::Harmonic {
                mean,
                amplitude,
                omega,
                phase,
            } => mean + amplitude * (omega * t + phase).sin(),
            Intensity::Custom(c) => (c.value)(t),
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match self {
            Intensity::Constant { .. } => 0.0,
            Intensity::Linear { rate, .. } => *rate,
            Intensity::Harmonic {
                amplitude,
                omega,
                phase,
                ..
            } => amplitude * omega * (omega * t + phase).cos(),
            Intensity::Custom(c) => (c.rate)(t),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Intensity::Constant { .. })
    }
}

/// Point source: initial position, intensity law and whether it is carried by the flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub position: [f64; 2],
    pub intensity: Intensity,
    #[serde(default)]
    pub mobile: bool,
}

impl SourceSpec {
    pub fn fixed(q: f64) -> Self {
        SourceSpec {
            position: [0.0, 0.0],
            intensity: Intensity::Constant { q },
            mobile: false,
        }
    }

    pub fn q(&self, t: f64) -> f64 {
        self.intensity.value(t)
    }

    pub fn q_rate(&self, t: f64) -> f64 {
        self.intensity.rate(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_difference(law: &Intensity, t: f64) -> f64 {
        let h = 1e-5;
        (law.value(t + h) - law.value(t - h)) / (2.0 * h)
    }

    #[test]
    fn rates_match_finite_differences() {
        let laws = [
            Intensity::Constant { q: 1.3 },
            Intensity::Linear { q0: 0.5, rate: -0.25 },
            Intensity::Harmonic {
                mean: 1.0,
                amplitude: 0.3,
                omega: 2.5,
                phase: 0.4,
            },
            Intensity::Custom(CustomIntensity {
                value: Arc::new(|t: f64| (0.1 * t).exp()),
                rate: Arc::new(|t: f64| 0.1 * (0.1 * t).exp()),
            }),
        ];
        for law in &laws {
            for &t in &[0.0, 0.7, 3.2] {
                let fd = central_difference(law, t);
                assert!((fd - law.rate(t)).abs() < 1e-8, "{law:?} at t = {t}");
            }
        }
    }

    #[test]
    fn parses_tagged_intensity() {
        let s: SourceSpec = serde_json::from_str(
            r#"{"position":[1,2],"intensity":{"kind":"linear","q0":1,"rate":0.5},"mobile":true}"#,
        )
        .unwrap();
        assert!(s.mobile);
        assert_eq!(s.q(2.0), 2.0);
        assert_eq!(s.q_rate(2.0), 0.5);
    }
}

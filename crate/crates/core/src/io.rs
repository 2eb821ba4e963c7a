//! JSON input documents.

use serde::{Deserialize, Serialize};

use crate::engel::{Coords, Horizontal};
use crate::error::Result;
use crate::horizontal::Controls;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyControl {
    pub poly: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyControls {
    pub u1: PolyControl,
    pub u2: PolyControl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledControls {
    pub times: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

/// `{"controls":{"u1":{"poly":[..]},"u2":{..}},"domain":[t0,t1],"start":[..]}`
/// or `{"samples":{"times":[..],"u1":[..],"u2":[..]},"start":[..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum CurveSpec {
    Polynomial {
        controls: PolyControls,
        domain: [f64; 2],
        #[serde(default)]
        start: Coords,
    },
    Sampled {
        samples: SampledControls,
        #[serde(default)]
        start: Coords,
    },
}

impl CurveSpec {
    pub fn controls(&self) -> Result<Controls> {
        let c = match self {
            CurveSpec::Polynomial { controls, domain, .. } => Controls::polynomial(
                Poly::new(controls.u1.poly.clone()),
                Poly::new(controls.u2.poly.clone()),
                domain[0],
                domain[1],
            ),
            CurveSpec::Sampled { samples, .. } => {
                Controls::sampled(samples.times.clone(), samples.u1.clone(), samples.u2.clone())?
            }
        };
        c.validate()?;
        Ok(c)
    }

    pub fn start(&self) -> Coords {
        match self {
            CurveSpec::Polynomial { start, .. } | CurveSpec::Sampled { start, .. } => *start,
        }
    }
}

/// `{"a":1.0,"b":0.0,"target":[..],"end_deriv":[1.0,0.0],"tol":1e-10}`.
/// Without `end_deriv` only the endpoint is matched.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteerProblem {
    pub a: f64,
    pub b: f64,
    pub target: Coords,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_deriv: Option<Horizontal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// `{"b":1.0,"trials":1000,"seed":42}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub b: f64,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

use polyroots::{Complex64, GaussRun, Poly};
use serde::Serialize;

#[derive(Debug, Serialize, PartialEq)]
pub struct RootEntry {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct StageTiming {
    pub stage: &'static str,
    pub seconds: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Report {
    pub method: &'static str,
    pub degree: usize,
    pub roots: Vec<RootEntry>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<Vec<StageTiming>>,
}

fn entry(p: &Poly, z: Complex64) -> RootEntry {
    RootEntry { re: z.re, im: z.im, residual: p.eval(z).norm() }
}

impl Report {
    pub fn descent(p: &Poly, roots: &[Complex64]) -> Self {
        Report {
            method: "descent",
            degree: p.degree(),
            roots: roots.iter().map(|&z| entry(p, z)).collect(),
            radius: None,
            eps: None,
            stages: None,
        }
    }

    pub fn gauss(p: &Poly, run: &GaussRun, timings: bool) -> Self {
        Report {
            method: "gauss",
            degree: p.degree(),
            roots: vec![entry(p, run.root)],
            radius: Some(run.nodes.radius),
            eps: Some([run.problem.eps1, run.problem.eps2]),
            stages: timings.then(|| {
                run.stages.iter().map(|(stage, d)| StageTiming { stage, seconds: d.as_secs_f64() }).collect()
            }),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

//! JSON model files and synthetic instance generation.
//!
//! One JSON object per model, discriminated by `kind`:
//!
//! ```json
//! {"kind": "flid", "n": 2, "D": 1, "W": [[1.0], [2.0]], "u": [1.0, 2.0]}
//! {"kind": "cut", "n": 2, "directed": true, "edges": [[0, 1, 1.0]]}
//! {"kind": "gibbs", "n": 2, "terms": [{"vars": [0], "coeff": 1.0}, {"vars": [0, 1], "coeff": -2.0}]}
//! {"kind": "set_cover", "n": 2, "concepts": [{"weight": 1.0, "items": [0, 1]}]}
//! {"kind": "table", "n": 2, "values": [0.0, 1.0, 0.0, 0.0]}
//! {"kind": "modular", "weights": [0.5, -0.25]}
//! {"kind": "concave_over_modular", "n": 2, "exponent": 0.5,
//!  "components": [{"weight": 1.0, "values": [4.0, 9.0]}]}
//! ```
//!
//! Indices are 0-based, `W` is row-major (one row per item), weights and
//! coefficients follow the family invariants enforced by the constructors.
//! Gibbs files may set `"unchecked_signs": true` to accept positive
//! interaction coefficients and defer validation to `dgmf check`.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use dgmf::rng::DetRng;
use dgmf::set_functions::{
    ConcaveOverModular, CutGraph, FlidModel, GibbsPolynomial, ModularFunction, SetCoverInstance,
    SetFunction, TableFunction,
};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GibbsTermFile {
    pub vars: Vec<usize>,
    pub coeff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConceptFile {
    pub weight: f64,
    pub items: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComComponentFile {
    pub weight: f64,
    pub values: Vec<f64>,
}

/// On-disk model schema.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelFile {
    Flid {
        n: usize,
        #[serde(rename = "D")]
        d: usize,
        #[serde(rename = "W")]
        w: Vec<Vec<f64>>,
        u: Vec<f64>,
    },
    Cut {
        n: usize,
        directed: bool,
        edges: Vec<(usize, usize, f64)>,
    },
    Gibbs {
        n: usize,
        terms: Vec<GibbsTermFile>,
        #[serde(default)]
        unchecked_signs: bool,
    },
    SetCover {
        n: usize,
        concepts: Vec<ConceptFile>,
    },
    Table {
        n: usize,
        values: Vec<f64>,
    },
    Modular {
        weights: Vec<f64>,
    },
    ConcaveOverModular {
        n: usize,
        exponent: f64,
        components: Vec<ComComponentFile>,
    },
}

impl ModelFile {
    /// Validated in-memory model; constructor errors name the offending
    /// field.
    pub fn build(self) -> Result<SetFunction<f64>> {
        Ok(match self {
            ModelFile::Flid { n, d, w, u } => {
                anyhow::ensure!(w.len() == n, "W has {} rows but n = {n}", w.len());
                anyhow::ensure!(
                    w.iter().all(|row| row.len() == d),
                    "every W row must have D = {d} entries"
                );
                SetFunction::Flid(FlidModel::new(w, u)?)
            }
            ModelFile::Cut { n, directed, edges } => {
                SetFunction::Cut(CutGraph::new(n, directed, edges)?)
            }
            ModelFile::Gibbs { n, terms, unchecked_signs } => {
                let terms: Vec<(Vec<usize>, f64)> =
                    terms.into_iter().map(|t| (t.vars, t.coeff)).collect();
                let poly = if unchecked_signs {
                    GibbsPolynomial::new_unchecked(n, terms)?
                } else {
                    GibbsPolynomial::new(n, terms)?
                };
                SetFunction::Gibbs(poly)
            }
            ModelFile::SetCover { n, concepts } => {
                let concepts = concepts.into_iter().map(|c| (c.weight, c.items)).collect();
                SetFunction::SetCover(SetCoverInstance::new(n, concepts)?)
            }
            ModelFile::Table { n, values } => SetFunction::Table(TableFunction::new(n, values)?),
            ModelFile::Modular { weights } => {
                SetFunction::Modular(ModularFunction::new(weights)?)
            }
            ModelFile::ConcaveOverModular { n, exponent, components } => {
                let (weights, vectors) =
                    components.into_iter().map(|c| (c.weight, c.values)).unzip();
                SetFunction::ConcaveOverModular(ConcaveOverModular::new(
                    n, weights, vectors, exponent,
                )?)
            }
        })
    }

    pub fn of_flid(model: &FlidModel<f64>) -> Self {
        ModelFile::Flid {
            n: model.ground_size(),
            d: model.latent_dim(),
            w: model.weights().to_vec(),
            u: model.utilities().to_vec(),
        }
    }
}

pub fn load_model(path: &Path) -> Result<SetFunction<f64>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading model file {}", path.display()))?;
    let file: ModelFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing model file {}", path.display()))?;
    file.build()
        .with_context(|| format!("validating model file {}", path.display()))
}

pub fn save_model(path: &Path, model: &ModelFile) -> Result<()> {
    let text = serde_json::to_string_pretty(model)?;
    fs::write(path, text).with_context(|| format!("writing model file {}", path.display()))?;
    Ok(())
}

/// Synthetic FLID generator: W entries i.i.d. U(0,1) drawn row-major, then
/// u = 0.1·D·r·1 with a single shared scaling draw r ~ U(0,1) by default, or
/// one independent draw per coordinate when `per_coordinate_u` is set.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SyntheticFlidSpec {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    #[serde(default)]
    pub per_coordinate_u: bool,
}

pub fn synth_flid(spec: &SyntheticFlidSpec) -> Result<FlidModel<f64>> {
    anyhow::ensure!(spec.n >= 1 && spec.d >= 1, "n and D must be >= 1");
    let mut rng = DetRng::derived(spec.seed, 0xF11D);
    let w: Vec<Vec<f64>> = (0..spec.n)
        .map(|_| (0..spec.d).map(|_| rng.uniform01()).collect())
        .collect();
    let scale = 0.1 * spec.d as f64;
    let u = if spec.per_coordinate_u {
        (0..spec.n).map(|_| scale * rng.uniform01()).collect()
    } else {
        let r = rng.uniform01();
        vec![scale * r; spec.n]
    };
    Ok(FlidModel::new(w, u)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dgmf::domain::Subset;

    #[test]
    fn flid_schema_round_trip() {
        let text = r#"{"kind":"flid","n":2,"D":1,"W":[[1],[2]],"u":[1,2]}"#;
        let file: ModelFile = serde_json::from_str(text).unwrap();
        let model = file.build().unwrap();
        match &model {
            SetFunction::Flid(m) => assert_eq!(m.residual_utilities(), &[0.0, 0.0]),
            other => panic!("wrong family {other:?}"),
        }
        assert_eq!(model.eval(&Subset::from_mask(2, 0b11).unwrap()).unwrap(), 2.0);
    }

    #[test]
    fn cut_schema_round_trip() {
        let text = r#"{"kind":"cut","directed":true,"n":2,"edges":[[0,1,1.0]]}"#;
        let model: SetFunction<f64> =
            serde_json::from_str::<ModelFile>(text).unwrap().build().unwrap();
        assert_eq!(model.eval(&Subset::from_mask(2, 0b01).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn negative_weight_error_names_entry() {
        let text = r#"{"kind":"flid","n":2,"D":1,"W":[[1],[-0.1]],"u":[0,0]}"#;
        let err = serde_json::from_str::<ModelFile>(text)
            .unwrap()
            .build()
            .unwrap_err();
        assert!(format!("{err:#}").contains("W[1][0]"), "{err:#}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"kind":"cut","directed":true,"n":2,"edges":[],"extra":1}"#;
        assert!(serde_json::from_str::<ModelFile>(text).is_err());
    }

    #[test]
    fn gibbs_sign_override() {
        let strict = r#"{"kind":"gibbs","n":2,"terms":[{"vars":[0,1],"coeff":1.0}]}"#;
        assert!(serde_json::from_str::<ModelFile>(strict).unwrap().build().is_err());
        let relaxed = r#"{"kind":"gibbs","n":2,"terms":[{"vars":[0,1],"coeff":1.0}],"unchecked_signs":true}"#;
        assert!(serde_json::from_str::<ModelFile>(relaxed).unwrap().build().is_ok());
    }

    #[test]
    fn synth_flid_is_deterministic() {
        let spec = SyntheticFlidSpec { n: 10, d: 7, seed: 99, per_coordinate_u: false };
        let a = synth_flid(&spec).unwrap();
        let b = synth_flid(&spec).unwrap();
        assert_eq!(a, b);
        let c = synth_flid(&SyntheticFlidSpec { seed: 100, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn synth_flid_shared_scaling_draw() {
        let spec = SyntheticFlidSpec { n: 6, d: 3, seed: 5, per_coordinate_u: false };
        let m = synth_flid(&spec).unwrap();
        let u = m.utilities();
        assert!(u.iter().all(|&v| v == u[0]));
        assert!(u[0] >= 0.0 && u[0] < 0.1 * 3.0);
        for row in m.weights() {
            for &w in row {
                assert!((0.0..1.0).contains(&w));
            }
        }

        let per = synth_flid(&SyntheticFlidSpec { per_coordinate_u: true, ..spec }).unwrap();
        let u = per.utilities();
        assert!(u.windows(2).any(|w| w[0] != w[1]));
        // the W draws are identical either way
        assert_eq!(m.weights(), per.weights());
    }
}

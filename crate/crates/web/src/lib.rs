//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes and returns JSON strings. The plain functions below
//! do the work and are tested natively; the `#[wasm_bindgen]` wrappers only
//! convert errors.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use emr_core::document::{FusionDocument, MassDocument};
use emr_core::rules::{conjunctive, dempster_shafer, pcr5};
use emr_core::{emr_fuse, table1, MassFunction, SolverConfig, World};

#[derive(Serialize)]
struct RuleRow {
    rule: &'static str,
    /// `None` when the rule has no answer (rejection or total conflict).
    masses: Option<Vec<(String, f64)>>,
}

fn listing(m: &MassFunction) -> Vec<(String, f64)> {
    m.entries().map(|(p, v)| (m.frame().display(p), v)).collect()
}

/// All four rules on the two-source family `m₁(a)=α₁, m₁(c)=γ₁, m₂(b)=β₂, m₂(c)=γ₂`.
pub fn compare_rules(alpha1: f64, gamma1: f64, beta2: f64, gamma2: f64) -> Result<String, String> {
    let (m1, m2) = table1::family(alpha1, gamma1, beta2, gamma2).map_err(|e| e.to_string())?;
    let emr = emr_fuse(&[m1.clone(), m2.clone()], &SolverConfig::default()).map_err(|e| e.to_string())?;
    let rows = vec![
        RuleRow {
            rule: "emr",
            masses: emr.fused.as_ref().map(listing),
        },
        RuleRow {
            rule: "conjunctive",
            masses: conjunctive(&m1, &m2).ok().as_ref().map(listing),
        },
        RuleRow {
            rule: "ds",
            masses: dempster_shafer(&m1, &m2).ok().as_ref().map(listing),
        },
        RuleRow {
            rule: "pcr5",
            masses: pcr5(&m1, &m2).ok().as_ref().map(listing),
        },
    ];
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// Fuses mass documents given as a JSON array of documents.
pub fn fuse_json(documents: &str, rule: &str) -> Result<String, String> {
    let docs: Vec<MassDocument> = serde_json::from_str(documents).map_err(|e| e.to_string())?;
    if docs.len() < 2 {
        return Err("at least two documents are required".into());
    }
    let ms = docs
        .iter()
        .enumerate()
        .map(|(i, d)| d.to_mass().map_err(|e| format!("document {}: {e}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let pairwise = |f: fn(&MassFunction, &MassFunction) -> emr_core::Result<MassFunction>| {
        ms[1..]
            .iter()
            .try_fold(ms[0].clone(), |acc, m| f(&acc, m))
            .map(|m| FusionDocument::from_mass(&m))
            .map_err(|e| e.to_string())
    };
    let doc = match rule {
        "emr" => {
            let out = emr_fuse(&ms, &SolverConfig::default()).map_err(|e| e.to_string())?;
            FusionDocument::from_outcome(&out, ms[0].frame(), World::Closed)
        }
        "conjunctive" => pairwise(conjunctive)?,
        "ds" => pairwise(dempster_shafer)?,
        "pcr5" => pairwise(pcr5)?,
        other => return Err(format!("unknown rule {other:?}")),
    };
    Ok(doc.to_json())
}

#[derive(Serialize)]
struct Grid {
    alphas: Vec<f64>,
    gammas: Vec<f64>,
    /// `fused[i][j]` for `γ = gammas[i]`, `α = β = alphas[j]`.
    fused: Vec<Vec<bool>>,
}

/// Where EMR accepts the symmetric family `α₁ = β₂ = α`, `γ₁ = γ₂ = γ`.
pub fn feasibility_grid(steps: usize) -> Result<String, String> {
    let steps = steps.clamp(2, 40);
    let axis: Vec<f64> = (0..steps).map(|k| k as f64 / (steps - 1) as f64).collect();
    let cfg = SolverConfig::default();
    let mut fused = Vec::with_capacity(steps);
    for g in &axis {
        let mut row = Vec::with_capacity(steps);
        for a in &axis {
            let ok = match table1::family(*a, *g, *a, *g) {
                Ok((m1, m2)) => emr_fuse(&[m1, m2], &cfg).map_err(|e| e.to_string())?.is_fused(),
                Err(_) => false,
            };
            row.push(ok);
        }
        fused.push(row);
    }
    serde_json::to_string(&Grid {
        alphas: axis.clone(),
        gammas: axis,
        fused,
    })
    .map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = compareRules)]
pub fn compare_rules_js(alpha1: f64, gamma1: f64, beta2: f64, gamma2: f64) -> Result<String, JsValue> {
    compare_rules(alpha1, gamma1, beta2, gamma2).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = fuseDocuments)]
pub fn fuse_documents_js(documents: &str, rule: &str) -> Result<String, JsValue> {
    fuse_json(documents, rule).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = feasibilityGrid)]
pub fn feasibility_grid_js(steps: usize) -> Result<String, JsValue> {
    feasibility_grid(steps).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compares_row_four() {
        let json = compare_rules(0.3, 0.1, 0.3, 0.1).unwrap();
        let rows: serde_json::Value = serde_json::from_str(&json).unwrap();
        let emr = &rows[0]["masses"];
        let c = emr.as_array().unwrap().iter().find(|e| e[0] == "c").unwrap();
        assert!((c[1].as_f64().unwrap() - 0.175).abs() < 1e-9);
        assert_eq!(rows.as_array().unwrap().len(), 4);
    }

    #[test]
    fn zadeh_has_no_emr_answer() {
        let rows: serde_json::Value = serde_json::from_str(&compare_rules(0.99, 0.01, 0.99, 0.01).unwrap()).unwrap();
        assert!(rows[0]["masses"].is_null());
        assert!(rows[2]["masses"].is_array());
    }

    #[test]
    fn fuses_documents() {
        let a =
            r#"{"atoms":["a","b"],"world":"closed","masses":[{"set":["a"],"mass":0.4},{"set":["a","b"],"mass":0.6}]}"#;
        let b =
            r#"{"atoms":["a","b"],"world":"closed","masses":[{"set":["b"],"mass":0.5},{"set":["a","b"],"mass":0.5}]}"#;
        let out = fuse_json(&format!("[{a},{b}]"), "emr").unwrap();
        let doc = FusionDocument::parse(&out).unwrap();
        assert!(doc.mass.to_mass().unwrap().validate().is_valid());
        assert!(fuse_json(&format!("[{a}]"), "emr").is_err());
        assert!(fuse_json(&format!("[{a},{b}]"), "yager").is_err());
    }

    #[test]
    fn grid_shape() {
        let g: serde_json::Value = serde_json::from_str(&feasibility_grid(5).unwrap()).unwrap();
        let fused = g["fused"].as_array().unwrap();
        assert_eq!(fused.len(), 5);
        // No conflict mass at α = β = 0.
        assert_eq!(fused[0][0], true);
        // α = β = 0.75 leaves too little room for b ∩ a to vanish.
        assert_eq!(fused[0][3], false);
    }
}

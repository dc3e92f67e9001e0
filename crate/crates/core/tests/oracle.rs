mod common;

use common::*;
use emr_core::emr::SupportPolicy;
use emr_core::modal::logic_bridge_fuse;
use emr_core::oracle::{ipf_oracle, IpfConfig};
use emr_core::qp::{project, NullSpaceProjector};
use emr_core::{emr_fuse, SolverConfig, World};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

#[test]
fn solver_oracle_and_bridge_agree() {
    let cfg = SolverConfig::default();
    let mut r = rng(1);
    let (mut fused, mut rejected) = (0, 0);
    for k in 0..120 {
        let ms = random_instance(&mut r);
        let emr = emr_fuse(&ms, &cfg).unwrap().fused;
        let ipf = ipf_oracle(&ms, SupportPolicy::ConflictFree, &IpfConfig::default())
            .unwrap()
            .map(|o| o.joint.fuse());
        let bridge = logic_bridge_fuse(&ms, World::Closed, &cfg).unwrap().fused;
        match (emr, ipf, bridge) {
            (Some(a), Some(b), Some(c)) => {
                assert!(a.total_variation(&b) < 1e-6, "instance {k}: {}", a.total_variation(&b));
                assert!(a.total_variation(&c) < 1e-6, "instance {k}: {}", a.total_variation(&c));
                fused += 1;
            }
            (None, None, None) => rejected += 1,
            (a, b, c) => panic!(
                "instance {k}: status differs {} {} {}",
                a.is_some(),
                b.is_some(),
                c.is_some()
            ),
        }
    }
    assert!(fused >= 20 && rejected >= 20, "{fused} fused, {rejected} rejected");
}

#[test]
fn rank_deficient_projection_stays_feasible() {
    // Active-face constraints from a three-source instance: eight rows of
    // rank six. A careless pseudo-inverse left A·x at 2e-2.
    let text = include_str!("data/rank_deficient_projection.json");
    let data: serde_json::Value = serde_json::from_str(text).unwrap();
    let rows: Vec<Vec<f64>> = serde_json::from_value(data["a"].clone()).unwrap();
    let v: Vec<f64> = serde_json::from_value(data["v"].clone()).unwrap();
    let lower: Vec<f64> = serde_json::from_value(data["lower"].clone()).unwrap();
    let a = DMatrix::from_fn(rows.len(), v.len(), |i, j| rows[i][j]);
    let x = project(&a, &v, &lower).unwrap();
    assert!((&a * DVector::from_column_slice(&x)).amax() < 1e-12);
    assert!(x.iter().zip(&lower).all(|(xi, l)| *xi >= *l - 1e-12));
}

proptest! {
    #[test]
    fn projector_is_idempotent_and_annihilated(
        rows in 1usize..5,
        entries in prop::collection::vec(0u8..3, 40),
        v in prop::collection::vec(-2.0f64..2.0, 8),
    ) {
        // Small integer matrices, often rank deficient.
        let a = DMatrix::from_fn(rows, 8, |i, j| f64::from(entries[i * 8 + j]));
        let p = NullSpaceProjector::new(&a);
        let once = p.apply(&v);
        let twice = p.apply(&once);
        for (x, y) in once.iter().zip(&twice) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        prop_assert!((&a * DVector::from_column_slice(&once)).amax() < 1e-9);
    }
}

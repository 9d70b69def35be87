//! Every catalog entry's declared expectations hold under the verification
//! suite at default tolerances, and entries survive the file format.

use llg_core::frame::Framing;
use llg_core::sample::{sample_pairs, sample_points};
use llg_core::tensor::Tensor;
use llg_core::verify::{run_verify, RunConfig};
use llg_core::{catalog, framing_file};

fn compiled(name: &str) -> Framing {
    catalog::get_example(name).unwrap().spec.compile().unwrap()
}

#[test]
fn declared_expectations_hold_under_verify() {
    for name in catalog::names() {
        let entry = catalog::get_example(name).unwrap();
        let f = entry.spec.compile().unwrap();
        let cfg = RunConfig {
            source_label: format!("example:{name}"),
            points: 32,
            ..RunConfig::default()
        };
        let report = run_verify(&f, &cfg).unwrap();
        assert_eq!(report.flat, entry.expected.flat, "{name} flatness verdict");
        assert_eq!(report.passed(), entry.expected.flat, "{name} overall verdict");

        if entry.expected.flat {
            let constants = report.constants.expect("flat entries carry constants");
            let mut want = Tensor::zeros(f.dim(), 1, 2);
            for (i, j, k, v) in &entry.expected.structure_constants {
                want.set(&[*i, *j, *k], *v);
            }
            let got = &constants.c.0;
            assert!(
                got.sub(&want).unwrap().max_abs() <= 1e-10,
                "{name} structure constants"
            );
            if let Some(scalar) = entry.expected.scalar_curvature {
                assert!(
                    (constants.scalar_curvature.pointwise - scalar).abs() <= 1e-8,
                    "{name} scalar curvature {} vs {scalar}",
                    constants.scalar_curvature.pointwise
                );
            }
        }
    }
}

#[test]
fn entries_round_trip_through_framing_files() {
    for name in catalog::names() {
        let spec = catalog::get_example(name).unwrap().spec;
        let json = framing_file::to_json(&spec);
        let reparsed = framing_file::parse_framing(&json).unwrap();
        assert_eq!(spec, reparsed, "{name}");
        // Identical numeric behavior after the round trip.
        let f1 = spec.compile().unwrap();
        let f2 = reparsed.compile().unwrap();
        let x = f1.domain().center();
        let t1 = f1.torsion(&x).unwrap();
        let t2 = f2.torsion(&x).unwrap();
        assert_eq!(t1, t2, "{name}");
    }
}

#[test]
fn epsilon_cocycle_holds_across_the_catalog() {
    for name in catalog::names() {
        let f = compiled(name);
        let pts = sample_points(f.domain(), 6, 11);
        let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
        let xy = f.epsilon(x, y).unwrap();
        let yz = f.epsilon(y, z).unwrap();
        let xz = f.epsilon(x, z).unwrap();
        let composed = yz.contract(&xy, &[(1, 0)]).unwrap();
        let defect = composed.sub(&xz).unwrap().max_abs();
        assert!(defect <= 1e-10 * (1.0 + xz.max_abs()), "{name}: {defect}");
    }
}

#[test]
fn flat_entries_have_invariant_torsion_over_many_pairs() {
    for name in ["abelian2", "abelian4", "affine2", "heisenberg3", "heis3xR", "affine_product"] {
        let f = compiled(name);
        let pts = sample_points(f.domain(), 200, 42);
        for (x, y) in sample_pairs(&pts) {
            let d = f.invariance_defect(|f, p| f.torsion(p), x, y).unwrap();
            assert!(d <= 1e-9, "{name} at {x:?} -> {y:?}: {d}");
        }
    }
}

#[test]
fn nonflat_entry_exhibits_a_large_invariance_defect() {
    let f = compiled("nonflat_demo");
    let d = f
        .invariance_defect(|f, p| f.torsion(p), &[0.0, 0.0], &[1.0, 0.0])
        .unwrap();
    assert!(d > 0.1, "{d}");
}

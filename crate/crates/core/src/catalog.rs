//! Built-in framings with known invariants, used as golden fixtures by the
//! test and verification suites.

use crate::error::{Error, Result};
use crate::frame::FramingSpec;

/// Expected invariants of a catalog entry. Structure constants are listed as
/// (i, j, k, value) with 0-based model indices; entries not listed are zero.
#[derive(Debug, Clone)]
pub struct Expected {
    pub flat: bool,
    pub scalar_curvature: Option<f64>,
    pub structure_constants: Vec<(usize, usize, usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub spec: FramingSpec,
    pub expected: Expected,
}

fn rows(rows: &[&[&str]]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()
}

fn entry(name: &str) -> Option<CatalogEntry> {
    let e = match name {
        "abelian2" => CatalogEntry {
            name: "abelian2",
            spec: FramingSpec {
                dim: 2,
                domain: vec![[-10.0, 10.0]; 2],
                w: rows(&[&["1", "0"], &["0", "1"]]),
            },
            expected: Expected {
                flat: true,
                scalar_curvature: Some(0.0),
                structure_constants: vec![],
            },
        },
        "abelian4" => CatalogEntry {
            name: "abelian4",
            spec: FramingSpec {
                dim: 4,
                domain: vec![[-10.0, 10.0]; 4],
                w: rows(&[
                    &["1", "0", "0", "0"],
                    &["0", "1", "0", "0"],
                    &["0", "0", "1", "0"],
                    &["0", "0", "0", "1"],
                ]),
            },
            expected: Expected {
                flat: true,
                scalar_curvature: Some(0.0),
                structure_constants: vec![],
            },
        },
        "affine2" => CatalogEntry {
            name: "affine2",
            spec: FramingSpec {
                dim: 2,
                domain: vec![[0.1, 10.0], [-10.0, 10.0]],
                w: rows(&[&["x1", "0"], &["0", "x1"]]),
            },
            expected: Expected {
                flat: true,
                scalar_curvature: Some(-2.0),
                structure_constants: vec![(1, 0, 1, -1.0), (1, 1, 0, 1.0)],
            },
        },
        "heisenberg3" => CatalogEntry {
            name: "heisenberg3",
            spec: FramingSpec {
                dim: 3,
                domain: vec![[-10.0, 10.0]; 3],
                w: rows(&[
                    &["1", "0", "0"],
                    &["0", "1", "0"],
                    &["0", "x1", "1"],
                ]),
            },
            expected: Expected {
                flat: true,
                scalar_curvature: Some(-0.5),
                structure_constants: vec![(2, 0, 1, -1.0), (2, 1, 0, 1.0)],
            },
        },
        "heis3xR" => CatalogEntry {
            name: "heis3xR",
            spec: FramingSpec {
                dim: 4,
                domain: vec![[-10.0, 10.0]; 4],
                w: rows(&[
                    &["1", "0", "0", "0"],
                    &["0", "1", "0", "0"],
                    &["0", "x1", "1", "0"],
                    &["0", "0", "0", "1"],
                ]),
            },
            expected: Expected {
                flat: true,
                scalar_curvature: Some(-0.5),
                structure_constants: vec![(2, 0, 1, -1.0), (2, 1, 0, 1.0)],
            },
        },
        "affine_product" => CatalogEntry {
            name: "affine_product",
            spec: FramingSpec {
                dim: 4,
                domain: vec![[0.1, 10.0], [-10.0, 10.0], [0.1, 10.0], [-10.0, 10.0]],
                w: rows(&[
                    &["x1", "0", "0", "0"],
                    &["0", "x1", "0", "0"],
                    &["0", "0", "x3", "0"],
                    &["0", "0", "0", "x3"],
                ]),
            },
            expected: Expected {
                flat: true,
                scalar_curvature: Some(-4.0),
                structure_constants: vec![
                    (1, 0, 1, -1.0),
                    (1, 1, 0, 1.0),
                    (3, 2, 3, -1.0),
                    (3, 3, 2, 1.0),
                ],
            },
        },
        "nonflat_demo" => CatalogEntry {
            name: "nonflat_demo",
            spec: FramingSpec {
                dim: 2,
                domain: vec![[-2.0, 2.0], [-2.0, 2.0]],
                w: rows(&[&["1", "0"], &["0", "1+x1^2"]]),
            },
            expected: Expected {
                flat: false,
                scalar_curvature: None,
                structure_constants: vec![],
            },
        },
        "nonflat_demo4" => CatalogEntry {
            name: "nonflat_demo4",
            spec: FramingSpec {
                dim: 4,
                domain: vec![[-2.0, 2.0]; 4],
                w: rows(&[
                    &["1", "0", "0", "0"],
                    &["0", "1+x1^2", "0", "0"],
                    &["0", "0", "1", "0"],
                    &["0", "0", "0", "1"],
                ]),
            },
            expected: Expected {
                flat: false,
                scalar_curvature: None,
                structure_constants: vec![],
            },
        },
        _ => return None,
    };
    Some(e)
}

/// Catalog names in lexicographic order.
pub fn names() -> Vec<&'static str> {
    let mut all = vec![
        "abelian2",
        "abelian4",
        "affine2",
        "affine_product",
        "heis3xR",
        "heisenberg3",
        "nonflat_demo",
        "nonflat_demo4",
    ];
    all.sort_unstable();
    all
}

pub fn get_example(name: &str) -> Result<CatalogEntry> {
    entry(name).ok_or_else(|| Error::UnknownExample(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_sorted_and_nonempty() {
        let n = names();
        assert!(!n.is_empty());
        let mut sorted = n.clone();
        sorted.sort_unstable();
        assert_eq!(n, sorted);
    }

    #[test]
    fn every_entry_compiles() {
        for name in names() {
            let e = get_example(name).unwrap();
            assert_eq!(e.name, name);
            e.spec.compile().unwrap();
        }
    }

    #[test]
    fn expected_fixture_values() {
        assert!(get_example("abelian2").unwrap().expected.structure_constants.is_empty());
        assert_eq!(get_example("affine2").unwrap().expected.scalar_curvature, Some(-2.0));
    }

    #[test]
    fn unknown_example_is_an_error() {
        assert_eq!(get_example("nope").unwrap_err(), Error::UnknownExample("nope".into()));
    }
}

//! Lagrange `P1`–`P3` shape functions on the reference triangle.
//!
//! Local dof order: the three vertices, then `k - 1` nodes on each of the
//! edges `(0,1)`, `(1,2)`, `(2,0)` listed from the first to the second
//! endpoint, then the interior node (only for `k = 3`).

use crate::{Error, Result};

pub const EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

pub fn check_degree(k: usize) -> Result<()> {
    if (1..=3).contains(&k) {
        Ok(())
    } else {
        Err(Error::UnsupportedDegree(k))
    }
}

/// Number of local dofs of a `P^k` triangle.
pub fn local_dofs(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Reference coordinates of the local nodes.
pub fn reference_nodes(k: usize) -> Result<Vec<[f64; 2]>> {
    check_degree(k)?;
    let verts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let mut nodes = verts.to_vec();
    for [a, b] in EDGES {
        for j in 1..k {
            let s = j as f64 / k as f64;
            nodes.push([
                (1.0 - s) * verts[a][0] + s * verts[b][0],
                (1.0 - s) * verts[a][1] + s * verts[b][1],
            ]);
        }
    }
    if k == 3 {
        nodes.push([1.0 / 3.0, 1.0 / 3.0]);
    }
    Ok(nodes)
}

/// Values and reference gradients of all local basis functions at `xi`.
pub fn reference_basis(k: usize, xi: [f64; 2]) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
    check_degree(k)?;
    let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
    let mut values = Vec::with_capacity(local_dofs(k));
    // derivatives with respect to the three barycentric coordinates
    let mut dl: Vec<[f64; 3]> = Vec::with_capacity(local_dofs(k));
    let unit = |i: usize, s: f64| {
        let mut d = [0.0; 3];
        d[i] = s;
        d
    };
    match k {
        1 => {
            for i in 0..3 {
                values.push(l[i]);
                dl.push(unit(i, 1.0));
            }
        }
        2 => {
            for i in 0..3 {
                values.push(l[i] * (2.0 * l[i] - 1.0));
                dl.push(unit(i, 4.0 * l[i] - 1.0));
            }
            for [a, b] in EDGES {
                values.push(4.0 * l[a] * l[b]);
                let mut d = [0.0; 3];
                d[a] = 4.0 * l[b];
                d[b] = 4.0 * l[a];
                dl.push(d);
            }
        }
        3 => {
            for i in 0..3 {
                let x = l[i];
                values.push(0.5 * x * (3.0 * x - 1.0) * (3.0 * x - 2.0));
                dl.push(unit(i, 0.5 * (27.0 * x * x - 18.0 * x + 2.0)));
            }
            for [a, b] in EDGES {
                for (p, q) in [(a, b), (b, a)] {
                    // node closer to p: 9/2 l_p l_q (3 l_p - 1)
                    values.push(4.5 * l[p] * l[q] * (3.0 * l[p] - 1.0));
                    let mut d = [0.0; 3];
                    d[p] = 4.5 * l[q] * (6.0 * l[p] - 1.0);
                    d[q] = 4.5 * l[p] * (3.0 * l[p] - 1.0);
                    dl.push(d);
                }
            }
            values.push(27.0 * l[0] * l[1] * l[2]);
            dl.push([27.0 * l[1] * l[2], 27.0 * l[0] * l[2], 27.0 * l[0] * l[1]]);
        }
        _ => unreachable!(),
    }
    let grads = dl.iter().map(|d| [d[1] - d[0], d[2] - d[0]]).collect();
    Ok((values, grads))
}

/// Basis values and gradients tabulated at a fixed set of reference points.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub n_local: usize,
    pub values: Vec<Vec<f64>>,
    pub grads: Vec<Vec<[f64; 2]>>,
}

impl Tabulation {
    pub fn new(k: usize, points: &[[f64; 2]]) -> Result<Self> {
        let mut values = Vec::with_capacity(points.len());
        let mut grads = Vec::with_capacity(points.len());
        for &p in points {
            let (v, g) = reference_basis(k, p)?;
            values.push(v);
            grads.push(g);
        }
        Ok(Self {
            n_local: local_dofs(k),
            values,
            grads,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodal_property_for_all_degrees() {
        for k in 1..=3 {
            let nodes = reference_nodes(k).unwrap();
            assert_eq!(nodes.len(), local_dofs(k));
            for (j, &node) in nodes.iter().enumerate() {
                let (v, _) = reference_basis(k, node).unwrap();
                for (i, vi) in v.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((vi - expect).abs() < 1e-13, "k={k} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn examples() {
        let (v, _) = reference_basis(1, [0.0, 0.0]).unwrap();
        assert_eq!(v, vec![1.0, 0.0, 0.0]);
        let (v, _) = reference_basis(2, [0.5, 0.0]).unwrap();
        assert!((v[3] - 1.0).abs() < 1e-15);
        assert!(v.iter().enumerate().all(|(i, x)| i == 3 || x.abs() < 1e-15));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let eps = 1e-6;
        for k in 1..=3 {
            let p = [0.21, 0.37];
            let (_, g) = reference_basis(k, p).unwrap();
            let (vx1, _) = reference_basis(k, [p[0] + eps, p[1]]).unwrap();
            let (vx0, _) = reference_basis(k, [p[0] - eps, p[1]]).unwrap();
            let (vy1, _) = reference_basis(k, [p[0], p[1] + eps]).unwrap();
            let (vy0, _) = reference_basis(k, [p[0], p[1] - eps]).unwrap();
            for i in 0..local_dofs(k) {
                assert!((g[i][0] - (vx1[i] - vx0[i]) / (2.0 * eps)).abs() < 1e-7);
                assert!((g[i][1] - (vy1[i] - vy0[i]) / (2.0 * eps)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn rejects_unsupported_degree() {
        assert!(matches!(reference_basis(4, [0.1, 0.1]), Err(Error::UnsupportedDegree(4))));
        assert!(matches!(reference_basis(0, [0.1, 0.1]), Err(Error::UnsupportedDegree(0))));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn partition_of_unity(k in 1usize..=3, a in 0.0f64..1.0, b in 0.0f64..1.0) {
                let p = if a + b <= 1.0 { [a, b] } else { [1.0 - a, 1.0 - b] };
                let (v, g) = reference_basis(k, p).unwrap();
                prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-13);
                let gx: f64 = g.iter().map(|d| d[0]).sum();
                let gy: f64 = g.iter().map(|d| d[1]).sum();
                prop_assert!(gx.abs() < 1e-12 && gy.abs() < 1e-12);
            }
        }
    }
}

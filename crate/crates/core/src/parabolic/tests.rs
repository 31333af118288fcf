use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::*;
use crate::fem::{DomainRule, FeSpace, Operators};
use crate::geometry::SmoothDomain;
use crate::mesh::{build_mesh, Mesh};
use crate::Vec2;

fn disk_setup(h: f64, k: usize) -> (FeSpace, Operators) {
    let disk = SmoothDomain::disk(1.0).unwrap();
    let space = FeSpace::new(Arc::new(build_mesh(&disk, h).unwrap()), k).unwrap();
    let ops = Operators::assemble(&space).unwrap();
    (space, ops)
}

fn single_triangle() -> (FeSpace, Operators) {
    let mesh = Mesh::from_parts(
        vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.2), Vec2::new(0.3, 0.9)],
        vec![None; 3],
        vec![[0, 1, 2]],
    )
    .unwrap();
    let space = FeSpace::new(Arc::new(mesh), 1).unwrap();
    let ops = Operators::assemble(&space).unwrap();
    (space, ops)
}

#[test]
fn constants_decay_by_the_scalar_recurrence() {
    let (space, ops) = disk_setup(0.3, 2);
    let u0 = vec![2.0; space.n_dofs()];
    let dt = 0.05;
    let zero = vec![0.0; space.n_dofs()];
    for (scheme, factor) in [
        (Scheme::BackwardEuler, 1.0 / (1.0 + dt)),
        (Scheme::CrankNicolson, (1.0 - dt / 2.0) / (1.0 + dt / 2.0)),
    ] {
        let traj = solve_parabolic(&ops, &u0, |_| Ok(zero.clone()), 0.5, dt, scheme).unwrap();
        for (n, u) in traj.states.iter().enumerate() {
            let expect = 2.0 * factor.powi(n as i32);
            assert!(u.iter().all(|v| (v - expect).abs() < 1e-9), "{scheme:?} n={n}");
        }
    }
    let traj = solve_parabolic(&ops, &zero, |_| Ok(zero.clone()), 0.5, dt, Scheme::CrankNicolson).unwrap();
    assert!(traj.states.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn single_element_step_matches_dense_recurrence() {
    let (_space, ops) = single_triangle();
    let m = ops.mass.to_dense();
    let k = ops.form.to_dense();
    let dt = 0.1;
    let u0 = DVector::from_vec(vec![1.0, -0.5, 0.25]);
    let f = DVector::from_vec(vec![0.3, 0.1, -0.2]);
    let lhs = &m + &k * (0.5 * dt);
    let rhs = (&m - &k * (0.5 * dt)) * &u0 + &f * dt;
    let oracle = lhs.lu().solve(&rhs).unwrap();
    let fv: Vec<f64> = f.iter().copied().collect();
    let got = step(&ops, u0.as_slice(), dt, |_| fv.clone(), 0.0, Scheme::CrankNicolson).unwrap();
    for i in 0..3 {
        assert!((got[i] - oracle[i]).abs() < 1e-10);
    }
    let ah = apply_ah(&ops, &[1.0, 2.0, 3.0]).unwrap();
    let dense = m.lu().solve(&(&k * DVector::from_vec(vec![1.0, 2.0, 3.0]))).unwrap();
    for i in 0..3 {
        assert!((ah[i] - dense[i]).abs() < 1e-9);
    }
}

#[test]
fn backward_euler_contracts_in_mass_norm() {
    let (space, ops) = disk_setup(0.25, 1);
    let u0: Vec<f64> = (0..space.n_dofs()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
    let zero = vec![0.0; space.n_dofs()];
    let traj = solve_parabolic(&ops, &u0, |_| Ok(zero.clone()), 0.2, 0.01, Scheme::BackwardEuler).unwrap();
    for w in traj.states.windows(2) {
        assert!(mass_norm(&ops.mass, &w[1]) <= mass_norm(&ops.mass, &w[0]));
    }
}

#[test]
fn eigenbasis_invariants_and_semigroup() {
    let (space, ops) = disk_setup(0.3, 1);
    let basis = EigenBasis::new(&ops, DEFAULT_EIGEN_CAP).unwrap();
    assert!((basis.values[0] - 1.0).abs() < 1e-9);
    assert!(basis.values.windows(2).all(|w| w[0] <= w[1]));
    assert!(basis.orthonormality_defect() < 1e-8);
    let k = ops.form.to_dense();
    let m = ops.mass.to_dense();
    let lam = DMatrix::from_diagonal(&DVector::from_vec(basis.values.clone()));
    let resid = (&k * &basis.vectors - &m * &basis.vectors * lam).abs().max();
    assert!(resid <= 1e-7 * basis.values.last().unwrap());

    let sg = Semigroup::Spectral(basis);
    let v0: Vec<f64> = space.dof_coords.iter().map(|p| p.x * p.x - p.y).collect();
    let a = sg.apply(&sg.apply(&v0, 0.2).unwrap(), 0.3).unwrap();
    let b = sg.apply(&v0, 0.5).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-8);
    }
    assert_eq!(sg.apply(&v0, 0.0).unwrap(), v0);
    let c = sg.apply(&vec![3.0; space.n_dofs()], 0.7).unwrap();
    assert!(c.iter().all(|v| (v - 3.0 * (-0.7f64).exp()).abs() < 1e-9));
    assert!(matches!(
        EigenBasis::new(&ops, 10),
        Err(crate::Error::TooLarge { .. })
    ));
}

#[test]
fn spectral_and_stepping_agree() {
    let (space, ops) = disk_setup(0.2, 1);
    let sg = Semigroup::new(&ops, DEFAULT_EIGEN_CAP).unwrap();
    let v0: Vec<f64> = space.dof_coords.iter().map(|p| (2.0 * p.x).cos() + p.y).collect();
    let exact = sg.apply(&v0, 0.1).unwrap();
    let zero = vec![0.0; space.n_dofs()];
    let traj = solve_parabolic(&ops, &v0, |_| Ok(zero.clone()), 0.1, 1e-4, Scheme::BackwardEuler).unwrap();
    let diff: Vec<f64> = exact.iter().zip(traj.final_state()).map(|(a, b)| a - b).collect();
    assert!(mass_norm(&ops.mass, &diff) <= 1e-3 * mass_norm(&ops.mass, &exact));
    let sub = Semigroup::Substep(ops.clone()).apply(&v0, 0.1).unwrap();
    let diff: Vec<f64> = exact.iter().zip(&sub).map(|(a, b)| a - b).collect();
    assert!(mass_norm(&ops.mass, &diff) <= 1e-2 * mass_norm(&ops.mass, &exact));
}

#[test]
fn maxreg_matches_closed_form_for_exponential_load() {
    let (space, ops) = disk_setup(0.4, 1);
    let basis = EigenBasis::new(&ops, DEFAULT_EIGEN_CAP).unwrap();
    let rule = DomainRule::for_loads(&space).unwrap();
    let n = space.n_dofs();
    let load = LoadSeries::from_fn(n, 1.0, 256, |t| vec![(-t).exp(); n]);
    let got = maxreg_ratio(&space, &basis, &rule, &load, 2).unwrap();
    // u = t e^{-t}; A u = u; u' = (1 - t) e^{-t}
    let m = 100_000;
    let (mut a, mut d, mut f) = (0.0, 0.0, 0.0);
    for i in 0..m {
        let t = (i as f64 + 0.5) / m as f64;
        let e = (-2.0 * t).exp() / m as f64;
        a += t * t * e;
        d += (1.0 - t) * (1.0 - t) * e;
        f += e;
    }
    let expect = (a.sqrt() + d.sqrt()) / f.sqrt();
    assert!((got.ratio - expect).abs() < 1e-3 * expect, "{} vs {expect}", got.ratio);
    let zero = LoadSeries::from_fn(n, 1.0, 64, |_| vec![0.0; n]);
    assert_eq!(maxreg_ratio(&space, &basis, &rule, &zero, 4).unwrap().ratio, 0.0);
}

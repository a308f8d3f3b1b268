use absentia_core::certify::{constants_thm1, pointwise_sufficient};
use absentia_core::eigensolve::{smallest_eigs, SolverOptions};
use absentia_core::field::{ab_potential, transverse_gauge, AngularFluxDensity, RadialFieldProfile};
use absentia_core::forms::{assemble_dirichlet_form, hamiltonian_form, potential_mass, quadrature_mass, HermitianForm};
use absentia_core::identities::{manufacture, UProfile};
use absentia_core::mesh::build_grid;
use absentia_core::potential::{PotentialModel, ScalarPotential};
use nalgebra::{Complex, DMatrix};

/// Ascending eigenvalues of `H x = λ M x` with diagonal `M`.
fn dense_pencil(h: &HermitianForm<f64>, m: &[f64]) -> Vec<f64> {
    let n = h.dimension();
    let s: Vec<f64> = m.iter().map(|x| 1.0 / x.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let e = h.entry(i, j);
        Complex::new(e.re, e.im) * (s[i] * s[j])
    });
    let a = (&a + a.adjoint()) * Complex::new(0.5, 0.0);
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn assert_matches_dense(h: &HermitianForm<f64>, m: &absentia_core::forms::WeightMass<f64>, k: usize) {
    let got = smallest_eigs(h, Some(m), k, &SolverOptions::default()).unwrap();
    assert!(got.converged);
    let want = dense_pencil(h, m.diag());
    for i in 0..k {
        let scale = 1.0 + want[i].abs();
        assert!(
            (got.eigenvalues[i] - want[i]).abs() <= 1e-8 * scale,
            "eigenvalue {i}: {} vs dense {}",
            got.eigenvalues[i],
            want[i]
        );
    }
}

#[test]
fn step_field_spectrum_matches_dense() {
    let g = build_grid(0.0, 3.0, 8, 16, 1.0).unwrap();
    let a = transverse_gauge(&RadialFieldProfile::step(2.0, 1.0).unwrap());
    let h = assemble_dirichlet_form(&a, &g).unwrap();
    assert_matches_dense(&h, &quadrature_mass(&g).unwrap(), 5);
}

#[test]
fn ab_spectrum_with_well_matches_dense() {
    let g = build_grid(0.05, 4.0, 10, 12, 1.5).unwrap();
    let a = ab_potential(&AngularFluxDensity::series(0.3, vec![0.1], vec![0.05]).unwrap());
    let v = PotentialModel::real(ScalarPotential::Gaussian {
        amplitude: -3.0,
        width: 1.0,
    });
    let h = hamiltonian_form(&assemble_dirichlet_form(&a, &g).unwrap(), &potential_mass(&g, &v).unwrap()).unwrap();
    assert_matches_dense(&h, &quadrature_mass(&g).unwrap(), 4);
}

#[test]
fn disk_dirichlet_laplacian_converges_to_bessel_zero() {
    // λ₁ = j₀,₁² / R² on the disk of radius R.
    let j01 = 2.404825557695773f64;
    let mut errors = Vec::new();
    for n_r in [24, 48, 96] {
        let g = build_grid(0.0, 2.0, n_r, 16, 1.0).unwrap();
        let h = assemble_dirichlet_form(&transverse_gauge(&RadialFieldProfile::zero()), &g).unwrap();
        let r = smallest_eigs(&h, Some(&quadrature_mass(&g).unwrap()), 1, &SolverOptions::default()).unwrap();
        errors.push((r.eigenvalues[0] - j01 * j01 / 4.0).abs());
    }
    assert!(errors[2] < 1e-3, "{errors:?}");
    assert!(errors[0] / errors[2] > 10.0, "{errors:?}");
}

#[test]
fn manufactured_ground_state_is_an_eigenvector() {
    // A = 0, V = r² - 2 has ground state e^{-r²/2} with eigenvalue 0.
    let pair = manufacture(UProfile::gaussian(1.0), &transverse_gauge(&RadialFieldProfile::zero()), 0.0).unwrap();
    let g = build_grid(0.0, 8.0, 160, 16, 1.0).unwrap();
    let v = PotentialModel::real(ScalarPotential::Harmonic {
        coeff: 1.0,
        offset: -2.0,
    });
    let h = hamiltonian_form(&assemble_dirichlet_form(pair.potential(), &g).unwrap(), &potential_mass(&g, &v).unwrap())
        .unwrap();
    let r = smallest_eigs::<f64>(&h, Some(&quadrature_mass(&g).unwrap()), 2, &SolverOptions::default()).unwrap();
    assert!(r.eigenvalues[0].abs() < 5e-3, "{:?}", r.eigenvalues);
    // Next radial level of the oscillator sits at 2.
    assert!((r.eigenvalues[1] - 2.0).abs() < 2e-2, "{:?}", r.eigenvalues);
}

#[test]
fn variational_constants_never_exceed_pointwise_bounds() {
    let g = build_grid(0.0, 3.0, 48, 16, 1.0).unwrap();
    let a = transverse_gauge(&RadialFieldProfile::step(1.0, 1.0).unwrap());
    let v = PotentialModel::new(
        ScalarPotential::Zero,
        ScalarPotential::Step {
            value: 0.05,
            radius: 0.5,
        },
        ScalarPotential::Zero,
    )
    .unwrap();
    let pw = pointwise_sufficient(&a, &v, &g).unwrap().selected;
    let c = constants_thm1(&a, &v, &g, &SolverOptions::default()).unwrap();
    for e in &c.entries {
        if let Some(&bound) = pw.squared.get(&e.name) {
            assert!(e.squared <= bound * (1.0 + 1e-9), "{}: {} > {}", e.name, e.squared, bound);
        }
    }
}

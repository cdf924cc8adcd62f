mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use vlineq_core::harness::generate::random_psd_form;
use vlineq_core::rng::trial_rng;
use vlineq_core::sesquilinear::{
    cauchy_schwarz_report, classical_equality_witness_search, corollary_fsquare_report, cs_gap,
};
use vlineq_core::{GridConfig, ScalarField, SesquilinearForm};

fn form_and_vectors(
    seed: u64,
    field: ScalarField,
) -> (SesquilinearForm, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Complex64) {
    let mut rng = trial_rng(seed, 0);
    let m = rng.random_range(1..=6usize);
    let n = rng.random_range(1..=8usize);
    let form = random_psd_form(&mut rng, field, m, n);
    let vec = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Complex64> {
        (0..m)
            .map(|_| match field {
                ScalarField::Real => Complex64::new(rng.random_range(-3.0..3.0), 0.0),
                ScalarField::Complex => Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
            })
            .collect()
    };
    let (u, v, w) = (vec(&mut rng), vec(&mut rng), vec(&mut rng));
    let c = match field {
        ScalarField::Real => Complex64::new(rng.random_range(-2.0..2.0), 0.0),
        ScalarField::Complex => Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
    };
    (form, u, v, w, c)
}

fn axpy(c: Complex64, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(a, b)| c * a + b).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_forms_validate(seed in any::<u64>(), field in field()) {
        let (form, ..) = form_and_vectors(seed, field);
        prop_assert!(form.validate(&GridConfig::default()).is_ok());
        prop_assert_eq!(form.hermitian_defect(), 0.0);
    }

    #[test]
    fn sesquilinearity(seed in any::<u64>(), field in field()) {
        let (form, u, v, w, c) = form_and_vectors(seed, field);
        let lhs = form.evaluate(&axpy(c, &u, &w), &v)?;
        let tu = form.evaluate(&u, &v)?.coords().iter().map(|z| c * z).collect::<Vec<_>>();
        let rhs: Vec<Complex64> = tu.iter().zip(form.evaluate(&w, &v)?.coords()).map(|(a, b)| a + b).collect();
        let scale = 1.0 + lhs.max_abs();
        for (a, b) in lhs.coords().iter().zip(&rhs) {
            prop_assert!((a - b).norm() <= 1e-12 * scale * 100.0);
        }
        let lhs2 = form.evaluate(&v, &axpy(c, &u, &w))?;
        let rhs2: Vec<Complex64> = form
            .evaluate(&v, &u)?
            .coords()
            .iter()
            .zip(form.evaluate(&v, &w)?.coords())
            .map(|(a, b)| c.conj() * a + b)
            .collect();
        for (a, b) in lhs2.coords().iter().zip(&rhs2) {
            prop_assert!((a - b).norm() <= 1e-12 * scale * 100.0);
        }
    }

    #[test]
    fn conjugate_symmetry_is_exact(seed in any::<u64>(), field in field()) {
        let (form, u, v, ..) = form_and_vectors(seed, field);
        prop_assert_eq!(form.evaluate(&u, &v)?.conj(), form.evaluate(&v, &u)?);
    }

    #[test]
    fn cauchy_schwarz_identity(seed in any::<u64>(), field in field()) {
        let (form, u, v, ..) = form_and_vectors(seed, field);
        let cfg = GridConfig::default();
        let rep = cauchy_schwarz_report(&form, &u, &v, &cfg)?;
        prop_assert!(rep.identity_residual <= 1e-4, "{}", rep.identity_residual);
        prop_assert!(rep.inequality_violation <= 1e-9 * (1.0 + rep.rhs.max_abs()));
        prop_assert!(rep.gap.coords().iter().all(|z| z.re >= -1e-9 * (1.0 + rep.rhs.max_abs())));
        let gap = cs_gap(&form, &u, &v, &cfg)?;
        prop_assert!(gap.discrepancy() <= cfg.grid_tol);
        prop_assert!(corollary_fsquare_report(&form, &u, &v, &cfg)?.all_passed());
    }

    #[test]
    fn gap_refinement_is_monotone(seed in any::<u64>(), field in field()) {
        let (form, u, v, ..) = form_and_vectors(seed, field);
        let cfg = GridConfig::default();
        let coarse = cs_gap(&form, &u, &v, &cfg)?;
        let fine = cs_gap(&form, &u, &v, &cfg.doubled())?;
        // rounding in the expanded objective scales with the operands, not the gap
        let scale = cauchy_schwarz_report(&form, &u, &v, &cfg)?.rhs;
        for (((c, f), x), s) in coarse
            .definitional
            .coords()
            .iter()
            .zip(fine.definitional.coords())
            .zip(coarse.closed.coords())
            .zip(scale.coords())
        {
            let (ec, ef) = ((c.re - x.re).abs(), (f.re - x.re).abs());
            prop_assert!(ef <= ec + ulps(s.re), "coarse error {} fine error {}", ec, ef);
        }
    }

    #[test]
    fn dependent_vectors_give_equality_with_witness(seed in any::<u64>(), field in field()) {
        let (form, u, _, _, c) = form_and_vectors(seed, field);
        let v: Vec<Complex64> = u.iter().map(|z| c * z).collect();
        let cfg = GridConfig::default();
        let rep = cauchy_schwarz_report(&form, &u, &v, &cfg)?;
        prop_assert!(rep.equality, "{:?}", rep.gap);
        prop_assert!(classical_equality_witness_search(&form, &u, &v, 64, seed, &cfg)?.is_some());
    }
}

#[test]
fn disjoint_diagonal_example_has_equality_without_witness() {
    let form = SesquilinearForm::diagonal(ScalarField::Complex, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let u = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let v = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let cfg = GridConfig::default();
    let rep = cauchy_schwarz_report(&form, &u, &v, &cfg).unwrap();
    assert!(rep.equality);
    assert!(rep.closed_gap.is_zero());
    assert!(classical_equality_witness_search(&form, &u, &v, 10_000, 0, &cfg).unwrap().is_none());
}

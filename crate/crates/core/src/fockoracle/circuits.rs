//! Full circuit states and the eight-port homodyne density.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::basis::FockBasis;
use super::operators::{
    displaced_squeezed_amplitudes, norm_sqr, outcome_displacement, ModeOperator,
};
use super::state::FockArray;
use crate::error::{Error, Result};
use crate::gausscore::{born_constant, CircuitSpec, Variant};
use crate::{Complex64, ComplexMatrix};

/// Largest truncation loss accepted for prepared single-mode states.
pub const MAX_LEAKAGE: f64 = 1e-6;

/// Smallest per-mode cutoff accepted for state preparation.
pub const MIN_CUTOFF: usize = 10;

/// Default per-mode cutoff of the oracle.
pub const DEFAULT_CUTOFF: usize = 14;

fn single_mode_basis(cutoff: usize) -> Result<Arc<FockBasis>> {
    Ok(Arc::new(FockBasis::per_mode(1, cutoff)?))
}

fn squeezed_column(xi: f64, cutoff: usize, n: usize) -> Result<Vec<Complex64>> {
    if cutoff < MIN_CUTOFF {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} below {MIN_CUTOFF}"
        )));
    }
    let v = ModeOperator::squeeze(xi, cutoff)?.matrix.column(n);
    let leak = 1.0 - norm_sqr(&v);
    if leak > MAX_LEAKAGE {
        return Err(Error::CutoffTooSmall(leak));
    }
    Ok(v)
}

/// `S(s)|0>` truncated at `cutoff`.
pub fn squeezed_vacuum(s: f64, cutoff: usize) -> Result<FockArray> {
    let v = squeezed_column(s, cutoff, 0)?;
    FockArray::product(single_mode_basis(cutoff)?, &[v])
}

/// `S(s)|1>` truncated at `cutoff`.
pub fn squeezed_single_photon(s: f64, cutoff: usize) -> Result<FockArray> {
    let v = squeezed_column(s, cutoff, 1)?;
    FockArray::product(single_mode_basis(cutoff)?, &[v])
}

/// `D(alpha(q, p)) S(r)|0>` on one mode.
pub fn projector_state(q: f64, p: f64, r: f64, cutoff: usize) -> Result<FockArray> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "projector squeezing {r} must be positive"
        )));
    }
    let v = displaced_squeezed_amplitudes(outcome_displacement(q, p, r), r, cutoff);
    let leak = 1.0 - norm_sqr(&v);
    if leak > MAX_LEAKAGE {
        return Err(Error::CutoffTooSmall(leak));
    }
    FockArray::product(single_mode_basis(cutoff)?, &[v])
}

/// Eight-port density `N(r)^M |<(q_1,p_1,r) ... (q_M,p_M,r)|psi>|^2`.
pub fn eight_port_density(state: &FockArray, r: f64, point: &[(f64, f64)]) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "projector squeezing {r} must be positive"
        )));
    }
    if point.len() != state.modes() {
        return Err(Error::DimensionMismatch(format!(
            "{} outcomes for {} modes",
            point.len(),
            state.modes()
        )));
    }
    let vecs: Vec<Vec<Complex64>> = point
        .iter()
        .map(|&(q, p)| {
            displaced_squeezed_amplitudes(outcome_displacement(q, p, r), r, state.cutoff())
        })
        .collect();
    let amp = state.overlap_product(&vecs)?;
    Ok(born_constant(r, state.modes()) * amp.norm_sqr())
}

/// How the photon-subtracted (or added) inputs are prepared.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputRoute {
    /// Ladder operator applied to squeezed vacuum, then renormalized.
    #[default]
    Direct,
    /// `S(s)|1>` prepared directly.
    Mapped,
}

/// `S(l) U_T S(k)|0>`.
pub fn trcvs_state(k: f64, l: f64, t: &ComplexMatrix, basis: Arc<FockBasis>) -> Result<FockArray> {
    let modes = basis.modes();
    if t.rows() != modes {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode T on {modes} modes",
            t.rows()
        )));
    }
    let v = squeezed_column(k, basis.cutoff(), 0)?;
    let mut state = FockArray::product(basis, &vec![v; modes])?;
    state.apply_passive(t)?;
    let sl = ModeOperator::squeeze(l, state.cutoff())?;
    for j in 0..modes {
        state.apply_mode_unitary(j, &sl)?;
    }
    Ok(state)
}

/// Output state of the forward circuit: squeezed inputs with one photon
/// subtracted (or added) on each flagged mode, followed by `U_Q`.
pub fn cvs_state(
    circuit: &CircuitSpec,
    basis: Arc<FockBasis>,
    route: InputRoute,
) -> Result<FockArray> {
    circuit.validate()?;
    let modes = circuit.modes();
    if basis.modes() != modes {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode basis for {modes} modes",
            basis.modes()
        )));
    }
    let cutoff = basis.cutoff();
    let vac = squeezed_column(circuit.s, cutoff, 0)?;
    let mut state = match route {
        InputRoute::Direct => {
            let mut st = FockArray::product(basis, &vec![vac; modes])?;
            for j in circuit.mode_flags.support() {
                st = match circuit.variant {
                    Variant::Subtracted => st.subtract_photon(j)?,
                    Variant::Added => st.add_photon(j)?,
                };
            }
            st
        }
        InputRoute::Mapped => {
            let one = squeezed_column(circuit.s, cutoff, 1)?;
            let factors: Vec<Vec<Complex64>> = (0..modes)
                .map(|j| {
                    if circuit.mode_flags.is_set(j) {
                        one.clone()
                    } else {
                        vac.clone()
                    }
                })
                .collect();
            FockArray::product(basis, &factors)?
        }
    };
    state.apply_passive(&circuit.interferometer.build_q())?;
    Ok(state)
}

/// Oracle value of a pattern probability with its truncation loss.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub leakage: f64,
}

/// `pattern_prob` of the time-reversed circuit for `circuit`.
pub fn oracle_trcvs_pattern(circuit: &CircuitSpec, basis: Arc<FockBasis>) -> Result<OracleValue> {
    circuit.validate()?;
    let st = trcvs_state(
        circuit.k(),
        circuit.l(),
        &circuit.interferometer.build_t(),
        basis,
    )?;
    Ok(OracleValue {
        value: st.pattern_prob(&circuit.mode_flags)?,
        leakage: st.leakage(),
    })
}

/// Eight-port density of the forward circuit at the origin.
pub fn oracle_origin_density(circuit: &CircuitSpec, basis: Arc<FockBasis>) -> Result<OracleValue> {
    let st = cvs_state(circuit, basis, InputRoute::Direct)?;
    let origin = vec![(0.0, 0.0); st.modes()];
    Ok(OracleValue {
        value: eight_port_density(&st, circuit.r, &origin)?,
        leakage: st.leakage(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gausscore::{pr_trcvs_pattern, InterferometerSpec};
    use crate::random::{interferometer, seeded_rng};
    use std::f64::consts::PI;

    #[test]
    fn squeezed_vacuum_examples() {
        let v = squeezed_vacuum(1.0, 12).unwrap();
        assert_eq!(v.amplitudes()[0], Complex64::new(1.0, 0.0));
        let s = squeezed_vacuum(1.2, 20).unwrap();
        assert!(s
            .amplitudes()
            .iter()
            .skip(1)
            .step_by(2)
            .all(|z| z.norm() < 1e-12));
        assert!(matches!(
            squeezed_vacuum(3.0, 10),
            Err(Error::CutoffTooSmall(_))
        ));
        assert!(squeezed_vacuum(1.2, 5).is_err());
    }

    #[test]
    fn ladder_routes_agree() {
        for &s in &[1.2, 0.8] {
            let sv = squeezed_vacuum(s, 20).unwrap();
            let one = squeezed_single_photon(s, 20).unwrap();
            let sub = sv.subtract_photon(0).unwrap();
            let add = sv.add_photon(0).unwrap();
            assert!(sub.fidelity(&one).unwrap() > 1.0 - 1e-8);
            assert!(add.fidelity(&one).unwrap() > 1.0 - 1e-8);
            assert!(sub.amplitudes().iter().step_by(2).all(|z| z.norm() < 1e-10));
        }
    }

    #[test]
    fn zero_squeezing_limit() {
        let one =
            FockArray::number_state(Arc::new(FockBasis::per_mode(1, 20).unwrap()), &[1]).unwrap();
        let mut last = 0.0;
        for &l in &[1.2, 1.1, 1.05, 1.01] {
            let f = squeezed_vacuum(l, 20)
                .unwrap()
                .subtract_photon(0)
                .unwrap()
                .fidelity(&one)
                .unwrap();
            let expected = l.ln().cosh().powi(-3);
            assert!((f - expected).abs() < 1e-10, "{f} vs {expected}");
            assert!(f > last);
            last = f;
        }
        assert!(
            squeezed_vacuum(1.05, 20)
                .unwrap()
                .subtract_photon(0)
                .unwrap()
                .fidelity(&one)
                .unwrap()
                >= 0.995
        );
    }

    #[test]
    fn projector_examples() {
        let p = projector_state(0.0, 0.0, 1.0, 12).unwrap();
        assert!((p.amplitudes()[0] - 1.0).norm() < 1e-15);
        assert!((p.norm_sqr() - 1.0).abs() < 1e-15);
        let p = projector_state(0.7, -0.4, 1.0, 20).unwrap();
        let alpha = Complex64::new(0.7, -0.4);
        assert!((p.amplitudes()[1] - alpha * (-0.5 * alpha.norm_sqr()).exp()).norm() < 1e-14);
        assert!(matches!(
            projector_state(5.0, 5.0, 1.0, 12),
            Err(Error::CutoffTooSmall(_))
        ));
    }

    #[test]
    fn vacuum_density_integrates_to_one() {
        let vac = FockArray::vacuum(Arc::new(FockBasis::per_mode(1, 12).unwrap()));
        for &r in &[1.0, 0.7, 1.6] {
            let d0 = eight_port_density(&vac, r, &[(0.0, 0.0)]).unwrap();
            assert!((d0 - 1.0 / PI).abs() < 1e-14);
            let h = 0.05;
            let mut total = 0.0;
            for i in -160..=160 {
                for j in -160..=160 {
                    let pt = (i as f64 * h, j as f64 * h);
                    total += eight_port_density(&vac, r, &[pt]).unwrap();
                }
            }
            assert!(
                (total * h * h - 1.0).abs() < 1e-4,
                "r = {r}: {}",
                total * h * h
            );
        }
    }

    #[test]
    fn trcvs_identity_is_vacuum() {
        let basis = Arc::new(FockBasis::per_mode(2, 10).unwrap());
        let st = trcvs_state(1.0, 1.0, &ComplexMatrix::identity(2), basis).unwrap();
        assert!((st.amplitudes()[0] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn trcvs_matches_hafnian_formula() {
        let mut rng = seeded_rng(31, 0);
        let basis = Arc::new(FockBasis::per_mode(4, 12).unwrap());
        let mut nonzero = 0;
        for _ in 0..4 {
            let spec = interferometer(4, &mut rng);
            let c = CircuitSpec::new(spec, 2, 1.25, 1.2, 0.1, Variant::Subtracted).unwrap();
            let formula = pr_trcvs_pattern(&c, &c.mode_flags).unwrap();
            let oracle = oracle_trcvs_pattern(&c, Arc::clone(&basis)).unwrap();
            assert!(
                (oracle.value - formula).abs() <= 1e-3 * formula.max(1e-12),
                "{} vs {formula}",
                oracle.value
            );
            nonzero += (formula > 1e-6) as usize;
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn cvs_routes_agree() {
        let mut rng = seeded_rng(32, 0);
        let basis = Arc::new(FockBasis::per_mode(4, 10).unwrap());
        let spec: InterferometerSpec = interferometer(4, &mut rng);
        for variant in [Variant::Subtracted, Variant::Added] {
            let c = CircuitSpec::new(spec.clone(), 2, 1.2, 1.2, 0.1, variant).unwrap();
            let a = cvs_state(&c, Arc::clone(&basis), InputRoute::Direct).unwrap();
            let b = cvs_state(&c, Arc::clone(&basis), InputRoute::Mapped).unwrap();
            assert!(a.fidelity(&b).unwrap() > 1.0 - 1e-8);
        }
    }
}

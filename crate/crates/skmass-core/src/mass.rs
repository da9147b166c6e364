//! N(F_g) from the spectral formula, S_g and the weight average.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::lseries::{l_g_special, l_sym2_fe, CentralSetup, LValueResult, SymSquareCoeffs};
use crate::qseries::{EigenBasis, HeckeEigenform};
use crate::specfun::WeightFnParams;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MassReport {
    /// Weight 2k of g.
    pub weight: u32,
    pub g_label: usize,
    /// L(1/2, sym²f × g) for f ∈ B_{k+1}, in label order.
    pub central: Vec<(usize, LValueResult)>,
    pub l_three_halves: LValueResult,
    pub l_sym2: LValueResult,
    pub n_fg: f64,
    pub s_g: f64,
    pub error_estimate: f64,
    /// Set when the parity guard was overridden (k even, outside the lift setting).
    pub outside_lift: bool,
}

/// The W table and the A_f tables for every f ∈ B_{k+1}.
#[derive(Debug, Clone)]
pub struct MassContext {
    pub k: u32,
    pub central: Option<CentralSetup>,
    sym: Vec<(usize, SymSquareCoeffs)>,
    outside_lift: bool,
}

impl MassContext {
    /// `basis_k1` is B_{k+1}; its forms must reach `CentralSetup::required_bound`.
    pub fn new(basis_k1: &EigenBasis, params: &WeightFnParams, allow_even: bool) -> Result<Self> {
        let k = basis_k1
            .weight
            .checked_sub(1)
            .ok_or(Error::Domain("mass: basis weight must be k + 1"))?;
        if k % 2 == 0 && !allow_even {
            return Err(Error::Parity { weight: 2 * k });
        }
        if params.k != k {
            return Err(Error::Domain("mass: W parameters built for another k"));
        }
        if basis_k1.is_empty() {
            return Ok(MassContext {
                k,
                central: None,
                sym: Vec::new(),
                outside_lift: k % 2 == 0,
            });
        }
        let central = CentralSetup::new(params)?;
        let mut sym = Vec::with_capacity(basis_k1.dimension());
        for f in &basis_k1.forms {
            sym.push((f.label, SymSquareCoeffs::new(f, central.required_bound())?));
        }
        Ok(MassContext {
            k,
            central: Some(central),
            sym,
            outside_lift: k % 2 == 0,
        })
    }

    /// Largest λ_g index needed.
    pub fn required_bound(&self) -> usize {
        self.central.as_ref().map_or(0, |c| c.required_bound())
    }

    /// N(F_g) = (π²/15)(L(3/2,g) L(1,sym²g))^(−1) (12/k) Σ_f L(1/2, sym²f × g).
    pub fn mass(&self, g: &HeckeEigenform) -> Result<MassReport> {
        if g.weight != 2 * self.k {
            return Err(Error::Domain("mass: g must have weight 2k"));
        }
        let l32 = l_g_special(g, 1.5)?;
        let ls = l_sym2_fe(g)?;
        let mut central = Vec::with_capacity(self.sym.len());
        let mut total = 0.0;
        let mut total_err = 0.0;
        if let Some(setup) = &self.central {
            let lam = g.lambda_table(setup.required_bound())?;
            for (label, sym) in &self.sym {
                let v = setup.evaluate(sym, &lam, true)?;
                total += v.value;
                total_err += v.error_estimate;
                central.push((*label, v));
            }
        }
        let pre = PI * PI / 15.0 / (l32.value * ls.value) * 12.0 / self.k as f64;
        let n_fg = pre * total;
        let err = pre * total_err + n_fg.abs() * (l32.error_estimate / l32.value + ls.error_estimate / ls.value);
        Ok(MassReport {
            weight: g.weight,
            g_label: g.label,
            central,
            l_three_halves: l32,
            l_sym2: ls,
            n_fg,
            s_g: l32.value * n_fg,
            error_estimate: err,
            outside_lift: self.outside_lift,
        })
    }
}

/// N(F_g) for one g ∈ B_{2k}, k odd unless `allow_even`.
pub fn mass(
    g: &HeckeEigenform,
    basis_k1: &EigenBasis,
    params: &WeightFnParams,
    allow_even: bool,
) -> Result<MassReport> {
    MassContext::new(basis_k1, params, allow_even)?.mass(g)
}

/// (12/(2k−1)) Σ_{g ∈ B_{2k}} N(F_g), with the individual reports.
pub fn average_mass(
    basis_2k: &EigenBasis,
    basis_k1: &EigenBasis,
    params: &WeightFnParams,
) -> Result<(f64, Vec<MassReport>)> {
    let ctx = MassContext::new(basis_k1, params, false)?;
    if basis_2k.weight != 2 * ctx.k {
        return Err(Error::Domain("average_mass: bases must have weights 2k and k + 1"));
    }
    let mut reports = Vec::with_capacity(basis_2k.dimension());
    let mut s = 0.0;
    for g in &basis_2k.forms {
        let r = ctx.mass(g)?;
        s += r.n_fg;
        reports.push(r);
    }
    Ok((12.0 / (2.0 * ctx.k as f64 - 1.0) * s, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extend::extend_basis;
    use crate::qseries::{default_precision, hecke_eigenbasis};

    fn pair(two_k: u32) -> (EigenBasis, EigenBasis, WeightFnParams) {
        let k = two_k / 2;
        let p = WeightFnParams::new(k);
        let mut g = hecke_eigenbasis(two_k, default_precision(two_k)).unwrap();
        let mut f = hecke_eigenbasis(k + 1, default_precision(k + 1)).unwrap();
        if !f.is_empty() {
            let b = CentralSetup::new(&p).unwrap().required_bound() as u64;
            extend_basis(&mut f, b).unwrap();
            extend_basis(&mut g, b).unwrap();
        }
        (g, f, p)
    }

    #[test]
    fn empty_spaces_give_zero() {
        for w in [18, 26] {
            let (g, f, p) = pair(w);
            let (avg, reps) = average_mass(&g, &f, &p).unwrap();
            assert_eq!(avg, 0.0);
            for r in reps {
                assert_eq!(r.n_fg, 0.0);
                assert!(r.central.is_empty());
            }
        }
    }

    #[test]
    fn weight_22_matches_oracle() {
        let (g, f, p) = pair(22);
        let r = mass(&g.forms[0], &f, &p, false).unwrap();
        let want = PI * PI / 15.0 / (0.641764737779191 * 0.940990211916471) * 12.0 / 11.0 * 0.70152373050;
        assert!((r.n_fg - want).abs() < 1e-9, "{}", r.n_fg);
        assert!(r.n_fg > 0.0 && r.s_g > 0.0 && !r.outside_lift);
        assert!(r.error_estimate < 1e-6);
        let (avg, _) = average_mass(&g, &f, &p).unwrap();
        assert!((avg - 12.0 / 21.0 * r.n_fg).abs() < 1e-15);
    }

    #[test]
    fn parity_guard() {
        let f = EigenBasis {
            weight: 13,
            forms: Vec::new(),
            precision: 60,
        };
        let p = WeightFnParams::new(12);
        assert!(matches!(MassContext::new(&f, &p, false), Err(Error::Parity { .. })));
        let ctx = MassContext::new(&f, &p, true).unwrap();
        let g = hecke_eigenbasis(24, 96).unwrap();
        let r = ctx.mass(&g.forms[0]).unwrap();
        assert!(r.outside_lift && r.n_fg == 0.0);
    }
}

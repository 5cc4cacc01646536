//! A small Buchberger implementation, used to decide zero-dimensionality.

use super::{Homogeneity, Monomial, Polynomial};
use crate::error::{Error, Result};

fn monic(f: &Polynomial) -> Polynomial {
    let (_, c) = f.leading_term().expect("nonzero");
    f.scale(f.field().inv_nz(c))
}

/// Full reduction of `f` modulo `basis` (every term, not only the leading one).
pub fn normal_form(f: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let field = f.field().clone();
    let mut rest = f.clone();
    let mut out = Polynomial::zero(&field, f.nvars());
    while let Some((lm, lc)) = rest.leading_term() {
        let lm = lm.clone();
        let divisor = basis.iter().find(|g| g.leading_term().is_some_and(|(gm, _)| gm.divides(&lm)));
        match divisor {
            Some(g) => {
                let (gm, gc) = g.leading_term().unwrap();
                let c = field.neg(field.mul(lc, field.inv_nz(gc)));
                let shift = gm.quotient_of(&lm);
                rest.axpy_shifted(c, &shift, g);
            }
            None => {
                rest.terms.remove(&lm);
                out.add_term(lm, lc);
            }
        }
    }
    out
}

fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let field = f.field();
    let (fm, fc) = f.leading_term().unwrap();
    let (gm, gc) = g.leading_term().unwrap();
    let l = fm.lcm(gm);
    let mut s = f.mul_term(&fm.quotient_of(&l), field.inv_nz(fc));
    s.axpy_shifted(field.neg(field.inv_nz(gc)), &gm.quotient_of(&l), g);
    s
}

/// Whether every S-polynomial of `basis` reduces to zero.
pub fn is_groebner_basis(basis: &[Polynomial]) -> bool {
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            if !normal_form(&s_polynomial(&basis[i], &basis[j]), basis).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Groebner basis for the grlex order. Pairs with coprime leading monomials
/// are skipped (Buchberger's first criterion); the result is self-checked.
pub fn groebner_basis(gens: &[Polynomial]) -> Result<Vec<Polynomial>> {
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    for g in gens {
        if g.field() != first.field() {
            return Err(Error::FieldMismatch);
        }
        if g.nvars() != first.nvars() {
            return Err(Error::NvarsMismatch(first.nvars(), g.nvars()));
        }
    }
    let mut basis: Vec<Polynomial> = Vec::new();
    for g in gens {
        let r = normal_form(g, &basis);
        if !r.is_zero() {
            basis.push(monic(&r));
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let lcm_deg = |b: &[Polynomial], (i, j): (usize, usize)| -> usize {
        b[i].leading_term().unwrap().0.lcm(b[j].leading_term().unwrap().0).degree()
    };
    while !pairs.is_empty() {
        // Normal selection: smallest lcm degree first, ties by index.
        let k = (0..pairs.len()).min_by_key(|&k| (lcm_deg(&basis, pairs[k]), pairs[k])).unwrap();
        let (i, j) = pairs.swap_remove(k);
        let (mi, mj): (&Monomial, &Monomial) = (basis[i].leading_term().unwrap().0, basis[j].leading_term().unwrap().0);
        if mi.is_coprime(mj) {
            continue;
        }
        let r = normal_form(&s_polynomial(&basis[i], &basis[j]), &basis);
        if !r.is_zero() {
            let n = basis.len();
            basis.push(monic(&r));
            pairs.extend((0..n).map(|i| (i, n)));
        }
    }
    if !is_groebner_basis(&basis) {
        return Err(Error::Audit("Buchberger output failed the S-polynomial check".into()));
    }
    Ok(basis)
}

/// Whether `R / (gens)` is finite dimensional; `gens` must be homogeneous.
pub fn is_zero_dimensional(nvars: usize, gens: &[Polynomial]) -> Result<bool> {
    for g in gens {
        if g.nvars() != nvars {
            return Err(Error::NvarsMismatch(nvars, g.nvars()));
        }
        if g.homogeneity() == Homogeneity::Inhomogeneous {
            return Err(Error::Inhomogeneous);
        }
    }
    if nvars == 0 {
        return Ok(true);
    }
    let gb = groebner_basis(gens)?;
    let mut covered = vec![false; nvars];
    for g in &gb {
        let (m, _) = g.leading_term().unwrap();
        if m.degree() == 0 {
            return Ok(true);
        }
        if let Some(j) = m.pure_power_var() {
            covered[j] = true;
        }
    }
    Ok(covered.iter().all(|&c| c))
}

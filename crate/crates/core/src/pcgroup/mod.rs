//! Weighted polycyclic presentations of torsion-free nilpotent groups of
//! class at most 3, with exact multiplication by collection.
//!
//! A presentation lists generators `g_1, ..., g_k` with weights in `{1, 2, 3}`,
//! sorted by weight, together with the normal form of every commutator
//! `[g_j, g_i] = g_j^-1 g_i^-1 g_j g_i` for `i < j`. Each such commutator may
//! only involve generators of weight at least `w_i + w_j`. Consequences used by
//! the collector:
//!
//! * weight-3 generators are central;
//! * weight-2 and weight-3 generators span an abelian normal subgroup `A`, so
//!   exponent vectors restricted to those coordinates add;
//! * for `a ∈ A` and a weight-1 generator `g`, `[a, g]` is central and linear in `a`.
//!
//! Elements are exponent vectors of the normal form `g_1^e_1 ··· g_k^e_k`.

mod consistency;
mod element;
mod expr;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::intlattice::{lattice_kernel, IntMatrix, Lattice};

pub use consistency::{consistency_check, ConsistencyFailure, ConsistencyReport, FailureKind};
pub use element::GroupElement;
pub use expr::{parse_expr, Expr};

#[derive(Clone, PartialEq, Eq)]
pub struct PcPresentation {
    names: Vec<String>,
    weights: Vec<u8>,
    /// `tails[j][i]` (i < j) is the exponent vector of `[g_j, g_i]`.
    tails: Vec<Vec<Vec<BigInt>>>,
    definitions: Vec<Option<Expr>>,
    central: Vec<usize>,
    first_nonlinear: usize,
}

/// Collects generator data and commutator relations; `build` validates.
#[derive(Debug, Clone, Default)]
pub struct PresentationBuilder {
    names: Vec<String>,
    weights: Vec<u8>,
    definitions: Vec<Option<Expr>>,
    relations: Vec<(usize, usize, Vec<(usize, BigInt)>)>,
}

impl PresentationBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a generator and returns its index.
    pub fn generator(&mut self, name: impl Into<String>, weight: u8, definition: Option<Expr>) -> usize {
        self.names.push(name.into());
        self.weights.push(weight);
        self.definitions.push(definition);
        self.names.len() - 1
    }

    /// Sets `[g_j, g_i]` for `i < j` to the word `Π g_l^{e_l}` (any order; the
    /// involved generators commute).
    pub fn commutator(&mut self, j: usize, i: usize, word: &[(usize, i64)]) -> &mut Self {
        self.relations.push((j, i, word.iter().map(|&(l, e)| (l, BigInt::from(e))).collect()));
        self
    }

    pub fn commutator_big(&mut self, j: usize, i: usize, word: Vec<(usize, BigInt)>) -> &mut Self {
        self.relations.push((j, i, word));
        self
    }

    /// Validated presentation: structural checks plus [`consistency_check`].
    pub fn build(&self) -> Result<PcPresentation> {
        let p = self.build_unchecked()?;
        let report = consistency_check(&p);
        if let Some(f) = report.failures.first() {
            return Err(Error::InvalidPresentation(format!("inconsistent: {f}")));
        }
        Ok(p)
    }

    /// Structural checks only. Used to examine broken tables.
    pub fn build_unchecked(&self) -> Result<PcPresentation> {
        let k = self.names.len();
        let weights = &self.weights;
        if let Some(w) = weights.iter().find(|&&w| !(1..=3).contains(&w)) {
            return Err(Error::InvalidPresentation(format!("weight {w} outside 1..=3")));
        }
        if weights.windows(2).any(|p| p[0] > p[1]) {
            return Err(Error::InvalidPresentation("generators must be sorted by weight".into()));
        }
        for (a, n) in self.names.iter().enumerate() {
            if self.names[..a].contains(n) {
                return Err(Error::InvalidPresentation(format!("duplicate generator name `{n}`")));
            }
        }
        let mut tails = vec![Vec::new(); k];
        for (j, row) in tails.iter_mut().enumerate() {
            *row = vec![vec![BigInt::zero(); k]; j];
        }
        let mut seen = vec![vec![false; k]; k];
        for (j, i, word) in &self.relations {
            let (j, i) = (*j, *i);
            if i >= j || j >= k {
                return Err(Error::InvalidPresentation(format!("relation index ({j}, {i}) must satisfy i < j < {k}")));
            }
            if seen[j][i] {
                return Err(Error::InvalidPresentation(format!("duplicate relation for [g{j}, g{i}]")));
            }
            seen[j][i] = true;
            let floor = weights[i] + weights[j];
            for (l, e) in word {
                if *l >= k {
                    return Err(Error::InvalidPresentation(format!("generator index {l} out of range")));
                }
                if e.is_zero() {
                    continue;
                }
                if weights[*l] < floor {
                    return Err(Error::InvalidPresentation(format!(
                        "[{}, {}] involves {} of weight {} < {}",
                        self.names[j], self.names[i], self.names[*l], weights[*l], floor
                    )));
                }
                tails[j][i][*l] += e;
            }
        }
        for (g, def) in self.definitions.iter().enumerate() {
            if let Some(d) = def {
                if d.max_generator().map_or(false, |m| m >= g) {
                    return Err(Error::InvalidPresentation(format!(
                        "definition of {} refers to a later generator",
                        self.names[g]
                    )));
                }
            }
        }
        let central = (0..k)
            .filter(|&g| (0..k).all(|h| h == g || tail_of(&tails, g, h).iter().all(Zero::is_zero)))
            .collect();
        let first_nonlinear = weights.iter().position(|&w| w > 1).unwrap_or(k);
        Ok(PcPresentation {
            names: self.names.clone(),
            weights: self.weights.clone(),
            tails,
            definitions: self.definitions.clone(),
            central,
            first_nonlinear,
        })
    }
}

fn tail_of(tails: &[Vec<Vec<BigInt>>], a: usize, b: usize) -> &[BigInt] {
    if a > b {
        &tails[a][b]
    } else {
        &tails[b][a]
    }
}

fn binom2(e: &BigInt) -> BigInt {
    e * (e - BigInt::one()) / BigInt::from(2)
}

fn axpy(acc: &mut [BigInt], c: &BigInt, v: &[BigInt]) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += c * x;
        }
    }
}

impl PcPresentation {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Hirsch length.
    pub fn hirsch_length(&self) -> usize {
        self.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn weights(&self) -> &[u8] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> u8 {
        self.weights[i]
    }

    pub fn definition(&self, i: usize) -> Option<&Expr> {
        self.definitions[i].as_ref()
    }

    /// Indices of generators that commute with every generator.
    pub fn center_rows(&self) -> &[usize] {
        &self.central
    }

    /// Number of weight-1 generators.
    pub fn abelian_rank(&self) -> usize {
        self.first_nonlinear
    }

    pub fn indices_of_weight(&self, w: u8) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.weights[i] == w)
    }

    pub fn nilpotency_class(&self) -> u8 {
        let mut class = 0;
        for j in 0..self.len() {
            for i in 0..j {
                for (l, e) in self.tails[j][i].iter().enumerate() {
                    if !e.is_zero() {
                        class = class.max(self.weights[l]);
                    }
                }
            }
        }
        if class == 0 && !self.is_empty() {
            1
        } else {
            class
        }
    }

    /// Exponent vector of `[g_j, g_i]` for any `i != j`.
    pub fn commutator_tail(&self, j: usize, i: usize) -> Vec<BigInt> {
        if j > i {
            self.tails[j][i].clone()
        } else {
            // [g_j, g_i] = [g_i, g_j]^-1, and the tail lives in the abelian part
            self.tails[i][j].iter().map(|x| -x).collect()
        }
    }

    /// `[a, g_j]` for `a` in the abelian part (only weight-2 coordinates matter)
    /// and weight-1 `g_j`; the result is central.
    fn central_bracket(&self, a: &[BigInt], j: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.len()];
        for h in self.first_nonlinear..self.len() {
            if self.weights[h] != 2 || a[h].is_zero() {
                continue;
            }
            axpy(&mut out, &a[h], &self.tails[h][j]);
        }
        out
    }

    /// Right-multiplies the normal form `x` by `g_i^e` in place.
    pub(crate) fn mul_syllable(&self, x: &mut [BigInt], i: usize, e: &BigInt) {
        if e.is_zero() {
            return;
        }
        if self.weights[i] >= 2 {
            x[i] += e;
            return;
        }
        let r = self.first_nonlinear;
        let k = self.len();
        let binom_e = binom2(e);
        // x = u · g_i^{x_i} · v · beta with v over weight-1 generators after i.
        // Then x·g_i^e = u · g_i^{x_i+e} · v^{g_i^e} · beta^{g_i^e}.
        let mut acc = vec![BigInt::zero(); k];
        for j in i + 1..r {
            let vj = x[j].clone();
            if vj.is_zero() {
                continue;
            }
            // g_j^{g_i^e} = g_j · R,  R = e·[g_j,g_i] + C(e,2)·[P, g_i]
            let tail = &self.tails[j][i];
            let d = self.central_bracket(tail, i);
            let mut rr = vec![BigInt::zero(); k];
            axpy(&mut rr, e, tail);
            axpy(&mut rr, &binom_e, &d);
            // (g_j R)^v = g_j^v · (v·R + C(v,2)·[R, g_j])
            let c = self.central_bracket(&rr, j);
            let acc_bracket = self.central_bracket(&acc, j);
            axpy(&mut acc, &vj, &acc_bracket);
            axpy(&mut acc, &vj, &rr);
            axpy(&mut acc, &binom2(&vj), &c);
        }
        let beta: Vec<BigInt> = (0..k).map(|l| if l >= r { x[l].clone() } else { BigInt::zero() }).collect();
        let beta_bracket = self.central_bracket(&beta, i);
        axpy(&mut acc, &BigInt::one(), &beta);
        axpy(&mut acc, e, &beta_bracket);
        x[i] += e;
        for l in r..k {
            x[l] = std::mem::take(&mut acc[l]);
        }
    }

    pub(crate) fn mul_vec(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let mut out = x.to_vec();
        for (i, e) in y.iter().enumerate() {
            self.mul_syllable(&mut out, i, e);
        }
        out
    }

    pub(crate) fn inv_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.len()];
        for i in (0..self.len()).rev() {
            if !x[i].is_zero() {
                self.mul_syllable(&mut out, i, &-&x[i]);
            }
        }
        out
    }

    pub(crate) fn pow_vec(&self, x: &[BigInt], n: &BigInt) -> Vec<BigInt> {
        // powers of one generator, and of anything in the abelian part, just scale
        let support = x.iter().filter(|e| !e.is_zero()).count();
        if support <= 1 || x[..self.first_nonlinear].iter().all(Zero::is_zero) {
            return x.iter().map(|e| e * n).collect();
        }
        let mut base = if n.is_negative() { self.inv_vec(x) } else { x.to_vec() };
        let mut n = n.abs();
        let mut out = vec![BigInt::zero(); self.len()];
        let two = BigInt::from(2);
        while !n.is_zero() {
            if (&n % &two).is_one() {
                out = self.mul_vec(&out, &base);
            }
            n /= &two;
            if !n.is_zero() {
                base = self.mul_vec(&base, &base);
            }
        }
        out
    }

    pub(crate) fn comm_vec(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let xy = self.mul_vec(x, y);
        let yx = self.mul_vec(y, x);
        // [x,y] = (yx)^-1 (xy)
        self.mul_vec(&self.inv_vec(&yx), &xy)
    }

    /// Lattice of exponent vectors of central elements.
    ///
    /// The weight-1 part of a central element must lie in the kernel `K1` of
    /// the bilinear map into the weight-2 layer. On the subgroup of elements
    /// with weight-1 part in `K1`, `x ↦ ([x, g_i])_i` is a homomorphism into
    /// the weight-3 layer, and the center is its kernel.
    pub fn center_lattice(&self) -> Lattice {
        let k = self.len();
        let r = self.first_nonlinear;
        let w3: Vec<usize> = self.indices_of_weight(3).collect();
        let w2: Vec<usize> = self.indices_of_weight(2).collect();
        // weight-1 condition
        let m1 = IntMatrix::from_rows(
            r * w2.len(),
            (0..r)
                .map(|j| {
                    (0..r)
                        .flat_map(|i| {
                            let t = if i == j { vec![BigInt::zero(); k] } else { self.commutator_tail(j, i) };
                            w2.iter().map(move |&h| t[h].clone()).collect::<Vec<_>>()
                        })
                        .collect()
                })
                .collect(),
        );
        let k1 = if r == 0 { Lattice::zero(0) } else { lattice_kernel(&m1) };
        // parameters: K1 basis elements (as pure weight-1 words), then A coordinates
        let mut params: Vec<Vec<BigInt>> = Vec::new();
        for b in k1.basis().row_vecs() {
            let mut v = vec![BigInt::zero(); k];
            v[..r].clone_from_slice(&b);
            params.push(v);
        }
        for l in r..k {
            let mut v = vec![BigInt::zero(); k];
            v[l] = BigInt::one();
            params.push(v);
        }
        let obstruction = |v: &[BigInt]| -> Vec<BigInt> {
            (0..k)
                .flat_map(|i| {
                    let mut g = vec![BigInt::zero(); k];
                    g[i] = BigInt::one();
                    let c = self.comm_vec(v, &g);
                    w3.iter().map(move |&h| c[h].clone()).collect::<Vec<_>>()
                })
                .collect()
        };
        let cols = k * w3.len();
        let m = IntMatrix::from_rows(cols, params.iter().map(|p| obstruction(p)).collect());
        let kernel = lattice_kernel(&m);
        let gens = kernel
            .basis()
            .row_vecs()
            .into_iter()
            .map(|coeffs| {
                let mut x = vec![BigInt::zero(); k];
                for (c, p) in coeffs.iter().zip(&params) {
                    if !c.is_zero() {
                        x = self.mul_vec(&x, &self.pow_vec(p, c));
                    }
                }
                x
            })
            .collect();
        Lattice::from_generators(k, gens).expect("center generators have ambient rank")
    }
}

impl fmt::Debug for PcPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PcPresentation{:?}", self.names)
    }
}

impl fmt::Display for PcPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "generators:")?;
        for (n, w) in self.names.iter().zip(&self.weights) {
            writeln!(f, "  {n} (weight {w})")?;
        }
        writeln!(f, "relations:")?;
        for j in 0..self.len() {
            for i in 0..j {
                let t = &self.tails[j][i];
                if t.iter().all(Zero::is_zero) {
                    continue;
                }
                let word = GroupElement::format_word(&self.names, t);
                writeln!(f, "  [{}, {}] = {}", self.names[j], self.names[i], word)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;

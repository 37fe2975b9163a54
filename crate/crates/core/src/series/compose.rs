use std::sync::Arc;

use super::{basis, MonomialBasis, Series};
use crate::error::{Error, Result};
use crate::matrix::invert_scalars;
use crate::ring::CoeffRing;

/// Products of substitution images over the monomials of a source basis,
/// so that many series can be substituted with the same images cheaply.
pub struct SubstitutionPlan<R: CoeffRing> {
    source: Arc<MonomialBasis>,
    products: Vec<Series<R>>,
}

impl<R: CoeffRing> SubstitutionPlan<R> {
    /// Plan for substituting `images` into series with `images.len()`
    /// variables and degree cap `source_degree`.
    pub fn new(source_degree: u32, images: &[Series<R>]) -> Result<Self> {
        let first = images.first().ok_or_else(|| {
            Error::Shape("substitution into zero variables needs a target shape".into())
        })?;
        let ring = first.ring().clone();
        Self::with_target(&ring, source_degree, images, first.nvars(), first.degree())
    }

    /// Like [`SubstitutionPlan::new`], with an explicit target shape so that
    /// zero-variable sources are allowed.
    pub fn with_target(
        ring: &R,
        source_degree: u32,
        images: &[Series<R>],
        target_vars: usize,
        target_degree: u32,
    ) -> Result<Self> {
        for (index, img) in images.iter().enumerate() {
            if img.nvars() != target_vars || img.degree() != target_degree {
                return Err(Error::Shape(format!("substitution image {index} has the wrong shape")));
            }
            if !ring.is_topologically_nilpotent(img.constant_term()) {
                return Err(Error::SubstituteDomain { index });
            }
        }
        let source = basis(images.len(), source_degree);
        let mut products: Vec<Series<R>> = Vec::with_capacity(source.len());
        for i in 0..source.len() {
            let m = source.monomial(i);
            let prod = match m.iter().position(|&e| e > 0) {
                None => Series::one(ring, target_vars, target_degree),
                Some(j) => {
                    let mut parent = m.to_vec();
                    parent[j] -= 1;
                    let pi = source.index_of(&parent).expect("parent monomial");
                    let base = &products[pi];
                    if base.is_zero() {
                        base.clone()
                    } else {
                        base.mul(&images[j])
                    }
                }
            };
            products.push(prod);
        }
        Ok(Self { source, products })
    }

    pub fn apply(&self, a: &Series<R>) -> Series<R> {
        assert_eq!(a.nvars(), self.source.nvars(), "substitution arity");
        let src = if a.degree() == self.source.degree() {
            a.clone()
        } else {
            a.recap(self.source.degree())
        };
        let ring = a.ring();
        let mut acc = self.products[0].zero_like();
        for (i, c) in src.coeffs().iter().enumerate() {
            if ring.is_zero(c) || self.products[i].is_zero() {
                continue;
            }
            acc = acc.add(&self.products[i].scale(c));
        }
        acc
    }
}

impl<R: CoeffRing> Series<R> {
    /// `self(images_1, ..., images_n)`, truncated at the images' degree cap.
    pub fn substitute(&self, images: &[Series<R>]) -> Result<Self> {
        if images.len() != self.nvars() {
            return Err(Error::Shape(format!(
                "{} images for a series in {} variables",
                images.len(),
                self.nvars()
            )));
        }
        if images.is_empty() {
            return Ok(self.clone());
        }
        Ok(SubstitutionPlan::new(self.degree(), images)?.apply(self))
    }
}

/// Powers `f^0, ..., f^D` of a univariate series without constant term.
#[derive(Clone, Debug)]
pub struct PowerTable<R: CoeffRing> {
    powers: Vec<Series<R>>,
    lead_inv: R::Elem,
}

impl<R: CoeffRing> PowerTable<R> {
    pub fn new(f: &Series<R>) -> Result<Self> {
        if f.nvars() != 1 {
            return Err(Error::Shape("power tables are univariate".into()));
        }
        let ring = f.ring().clone();
        if !ring.is_zero(f.constant_term()) {
            return Err(Error::SubstituteDomain { index: 0 });
        }
        let lead_inv = ring.inv(&f.coeff1(1)).ok_or(Error::RevertSingular)?;
        let mut powers = vec![f.one_like()];
        for k in 1..=f.degree() {
            let next = powers[k as usize - 1].mul(f);
            powers.push(next);
        }
        Ok(Self { powers, lead_inv })
    }

    pub fn power(&self, k: u32) -> &Series<R> {
        &self.powers[k as usize]
    }

    /// `y(f(t))`.
    pub fn compose(&self, y: &Series<R>) -> Series<R> {
        let ring = y.ring();
        let mut acc = self.powers[0].zero_like();
        for (k, c) in y.coeffs().iter().enumerate() {
            if !ring.is_zero(c) {
                acc = acc.add(&self.powers[k].scale(c));
            }
        }
        acc
    }

    /// The series `y` with `y(f(t)) = target(t)`.
    pub fn solve_composition(&self, target: &Series<R>) -> Result<Series<R>> {
        let ring = target.ring().clone();
        let d = target.degree();
        let mut y = target.zero_like();
        let mut lead_pow = ring.one();
        for m in 0..=d {
            let mut rhs = target.coeff1(m);
            for k in 0..m {
                let yk = y.coeff1(k);
                if ring.is_zero(&yk) {
                    continue;
                }
                let c = self.powers[k as usize].coeff1(m);
                if !ring.is_zero(&c) {
                    rhs = ring.sub(&rhs, &ring.mul(&yk, &c));
                }
            }
            let v = ring.mul(&rhs, &lead_pow);
            ring.check_budget(&v)?;
            y.set(&[m], v);
            lead_pow = ring.mul(&lead_pow, &self.lead_inv);
        }
        Ok(y)
    }
}

/// Compositional inverse of `images` (n series in n variables, no constant
/// terms): returns `g` with `images(g(s)) = s` and `g(images(t)) = t`.
pub fn revert<R: CoeffRing>(images: &[Series<R>]) -> Result<Vec<Series<R>>> {
    let n = images.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let ring = images[0].ring().clone();
    let degree = images[0].degree();
    for (index, f) in images.iter().enumerate() {
        if f.nvars() != n || f.degree() != degree {
            return Err(Error::Shape("reversion needs n series in n variables".into()));
        }
        if !ring.is_zero(f.constant_term()) {
            return Err(Error::SubstituteDomain { index });
        }
    }
    if n == 1 {
        let table = PowerTable::new(&images[0])?;
        let s = Series::var(&ring, 1, degree, 0);
        return Ok(vec![table.solve_composition(&s)?]);
    }

    let mut lin = vec![vec![ring.zero(); n]; n];
    for (i, f) in images.iter().enumerate() {
        let mut e = vec![0; n];
        for (j, slot) in lin[i].iter_mut().enumerate() {
            e[j] = 1;
            *slot = f.coeff(&e);
            e[j] = 0;
        }
    }
    let lin_inv = invert_scalars(&ring, &lin).ok_or(Error::RevertSingular)?;
    let apply_lin_inv = |v: &[Series<R>]| -> Vec<Series<R>> {
        (0..n)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (j, vj) in v.iter().enumerate() {
                    if !ring.is_zero(&lin_inv[i][j]) {
                        acc = acc.add(&vj.scale(&lin_inv[i][j]));
                    }
                }
                acc
            })
            .collect()
    };
    let nonlinear: Vec<Series<R>> = images
        .iter()
        .map(|f| f.map_terms(|e, c| if e.iter().sum::<u32>() <= 1 { ring.zero() } else { c.clone() }))
        .collect();
    let s: Vec<Series<R>> = (0..n).map(|j| Series::var(&ring, n, degree, j)).collect();

    // g = L^{-1}(s - h(g)); each pass fixes one more degree.
    let mut g = apply_lin_inv(&s);
    for _ in 1..degree {
        let plan = SubstitutionPlan::new(degree, &g)?;
        let rhs: Vec<Series<R>> = s
            .iter()
            .zip(&nonlinear)
            .map(|(si, hi)| si.sub(&plan.apply(hi)))
            .collect();
        g = apply_lin_inv(&rhs);
        for gi in &g {
            gi.check_budget()?;
        }
    }
    Ok(g)
}

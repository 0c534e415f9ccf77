//! Finite-support Milnor-Witt ideles of Q in section coordinates.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed};

use crate::arith::{factorize, Place, Rational};
use crate::error::{MwError, Result};
use crate::localsym::K1Local;
use crate::mwcore::{milnor_image, residue, witt_image, MilnorNF, MwExpr};

/// A real component and finitely many p-components. Every other component is
/// `(unlisted, 0)`, where `unlisted` is a unit at all unlisted primes
/// (1 for the identity, the Milnor image for diagonal elements).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MwIdele {
    real: K1Local,
    finite: BTreeMap<u64, K1Local>,
    unlisted: Rational,
}

impl Default for MwIdele {
    fn default() -> Self {
        Self::identity()
    }
}

impl MwIdele {
    pub fn identity() -> Self {
        MwIdele {
            real: K1Local::identity(Place::Real),
            finite: BTreeMap::new(),
            unlisted: Rational::one(),
        }
    }

    pub fn new(real: K1Local, finite: BTreeMap<u64, K1Local>) -> Result<Self> {
        Self::with_unlisted(real, finite, Rational::one())
    }

    /// Like [`MwIdele::new`], with `(unlisted, 0)` at every prime not in `finite`.
    pub fn with_unlisted(
        real: K1Local,
        finite: BTreeMap<u64, K1Local>,
        unlisted: Rational,
    ) -> Result<Self> {
        let f = factorize(&unlisted)?;
        if let Some(p) = f.primes().find(|p| !finite.contains_key(p)) {
            return Err(MwError::InconsistentInvariants(format!(
                "unlisted component {unlisted} is not a unit at {p}"
            )));
        }
        if !real.place().is_real() {
            return Err(MwError::PlaceMismatch {
                left: Place::Real,
                right: real.place(),
            });
        }
        for (&p, x) in &finite {
            if x.place() != Place::Finite(p) {
                return Err(MwError::PlaceMismatch {
                    left: Place::Finite(p),
                    right: x.place(),
                });
            }
        }
        Ok(MwIdele {
            real,
            finite,
            unlisted,
        })
    }

    /// Sets the component at `v`.
    pub fn with(mut self, x: K1Local) -> Self {
        match x.place() {
            Place::Real => self.real = x,
            Place::Finite(p) => {
                self.finite.insert(p, x);
            }
        }
        self
    }

    pub fn real(&self) -> &K1Local {
        &self.real
    }

    /// Stored finite components.
    pub fn finite(&self) -> &BTreeMap<u64, K1Local> {
        &self.finite
    }

    /// The `u` shared by all components not stored explicitly.
    pub fn unlisted(&self) -> &Rational {
        &self.unlisted
    }

    /// Component at `v`, including implicit identities.
    pub fn component(&self, v: Place) -> K1Local {
        match v {
            Place::Real => self.real.clone(),
            Place::Finite(p) => self
                .finite
                .get(&p)
                .cloned()
                .unwrap_or_else(|| {
                    K1Local::new(self.unlisted.clone(), 0, v).expect("nonzero unlisted unit")
                }),
        }
    }

    fn support(&self, other: &Self) -> BTreeSet<u64> {
        let mut primes: BTreeSet<u64> = self.finite.keys().chain(other.finite.keys()).copied().collect();
        if !self.unlisted.is_one() || !other.unlisted.is_one() {
            primes.insert(2);
        }
        primes
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        // odd unlisted primes see two units, where the cocycle is trivial
        let mut out = MwIdele {
            real: self.real.add(&other.real)?,
            finite: BTreeMap::new(),
            unlisted: &self.unlisted * &other.unlisted,
        };
        for p in self.support(other) {
            let v = Place::Finite(p);
            out.finite
                .insert(p, self.component(v).add(&other.component(v))?);
        }
        Ok(out)
    }

    /// Componentwise equality, implicit components included.
    pub fn equals(&self, other: &Self) -> bool {
        self.unlisted == other.unlisted
            && self.real == other.real
            && self
                .support(other)
                .into_iter()
                .all(|p| self.component(Place::Finite(p)) == other.component(Place::Finite(p)))
    }

    pub fn is_identity(&self) -> bool {
        self.equals(&Self::identity())
    }

    /// The component at `p` has trivial residue (it lies in `K_1^MW(Z_p)`).
    pub fn is_integral_at(&self, p: u64) -> Result<bool> {
        Ok(residue(&self.component(Place::Finite(p)).to_expr()?, p)?.is_trivial())
    }

    /// `prod_v |u_v|_v` over the support; twists do not contribute.
    pub fn vol(&self) -> Result<Rational> {
        let mut vol = self.real.u().abs();
        for (&p, x) in &self.finite {
            vol *= factorize(x.u())?.p_adic_abs(p);
        }
        Ok(vol)
    }

    /// All components have `u = 1`, so the idele lies in the sum of the local `I^2`.
    pub fn kernel_membership(&self) -> bool {
        self.unlisted.is_one()
            && self.real.u().is_one()
            && self.finite.values().all(|x| x.u().is_one())
    }

    /// Class in the cokernel of `I^2(Q) -> sum_v I^2(Q_v)`, i.e. total twist mod 2.
    pub fn parity(&self) -> Result<u8> {
        if !self.kernel_membership() {
            return Err(MwError::NotInKernel);
        }
        let total: i64 = self.real.twist() + self.finite.values().map(K1Local::twist).sum::<i64>();
        Ok(total.rem_euclid(2) as u8)
    }
}

/// Diagonal image of a degree-1 element: `u` is its Milnor image and the twist
/// at `v` is the local `I^2` class of `e - [u]`.
pub fn diagonal(e: &MwExpr) -> Result<MwIdele> {
    if e.degree() != 1 {
        return Err(MwError::DegreeMismatch {
            expected: 1,
            found: e.degree(),
        });
    }
    let u = match milnor_image(e)? {
        MilnorNF::Unit(u) => u.to_rational(),
        _ => unreachable!("degree-1 Milnor image is a unit"),
    };
    let defect = e.try_sub(&MwExpr::symbol(vec![u.clone()])?)?;
    let class = witt_image(&defect)?;
    let real = K1Local::new(u.clone(), class.signature() / 4, Place::Real)?;
    let mut primes: BTreeSet<u64> = e.primes()?.into_iter().collect();
    primes.insert(2);
    let mut finite = BTreeMap::new();
    for p in primes {
        let twist = (class.class().hasse_at(p) == -1) as i64;
        finite.insert(p, K1Local::new(u.clone(), twist, Place::Finite(p))?);
    }
    MwIdele::with_unlisted(real, finite, u)
}

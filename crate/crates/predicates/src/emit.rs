//! Predicate emissions over a `PredicateBuild`.
//!
//! Every method appends the defining conjunction of one predicate, creating
//! its quantified auxiliaries as fresh variables with realization plans.
//! Arguments are variable tuples (`&[VarId]`); a tuple stands for the joint
//! variable formed by its members. Statement order inside each method
//! follows the defining conjunction and is stable: tests freeze counts.
//!
//! Cardinality-pinning towers (UNIF_k) lean on the global anchor B; exact
//! pinning needs k >= 2 while k = 1 degenerates to functional dependence on
//! the empty set (a one-valued uniform variable is constant).

use crate::build::{CustomSpec, DefPlan, PredicateBuild, SizeExpr, VarId};
use crate::error::PredicateError;
use crate::pq::choose_pq;
use ciwb_ci::CIStatement;
use std::collections::BTreeSet;

fn join(a: &[VarId], b: &[VarId]) -> Vec<VarId> {
    a.iter().chain(b.iter()).copied().collect()
}

/// Which sat gadget to emit: the split-cell count condition it enforces and
/// the uniform auxiliary size it uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatKind {
    /// a_e != 1 on split cells of size 2; auxiliary uniform over 2.
    NeHalf,
    /// a_e <= 1 on split cells of size 2; auxiliary uniform over 3.
    LeHalf,
    /// a_e <= 3 on split cells of size 4; auxiliary uniform over 105
    /// (divisible by 3, 5, and 7, the cell-count denominators).
    LeThreeQuarters,
}

impl SatKind {
    pub fn kappa(self) -> u64 {
        match self {
            SatKind::NeHalf => 2,
            SatKind::LeHalf => 3,
            SatKind::LeThreeQuarters => 105,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SatKind::NeHalf => "sat_ne2",
            SatKind::LeHalf => "sat_le2",
            SatKind::LeThreeQuarters => "sat_le34",
        }
    }
}

impl PredicateBuild {
    /// TRIPLE(Y1, Y2, Y3): each variable is a function of the other two and
    /// the three are pairwise independent. Six statements, no auxiliaries.
    pub fn emit_triple(&mut self, y1: &[VarId], y2: &[VarId], y3: &[VarId]) {
        self.scoped("triple", |b| {
            b.push(CIStatement::fd(y1.to_vec(), join(y2, y3)));
            b.push(CIStatement::fd(y2.to_vec(), join(y1, y3)));
            b.push(CIStatement::fd(y3.to_vec(), join(y1, y2)));
            b.push(CIStatement::ci(y1.to_vec(), y2.to_vec(), vec![]));
            b.push(CIStatement::ci(y1.to_vec(), y3.to_vec(), vec![]));
            b.push(CIStatement::ci(y2.to_vec(), y3.to_vec(), vec![]));
        });
    }

    /// UNIF(X): X extends to a TRIPLE with two same-bound auxiliaries, which
    /// holds exactly when X is uniform.
    pub fn emit_unif(&mut self, x: &[VarId]) {
        if self.memo_hit("unif", &[x], 0) {
            return;
        }
        self.scoped("unif", |b| {
            let kx = b.card(x);
            let u1 = b.fresh_var(x[0], "pad", kx.clone(), DefPlan::FreshUniform(SizeExpr::card_of(x)));
            let u2 = b.fresh_var(
                x[0],
                "otp",
                kx,
                DefPlan::OneTimePad {
                    base: x.to_vec(),
                    pad: u1,
                    modulus: SizeExpr::card_of(x),
                },
            );
            b.emit_triple(x, &[u1], &[u2]);
        });
    }

    /// UNIF_=(Y, Z): Y and Z are uniform with equal cardinality, via two
    /// TRIPLEs sharing one pad.
    pub fn emit_unif_eq(&mut self, y: &[VarId], z: &[VarId]) {
        if self.memo_hit("unifeq", &[y, z], 0) {
            return;
        }
        self.scoped("unifeq", |b| {
            let ky = b.card(y);
            let u1 = b.fresh_var(y[0], "pad", ky.clone(), DefPlan::FreshUniform(SizeExpr::card_of(y)));
            let u2 = b.fresh_var(
                y[0],
                "otp",
                ky.clone(),
                DefPlan::OneTimePad {
                    base: y.to_vec(),
                    pad: u1,
                    modulus: SizeExpr::card_of(y),
                },
            );
            let u3 = b.fresh_var(
                z[0],
                "otp",
                ky,
                DefPlan::OneTimePad {
                    base: z.to_vec(),
                    pad: u1,
                    modulus: SizeExpr::card_of(y),
                },
            );
            b.emit_triple(y, &[u1], &[u2]);
            b.emit_triple(z, &[u1], &[u3]);
        });
    }

    /// PROD(Y^l, G): G is uniform of cardinality prod |Y_i|, witnessed by
    /// independent uniform copies Z_i of the Y_i assembled into a tuple.
    /// 13l + 13 statements on fresh arguments.
    pub fn emit_prod(&mut self, ys: &[Vec<VarId>], g: &[VarId]) {
        self.scoped("prod", |b| {
            let zs: Vec<VarId> = ys
                .iter()
                .map(|y| {
                    let ky = b.card(y);
                    b.fresh_var(y[0], "cp", ky, DefPlan::FreshUniform(SizeExpr::card_of(y)))
                })
                .collect();
            let total: num_bigint::BigUint = zs.iter().map(|&z| b.bound(z).clone()).product();
            let u = b.fresh_var(g[0], "tup", total, DefPlan::TupleOf(zs.clone()));
            b.emit_unif_eq(g, &[u]);
            b.push(CIStatement::fd(vec![u], zs.clone()));
            b.push(CIStatement::fd(zs.clone(), vec![u]));
            for (i, y) in ys.iter().enumerate() {
                b.emit_unif_eq(y, &[zs[i]]);
                if i > 0 {
                    b.push(CIStatement::ci(vec![zs[i]], zs[..i].to_vec(), vec![]));
                }
            }
        });
    }

    /// POW_l(Y, G) = PROD((Y, ..., Y), G) with l copies.
    pub fn emit_pow(&mut self, y: &[VarId], l: u64, g: &[VarId]) {
        let ys: Vec<Vec<VarId>> = (0..l).map(|_| y.to_vec()).collect();
        self.emit_prod(&ys, g);
    }

    /// GESQRT(Y, G): both uniform, |Y| divides |G| and |Y| >= sqrt(|G|).
    /// The auxiliary pair (Z, W) ~ |Y| x |G|/|Y| reassembles G; the sum
    /// V = W + Z mod |Y| stays decodable only when |G|/|Y| <= |Y|.
    /// 46 statements.
    pub fn emit_gesqrt(&mut self, y: &[VarId], g: &[VarId]) {
        self.scoped("gesqrt", |b| {
            let ky = b.card(y);
            let kg = b.card(g);
            let za = b.fresh_var(y[0], "sqz", ky.clone(), DefPlan::FreshUniform(SizeExpr::card_of(y)));
            let w = b.fresh_var(
                g[0],
                "sqw",
                kg.clone(),
                DefPlan::FreshUniform(SizeExpr::Div(
                    Box::new(SizeExpr::card_of(g)),
                    Box::new(SizeExpr::card_of(y)),
                )),
            );
            let u = b.fresh_var(g[0], "squ", kg, DefPlan::TupleOf(vec![za, w]));
            let v = b.fresh_var(
                y[0],
                "sqv",
                ky,
                DefPlan::OneTimePad {
                    base: vec![w],
                    pad: za,
                    modulus: SizeExpr::card_of(y),
                },
            );
            b.emit_unif_eq(y, &[za]);
            b.emit_unif(&[w]);
            b.push(CIStatement::ci(vec![w], vec![za], vec![]));
            b.emit_unif_eq(g, &[u]);
            b.push(CIStatement::fd(vec![u], vec![za, w]));
            b.push(CIStatement::fd(vec![za, w], vec![u]));
            b.emit_unif_eq(&[za], &[v]);
            b.push(CIStatement::fd(vec![u], vec![za, v]));
        });
    }

    /// LE(Y, Z): both uniform and |Y| <= |Z|, via GESQRT on their product.
    /// 85 statements on fresh arguments.
    pub fn emit_le(&mut self, y: &[VarId], z: &[VarId]) {
        if self.memo_hit("le", &[y, z], 0) {
            return;
        }
        self.scoped("le", |b| {
            let total = b.card(y) * b.card(z);
            let u = b.fresh_var(
                y[0],
                "leu",
                total,
                DefPlan::FreshUniform(SizeExpr::Prod(vec![
                    SizeExpr::card_of(y),
                    SizeExpr::card_of(z),
                ])),
            );
            b.emit_prod(&[y.to_vec(), z.to_vec()], &[u]);
            b.emit_gesqrt(z, &[u]);
        });
    }

    /// UNIF_k(Y): Y uniform with |Y| = k exactly. Pins log2 |Y| between the
    /// rational exponents of k and k+1 against powers of the anchor B.
    pub fn emit_unif_k(&mut self, y: &[VarId], k: u64) -> Result<(), PredicateError> {
        self.emit_unif_bound(y, k, true)
    }

    /// UNIF_k'(Y): Y uniform with |Y| <= k (the upper pinning only).
    pub fn emit_unif_le_k(&mut self, y: &[VarId], k: u64) -> Result<(), PredicateError> {
        self.emit_unif_bound(y, k, false)
    }

    fn emit_unif_bound(&mut self, y: &[VarId], k: u64, exact: bool) -> Result<(), PredicateError> {
        if k == 0 {
            return Err(PredicateError::KTooSmall { k, min: 1 });
        }
        if k == 1 {
            if exact {
                return Err(PredicateError::KTooSmall { k, min: 2 });
            }
            if !self.memo_hit("unif1", &[y], 0) {
                self.scoped("unif1", |b| b.push(CIStatement::fd(y.to_vec(), vec![])));
            }
            return Ok(());
        }
        if exact && k == 2 && self.unif2_aliased(y) {
            let anchor = self.anchor();
            self.scoped("unif2_anchor", |b| b.emit_unif_eq(y, &[anchor]));
            return Ok(());
        }
        if self.memo_hit("unifk", &[y], 2 * k + exact as u64) {
            return Ok(());
        }
        let lo = choose_pq(k)?;
        let hi = choose_pq(k + 1)?;
        let anchor = self.anchor();
        self.scoped(format!("unif{}{}", if exact { "" } else { "le" }, k), |b| {
            let uf = b.fresh_var(
                y[0],
                "uk",
                Self::two_pow(1),
                DefPlan::FreshUniform(SizeExpr::card_of(&[anchor])),
            );
            let ky = b.card(y);
            let v1 = b.fresh_var(
                y[0],
                "v1_",
                Self::two_pow(lo.p),
                DefPlan::FreshUniform(SizeExpr::Pow(Box::new(SizeExpr::card_of(&[uf])), lo.p)),
            );
            let w1 = b.fresh_var(
                y[0],
                "w1_",
                ky.pow(lo.q as u32),
                DefPlan::FreshUniform(SizeExpr::Pow(Box::new(SizeExpr::card_of(y)), lo.q)),
            );
            let v2 = b.fresh_var(
                y[0],
                "v2_",
                Self::two_pow(hi.p),
                DefPlan::FreshUniform(SizeExpr::Pow(Box::new(SizeExpr::card_of(&[uf])), hi.p)),
            );
            let w2 = b.fresh_var(
                y[0],
                "w2_",
                ky.pow(hi.q as u32),
                DefPlan::FreshUniform(SizeExpr::Pow(Box::new(SizeExpr::card_of(y)), hi.q)),
            );
            b.emit_unif_eq(&[uf], &[anchor]);
            b.emit_unif(y);
            b.emit_pow(&[uf], lo.p, &[v1]);
            b.emit_pow(y, lo.q, &[w1]);
            if exact {
                // 2^(p1/q1) <= |Y| pins k-1 < |Y| from below.
                b.emit_le(&[v1], &[w1]);
            }
            b.emit_pow(&[uf], hi.p, &[v2]);
            b.emit_pow(y, hi.q, &[w2]);
            // |Y| <= 2^(p2/q2) pins |Y| < k+1 from above.
            b.emit_le(&[w2], &[v2]);
        });
        Ok(())
    }

    /// CYCS(X1, X2): the characteristic bipartite graph of (X1, X2) is a
    /// disjoint union of simple cycles, 2-colored by the auxiliary edge bit.
    pub fn emit_cycs(&mut self, x1: VarId, x2: VarId) -> Result<(), PredicateError> {
        self.scoped("cycs", |b| {
            let u = b.fresh_var(
                x1,
                "cyc",
                Self::two_pow(1),
                DefPlan::Custom(CustomSpec::plain("cycs.u", vec![x1, x2])),
            );
            b.emit_unif(&[x1]);
            b.emit_unif(&[x2]);
            b.emit_unif_k(&[u], 2)?;
            b.push(CIStatement::ci(vec![x1], vec![u], vec![]));
            b.push(CIStatement::ci(vec![x2], vec![u], vec![]));
            b.push(CIStatement::fd(vec![x1], vec![x2, u]));
            b.push(CIStatement::fd(vec![x2], vec![x1, u]));
            b.push(CIStatement::fd(vec![u], vec![x1, x2]));
            Ok(())
        })
    }

    /// TORI'(X^2, Y^2, Z): two cycle structures and a fair bit, mutually
    /// independent in the three grouped senses.
    pub fn emit_tori_prime(
        &mut self,
        x1: VarId,
        x2: VarId,
        y1: VarId,
        y2: VarId,
        z: VarId,
    ) -> Result<(), PredicateError> {
        self.scoped("tori", |b| {
            b.emit_cycs(x1, x2)?;
            b.emit_cycs(y1, y2)?;
            b.emit_unif_k(&[z], 2)?;
            b.push(CIStatement::ci(vec![x1, x2, y1, y2], vec![z], vec![]));
            b.push(CIStatement::ci(vec![x1, x2, z], vec![y1, y2], vec![]));
            b.push(CIStatement::ci(vec![y1, y2, z], vec![x1, x2], vec![]));
            Ok(())
        })
    }

    /// FLIP(F, G1, G2): (F, G1, G2) is uniform over {000, 010, 100, 101} up
    /// to relabeling. The 4-valued U enumerates atoms; each 3-valued Z_i
    /// recovers U together with G_i while staying independent of it.
    pub fn emit_flip(&mut self, f: VarId, g1: VarId, g2: VarId) -> Result<(), PredicateError> {
        self.scoped("flip", |b| {
            let u = b.fresh_var(
                f,
                "flu",
                Self::two_pow(2),
                DefPlan::Custom(CustomSpec::plain("flip.u", vec![f, g1, g2])),
            );
            let z1 = b.fresh_var(
                g1,
                "flz",
                3u32.into(),
                DefPlan::Custom(CustomSpec::plain("flip.z1", vec![f, g1, g2])),
            );
            let z2 = b.fresh_var(
                g2,
                "flz",
                3u32.into(),
                DefPlan::Custom(CustomSpec::plain("flip.z2", vec![f, g1, g2])),
            );
            b.emit_unif_k(&[u], 4)?;
            b.emit_unif_k(&[f], 2)?;
            b.push(CIStatement::fd(vec![f, g1, g2], vec![u]));
            b.push(CIStatement::ci(vec![g1], vec![g2], vec![f]));
            b.emit_unif_k(&[z1], 3)?;
            b.push(CIStatement::ci(vec![z1], vec![g1], vec![]));
            b.push(CIStatement::fd(vec![u], vec![g1, z1]));
            b.emit_unif_k(&[z2], 3)?;
            b.push(CIStatement::ci(vec![z2], vec![g2], vec![]));
            b.push(CIStatement::fd(vec![u], vec![g2, z2]));
            Ok(())
        })
    }

    /// SW(W^k, V^k, Vbar^k, F): each V_i / Vbar_i pair flips against F with
    /// switch W_i; the canonical satisfying shape is V_i = (1 - W_i) F and
    /// Vbar_i = W_i F.
    pub fn emit_sw(
        &mut self,
        w: &[VarId],
        v: &[VarId],
        vbar: &[VarId],
        f: VarId,
    ) -> Result<(), PredicateError> {
        self.scoped("sw", |b| {
            let g = b.fresh_var(
                f,
                "swg",
                Self::two_pow(1),
                DefPlan::Custom(CustomSpec::plain("sw.g", vec![f])),
            );
            b.push(CIStatement::ci(w.to_vec(), vec![f, g], vec![]));
            for i in 0..w.len() {
                b.emit_unif_k(&[w[i]], 2)?;
                b.push(CIStatement::fd(vec![v[i], vbar[i]], vec![w[i], f]));
                b.push(CIStatement::ci(vec![v[i]], vec![vbar[i]], vec![w[i]]));
                b.emit_flip(f, g, v[i])?;
                b.emit_flip(f, g, vbar[i])?;
            }
            Ok(())
        })
    }

    /// COL'(W^k, V^k, Vbar^k, F): SW plus the polynomial family of
    /// functional dependencies that excludes every W-string outside T_k.
    pub fn emit_col_prime(
        &mut self,
        w: &[VarId],
        v: &[VarId],
        vbar: &[VarId],
        f: VarId,
    ) -> Result<(), PredicateError> {
        let k = w.len();
        self.emit_sw(w, v, vbar, f)?;
        self.scoped("col", |b| {
            for i in 0..k - 1 {
                for j in i + 1..k - 1 {
                    b.push(CIStatement::fd(
                        vec![f],
                        join(&[v[i], v[j], vbar[k - 1]], w),
                    ));
                }
            }
            for i in 0..k - 1 {
                for j in i + 1..k - 1 {
                    b.push(CIStatement::fd(
                        vec![f],
                        join(&[v[k - 1], vbar[i], vbar[j]], w),
                    ));
                }
            }
            b.push(CIStatement::fd(vec![f], join(v, w)));
            b.push(CIStatement::fd(vec![f], join(vbar, w)));
        });
        Ok(())
    }

    /// COLD(X, ...): COL' plus W^k a labeling of X, with the flip side
    /// depending on X only through the label.
    pub fn emit_cold(
        &mut self,
        xs: &[VarId],
        w: &[VarId],
        v: &[VarId],
        vbar: &[VarId],
        f: VarId,
    ) -> Result<(), PredicateError> {
        self.emit_col_prime(w, v, vbar, f)?;
        self.scoped("cold", |b| {
            b.push(CIStatement::fd(w.to_vec(), xs.to_vec()));
            let mut left = join(v, vbar);
            left.push(f);
            b.push(CIStatement::ci(left, xs.to_vec(), w.to_vec()));
        });
        Ok(())
    }

    /// SAT gadget over split variable E: a uniform auxiliary independent of
    /// (E, V_S, Vbar_Sbar) that determines F alongside them. Which cell
    /// counts it tolerates depends on `kind`.
    #[allow(clippy::too_many_arguments)]
    pub fn emit_sat_gadget(
        &mut self,
        kind: SatKind,
        e: &[VarId],
        s: &BTreeSet<usize>,
        sbar: &BTreeSet<usize>,
        v: &[VarId],
        vbar: &[VarId],
        f: VarId,
    ) -> Result<(), PredicateError> {
        self.scoped(kind.label(), |b| {
            let v_s: Vec<VarId> = s.iter().map(|&i| v[i - 1]).collect();
            let vbar_sbar: Vec<VarId> = sbar.iter().map(|&i| vbar[i - 1]).collect();
            let u = b.fresh_var(
                f,
                "satu",
                kind.kappa().into(),
                DefPlan::Custom(CustomSpec {
                    role: format!("{}.u", kind.label()),
                    args: e.to_vec(),
                    s: s.clone(),
                    sbar: sbar.clone(),
                }),
            );
            b.emit_unif_k(&[u], kind.kappa())?;
            let mut seen = join(e, &v_s);
            seen.extend(&vbar_sbar);
            b.push(CIStatement::ci(vec![u], seen.clone(), vec![]));
            seen.push(u);
            b.push(CIStatement::fd(vec![f], seen));
            Ok(())
        })
    }
}

//! Finite joint distributions with exact rational masses.
//!
//! Atoms are stored sparsely; zero-mass atoms are never kept. Entropic
//! quantities are reported in f64 bits, while independence and functional
//! dependence checks are decided exactly over the rationals.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::CiError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution {
    vars: Vec<String>,
    alphabets: Vec<Vec<String>>,
    atoms: BTreeMap<Vec<u32>, BigRational>,
}

pub struct DistributionBuilder {
    vars: Vec<String>,
    alphabets: Vec<Vec<String>>,
    lookup: Vec<HashMap<String, u32>>,
    atoms: BTreeMap<Vec<u32>, BigRational>,
}

impl DistributionBuilder {
    /// Adds `mass` to the atom with the given value tokens, interning tokens
    /// per variable in first-seen order.
    pub fn atom<S: AsRef<str>>(&mut self, values: &[S], mass: BigRational) -> &mut Self {
        assert_eq!(
            values.len(),
            self.vars.len(),
            "atom arity does not match variable count"
        );
        let key: Vec<u32> = values
            .iter()
            .enumerate()
            .map(|(i, v)| self.intern(i, v.as_ref()))
            .collect();
        let slot = self.atoms.entry(key).or_insert_with(BigRational::zero);
        *slot += mass;
        self
    }

    /// Convenience for integer-valued atoms.
    pub fn atom_ints(&mut self, values: &[u64], mass: BigRational) -> &mut Self {
        let toks: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        self.atom(&toks, mass)
    }

    fn intern(&mut self, var: usize, token: &str) -> u32 {
        if let Some(&code) = self.lookup[var].get(token) {
            return code;
        }
        let code = self.alphabets[var].len() as u32;
        self.alphabets[var].push(token.to_string());
        self.lookup[var].insert(token.to_string(), code);
        code
    }

    pub fn build(mut self) -> Result<JointDistribution, CiError> {
        self.atoms.retain(|_, m| !m.is_zero());
        if self.atoms.is_empty() {
            return Err(CiError::EmptyDistribution);
        }
        let mut total = BigRational::zero();
        for mass in self.atoms.values() {
            if mass.is_negative() {
                return Err(CiError::NonPositiveMass(mass.to_string()));
            }
            total += mass;
        }
        if total != BigRational::from_integer(1.into()) {
            return Err(CiError::BadTotalMass(total.to_string()));
        }

        // Canonical code assignment: per-variable tokens in sorted order, so
        // the stored form does not depend on atom insertion order.
        let mut remap: Vec<Vec<u32>> = Vec::with_capacity(self.alphabets.len());
        let mut alphabets = Vec::with_capacity(self.alphabets.len());
        for tokens in &self.alphabets {
            let mut order: Vec<usize> = (0..tokens.len()).collect();
            order.sort_by(|&x, &y| tokens[x].cmp(&tokens[y]));
            let mut map = vec![0u32; tokens.len()];
            for (new, &old) in order.iter().enumerate() {
                map[old] = new as u32;
            }
            remap.push(map);
            alphabets.push(order.iter().map(|&i| tokens[i].clone()).collect());
        }
        let atoms: BTreeMap<Vec<u32>, BigRational> = self
            .atoms
            .into_iter()
            .map(|(key, mass)| {
                let new_key: Vec<u32> = key
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| remap[i][c as usize])
                    .collect();
                (new_key, mass)
            })
            .collect();

        Ok(JointDistribution {
            vars: self.vars,
            alphabets,
            atoms,
        })
    }
}

impl JointDistribution {
    pub fn builder<S: Into<String>, I: IntoIterator<Item = S>>(vars: I) -> DistributionBuilder {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        let n = vars.len();
        DistributionBuilder {
            vars,
            alphabets: vec![Vec::new(); n],
            lookup: vec![HashMap::new(); n],
            atoms: BTreeMap::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.atoms.iter().map(|(k, m)| (k.as_slice(), m))
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn token(&self, var: usize, code: u32) -> &str {
        &self.alphabets[var][code as usize]
    }

    pub fn tokens_of(&self, key: &[u32]) -> Vec<&str> {
        key.iter()
            .enumerate()
            .map(|(i, &c)| self.token(i, c))
            .collect()
    }

    /// Sorted, deduplicated copy of a variable index set.
    pub fn canonical_set(&self, idxs: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = idxs.to_vec();
        v.sort_unstable();
        v.dedup();
        for &i in &v {
            assert!(i < self.vars.len(), "variable index {i} out of range");
        }
        v
    }

    /// Marginal distribution over `idxs` (canonicalized). Keys follow the
    /// sorted index order.
    pub fn marginal(&self, idxs: &[usize]) -> BTreeMap<Vec<u32>, BigRational> {
        let idxs = self.canonical_set(idxs);
        let mut out: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (key, mass) in &self.atoms {
            let proj: Vec<u32> = idxs.iter().map(|&i| key[i]).collect();
            *out.entry(proj).or_insert_with(BigRational::zero) += mass;
        }
        out
    }

    /// Number of values the variable takes with positive probability.
    pub fn support_size(&self, var: usize) -> usize {
        self.marginal(&[var]).len()
    }

    pub fn entropy_bits(&self, idxs: &[usize]) -> f64 {
        self.marginal(idxs)
            .values()
            .map(|p| {
                let x = rat_to_f64(p);
                if x > 0.0 {
                    -x * x.log2()
                } else {
                    0.0
                }
            })
            .sum()
    }

    pub fn cond_entropy_bits(&self, targets: &[usize], givens: &[usize]) -> f64 {
        let mut tg = targets.to_vec();
        tg.extend_from_slice(givens);
        self.entropy_bits(&tg) - self.entropy_bits(givens)
    }

    /// I(A;B|C) in bits, computed as H(AC) + H(BC) - H(ABC) - H(C).
    /// Overlapping sets are fine; in particular I(X;X|C) = H(X|C).
    pub fn cond_mutual_info_bits(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let ac = union(a, c);
        let bc = union(b, c);
        let abc = union(&ac, b);
        self.entropy_bits(&ac) + self.entropy_bits(&bc)
            - self.entropy_bits(&abc)
            - self.entropy_bits(c)
    }

    /// Exact test of I(A;B|C) = 0 via the factorization identity
    /// P(abc) * P(c) = P(ac) * P(bc), checked over every pair of an
    /// (A u C)-section and a (B u C)-section sharing the same C part.
    /// Pairs that disagree on a shared variable outside C count as
    /// P(abc) = 0, so overlapping A and B are handled correctly.
    pub fn check_ci_exact(&self, a: &[usize], b: &[usize], c: &[usize]) -> bool {
        let sc = self.canonical_set(c);
        let sa = self.canonical_set(&union(a, &sc));
        let sb = self.canonical_set(&union(b, &sc));
        let su = self.canonical_set(&union(&sa, &sb));

        let m_ac: Vec<(Vec<u32>, BigRational)> = self.marginal(&sa).into_iter().collect();
        let m_bc: Vec<(Vec<u32>, BigRational)> = self.marginal(&sb).into_iter().collect();
        let m_c = self.marginal(&sc);
        let m_abc = self.marginal(&su);

        let pos_in = |sub: &[usize]| -> Vec<usize> {
            sub.iter()
                .map(|i| su.binary_search(i).expect("subset of union"))
                .collect()
        };
        let pos_a = pos_in(&sa);
        let pos_b = pos_in(&sb);
        let c_in_a: Vec<usize> = sc
            .iter()
            .map(|i| sa.binary_search(i).expect("c subset"))
            .collect();
        let c_in_b: Vec<usize> = sc
            .iter()
            .map(|i| sb.binary_search(i).expect("c subset"))
            .collect();

        let group = |entries: &[(Vec<u32>, BigRational)], c_pos: &[usize]| {
            let mut g: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
            for (i, (key, _)) in entries.iter().enumerate() {
                let ck: Vec<u32> = c_pos.iter().map(|&p| key[p]).collect();
                g.entry(ck).or_default().push(i);
            }
            g
        };
        let ga = group(&m_ac, &c_in_a);
        let gb = group(&m_bc, &c_in_b);

        let zero = BigRational::zero();
        for (ck, pc) in &m_c {
            let ia = match ga.get(ck) {
                Some(v) => v,
                None => continue,
            };
            let ib = match gb.get(ck) {
                Some(v) => v,
                None => continue,
            };
            for &i in ia {
                let (ak, pa) = &m_ac[i];
                for &j in ib {
                    let (bk, pb) = &m_bc[j];
                    let mut merged = vec![u32::MAX; su.len()];
                    for (t, &p) in pos_a.iter().enumerate() {
                        merged[p] = ak[t];
                    }
                    let mut consistent = true;
                    for (t, &p) in pos_b.iter().enumerate() {
                        if merged[p] != u32::MAX && merged[p] != bk[t] {
                            consistent = false;
                            break;
                        }
                        merged[p] = bk[t];
                    }
                    let p_abc = if consistent {
                        m_abc.get(&merged).unwrap_or(&zero)
                    } else {
                        &zero
                    };
                    if p_abc * pc != pa * pb {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Exact test of H(targets | givens) = 0: every givens-section of the
    /// joint support determines the targets.
    pub fn check_functional(&self, targets: &[usize], givens: &[usize]) -> bool {
        let st = self.canonical_set(targets);
        let sg = self.canonical_set(givens);
        let su = self.canonical_set(&union(&st, &sg));
        let g_pos: Vec<usize> = sg
            .iter()
            .map(|i| su.binary_search(i).expect("subset"))
            .collect();
        let t_pos: Vec<usize> = st
            .iter()
            .map(|i| su.binary_search(i).expect("subset"))
            .collect();
        let mut seen: BTreeMap<Vec<u32>, Vec<u32>> = BTreeMap::new();
        for key in self.marginal(&su).keys() {
            let gk: Vec<u32> = g_pos.iter().map(|&p| key[p]).collect();
            let tk: Vec<u32> = t_pos.iter().map(|&p| key[p]).collect();
            match seen.get(&gk) {
                Some(prev) if *prev != tk => return false,
                Some(_) => {}
                None => {
                    seen.insert(gk, tk);
                }
            }
        }
        true
    }
}

pub(crate) fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn rat_to_f64(p: &BigRational) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

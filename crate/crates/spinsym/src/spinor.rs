//! Arrays of polynomials with two-component spinor index structure.
//!
//! Index conventions, used everywhere in the crate:
//! - eps_{01} = eps^{01} = +1;
//! - lowering contracts the upper index into the first epsilon slot,
//!   `lambda_B = lambda^A eps_{AB}`; raising contracts the lower index into
//!   the second slot, `lambda^A = eps^{AB} lambda_B`; the two moves are
//!   mutually inverse and `eps^{AB} eps_{CB} = delta_C^A`.
//! - dense components are indexed by bit strings with unprimed slots first,
//!   most significant bit first.
//!
//! Symmetric-compressed storage keeps one polynomial per pair `(j, k)` of
//! counts of index value 1 in the unprimed and primed groups; it is valid
//! only for arrays equal to their own groupwise symmetrization.

use crate::error::SpinorError;
use crate::field::FieldElement;
use crate::poly::Polynomial;
use crate::util::binom;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variance {
    Upper,
    Lower,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Group {
    Unprimed,
    Primed,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SymGroup {
    Unprimed,
    Primed,
    Both,
}

/// eps_{ab} = eps^{ab} with eps_{01} = +1.
pub fn eps(a: usize, b: usize) -> i64 {
    match (a, b) {
        (0, 1) => 1,
        (1, 0) => -1,
        _ => 0,
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Storage {
    /// 2^(m+mp) entries, unprimed slots first, MSB first.
    Dense(Vec<Polynomial>),
    /// (m+1)(mp+1) entries indexed by (j, k) = counts of bit value 1.
    Symmetric(Vec<Polynomial>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpinorArray {
    unprimed_var: Vec<Variance>,
    primed_var: Vec<Variance>,
    storage: Storage,
}

impl SpinorArray {
    pub fn unprimed_rank(&self) -> usize {
        self.unprimed_var.len()
    }

    pub fn primed_rank(&self) -> usize {
        self.primed_var.len()
    }

    pub fn unprimed_variance(&self, slot: usize) -> Variance {
        self.unprimed_var[slot]
    }

    pub fn primed_variance(&self, slot: usize) -> Variance {
        self.primed_var[slot]
    }

    fn total_slots(&self) -> usize {
        self.unprimed_var.len() + self.primed_var.len()
    }

    /// Zero-filled dense array with uniform variance per group.
    pub fn zeros(m: usize, mp: usize, uv: Variance, pv: Variance) -> Self {
        SpinorArray {
            unprimed_var: vec![uv; m],
            primed_var: vec![pv; mp],
            storage: Storage::Dense(vec![Polynomial::zero(); 1 << (m + mp)]),
        }
    }

    pub fn zeros_with(unprimed_var: Vec<Variance>, primed_var: Vec<Variance>) -> Self {
        let total = unprimed_var.len() + primed_var.len();
        SpinorArray {
            unprimed_var,
            primed_var,
            storage: Storage::Dense(vec![Polynomial::zero(); 1 << total]),
        }
    }

    /// Rank-(0,0) scalar array.
    pub fn scalar(p: Polynomial) -> Self {
        SpinorArray {
            unprimed_var: Vec::new(),
            primed_var: Vec::new(),
            storage: Storage::Dense(vec![p]),
        }
    }

    pub fn as_scalar(&self) -> &Polynomial {
        assert_eq!(self.total_slots(), 0, "scalar access on ranked array");
        self.get(&[], &[])
    }

    /// Build a dense array from a component function.
    pub fn from_fn(
        m: usize,
        mp: usize,
        uv: Variance,
        pv: Variance,
        mut f: impl FnMut(&[usize], &[usize]) -> Polynomial,
    ) -> Self {
        let mut arr = Self::zeros(m, mp, uv, pv);
        let mut u = vec![0usize; m];
        let mut p = vec![0usize; mp];
        for idx in 0..(1usize << (m + mp)) {
            decode_bits(idx, m + mp, &mut u, &mut p);
            arr.set(&u.clone(), &p.clone(), f(&u, &p));
        }
        arr
    }

    fn dense_index(&self, u_bits: &[usize], p_bits: &[usize]) -> usize {
        debug_assert_eq!(u_bits.len(), self.unprimed_var.len());
        debug_assert_eq!(p_bits.len(), self.primed_var.len());
        let mut idx = 0usize;
        for &b in u_bits.iter().chain(p_bits.iter()) {
            debug_assert!(b < 2);
            idx = (idx << 1) | b;
        }
        idx
    }

    pub fn get(&self, u_bits: &[usize], p_bits: &[usize]) -> &Polynomial {
        match &self.storage {
            Storage::Dense(v) => &v[self.dense_index(u_bits, p_bits)],
            Storage::Symmetric(v) => {
                let j: usize = u_bits.iter().sum();
                let k: usize = p_bits.iter().sum();
                &v[j * (self.primed_var.len() + 1) + k]
            }
        }
    }

    pub fn set(&mut self, u_bits: &[usize], p_bits: &[usize], value: Polynomial) {
        let idx = self.dense_index(u_bits, p_bits);
        match &mut self.storage {
            Storage::Dense(v) => v[idx] = value,
            Storage::Symmetric(_) => {
                panic!("direct set on symmetric storage; convert to dense first")
            }
        }
    }

    /// Component of a symmetric array by (j, k) counts.
    pub fn get_sym(&self, j: usize, k: usize) -> &Polynomial {
        match &self.storage {
            Storage::Symmetric(v) => &v[j * (self.primed_var.len() + 1) + k],
            Storage::Dense(_) => {
                let m = self.unprimed_var.len();
                let mp = self.primed_var.len();
                let u: Vec<usize> = (0..m).map(|s| usize::from(s < j)).collect();
                let p: Vec<usize> = (0..mp).map(|s| usize::from(s < k)).collect();
                self.get(&u, &p)
            }
        }
    }

    pub fn is_symmetric_storage(&self) -> bool {
        matches!(self.storage, Storage::Symmetric(_))
    }

    /// Build a symmetric array directly from its (j, k) components.
    pub fn from_sym_fn(
        m: usize,
        mp: usize,
        uv: Variance,
        pv: Variance,
        mut f: impl FnMut(usize, usize) -> Polynomial,
    ) -> Self {
        let mut vals = Vec::with_capacity((m + 1) * (mp + 1));
        for j in 0..=m {
            for k in 0..=mp {
                vals.push(f(j, k));
            }
        }
        SpinorArray {
            unprimed_var: vec![uv; m],
            primed_var: vec![pv; mp],
            storage: Storage::Symmetric(vals),
        }
    }

    pub fn to_dense(&self) -> SpinorArray {
        match &self.storage {
            Storage::Dense(_) => self.clone(),
            Storage::Symmetric(vals) => {
                let m = self.unprimed_var.len();
                let mp = self.primed_var.len();
                let mut dense = vec![Polynomial::zero(); 1 << (m + mp)];
                let mut u = vec![0usize; m];
                let mut p = vec![0usize; mp];
                for (idx, slot) in dense.iter_mut().enumerate() {
                    decode_bits(idx, m + mp, &mut u, &mut p);
                    let j: usize = u.iter().sum();
                    let k: usize = p.iter().sum();
                    *slot = vals[j * (mp + 1) + k].clone();
                }
                SpinorArray {
                    unprimed_var: self.unprimed_var.clone(),
                    primed_var: self.primed_var.clone(),
                    storage: Storage::Dense(dense),
                }
            }
        }
    }

    /// Convert to symmetric storage; errors unless the array equals its own
    /// groupwise symmetrization and each group has uniform variance.
    pub fn to_symmetric(&self) -> Result<SpinorArray, SpinorError> {
        for group in [&self.unprimed_var, &self.primed_var] {
            if group.windows(2).any(|w| w[0] != w[1]) {
                return Err(SpinorError::VarianceMismatch);
            }
        }
        let dense = self.to_dense();
        let sym = dense.symmetrize(SymGroup::Both);
        if sym != dense {
            return Err(SpinorError::NotSymmetric);
        }
        let m = self.unprimed_var.len();
        let mp = self.primed_var.len();
        let mut vals = Vec::with_capacity((m + 1) * (mp + 1));
        for j in 0..=m {
            for k in 0..=mp {
                vals.push(dense.get_sym(j, k).clone());
            }
        }
        Ok(SpinorArray {
            unprimed_var: self.unprimed_var.clone(),
            primed_var: self.primed_var.clone(),
            storage: Storage::Symmetric(vals),
        })
    }

    /// Average over all permutations within the chosen slot group(s).
    ///
    /// Because entries of the symmetrized array depend only on the multiset
    /// of index values in the group, the average over permutations equals the
    /// average over all assignments with the same count of ones.
    pub fn symmetrize(&self, group: SymGroup) -> SpinorArray {
        let arr = self.to_dense();
        let out = match group {
            SymGroup::Unprimed => arr.symmetrize_group(Group::Unprimed),
            SymGroup::Primed => arr.symmetrize_group(Group::Primed),
            SymGroup::Both => arr
                .symmetrize_group(Group::Unprimed)
                .symmetrize_group(Group::Primed),
        };
        out
    }

    fn symmetrize_group(&self, group: Group) -> SpinorArray {
        let m = self.unprimed_var.len();
        let mp = self.primed_var.len();
        let n = match group {
            Group::Unprimed => m,
            Group::Primed => mp,
        };
        if n <= 1 {
            return self.clone();
        }
        let Storage::Dense(vals) = &self.storage else { unreachable!() };
        // class sums keyed by (other-group index bits, count of ones in group)
        let mut out = vec![Polynomial::zero(); vals.len()];
        let mut u = vec![0usize; m];
        let mut p = vec![0usize; mp];
        // accumulate class sums
        let mut class_sum: std::collections::HashMap<(usize, usize), Polynomial> =
            std::collections::HashMap::new();
        for (idx, v) in vals.iter().enumerate() {
            decode_bits(idx, m + mp, &mut u, &mut p);
            let (ones, other_bits) = match group {
                Group::Unprimed => (u.iter().sum::<usize>(), encode_bits(&p)),
                Group::Primed => (p.iter().sum::<usize>(), encode_bits(&u)),
            };
            class_sum
                .entry((other_bits, ones))
                .and_modify(|s| *s = s.add(v))
                .or_insert_with(|| v.clone());
        }
        for (idx, slot) in out.iter_mut().enumerate() {
            decode_bits(idx, m + mp, &mut u, &mut p);
            let (ones, other_bits) = match group {
                Group::Unprimed => (u.iter().sum::<usize>(), encode_bits(&p)),
                Group::Primed => (p.iter().sum::<usize>(), encode_bits(&u)),
            };
            let count = binom(n, ones);
            let sum = &class_sum[&(other_bits, ones)];
            *slot = sum.scale(&FieldElement::from_ratio(1, count));
        }
        SpinorArray {
            unprimed_var: self.unprimed_var.clone(),
            primed_var: self.primed_var.clone(),
            storage: Storage::Dense(out),
        }
    }

    /// Raise or lower one slot with the spinor metric.
    pub fn eps_move(
        &self,
        group: Group,
        slot: usize,
        to: Variance,
    ) -> Result<SpinorArray, SpinorError> {
        let arr = self.to_dense();
        let (m, mp) = (arr.unprimed_var.len(), arr.primed_var.len());
        let (vars, pos) = match group {
            Group::Unprimed => {
                if slot >= m {
                    return Err(SpinorError::SlotOutOfRange);
                }
                (&arr.unprimed_var, slot)
            }
            Group::Primed => {
                if slot >= mp {
                    return Err(SpinorError::SlotOutOfRange);
                }
                (&arr.primed_var, m + slot)
            }
        };
        let from = vars[match group {
            Group::Unprimed => slot,
            Group::Primed => slot,
        }];
        if from == to {
            return Err(SpinorError::VarianceMismatch);
        }
        let total = m + mp;
        let bit_shift = total - 1 - pos;
        let Storage::Dense(vals) = &arr.storage else { unreachable!() };
        let mut out = vec![Polynomial::zero(); vals.len()];
        for (idx, slot_val) in out.iter_mut().enumerate() {
            let b = (idx >> bit_shift) & 1;
            // raising: new^a = eps^{ab} old_b  => new[0] = old[1], new[1] = -old[0]
            // lowering: new_b = old^a eps_{ab} => new[0] = -old[1], new[1] = old[0]
            let (src_bit, sign) = match (to, b) {
                (Variance::Upper, 0) => (1usize, 1i64),
                (Variance::Upper, 1) => (0usize, -1i64),
                (Variance::Lower, 0) => (1usize, -1i64),
                (Variance::Lower, 1) => (0usize, 1i64),
                _ => unreachable!(),
            };
            let src_idx = (idx & !(1 << bit_shift)) | (src_bit << bit_shift);
            *slot_val = vals[src_idx].scale(&FieldElement::from_int(sign));
        }
        let mut unprimed_var = arr.unprimed_var.clone();
        let mut primed_var = arr.primed_var.clone();
        match group {
            Group::Unprimed => unprimed_var[slot] = to,
            Group::Primed => primed_var[slot] = to,
        }
        Ok(SpinorArray {
            unprimed_var,
            primed_var,
            storage: Storage::Dense(out),
        })
    }

    /// Move every slot of a group to the requested variance.
    pub fn eps_move_all(&self, group: Group, to: Variance) -> Result<SpinorArray, SpinorError> {
        let mut arr = self.to_dense();
        let n = match group {
            Group::Unprimed => arr.unprimed_var.len(),
            Group::Primed => arr.primed_var.len(),
        };
        for slot in 0..n {
            let cur = match group {
                Group::Unprimed => arr.unprimed_var[slot],
                Group::Primed => arr.primed_var[slot],
            };
            if cur != to {
                arr = arr.eps_move(group, slot, to)?;
            }
        }
        Ok(arr)
    }

    /// Contract one upper and one lower slot of the same primedness.
    pub fn contract(
        &self,
        group: Group,
        slot_up: usize,
        slot_down: usize,
    ) -> Result<SpinorArray, SpinorError> {
        let arr = self.to_dense();
        let (m, mp) = (arr.unprimed_var.len(), arr.primed_var.len());
        let (vars, base) = match group {
            Group::Unprimed => (&arr.unprimed_var, 0usize),
            Group::Primed => (&arr.primed_var, m),
        };
        let n = vars.len();
        if slot_up >= n || slot_down >= n || slot_up == slot_down {
            return Err(SpinorError::SlotOutOfRange);
        }
        if vars[slot_up] != Variance::Upper || vars[slot_down] != Variance::Lower {
            return Err(SpinorError::ContractionMismatch);
        }
        let total = m + mp;
        let pos_up = base + slot_up;
        let pos_dn = base + slot_down;
        let sh_up = total - 1 - pos_up;
        let sh_dn = total - 1 - pos_dn;
        let Storage::Dense(vals) = &arr.storage else { unreachable!() };

        let mut unprimed_var = arr.unprimed_var.clone();
        let mut primed_var = arr.primed_var.clone();
        match group {
            Group::Unprimed => {
                let mut keep: Vec<Variance> = Vec::new();
                for (i, v) in unprimed_var.iter().enumerate() {
                    if i != slot_up && i != slot_down {
                        keep.push(*v);
                    }
                }
                unprimed_var = keep;
            }
            Group::Primed => {
                let mut keep: Vec<Variance> = Vec::new();
                for (i, v) in primed_var.iter().enumerate() {
                    if i != slot_up && i != slot_down {
                        keep.push(*v);
                    }
                }
                primed_var = keep;
            }
        }
        let new_total = total - 2;
        let mut out = vec![Polynomial::zero(); 1 << new_total];
        // Positions in the old layout of the remaining slots, in order.
        let kept: Vec<usize> = (0..total).filter(|&p| p != pos_up && p != pos_dn).collect();
        for (new_idx, slot_val) in out.iter_mut().enumerate() {
            let mut acc = Polynomial::zero();
            for c in 0..2usize {
                let mut idx = 0usize;
                for (bit_pos, &old_pos) in kept.iter().enumerate() {
                    let b = (new_idx >> (new_total - 1 - bit_pos)) & 1;
                    idx |= b << (total - 1 - old_pos);
                }
                idx |= c << sh_up;
                idx |= c << sh_dn;
                acc = acc.add(&vals[idx]);
            }
            *slot_val = acc;
        }
        Ok(SpinorArray {
            unprimed_var,
            primed_var,
            storage: Storage::Dense(out),
        })
    }

    /// Outer product; slots of `self` come first in each group.
    pub fn outer(&self, other: &SpinorArray) -> SpinorArray {
        let a = self.to_dense();
        let b = other.to_dense();
        let (ma, mpa) = (a.unprimed_var.len(), a.primed_var.len());
        let (mb, mpb) = (b.unprimed_var.len(), b.primed_var.len());
        let mut unprimed_var = a.unprimed_var.clone();
        unprimed_var.extend_from_slice(&b.unprimed_var);
        let mut primed_var = a.primed_var.clone();
        primed_var.extend_from_slice(&b.primed_var);
        let m = ma + mb;
        let mp = mpa + mpb;
        let mut out = vec![Polynomial::zero(); 1 << (m + mp)];
        let mut u = vec![0usize; m];
        let mut p = vec![0usize; mp];
        for (idx, slot) in out.iter_mut().enumerate() {
            decode_bits(idx, m + mp, &mut u, &mut p);
            let ua = &u[..ma];
            let ub = &u[ma..];
            let pa = &p[..mpa];
            let pb = &p[mpa..];
            *slot = a.get(ua, pa).mul(b.get(ub, pb));
        }
        SpinorArray {
            unprimed_var,
            primed_var,
            storage: Storage::Dense(out),
        }
    }

    /// Complex conjugation: primed and unprimed groups swap (slot i of the
    /// new unprimed group is the conjugate of old primed slot i), variances
    /// carry over, and every entry is conjugated coefficientwise (which also
    /// swaps jet variables with conjugate jet variables).
    pub fn conjugate(&self) -> SpinorArray {
        let arr = self.to_dense();
        let (m, mp) = (arr.unprimed_var.len(), arr.primed_var.len());
        let mut out = SpinorArray::zeros_with(arr.primed_var.clone(), arr.unprimed_var.clone());
        let mut u = vec![0usize; mp];
        let mut p = vec![0usize; m];
        for idx in 0..(1usize << (m + mp)) {
            decode_bits(idx, m + mp, &mut u, &mut p);
            let val = arr.get(&p, &u).conjugate();
            out.set(&u.clone(), &p.clone(), val);
        }
        out
    }

    pub fn add(&self, other: &SpinorArray) -> SpinorArray {
        let a = self.to_dense();
        let b = other.to_dense();
        assert_eq!(a.unprimed_var, b.unprimed_var, "variance mismatch in add");
        assert_eq!(a.primed_var, b.primed_var, "variance mismatch in add");
        let Storage::Dense(va) = &a.storage else { unreachable!() };
        let Storage::Dense(vb) = &b.storage else { unreachable!() };
        SpinorArray {
            unprimed_var: a.unprimed_var.clone(),
            primed_var: a.primed_var.clone(),
            storage: Storage::Dense(
                va.iter().zip(vb.iter()).map(|(x, y)| x.add(y)).collect(),
            ),
        }
    }

    pub fn sub(&self, other: &SpinorArray) -> SpinorArray {
        self.add(&other.scale(&FieldElement::from_int(-1)))
    }

    pub fn scale(&self, c: &FieldElement) -> SpinorArray {
        let mut arr = self.clone();
        match &mut arr.storage {
            Storage::Dense(v) | Storage::Symmetric(v) => {
                for e in v.iter_mut() {
                    *e = e.scale(c);
                }
            }
        }
        arr
    }

    pub fn map(&self, mut f: impl FnMut(&Polynomial) -> Polynomial) -> SpinorArray {
        let mut arr = self.clone();
        match &mut arr.storage {
            Storage::Dense(v) | Storage::Symmetric(v) => {
                for e in v.iter_mut() {
                    *e = f(e);
                }
            }
        }
        arr
    }

    pub fn is_zero(&self) -> bool {
        match &self.storage {
            Storage::Dense(v) | Storage::Symmetric(v) => v.iter().all(|p| p.is_zero()),
        }
    }

    pub fn components(&self) -> Vec<&Polynomial> {
        match &self.storage {
            Storage::Dense(v) | Storage::Symmetric(v) => v.iter().collect(),
        }
    }

    pub fn nonzero_component_count(&self) -> usize {
        self.components().iter().filter(|p| !p.is_zero()).count()
    }
}

fn decode_bits(idx: usize, total: usize, u: &mut [usize], p: &mut [usize]) {
    for s in 0..total {
        let b = (idx >> (total - 1 - s)) & 1;
        if s < u.len() {
            u[s] = b;
        } else {
            p[s - u.len()] = b;
        }
    }
}

fn encode_bits(bits: &[usize]) -> usize {
    let mut idx = 0;
    for &b in bits {
        idx = (idx << 1) | b;
    }
    idx
}

/// The epsilon spinor as a rank-(2,0) array with the requested variance.
pub fn epsilon_array(group: Group, variance: Variance) -> SpinorArray {
    let f = |a: usize, b: usize| {
        Polynomial::constant(FieldElement::from_int(eps(a, b)))
    };
    match group {
        Group::Unprimed => SpinorArray::from_fn(2, 0, variance, Variance::Lower, |u, _| {
            f(u[0], u[1])
        }),
        Group::Primed => SpinorArray::from_fn(0, 2, Variance::Lower, variance, |_, p| {
            f(p[0], p[1])
        }),
    }
}

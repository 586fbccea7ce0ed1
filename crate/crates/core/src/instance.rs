//! k-median instances, facility sets and cost evaluation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// External identifier of a customer or facility as it appears in instance files.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Text(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Text(s) => f.write_str(s),
        }
    }
}

impl From<usize> for Label {
    fn from(i: usize) -> Self {
        Label::Int(i as i64)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Text(s.to_owned())
    }
}

/// A set of facilities, stored as sorted, de-duplicated column indices.
///
/// Index order doubles as the facility-id order used for every tie-break.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacilitySet {
    members: Vec<usize>,
}

impl FacilitySet {
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        FacilitySet { members }
    }

    pub fn empty() -> Self {
        FacilitySet::default()
    }

    pub fn singleton(f: usize) -> Self {
        FacilitySet { members: vec![f] }
    }

    pub fn all(n: usize) -> Self {
        FacilitySet {
            members: (0..n).collect(),
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        FacilitySet {
            members: (0..64).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, f: usize) -> bool {
        self.members.binary_search(&f).is_ok()
    }

    pub fn is_subset(&self, other: &FacilitySet) -> bool {
        self.members.iter().all(|f| other.contains(*f))
    }

    pub fn union(&self, other: &FacilitySet) -> FacilitySet {
        FacilitySet::new(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &FacilitySet) -> FacilitySet {
        FacilitySet {
            members: self.iter().filter(|f| !other.contains(*f)).collect(),
        }
    }

    pub fn intersection(&self, other: &FacilitySet) -> FacilitySet {
        FacilitySet {
            members: self.iter().filter(|f| other.contains(*f)).collect(),
        }
    }

    pub fn insert(&mut self, f: usize) {
        if let Err(pos) = self.members.binary_search(&f) {
            self.members.insert(pos, f);
        }
    }

    pub fn remove(&mut self, f: usize) -> bool {
        match self.members.binary_search(&f) {
            Ok(pos) => {
                self.members.remove(pos);
                true
            }
            Err(_) => false,
        }
    }
}

impl fmt::Display for FacilitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for FacilitySet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        FacilitySet::new(iter)
    }
}

/// Customers, facilities, the customer-to-facility distance matrix and
/// optional customer weights. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianInstance<S> {
    customers: Vec<Label>,
    facilities: Vec<Label>,
    dist: Vec<Vec<S>>,
    weights: Option<Vec<S>>,
}

impl<S: Scalar> MedianInstance<S> {
    pub fn new(
        customers: Vec<Label>,
        facilities: Vec<Label>,
        dist: Vec<Vec<S>>,
        weights: Option<Vec<S>>,
    ) -> Result<Self> {
        if customers.is_empty() {
            return Err(Error::invalid("customers", "instance must have at least one customer"));
        }
        if facilities.is_empty() {
            return Err(Error::invalid("facilities", "instance must have at least one facility"));
        }
        if dist.len() != customers.len() {
            return Err(Error::invalid(
                "dist",
                format!("{} rows for {} customers", dist.len(), customers.len()),
            ));
        }
        for (u, row) in dist.iter().enumerate() {
            if row.len() != facilities.len() {
                return Err(Error::invalid(
                    format!("dist[{u}]"),
                    format!("{} entries for {} facilities", row.len(), facilities.len()),
                ));
            }
            for (f, d) in row.iter().enumerate() {
                if !d.is_finite() || *d < S::zero() {
                    return Err(Error::invalid(
                        format!("dist[{u}][{f}]"),
                        format!("{d} is not a finite non-negative number"),
                    ));
                }
            }
        }
        if let Some(w) = &weights {
            if w.len() != customers.len() {
                return Err(Error::invalid(
                    "weights",
                    format!("{} weights for {} customers", w.len(), customers.len()),
                ));
            }
            for (u, x) in w.iter().enumerate() {
                if !x.is_finite() || *x < S::zero() {
                    return Err(Error::invalid(format!("weights[{u}]"), format!("{x} is negative or not finite")));
                }
            }
        }
        Ok(MedianInstance {
            customers,
            facilities,
            dist,
            weights,
        })
    }

    /// Instance with labels `0..n` for both customers and facilities.
    pub fn from_matrix(dist: Vec<Vec<S>>) -> Result<Self> {
        let n_c = dist.len();
        let n_f = dist.first().map_or(0, Vec::len);
        Self::new(
            (0..n_c).map(Label::from).collect(),
            (0..n_f).map(Label::from).collect(),
            dist,
            None,
        )
    }

    pub fn with_weights(mut self, weights: Vec<S>) -> Result<Self> {
        self.weights = Some(weights);
        Self::new(self.customers, self.facilities, self.dist, self.weights)
    }

    pub fn customers(&self) -> &[Label] {
        &self.customers
    }

    pub fn facilities(&self) -> &[Label] {
        &self.facilities
    }

    pub fn num_customers(&self) -> usize {
        self.customers.len()
    }

    pub fn num_facilities(&self) -> usize {
        self.facilities.len()
    }

    pub fn dist(&self, customer: usize, facility: usize) -> &S {
        &self.dist[customer][facility]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.dist
    }

    pub fn weights(&self) -> Option<&[S]> {
        self.weights.as_deref()
    }

    pub fn weight(&self, customer: usize) -> S {
        match &self.weights {
            Some(w) => w[customer].clone(),
            None => S::one(),
        }
    }

    pub fn all_facilities(&self) -> FacilitySet {
        FacilitySet::all(self.num_facilities())
    }

    pub fn facility_labels(&self, set: &FacilitySet) -> Vec<Label> {
        set.iter().map(|f| self.facilities[f].clone()).collect()
    }

    pub(crate) fn check_set(&self, set: &FacilitySet) -> Result<()> {
        if set.is_empty() {
            return Err(Error::EmptyFacilitySet);
        }
        match set.iter().find(|&f| f >= self.num_facilities()) {
            Some(f) => Err(Error::UnknownFacility(f)),
            None => Ok(()),
        }
    }

    /// `d_{uX} = min_{f∈X} d_{uf}` for a non-empty, validated set.
    pub fn service_distance(&self, customer: usize, set: &FacilitySet) -> S {
        let row = &self.dist[customer];
        let mut it = set.iter();
        let mut best = &row[it.next().expect("empty facility set")];
        for f in it {
            if row[f] < *best {
                best = &row[f];
            }
        }
        best.clone()
    }

    /// `∑_u w(u) · d_{uX}`.
    pub fn cost(&self, set: &FacilitySet) -> Result<S> {
        self.check_set(set)?;
        Ok(self.weighted_sum((0..self.num_customers()).map(|u| self.service_distance(u, set))))
    }

    /// Weighted sum of per-customer service distances listed in customer order.
    pub fn weighted_sum<I: IntoIterator<Item = S>>(&self, per_customer: I) -> S {
        let mut total = S::zero();
        match &self.weights {
            None => {
                for d in per_customer {
                    total = total + d;
                }
            }
            Some(w) => {
                for (d, wu) in per_customer.into_iter().zip(w) {
                    if !wu.is_zero() {
                        total = total + wu.clone() * d;
                    }
                }
            }
        }
        total
    }

    /// `d'_{fg} = min_x (d_{xf} + d_{xg})`, the facility-to-facility distance
    /// routed through the best customer.
    pub fn facility_distance(&self, f: usize, g: usize) -> S {
        let mut best: Option<S> = None;
        for row in &self.dist {
            let d = row[f].clone() + row[g].clone();
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        }
        best.expect("instance has at least one customer")
    }

    /// Full `d'` matrix, symmetric.
    #[allow(clippy::needless_range_loop)]
    pub fn facility_distance_matrix(&self) -> Vec<Vec<S>> {
        let n = self.num_facilities();
        let mut out = vec![vec![S::zero(); n]; n];
        for f in 0..n {
            for g in f..n {
                let d = self.facility_distance(f, g);
                out[g][f] = d.clone();
                out[f][g] = d;
            }
        }
        out
    }

    /// Copy of this instance with every distance multiplied by `c`.
    pub fn scaled(&self, c: &S) -> Self {
        MedianInstance {
            customers: self.customers.clone(),
            facilities: self.facilities.clone(),
            dist: self
                .dist
                .iter()
                .map(|row| row.iter().map(|d| d.clone() * c.clone()).collect())
                .collect(),
            weights: self.weights.clone(),
        }
    }

    /// Same instance with distances converted to `f64`.
    pub fn to_float(&self) -> MedianInstance<f64> {
        MedianInstance {
            customers: self.customers.clone(),
            facilities: self.facilities.clone(),
            dist: self
                .dist
                .iter()
                .map(|row| row.iter().map(Scalar::to_f64).collect())
                .collect(),
            weights: self
                .weights
                .as_ref()
                .map(|w| w.iter().map(Scalar::to_f64).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(p: i64, q: i64) -> Rational {
        Rational::from_ratio(p, q)
    }

    fn small() -> MedianInstance<Rational> {
        MedianInstance::from_matrix(vec![
            vec![r(0, 1), r(4, 1), r(2, 1)],
            vec![r(3, 1), r(0, 1), r(1, 1)],
            vec![r(5, 1), r(1, 2), r(0, 1)],
        ])
        .unwrap()
    }

    #[test]
    fn rejects_empty_customer_set() {
        let err = MedianInstance::<f64>::new(vec![], vec![Label::from(0usize)], vec![], None).unwrap_err();
        assert!(err.to_string().contains("customer"));
    }

    #[test]
    fn rejects_ragged_and_negative() {
        assert!(MedianInstance::from_matrix(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(MedianInstance::from_matrix(vec![vec![1.0, -2.0]]).is_err());
        assert!(MedianInstance::from_matrix(vec![vec![1.0, f64::NAN]]).is_err());
        let inst = MedianInstance::from_matrix(vec![vec![1.0, 2.0]]).unwrap();
        assert!(inst.with_weights(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn cost_of_empty_set_is_an_error() {
        let err = small().cost(&FacilitySet::empty()).unwrap_err();
        assert_eq!(err.to_string(), "cost of empty facility set undefined");
        assert!(matches!(small().cost(&FacilitySet::singleton(7)), Err(Error::UnknownFacility(7))));
    }

    #[test]
    fn cost_all_zero_service() {
        assert_eq!(small().cost(&FacilitySet::all(3)).unwrap(), r(0, 1));
    }

    #[test]
    fn weighted_cost() {
        let inst = small().with_weights(vec![r(2, 1), r(0, 1), r(1, 3)]).unwrap();
        // customer 0 -> 2 (d=2, w=2), customer 2 -> 1 (d=1/2, w=1/3)
        assert_eq!(inst.cost(&FacilitySet::singleton(1)).unwrap(), r(8, 1) + r(1, 6));
    }

    #[test]
    fn facility_distance_through_zero_customer() {
        let inst = small();
        assert_eq!(inst.facility_distance(0, 0), r(0, 1));
        // f = g in general is twice the nearest customer distance
        assert_eq!(inst.facility_distance(1, 1), r(0, 1));
        assert_eq!(inst.facility_distance(0, 1), r(3, 1));
        assert_eq!(inst.facility_distance(1, 0), inst.facility_distance(0, 1));
    }

    #[test]
    fn facility_set_ops() {
        let a = FacilitySet::new([3, 1, 3, 2]);
        assert_eq!(a.members(), &[1, 2, 3]);
        let b = FacilitySet::new([2, 5]);
        assert_eq!(a.union(&b).members(), &[1, 2, 3, 5]);
        assert_eq!(a.difference(&b).members(), &[1, 3]);
        assert_eq!(a.intersection(&b).members(), &[2]);
        assert!(FacilitySet::new([1, 3]).is_subset(&a));
        assert_eq!(FacilitySet::from_mask(0b1010).members(), &[1, 3]);
        assert_eq!(a.to_string(), "{1,2,3}");
    }
}

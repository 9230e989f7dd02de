//! Property D: every extremal sequence over `(Z_k)^n` is a `(k-1)`-th power.

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::search::{enumerate_extremal, exact_s, SearchBudget, SearchStatus};
use crate::sequence::ZSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PropertyDStatus {
    Holds,
    Fails,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyDReport {
    pub group: AbelianGroup,
    /// `(k, n)` with the group equal to `(Z_k)^n`.
    pub k: u64,
    pub n: usize,
    pub holds: PropertyDStatus,
    pub s_value: Option<u64>,
    pub counterexample: Option<ZSequence>,
    pub extremal_orbits_checked: usize,
    pub extremal_raw_count: u64,
    pub nodes_explored: u64,
}

impl PropertyDReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "group": self.group.spec(),
            "k": self.k,
            "n": self.n,
            "holds": self.holds,
            "s": self.s_value,
            "counterexample": self.counterexample.as_ref().map(|c| c.to_json()["elems"].clone()),
            "extremal_orbits_checked": self.extremal_orbits_checked,
            "extremal_raw_count": self.extremal_raw_count,
            "nodes": self.nodes_explored,
        })
    }
}

/// Whether `s = T^{k-1}` for some `T`, i.e. every multiplicity is divisible
/// by `k - 1`.
pub fn is_kth_power_form(s: &ZSequence, k: usize) -> bool {
    assert!(k >= 2, "Property D needs k >= 2");
    s.multiplicities().all(|(_, m)| m % (k - 1) == 0)
}

/// Decides Property D for `(Z_k)^n` by enumerating every extremal orbit.
pub fn check_property_d(group: &AbelianGroup, budget: &SearchBudget) -> Result<PropertyDReport> {
    let (k, n) = group
        .as_homocyclic()
        .ok_or_else(|| Error::domain(format!("{group} is not of the form (Z_k)^n")))?;
    let mut report = PropertyDReport {
        group: group.clone(),
        k,
        n,
        holds: PropertyDStatus::Unknown,
        s_value: None,
        counterexample: None,
        extremal_orbits_checked: 0,
        extremal_raw_count: 0,
        nodes_explored: 0,
    };
    let s = exact_s(group, budget)?;
    report.nodes_explored = s.nodes_explored;
    if s.status != SearchStatus::Exact {
        return Ok(report);
    }
    let s_value = s.value.expect("exact result has a value");
    report.s_value = Some(s_value);
    let extremal = enumerate_extremal(group, k as usize, s_value as usize - 1, budget)?;
    report.nodes_explored += extremal.nodes_explored;
    if extremal.status != SearchStatus::Exact {
        return Ok(report);
    }
    report.extremal_orbits_checked = extremal.orbit_count;
    report.extremal_raw_count = extremal.raw_count;
    report.counterexample = extremal
        .representatives
        .into_iter()
        .find(|rep| !is_kth_power_form(rep, k as usize));
    report.holds = if report.counterexample.is_some() {
        PropertyDStatus::Fails
    } else {
        PropertyDStatus::Holds
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group;

    #[test]
    fn power_form_examples() {
        let z3 = parse_group("3").unwrap();
        assert!(is_kth_power_form(&ZSequence::cyclic(&z3, &[0, 0, 1, 1]).unwrap(), 3));
        assert!(!is_kth_power_form(&ZSequence::cyclic(&z3, &[0, 0, 1]).unwrap(), 3));
        assert!(is_kth_power_form(&ZSequence::cyclic(&z3, &[0, 1, 2, 2]).unwrap(), 2));
    }

    #[test]
    fn small_groups_hold() {
        let b = SearchBudget::default();
        let r = check_property_d(&parse_group("2^2").unwrap(), &b).unwrap();
        assert_eq!(r.holds, PropertyDStatus::Holds);

        let r = check_property_d(&parse_group("3").unwrap(), &b).unwrap();
        assert_eq!(r.holds, PropertyDStatus::Holds);
        assert_eq!(r.extremal_orbits_checked, 1);
        assert_eq!(r.s_value, Some(5));

        let r = check_property_d(&parse_group("3^2").unwrap(), &b).unwrap();
        assert_eq!(r.holds, PropertyDStatus::Holds);
    }

    #[test]
    fn rejects_non_homocyclic() {
        assert!(check_property_d(&parse_group("2x4").unwrap(), &SearchBudget::default()).is_err());
    }

    #[test]
    fn exhausted_budget_is_unknown() {
        let r = check_property_d(&parse_group("4^2").unwrap(), &SearchBudget::nodes(10)).unwrap();
        assert_eq!(r.holds, PropertyDStatus::Unknown);
    }
}

use alloc::vec::Vec;

use crate::{ContentId, LocationId, ProviderId, SimTime};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleSubject {
    Provider(ProviderId),
    /// Every VO.
    AnyVo,
}

/// Predicate with its bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    MaxShareableMb(f64),
    ForbiddenContentRange(ContentId, ContentId),
    MinDuration(SimTime),
    MaxDuration(SimTime),
    AllowedRegions(Vec<LocationId>),
}

impl Predicate {
    pub fn name(&self) -> &'static str {
        match self {
            Predicate::MaxShareableMb(_) => "max-shareable-mb",
            Predicate::ForbiddenContentRange(..) => "forbidden-content-range",
            Predicate::MinDuration(_) => "min-duration",
            Predicate::MaxDuration(_) => "max-duration",
            Predicate::AllowedRegions(_) => "allowed-regions",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Effect {
    Allow,
    Deny,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRule {
    pub subject: RuleSubject,
    pub predicate: Predicate,
    pub effect: Effect,
}

/// The VO as it would be formed, presented to the decision point.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateVo {
    pub buyer: ProviderId,
    pub sellers: Vec<(ProviderId, LocationId)>,
    pub content: ContentId,
    pub storage_mb: f64,
    pub duration: SimTime,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicyDecision {
    Allow,
    /// Indices of every violated rule.
    Deny(Vec<usize>),
}

impl PolicyDecision {
    pub fn is_allow(&self) -> bool {
        matches!(self, PolicyDecision::Allow)
    }
}

impl PolicyRule {
    /// Sellers the rule constrains, or `None` if it does not apply at all.
    fn scope<'a>(&self, vo: &'a CandidateVo) -> Option<Vec<&'a (ProviderId, LocationId)>> {
        match &self.subject {
            RuleSubject::AnyVo => Some(vo.sellers.iter().collect()),
            RuleSubject::Provider(p) if *p == vo.buyer => Some(vo.sellers.iter().collect()),
            RuleSubject::Provider(p) => {
                let own: Vec<_> = vo.sellers.iter().filter(|(s, _)| s == p).collect();
                (!own.is_empty()).then_some(own)
            }
        }
    }

    pub fn applies_to(&self, vo: &CandidateVo) -> bool {
        self.scope(vo).is_some()
    }

    pub fn is_violated(&self, vo: &CandidateVo) -> bool {
        let Some(sellers) = self.scope(vo) else { return false };
        match &self.predicate {
            Predicate::MaxShareableMb(max) => vo.storage_mb > *max,
            Predicate::ForbiddenContentRange(lo, hi) => (*lo..=*hi).contains(&vo.content),
            Predicate::MinDuration(d) => vo.duration < *d,
            Predicate::MaxDuration(d) => vo.duration > *d,
            Predicate::AllowedRegions(regions) => sellers.iter().any(|(_, r)| !regions.contains(r)),
        }
    }
}

/// Rules administering VO resources.
#[derive(Debug, Clone, Default)]
pub struct PolicyRepository {
    rules: Vec<PolicyRule>,
}

impl PolicyRepository {
    pub fn new(rules: Vec<PolicyRule>) -> Self {
        PolicyRepository { rules }
    }

    pub fn rules(&self) -> &[PolicyRule] {
        &self.rules
    }

    /// Decision point: the rules that apply to this candidate.
    pub fn applicable(&self, vo: &CandidateVo) -> Vec<PolicyRule> {
        self.rules.iter().filter(|r| r.applies_to(vo)).cloned().collect()
    }

    pub fn check(&self, vo: &CandidateVo) -> PolicyDecision {
        check_policies(vo, &self.rules)
    }
}

/// Deny iff an applicable deny rule is violated. No applicable rule means
/// allow.
pub fn check_policies(vo: &CandidateVo, rules: &[PolicyRule]) -> PolicyDecision {
    let violated: Vec<usize> = rules
        .iter()
        .enumerate()
        .filter(|(_, r)| r.effect == Effect::Deny && r.is_violated(vo))
        .map(|(i, _)| i)
        .collect();
    if violated.is_empty() {
        PolicyDecision::Allow
    } else {
        PolicyDecision::Deny(violated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn candidate(content: u32, storage: f64) -> CandidateVo {
        CandidateVo {
            buyer: ProviderId::new("o"),
            sellers: vec![(ProviderId::new("s1"), LocationId(1)), (ProviderId::new("s2"), LocationId(2))],
            content: ContentId(content),
            storage_mb: storage,
            duration: SimTime::from_secs(300),
        }
    }

    fn deny(subject: RuleSubject, predicate: Predicate) -> PolicyRule {
        PolicyRule { subject, predicate, effect: Effect::Deny }
    }

    #[test]
    fn forbidden_range_denies() {
        let rules = [deny(RuleSubject::AnyVo, Predicate::ForbiddenContentRange(ContentId(40), ContentId(60)))];
        assert_eq!(check_policies(&candidate(50, 100.0), &rules), PolicyDecision::Deny(vec![0]));
        assert!(check_policies(&candidate(61, 100.0), &rules).is_allow());
    }

    #[test]
    fn shareable_limit_allows_smaller() {
        let rules = [deny(RuleSubject::AnyVo, Predicate::MaxShareableMb(200.0))];
        assert!(check_policies(&candidate(1, 100.0), &rules).is_allow());
        assert!(!check_policies(&candidate(1, 300.0), &rules).is_allow());
    }

    #[test]
    fn default_allow() {
        assert!(check_policies(&candidate(1, 1e9), &[]).is_allow());
        let other = [deny(RuleSubject::Provider(ProviderId::new("zz")), Predicate::MaxShareableMb(1.0))];
        assert!(check_policies(&candidate(1, 100.0), &other).is_allow());
    }

    #[test]
    fn every_violation_listed() {
        let rules = [
            deny(RuleSubject::AnyVo, Predicate::MinDuration(SimTime::from_secs(600))),
            PolicyRule {
                subject: RuleSubject::AnyVo,
                predicate: Predicate::MaxDuration(SimTime::from_secs(10)),
                effect: Effect::Allow,
            },
            deny(RuleSubject::Provider(ProviderId::new("s2")), Predicate::AllowedRegions(vec![LocationId(1)])),
            deny(RuleSubject::Provider(ProviderId::new("s1")), Predicate::AllowedRegions(vec![LocationId(1)])),
        ];
        assert_eq!(check_policies(&candidate(1, 1.0), &rules), PolicyDecision::Deny(vec![0, 2]));
        let repo = PolicyRepository::new(rules.to_vec());
        assert_eq!(repo.applicable(&candidate(1, 1.0)).len(), 4);
    }
}

//! Group-rate risk features.
//!
//! Each business gets four environment rates computed over the full input
//! population: the share of closed businesses in its zip code and price
//! tier, and the share of deal-running businesses in its zip code and
//! price tier.

use super::record::BusinessRecord;
use std::collections::HashMap;

/// Per-business group proportions, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskFeatures {
    /// Share of closed businesses in the same zip code.
    pub fzrisk: f64,
    /// Share of closed businesses in the same price tier.
    pub fprisk: f64,
    /// Share of deal-running businesses in the same zip code.
    pub gzrisk: f64,
    /// Share of deal-running businesses in the same price tier.
    pub gprisk: f64,
}

#[derive(Default, Clone, Copy)]
struct GroupTally {
    n: u32,
    closed: u32,
    groupon: u32,
}

fn rate(hits: u32, n: u32) -> f64 {
    if n == 0 {
        0.0
    } else {
        f64::from(hits) / f64::from(n)
    }
}

fn rate_loo(hits: u32, n: u32, self_hit: bool) -> f64 {
    // Leave-one-out variant; a singleton group has no peers and scores 0.
    let n = n - 1;
    let hits = hits - u32::from(self_hit);
    rate(hits, n)
}

/// Plain group-proportion rates, the business's own outcome included.
pub fn compute_risk_features(records: &[BusinessRecord]) -> HashMap<String, RiskFeatures> {
    compute_risk_features_opts(records, false)
}

/// Group-rate features with an optional leave-one-out adjustment that
/// excludes each business's own outcome from its group rates.
pub fn compute_risk_features_opts(
    records: &[BusinessRecord],
    leave_one_out: bool,
) -> HashMap<String, RiskFeatures> {
    let mut by_zip: HashMap<&str, GroupTally> = HashMap::new();
    let mut by_price: HashMap<u8, GroupTally> = HashMap::new();
    for r in records {
        let z = by_zip.entry(r.zip.as_str()).or_default();
        z.n += 1;
        z.closed += u32::from(r.is_closed);
        z.groupon += u32::from(r.is_groupon);
        let p = by_price.entry(r.price).or_default();
        p.n += 1;
        p.closed += u32::from(r.is_closed);
        p.groupon += u32::from(r.is_groupon);
    }

    let mut out = HashMap::with_capacity(records.len());
    for r in records {
        let z = by_zip[r.zip.as_str()];
        let p = by_price[&r.price];
        let features = if leave_one_out {
            RiskFeatures {
                fzrisk: rate_loo(z.closed, z.n, r.is_closed),
                fprisk: rate_loo(p.closed, p.n, r.is_closed),
                gzrisk: rate_loo(z.groupon, z.n, r.is_groupon),
                gprisk: rate_loo(p.groupon, p.n, r.is_groupon),
            }
        } else {
            RiskFeatures {
                fzrisk: rate(z.closed, z.n),
                fprisk: rate(p.closed, p.n),
                gzrisk: rate(z.groupon, z.n),
                gprisk: rate(p.groupon, p.n),
            }
        };
        out.insert(r.id.clone(), features);
    }
    out
}

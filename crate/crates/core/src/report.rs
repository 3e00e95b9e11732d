//! JSON reports for verified witness pairs.
//!
//! Reports are assembled from ordered maps and fixed-order fields only, so
//! byte-identical runs with the same configuration and seed produce
//! byte-identical output.

use serde_json::{json, Value};

use crate::witnesses::{
    AbelianSource, ElementStatus, GlobalStatus, StabilityReport, VerifiedWitness,
};

fn global_to_json(status: &GlobalStatus) -> Value {
    match status {
        GlobalStatus::Found { conjugator } => json!({
            "status": "found",
            "conjugator": conjugator.to_string(),
        }),
        GlobalStatus::Exhausted {
            level,
            method,
            dimension,
            coverage,
        } => {
            let mut v = json!({
                "status": "exhausted",
                "level": level,
                "method": method.to_string(),
                "coverage": coverage.to_string(),
            });
            if let Some(d) = dimension {
                v["dimension"] = json!(d);
            }
            v
        }
        GlobalStatus::Symbolic { tag, detail } => json!({
            "status": "symbolic",
            "tag": tag,
            "detail": detail,
        }),
        GlobalStatus::Unknown { dimension, level } => json!({
            "status": "unknown",
            "level": level,
            "dimension": dimension,
        }),
    }
}

fn element_to_json(
    status: &ElementStatus,
    certs: &std::collections::BTreeMap<Vec<u64>, crate::matrixlab::Matrix>,
) -> Value {
    let certificates: serde_json::Map<String, Value> = certs
        .iter()
        .map(|(h, c)| (AbelianSource::label(h), json!(c.to_string())))
        .collect();
    match status {
        ElementStatus::Verified => json!({
            "status": "verified",
            "certificates": certificates,
        }),
        ElementStatus::Fails { at, reason } => json!({
            "status": "fails",
            "at": AbelianSource::label(at),
            "reason": reason,
            "certificates": certificates,
        }),
        ElementStatus::Inconclusive { at } => json!({
            "status": "inconclusive",
            "at": AbelianSource::label(at),
            "certificates": certificates,
        }),
    }
}

/// The full machine-readable report for one verified pair.
pub fn witness_report(v: &VerifiedWitness, budget: u64, seed: u64) -> Value {
    let pair = &v.pair;
    let images = |hom: &crate::witnesses::Hom| -> Vec<String> {
        hom.images.iter().map(|m| m.to_string()).collect()
    };
    let mut report = json!({
        "target": pair.target().to_json(),
        "source": pair.source().moduli,
        "phi1": images(&pair.phi1),
        "phi2": images(&pair.phi2),
        "element_conjugate": element_to_json(
            pair.element_status.as_ref().expect("verified pair"),
            &pair.element_certificates,
        ),
        "global": global_to_json(pair.global_status.as_ref().expect("verified pair")),
        "provenance": pair.provenance,
        "budget": budget,
        "seed": seed,
    });
    if let Some(scan) = &v.group_scan {
        report["group_scan"] = global_to_json(scan);
    }
    if let Some(StabilityReport { level, global }) = &v.stability {
        report["stability"] = json!({
            "level": level,
            "global": global_to_json(global),
        });
    }
    report
}

/// Render with a trailing newline, stable across runs.
pub fn to_pretty_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::make_field;
    use crate::witnesses::{verify_witness, witness_gl2, VerifyOptions};

    #[test]
    fn report_is_deterministic() {
        let spec = make_field(3, 2).unwrap();
        let t = spec.gen();
        let pair = witness_gl2(&spec, &spec.one(), &t).unwrap();
        let opts = VerifyOptions::default();
        let a = witness_report(
            &verify_witness(&pair, &opts).unwrap(),
            opts.budget,
            opts.seed,
        );
        let b = witness_report(
            &verify_witness(&pair, &opts).unwrap(),
            opts.budget,
            opts.seed,
        );
        assert_eq!(to_pretty_string(&a), to_pretty_string(&b));
        assert_eq!(a["global"]["status"], "symbolic");
        assert_eq!(a["element_conjugate"]["status"], "verified");
        assert_eq!(a["source"], serde_json::json!([3, 3]));
    }
}

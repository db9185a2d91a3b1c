use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use flatbetti::coinv::mixing_breakdown;
use flatbetti::gysin::{circle_bundle_total_space, mult_ranks, pair_upper_bound, LinearForm};
use flatbetti::lesolver::{
    equivariant_series, fixed_point_total, ho_liu_numerator, ho_liu_series, klein_low_degree,
    klein_record, u3_su3_relation, PairSequenceInstance,
};
use flatbetti::liecat::{rp2_components, rp2_total, GroupId};
use flatbetti::numcheck::{self, CheckReport, Execution, SamplerConfig};
use flatbetti::series::{RationalPoly, TruncatedSeries};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const GOLDEN: &str = include_str!("../data/golden.toml");

#[derive(Debug, Deserialize)]
struct Golden {
    version: u32,
    claim: Vec<GoldenClaim>,
}

#[derive(Debug, Deserialize)]
struct GoldenClaim {
    id: String,
    reference: String,
    expected: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Match,
    Mismatch,
    Indeterminate,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Match => "MATCH",
            Status::Mismatch => "MISMATCH",
            Status::Indeterminate => "INDETERMINATE",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Claim {
    pub claim_id: String,
    pub reference: String,
    pub computed: Value,
    pub expected: Value,
    pub status: Status,
}

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub golden_version: u32,
    pub seed: u64,
    pub claims: Vec<Claim>,
    pub overall: Status,
}

impl ReportDocument {
    pub fn is_match(&self) -> bool {
        self.overall == Status::Match
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# flatbetti verification report\n").unwrap();
        writeln!(out, "seed: {}\n", self.seed).unwrap();
        writeln!(out, "| claim | reference | computed | expected | status |").unwrap();
        writeln!(out, "|---|---|---|---|---|").unwrap();
        for c in &self.claims {
            writeln!(
                out,
                "| {} | {} | `{}` | `{}` | {} |",
                c.claim_id,
                c.reference.replace('|', "\\|"),
                c.computed,
                c.expected,
                c.status.label()
            )
            .unwrap();
        }
        writeln!(out, "\noverall: {}", self.overall.label()).unwrap();
        out
    }
}

fn poly_value(p: &RationalPoly) -> Value {
    match p.to_i64_coeffs() {
        Some(c) => json!(c),
        None => json!(p.to_string()),
    }
}

fn series_value(s: &TruncatedSeries) -> Value {
    poly_value(&s.to_poly())
}

fn check_value(r: &CheckReport) -> (Value, bool) {
    (
        json!(format!("{}/{}", r.pass, r.samples)),
        r.indeterminate > 0 && r.fail == 0,
    )
}

/// Every computed value, keyed by claim id. The flag marks numerical checks
/// that could not decide some samples.
fn computed_values(
    cfg: &SamplerConfig,
    exec: Execution,
) -> Result<BTreeMap<String, (Value, bool)>> {
    let su3 = GroupId::su(3);
    let mut out = BTreeMap::new();
    let mut put = |id: &str, v: Value| {
        out.insert(id.to_string(), (v, false));
    };

    let orbits = mixing_breakdown(su3)?;
    let by_stabilizer = |order: usize| {
        orbits
            .iter()
            .find(|o| o.orbit.stabilizer_order == order)
            .map(|o| poly_value(&o.poincare))
            .ok_or_else(|| anyhow!("no orbit with stabilizer of order {order}"))
    };
    put("mixing.full_weyl", by_stabilizer(6)?);
    put("mixing.order_two", by_stabilizer(2)?);

    let form = LinearForm::difference(3, 0, 1);
    put("gysin.ranks", json!(mult_ranks(&form)));
    put(
        "gysin.total_space",
        poly_value(&circle_bundle_total_space(&form)),
    );
    put("pair.bound", poly_value(&pair_upper_bound()));

    let low = klein_low_degree()?;
    put("low_degree.intermediate", series_value(&low.intermediate));
    put("low_degree.constraint", series_value(&low.constraint));

    let instance = PairSequenceInstance::for_group(su3)?;
    put("pair.solution_count", json!(instance.solve_all().len()));
    let relaxed = PairSequenceInstance {
        low_degree_constraint: None,
        ..instance
    };
    put(
        "pair.constraint_active",
        json!(relaxed.solve_all().len() > 1),
    );

    let record = klein_record(su3)?;
    put("mixing.total", poly_value(&record.pt_a));
    put("klein.poincare", poly_value(&record.pt_z));
    put("klein.total_dimension", json!(record.total_dimension));
    put("klein.fixed_point_total", json!(fixed_point_total(su3)));
    put("klein.bound_attained", json!(record.bound_attained));
    put("klein.u3_relation", json!(u3_su3_relation(3)?.holds));

    put("ho_liu.n0_numerator", poly_value(&ho_liu_numerator(0)));
    put("ho_liu.n1_numerator", poly_value(&ho_liu_numerator(1)));
    let order = flatbetti::lesolver::DEFAULT_SERIES_ORDER;
    put(
        "ho_liu.n1_series_agrees",
        json!(ho_liu_series(1, order) == equivariant_series(su3, order)?),
    );

    let rp2 = rp2_total(su3);
    put("rp2.su3_total", poly_value(&rp2));
    put("rp2.su3_odd_vanish", json!(!rp2.has_odd_terms()));
    let counts: Vec<usize> = (1..=5)
        .map(|n| rp2_components(GroupId::u(n)).len())
        .collect();
    put("rp2.un_component_counts", json!(counts));

    for r in numcheck::run_all(cfg, exec) {
        out.insert(format!("numcheck.{}", r.name), check_value(&r));
    }
    Ok(out)
}

pub fn build(cfg: &SamplerConfig, exec: Execution) -> Result<ReportDocument> {
    let golden: Golden = toml::from_str(GOLDEN).context("parsing golden values")?;
    let mut computed = computed_values(cfg, exec)?;
    let mut claims = Vec::with_capacity(golden.claim.len());
    for g in golden.claim {
        let Some((value, undecided)) = computed.remove(&g.id) else {
            bail!("no computation for claim {}", g.id);
        };
        let status = if value == g.expected {
            Status::Match
        } else if undecided {
            Status::Indeterminate
        } else {
            Status::Mismatch
        };
        claims.push(Claim {
            claim_id: g.id,
            reference: g.reference,
            computed: value,
            expected: g.expected,
            status,
        });
    }
    if let Some(id) = computed.keys().next() {
        bail!("computed value {id} has no golden entry");
    }
    let overall = if claims.iter().any(|c| c.status == Status::Mismatch) {
        Status::Mismatch
    } else if claims.iter().any(|c| c.status == Status::Indeterminate) {
        Status::Indeterminate
    } else {
        Status::Match
    };
    Ok(ReportDocument {
        golden_version: golden.version,
        seed: cfg.seed,
        claims,
        overall,
    })
}

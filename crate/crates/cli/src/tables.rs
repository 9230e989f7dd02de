//! Reproducible tables. Every table has a fixed column order and a header
//! row; cells that do not apply hold `n/a`.

use clap::ValueEnum;
use num_bigint::BigUint;
use serde_json::json;
use zslab::arith::{is_power_of_two, is_prime, prime_power};
use zslab::bounds::{
    best_bounds, composite_bound, egzupper_combine, har2_exact, harborth_bounds, maincor2_bound,
    per_prime_bounds, ppower_bound, rank2_exact, upper_egz_prime, BoundContext, BoundKind,
    BoundOptions, BoundResult,
};
use zslab::polymethod::{
    petrov_cardinality_bound, petrov_max_search, sweep_dim_bound_grid, BoundForm, PetrovInstance,
};
use zslab::real::Real;
use zslab::{
    check_property_d, exact_g, exact_s, parse_group, AbelianGroup, PropertyDStatus, SearchStatus,
};

use crate::{pretty, verdict_str, GlobalOpts, Outcome, Output};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableName {
    EgzSmall,
    DimVsBound,
    PetrovCaps,
    PropdSurvey,
}

impl TableName {
    fn as_str(self) -> &'static str {
        match self {
            TableName::EgzSmall => "egz-small",
            TableName::DimVsBound => "dim-vs-bound",
            TableName::PetrovCaps => "petrov-caps",
            TableName::PropdSurvey => "propd-survey",
        }
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    complete: bool,
}

impl Table {
    fn render(&self, name: TableName, output: Output) -> String {
        match output {
            Output::Json => pretty(&json!({
                "table": name.as_str(),
                "columns": self.columns,
                "rows": self.rows,
            })),
            _ => {
                let mut s = self.columns.join("\t");
                s.push('\n');
                for r in &self.rows {
                    s.push_str(&r.join("\t"));
                    s.push('\n');
                }
                s
            }
        }
    }
}

pub(crate) fn run_table(g: &GlobalOpts, name: TableName, max_n: usize) -> Result<Outcome, String> {
    let table = match name {
        TableName::EgzSmall => egz_small(g)?,
        TableName::DimVsBound => dim_vs_bound(max_n)?,
        TableName::PetrovCaps => petrov_caps(g)?,
        TableName::PropdSurvey => propd_survey(g)?,
    };
    Ok(Outcome {
        code: if table.complete { crate::EXIT_OK } else { crate::EXIT_INCOMPLETE },
        stdout: table.render(name, g.output()),
        stderr: String::new(),
    })
}

const NA: &str = "n/a";

/// Every invariant-factor chain with product `order`.
pub fn groups_of_order(order: u64) -> Vec<AbelianGroup> {
    fn extend(prev: u64, rest: u64, chain: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 1 {
            out.push(chain.clone());
            return;
        }
        let mut f = prev;
        while f <= rest {
            if rest % f == 0 && (f == rest || (rest / f) % f == 0) {
                chain.push(f);
                extend(f, rest / f, chain, out);
                chain.pop();
            }
            f += prev;
        }
    }
    let mut chains = Vec::new();
    let mut f = 2;
    while f <= order {
        if order % f == 0 {
            let mut chain = vec![f];
            if f == order {
                chains.push(chain);
            } else if (order / f) % f == 0 {
                extend(f, order / f, &mut chain, &mut chains);
            }
        }
        f += 1;
    }
    let mut groups: Vec<AbelianGroup> = chains
        .into_iter()
        .map(|c| AbelianGroup::from_factors(&c).expect("valid chain"))
        .collect();
    groups.sort_by_key(|g| g.spec());
    groups.dedup();
    groups
}

fn cell(b: zslab::Result<BoundResult>) -> String {
    match b {
        Ok(b) => b.value_int.to_string(),
        Err(_) => NA.into(),
    }
}

fn cond_cell(b: zslab::Result<BoundResult>) -> String {
    match b {
        Ok(b) if b.is_conditional() => format!("{}*", b.value_int),
        other => cell(other),
    }
}

fn egz_small(g: &GlobalOpts) -> Result<Table, String> {
    let mut groups = Vec::new();
    for order in 2..=32 {
        groups.extend(groups_of_order(order));
    }
    let nine = parse_group("3^2").expect("literal spec");
    if !groups.contains(&nine) {
        groups.push(nine);
    }
    let budget = g.budget();
    let ctx0 = BoundContext::default();
    let mut rows = Vec::new();
    let mut complete = true;
    for grp in &groups {
        let s = exact_s(grp, &budget).map_err(|e| e.to_string())?;
        let gv = exact_g(grp, &budget).map_err(|e| e.to_string())?;
        let s_cell = match s.status {
            SearchStatus::Exact => s.value.expect("exact value").to_string(),
            _ => "UNKNOWN".into(),
        };
        let g_cell = match gv.status {
            SearchStatus::Exact | SearchStatus::Vacuous => gv.value.expect("value").to_string(),
            _ => "UNKNOWN".into(),
        };
        complete &= s.status == SearchStatus::Exact
            && matches!(gv.status, SearchStatus::Exact | SearchStatus::Vacuous);
        let f = grp.invariant_factors();
        let r = f.len();
        let k = grp.exponent();
        let homo = grp.as_homocyclic();
        let rank2 = match r {
            1 => cell(rank2_exact(1, f[0])),
            2 => cell(rank2_exact(f[0], f[1])),
            _ => NA.into(),
        };
        let (harb_lo, harb_hi) = match homo.map(|(k, n)| harborth_bounds(k, n)) {
            Some(Ok((lo, hi))) => (lo.value_int.to_string(), hi.value_int.to_string()),
            _ => (NA.into(), NA.into()),
        };
        let har2 = match homo {
            Some((k, n)) if is_power_of_two(k) => cell(har2_exact(k.trailing_zeros(), n)),
            _ => NA.into(),
        };
        let egz_prime = match homo {
            Some((k, n)) if is_prime(k) && k > 2 => cond_cell(upper_egz_prime(k, n, &ctx0.verified_propd)),
            _ => NA.into(),
        };
        let maincor2 = match homo {
            Some((3, n)) => cell(maincor2_bound(n)),
            _ => NA.into(),
        };
        let ppower = match (homo, prime_power(k)) {
            (Some((_, n)), Some((p, e))) if p > 2 && e > 1 => {
                cell(ppower_bound(p, e, n, &ctx0, false).map(|b| b.bound))
            }
            _ => NA.into(),
        };
        let egzupper = cell(
            per_prime_bounds(k, r, &ctx0, false)
                .and_then(|pp| egzupper_combine(f, &pp))
                .map(|c| c.bound),
        );
        let composite = match homo {
            Some((k, n)) if k.trailing_zeros() > 0 && k >> k.trailing_zeros() > 1 => {
                let m = 1u64 << k.trailing_zeros();
                cell(composite_bound(m, k / m, n, &ctx0, false).map(|c| c.bound))
            }
            _ => NA.into(),
        };
        let mut ctx = BoundContext::default();
        ctx.searched.insert(grp.clone(), s.clone());
        let best = best_bounds(
            grp,
            &BoundOptions {
                context: ctx,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let sandwich = match (s.status, s.value) {
            (SearchStatus::Exact, Some(v)) => {
                let v = BigUint::from(v);
                let ok = best.candidates.iter().all(|c| match c.kind {
                    BoundKind::Upper => c.value_int >= v,
                    BoundKind::Lower => c.value_int <= v,
                    BoundKind::Exact => c.value_int == v,
                });
                if ok { "OK" } else { "VIOLATED" }.to_string()
            }
            _ => "-".into(),
        };
        rows.push(vec![
            grp.spec(),
            grp.order().map(|o| o.to_string()).unwrap_or_default(),
            k.to_string(),
            r.to_string(),
            s_cell,
            s.status.as_str().into(),
            g_cell,
            gv.status.as_str().into(),
            rank2,
            har2,
            harb_lo,
            harb_hi,
            egz_prime,
            maincor2,
            ppower,
            egzupper,
            composite,
            best.lower.value_int.to_string(),
            best.upper.value_int.to_string(),
            sandwich,
        ]);
    }
    Ok(Table {
        columns: vec![
            "group",
            "order",
            "exponent",
            "rank",
            "s",
            "s_status",
            "g",
            "g_status",
            "rank2_exact",
            "har2_exact",
            "harborth_lower",
            "harborth_upper",
            "upper_egz_prime",
            "maincor2",
            "ppower",
            "egzupper",
            "composite",
            "best_lower",
            "best_upper",
            "sandwich",
        ],
        rows,
        complete,
    })
}

/// Exact below 10^30, otherwise 15 significant digits.
fn render_big(v: &BigUint) -> String {
    let s = v.to_string();
    if s.len() <= 30 {
        s
    } else {
        Real::from_biguint(v).to_sig_string(15)
    }
}

fn dim_vs_bound(max_n: usize) -> Result<Table, String> {
    let ms: Vec<u64> = (3..=10).collect();
    let checks = sweep_dim_bound_grid(max_n, &[2, 3, 5, 7, 11], &ms).map_err(|e| e.to_string())?;
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                c.n.to_string(),
                c.d.to_string(),
                c.m.to_string(),
                c.k.to_string(),
                render_big(&c.dim),
                c.bound.to_sig_string(15),
                verdict_str(c.verdict).into(),
            ]
        })
        .collect();
    Ok(Table {
        columns: vec!["n", "D", "m", "k", "dim", "bound", "verdict"],
        rows,
        complete: true,
    })
}

/// `(p, n, coefficients)` with `p^n <= 81`.
pub fn petrov_instances() -> Vec<(u64, usize, Vec<i64>)> {
    let mut out = Vec::new();
    for p in (2..=81u64).filter(|&p| is_prime(p)) {
        let coeffs: Vec<i64> = if p == 2 { vec![1, 1, 1, 1] } else { vec![1, 1, -2] };
        let mut n = 1;
        while p.pow(n as u32) <= 81 {
            out.push((p, n, coeffs.clone()));
            n += 1;
        }
    }
    out
}

fn petrov_caps(g: &GlobalOpts) -> Result<Table, String> {
    let budget = g.budget();
    let mut rows = Vec::new();
    let mut complete = true;
    for (p, n, coeffs) in petrov_instances() {
        let inst = PetrovInstance::new(p, n, &coeffs).map_err(|e| e.to_string())?;
        let r = petrov_max_search(&inst, &budget).map_err(|e| e.to_string())?;
        let dim = petrov_cardinality_bound(&inst, BoundForm::ExactDim).map_err(|e| e.to_string())?;
        let closed = petrov_cardinality_bound(&inst, BoundForm::ClosedForm).map_err(|e| e.to_string())?;
        let found = BigUint::from(r.value.unwrap_or(0));
        let closed_ceil = closed.value_real.ceil_biguint();
        let verdict = if found <= dim.value_int && dim.value_int <= closed_ceil {
            "OK"
        } else if found > dim.value_int || found > closed_ceil {
            "VIOLATED"
        } else {
            "DIM_ABOVE_CLOSED_FORM"
        };
        let exact = r.status == SearchStatus::Exact;
        complete &= exact;
        rows.push(vec![
            p.to_string(),
            n.to_string(),
            inst.coeffs().iter().map(u64::to_string).collect::<Vec<_>>().join(","),
            inst.m().to_string(),
            if exact { found.to_string() } else { format!(">={found}") },
            r.status.as_str().into(),
            dim.value_int.to_string(),
            closed.value_real.to_sig_string(15),
            verdict.into(),
        ]);
    }
    Ok(Table {
        columns: vec!["p", "n", "coeffs", "m", "max", "status", "bound_dim", "bound_closed", "verdict"],
        rows,
        complete,
    })
}

pub const PROPD_SURVEY_GROUPS: &[&str] = &[
    "2", "2^2", "2^3", "2^4", "3", "4", "5", "6", "7", "3^2", "4^2", "3^3",
];

fn propd_survey(g: &GlobalOpts) -> Result<Table, String> {
    let budget = g.budget();
    let mut rows = Vec::new();
    let mut complete = true;
    for spec in PROPD_SURVEY_GROUPS {
        let grp = parse_group(spec).map_err(|e| e.to_string())?;
        let r = check_property_d(&grp, &budget).map_err(|e| e.to_string())?;
        let holds = match r.holds {
            PropertyDStatus::Holds => "HOLDS",
            PropertyDStatus::Fails => "FAILS",
            PropertyDStatus::Unknown => "UNKNOWN",
        };
        complete &= r.holds != PropertyDStatus::Unknown;
        rows.push(vec![
            grp.spec(),
            r.k.to_string(),
            r.n.to_string(),
            holds.into(),
            r.s_value.map(|v| v.to_string()).unwrap_or_else(|| "UNKNOWN".into()),
            r.extremal_orbits_checked.to_string(),
            r.extremal_raw_count.to_string(),
            r.nodes_explored.to_string(),
        ]);
    }
    Ok(Table {
        columns: vec!["group", "k", "n", "holds", "s", "orbits", "raw_count", "nodes"],
        rows,
        complete,
    })
}

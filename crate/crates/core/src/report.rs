//! Result documents. Dyadic numbers are written bit-exactly as
//! `{"m": "<decimal mantissa>", "e": <exponent>}`.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::clustertri::{Cluster, SolveResult, SolveStats};
use crate::dyadic::{Box, Disc, Dyadic, DyadicComplex, PolyBox, PolyDisc};

/// A solved instance as stored in a result document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub roi: PolyBox,
    pub epsilon_log2: i64,
    pub clusters: Vec<Cluster>,
    pub stats: SolveStats,
}

impl Report {
    pub fn new(roi: PolyBox, epsilon_log2: i64, result: SolveResult) -> Self {
        Report {
            roi,
            epsilon_log2,
            clusters: result.clusters,
            stats: result.stats,
        }
    }
}

pub fn dyadic_json(d: &Dyadic) -> Value {
    json!({"m": d.mantissa().to_string(), "e": d.exponent()})
}

fn complex_json(c: &DyadicComplex) -> Value {
    json!([dyadic_json(&c.re), dyadic_json(&c.im)])
}

pub fn to_json(r: &Report) -> Value {
    let roi: Vec<Value> = r
        .roi
        .0
        .iter()
        .map(|b| json!({"center": complex_json(&b.center), "width": dyadic_json(&b.width)}))
        .collect();
    let clusters: Vec<Value> = r
        .clusters
        .iter()
        .map(|c| {
            json!({
                "center": c.polydisc.0.iter().map(|d| complex_json(&d.center)).collect::<Vec<_>>(),
                "radius": c.polydisc.0.iter().map(|d| dyadic_json(&d.radius)).collect::<Vec<_>>(),
                "multiplicities": c.multiplicities,
                "total": c.total,
            })
        })
        .collect();
    json!({
        "roi": roi,
        "epsilon-log2": r.epsilon_log2,
        "clusters": clusters,
        "stats": {
            "tstar-calls": r.stats.tstar_calls,
            "lifts": r.stats.lifts,
            "failures": r.stats.failures,
            "max-precision": r.stats.max_precision,
            "wall-time-ms": r.stats.wall_time.as_secs_f64() * 1000.0,
        },
    })
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing field `{key}`"))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, String> {
    v.as_array()
        .ok_or_else(|| format!("`{what}` must be an array"))
}

pub fn dyadic_from_json(v: &Value) -> Result<Dyadic, String> {
    let m = get(v, "m")?
        .as_str()
        .and_then(|s| BigInt::from_str(s).ok())
        .ok_or("dyadic mantissa must be a decimal string")?;
    let e = get(v, "e")?
        .as_i64()
        .ok_or("dyadic exponent must be an integer")?;
    Ok(Dyadic::new(m, e))
}

fn complex_from_json(v: &Value) -> Result<DyadicComplex, String> {
    match array(v, "center")?.as_slice() {
        [re, im] => Ok(DyadicComplex::new(
            dyadic_from_json(re)?,
            dyadic_from_json(im)?,
        )),
        _ => Err("a complex number is a pair [re, im]".into()),
    }
}

fn count(v: &Value, what: &str) -> Result<u64, String> {
    v.as_u64()
        .ok_or_else(|| format!("`{what}` must be a nonnegative integer"))
}

pub fn from_json(v: &Value) -> Result<Report, String> {
    let mut roi = Vec::new();
    for b in array(get(v, "roi")?, "roi")? {
        let w = dyadic_from_json(get(b, "width")?)?;
        if !w.is_positive() {
            return Err("roi widths must be positive".into());
        }
        roi.push(Box::new(complex_from_json(get(b, "center")?)?, w));
    }
    let epsilon_log2 = get(v, "epsilon-log2")?
        .as_i64()
        .ok_or("`epsilon-log2` must be an integer")?;
    let mut clusters = Vec::new();
    for c in array(get(v, "clusters")?, "clusters")? {
        let centers = array(get(c, "center")?, "center")?;
        let radii = array(get(c, "radius")?, "radius")?;
        let mults = array(get(c, "multiplicities")?, "multiplicities")?;
        if centers.len() != roi.len() || radii.len() != roi.len() || mults.len() != roi.len() {
            return Err("cluster dimension does not match the roi".into());
        }
        let mut discs = Vec::new();
        for (ce, r) in centers.iter().zip(radii) {
            let r = dyadic_from_json(r)?;
            if !r.is_positive() {
                return Err("radii must be positive".into());
            }
            discs.push(Disc::new(complex_from_json(ce)?, r));
        }
        let multiplicities = mults
            .iter()
            .map(|m| count(m, "multiplicities").map(|m| m as usize))
            .collect::<Result<Vec<_>, _>>()?;
        clusters.push(Cluster {
            polydisc: PolyDisc(discs),
            multiplicities,
            total: count(get(c, "total")?, "total")?,
        });
    }
    let stats = match v.get("stats") {
        Some(s) => SolveStats {
            tstar_calls: s.get("tstar-calls").and_then(Value::as_u64).unwrap_or(0),
            lifts: s.get("lifts").and_then(Value::as_u64).unwrap_or(0),
            failures: s.get("failures").and_then(Value::as_u64).unwrap_or(0),
            max_precision: s.get("max-precision").and_then(Value::as_u64).unwrap_or(0),
            wall_time: std::time::Duration::default(),
        },
        None => SolveStats::default(),
    };
    Ok(Report {
        roi: PolyBox(roi),
        epsilon_log2,
        clusters,
        stats,
    })
}

/// Human-readable summary, one line per cluster.
pub fn to_text(r: &Report) -> String {
    let mut out = String::new();
    let total: u64 = r.clusters.iter().map(|c| c.total).sum();
    let _ = writeln!(
        out,
        "{} clusters, total multiplicity {total}, epsilon 2^{}",
        r.clusters.len(),
        r.epsilon_log2
    );
    for (k, c) in r.clusters.iter().enumerate() {
        let center: Vec<String> = c
            .polydisc
            .0
            .iter()
            .map(|d| {
                let z = d.center.to_c64();
                format!("{}{:+}i", z.re, z.im)
            })
            .collect();
        let m: Vec<String> = c.multiplicities.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(
            out,
            "#{k}: m = {} ({}), radius <= {:.3e}, center ({})",
            c.total,
            m.join("x"),
            c.polydisc.radius().to_f64(),
            center.join(", ")
        );
    }
    let s = &r.stats;
    let _ = writeln!(
        out,
        "T* calls {}, lifts {}, failures {}, max precision {} bits, {:.3} s",
        s.tstar_calls,
        s.lifts,
        s.failures,
        s.max_precision,
        s.wall_time.as_secs_f64()
    );
    out
}

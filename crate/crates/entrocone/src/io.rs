//! File formats.
//!
//! Functionals and rays travel as JSON Lines: one record per line, subsets
//! keyed by comma-separated sorted variable lists, rationals as `"p"` or
//! `"p/q"` strings, the empty set never written. Scenarios and
//! certificates are single JSON documents. A derivation report is a
//! directory: `summary.json`, `facets.jsonl`, `certificates.jsonl`, and
//! `witnesses.jsonl`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::copy::{CopyStep, Scenario};
use crate::derive::DeriveOutcome;
use crate::lp::Certificate;
use crate::shannon::Cone;
use crate::space::{EntVector, LinForm, Rat, Relation, SubsetMask};
use crate::{Error, Result};

pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let denom = parse_int(q)?;
            if denom == BigInt::from(0) {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(Rat::new(parse_int(p)?, denom))
        }
    }
}

/// One functional on the wire.
#[derive(Serialize, Deserialize, Debug)]
pub struct FormRecord {
    pub n: usize,
    pub rel: String,
    pub coeffs: BTreeMap<String, String>,
}

impl FormRecord {
    pub fn from_form(f: &LinForm) -> FormRecord {
        FormRecord {
            n: f.n(),
            rel: match f.relation() {
                Relation::Ge => "ge".into(),
                Relation::Eq => "eq".into(),
            },
            coeffs: f
                .coeffs()
                .iter()
                .map(|(m, c)| (m.to_key(), format_rat(c)))
                .collect(),
        }
    }

    pub fn into_form(self) -> Result<LinForm> {
        let relation = match self.rel.as_str() {
            "ge" => Relation::Ge,
            "eq" => Relation::Eq,
            other => return Err(Error::Parse(format!("bad relation {other:?}"))),
        };
        let mut coeffs = Vec::new();
        for (key, value) in &self.coeffs {
            if key.trim().is_empty() {
                return Err(Error::NonzeroEmptySet);
            }
            coeffs.push((SubsetMask::parse_key(key, self.n)?, parse_rat(value)?));
        }
        LinForm::new(self.n, relation, coeffs)
    }
}

/// One ray on the wire.
#[derive(Serialize, Deserialize, Debug)]
pub struct RayRecord {
    pub n: usize,
    pub values: BTreeMap<String, String>,
}

impl RayRecord {
    pub fn from_ray(v: &EntVector) -> RayRecord {
        RayRecord {
            n: v.n(),
            values: v
                .values()
                .iter()
                .map(|(m, x)| (m.to_key(), format_rat(x)))
                .collect(),
        }
    }

    pub fn into_ray(self) -> Result<EntVector> {
        let mut values = Vec::new();
        for (key, value) in &self.values {
            values.push((SubsetMask::parse_key(key, self.n)?, parse_rat(value)?));
        }
        EntVector::new(self.n, values)
    }
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(serde_json::from_str(trimmed)?);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    for r in records {
        serde_json::to_writer(&mut file, r)?;
        file.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_forms(path: &Path) -> Result<Vec<LinForm>> {
    read_jsonl::<FormRecord>(path)?
        .into_iter()
        .map(FormRecord::into_form)
        .collect()
}

pub fn write_forms(path: &Path, forms: &[LinForm]) -> Result<()> {
    let records: Vec<FormRecord> = forms.iter().map(FormRecord::from_form).collect();
    write_jsonl(path, &records)
}

/// Read a cone file: inequality and equality records over one ground set.
pub fn read_cone(path: &Path) -> Result<Cone> {
    let forms = read_forms(path)?;
    let n = forms
        .first()
        .map(LinForm::n)
        .ok_or_else(|| Error::Parse(format!("{} holds no functionals", path.display())))?;
    let mut ineqs = Vec::new();
    let mut eqs = Vec::new();
    for f in forms {
        if f.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.n(),
            });
        }
        match f.relation() {
            Relation::Ge => ineqs.push(f),
            Relation::Eq => eqs.push(f),
        }
    }
    Cone::new(n, ineqs, eqs)
}

pub fn write_cone(path: &Path, cone: &Cone) -> Result<()> {
    let records: Vec<FormRecord> = cone
        .ineqs()
        .iter()
        .chain(cone.eqs())
        .map(FormRecord::from_form)
        .collect();
    write_jsonl(path, &records)
}

pub fn read_rays(path: &Path) -> Result<Vec<EntVector>> {
    read_jsonl::<RayRecord>(path)?
        .into_iter()
        .map(RayRecord::into_ray)
        .collect()
}

pub fn write_rays(path: &Path, rays: &[EntVector]) -> Result<()> {
    let records: Vec<RayRecord> = rays.iter().map(RayRecord::from_ray).collect();
    write_jsonl(path, &records)
}

#[derive(Serialize, Deserialize, Debug)]
struct StepRecord {
    k: usize,
    #[serde(rename = "I")]
    i_set: Vec<usize>,
    #[serde(rename = "J")]
    j_set: Vec<usize>,
}

#[derive(Serialize, Deserialize, Debug)]
struct ScenarioRecord {
    m: usize,
    steps: Vec<StepRecord>,
    #[serde(default)]
    base_bound: Option<String>,
    #[serde(default)]
    substituted: bool,
}

/// Read a scenario file. The new-variable index of step `t` is implicitly
/// `m + t`. A relative `base_bound` path resolves against the scenario
/// file's directory.
pub fn read_scenario(path: &Path) -> Result<Scenario> {
    let record: ScenarioRecord = serde_json::from_str(&fs::read_to_string(path)?)?;
    let mut steps = Vec::new();
    for (t, s) in record.steps.iter().enumerate() {
        steps.push(CopyStep::new(
            s.k,
            SubsetMask::from_vars(s.i_set.iter().copied()),
            SubsetMask::from_vars(s.j_set.iter().copied()),
            record.m + t + 1,
        )?);
    }
    let mut scenario = Scenario::new(record.m, steps)?;
    if let Some(bound_path) = &record.base_bound {
        let mut resolved = PathBuf::from(bound_path);
        if resolved.is_relative() {
            resolved = path.parent().unwrap_or(Path::new(".")).join(resolved);
        }
        let forms = read_forms(&resolved)?;
        scenario = scenario.with_base_bound(forms, record.substituted);
    }
    Ok(scenario)
}

pub fn write_scenario(path: &Path, scenario: &Scenario, base_bound: Option<&str>) -> Result<()> {
    let record = ScenarioRecord {
        m: scenario.m,
        steps: scenario
            .steps
            .iter()
            .map(|s| StepRecord {
                k: s.k,
                i_set: s.i_set.vars().collect(),
                j_set: s.j_set.vars().collect(),
            })
            .collect(),
        base_bound: base_bound.map(String::from),
        substituted: scenario
            .base_bound
            .as_ref()
            .map(|b| b.substituted)
            .unwrap_or_default(),
    };
    fs::write(path, serde_json::to_string_pretty(&record)?)?;
    Ok(())
}

#[derive(Serialize, Deserialize, Debug)]
pub struct CertificateRecord {
    pub ineq_multipliers: BTreeMap<String, String>,
    pub eq_multipliers: BTreeMap<String, String>,
    pub target: FormRecord,
}

impl CertificateRecord {
    pub fn from_certificate(c: &Certificate) -> CertificateRecord {
        let stringify = |m: &BTreeMap<usize, Rat>| {
            m.iter()
                .map(|(i, v)| (i.to_string(), format_rat(v)))
                .collect()
        };
        CertificateRecord {
            ineq_multipliers: stringify(&c.ineq_multipliers),
            eq_multipliers: stringify(&c.eq_multipliers),
            target: FormRecord::from_form(&c.target),
        }
    }

    pub fn into_certificate(self) -> Result<Certificate> {
        let numberify = |m: &BTreeMap<String, String>| -> Result<BTreeMap<usize, Rat>> {
            m.iter()
                .map(|(i, v)| {
                    let idx: usize = i
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad constraint index {i:?}")))?;
                    Ok((idx, parse_rat(v)?))
                })
                .collect()
        };
        Ok(Certificate {
            ineq_multipliers: numberify(&self.ineq_multipliers)?,
            eq_multipliers: numberify(&self.eq_multipliers)?,
            target: self.target.into_form()?,
        })
    }
}

pub fn write_certificate(path: &Path, cert: &Certificate) -> Result<()> {
    fs::write(
        path,
        serde_json::to_string_pretty(&CertificateRecord::from_certificate(cert))?,
    )?;
    Ok(())
}

pub fn read_certificate(path: &Path) -> Result<Certificate> {
    let record: CertificateRecord = serde_json::from_str(&fs::read_to_string(path)?)?;
    record.into_certificate()
}

#[derive(Serialize, Debug)]
struct SummaryClass {
    classification: String,
    orbit_size: usize,
    facet: FormRecord,
    has_witness: bool,
}

#[derive(Serialize, Debug)]
struct Summary {
    base_dimension: usize,
    scenario_dimension: usize,
    mode: String,
    raw_facets: usize,
    orbit_classes: usize,
    shannon_classes: usize,
    known_classes: usize,
    new_classes: usize,
    rejected: usize,
    classes: Vec<SummaryClass>,
}

/// Write a derivation report directory: a human-oriented summary plus the
/// facets, certificates, and witnesses as JSON Lines.
pub fn write_report(dir: &Path, m: usize, outcome: &DeriveOutcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    let classes: Vec<SummaryClass> = outcome
        .reports
        .iter()
        .map(|r| SummaryClass {
            classification: r.classification.to_string(),
            orbit_size: r.orbit_size,
            facet: FormRecord::from_form(&r.facet),
            has_witness: r.independence_witness.is_some(),
        })
        .collect();
    let count = |c: crate::derive::Classification| {
        outcome
            .reports
            .iter()
            .filter(|r| r.classification == c)
            .count()
    };
    let summary = Summary {
        base_dimension: m,
        scenario_dimension: outcome.scenario_cone.n(),
        mode: if outcome.projection.is_some() {
            "projection".into()
        } else {
            "targeted".into()
        },
        raw_facets: outcome.raw_facet_count,
        orbit_classes: outcome.reports.len(),
        shannon_classes: count(crate::derive::Classification::Shannon),
        known_classes: count(crate::derive::Classification::Known),
        new_classes: count(crate::derive::Classification::New),
        rejected: outcome.rejected.len(),
        classes,
    };
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;

    if let Some(projection) = &outcome.projection {
        write_cone(&dir.join("facets.jsonl"), projection)?;
        if let Some(rays) = projection.rays() {
            write_rays(&dir.join("rays.jsonl"), rays)?;
        }
    }
    let certs: Vec<CertificateRecord> = outcome
        .reports
        .iter()
        .map(|r| CertificateRecord::from_certificate(&r.proof))
        .collect();
    write_jsonl(&dir.join("certificates.jsonl"), &certs)?;
    let witnesses: Vec<RayRecord> = outcome
        .reports
        .iter()
        .filter_map(|r| r.independence_witness.as_ref())
        .map(RayRecord::from_ray)
        .collect();
    write_jsonl(&dir.join("witnesses.jsonl"), &witnesses)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::shannon::shannon_cone;

    #[test]
    fn rationals_round_trip() {
        for s in ["5", "-3", "2/3", "-7/4"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn forms_round_trip_through_records() {
        let f = catalog::zhang_yeung();
        let record = FormRecord::from_form(&f);
        assert_eq!(record.coeffs.get("1,2").map(String::as_str), Some("3"));
        assert_eq!(record.into_form().unwrap(), f);
    }

    #[test]
    fn empty_subset_keys_are_rejected() {
        let record = FormRecord {
            n: 2,
            rel: "eq".into(),
            coeffs: [(String::new(), "1".into())].into_iter().collect(),
        };
        assert!(record.into_form().is_err());
    }

    #[test]
    fn cone_files_round_trip() {
        let dir = std::env::temp_dir().join(format!("entrocone-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cone.jsonl");
        let cone = shannon_cone(3).unwrap();
        write_cone(&path, &cone).unwrap();
        let back = read_cone(&path).unwrap();
        assert_eq!(back.ineqs(), cone.ineqs());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn scenario_files_resolve_relative_bounds() {
        let dir = std::env::temp_dir().join(format!("entrocone-scn-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        write_forms(&dir.join("zy.jsonl"), &[catalog::zhang_yeung()]).unwrap();
        fs::write(
            dir.join("scenario.json"),
            r#"{"m":4,"steps":[{"k":3,"I":[1,2],"J":[4]}],"base_bound":"zy.jsonl","substituted":true}"#,
        )
        .unwrap();
        let scenario = read_scenario(&dir.join("scenario.json")).unwrap();
        assert_eq!(scenario.m, 4);
        assert_eq!(scenario.steps.len(), 1);
        assert_eq!(scenario.steps[0].new, 5);
        let bb = scenario.base_bound.as_ref().unwrap();
        assert!(bb.substituted);
        assert_eq!(bb.forms, vec![catalog::zhang_yeung()]);
        fs::remove_dir_all(&dir).unwrap();
    }
}

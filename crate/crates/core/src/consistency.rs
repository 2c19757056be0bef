//! Intra-frame implication rules and near-duplicate group agreement checks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{self, FeatureError, GrayImage, MatchConfig, MatchResult};
use crate::labeler::{AnswerSheet, Provenance};
use crate::questions;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConsistencyError {
    #[error("unknown question id {question:?} in {context}")]
    UnknownQuestion { question: String, context: String },
    #[error("rule {rule}: {reason}")]
    InvalidRule { rule: String, reason: String },
    #[error("no answer sheet for frame {0:?}")]
    MissingSheet(String),
    #[error("duplicate frame id {0:?}")]
    DuplicateFrame(String),
    #[error("matching {a:?} against {b:?}: {source}")]
    Matching {
        a: String,
        b: String,
        source: FeatureError,
    },
}

/// Antecedent of an implication: `q` answered exactly `equals`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub q: String,
    pub equals: String,
}

/// Consequent of an implication: `q`, when answered, must be one of `allowed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub q: String,
    #[serde(rename = "in")]
    pub allowed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationRule {
    pub id: String,
    #[serde(rename = "if")]
    pub antecedent: Condition,
    #[serde(rename = "then")]
    pub consequents: Vec<Requirement>,
    pub message: String,
}

impl ImplicationRule {
    /// Question ids must exist and differ from the antecedent; every allowed
    /// set must be a non-empty subset of the canonical choices.
    pub fn validate(&self) -> Result<(), ConsistencyError> {
        let bad = |reason: String| ConsistencyError::InvalidRule {
            rule: self.id.clone(),
            reason,
        };
        let ante = questions::question(&self.antecedent.q)
            .ok_or_else(|| bad(format!("unknown question {}", self.antecedent.q)))?;
        if !ante.accepts(&self.antecedent.equals) {
            return Err(bad(format!(
                "{:?} is not an option of {}",
                self.antecedent.equals, ante.id
            )));
        }
        if self.consequents.is_empty() {
            return Err(bad("no consequents".into()));
        }
        for c in &self.consequents {
            let q = questions::question(&c.q)
                .ok_or_else(|| bad(format!("unknown question {}", c.q)))?;
            if c.q == self.antecedent.q {
                return Err(bad(format!("{} appears on both sides", c.q)));
            }
            if c.allowed.is_empty() {
                return Err(bad(format!("empty allowed set for {}", c.q)));
            }
            if let Some(o) = c.allowed.iter().find(|o| !q.accepts(o)) {
                return Err(bad(format!("{o:?} is not an option of {}", c.q)));
            }
        }
        Ok(())
    }
}

fn rule(
    id: &str,
    q: &str,
    equals: &str,
    then: &[(&str, &[&str])],
    message: &str,
) -> ImplicationRule {
    ImplicationRule {
        id: id.to_string(),
        antecedent: Condition {
            q: q.to_string(),
            equals: equals.to_string(),
        },
        consequents: then
            .iter()
            .map(|(q, allowed)| Requirement {
                q: (*q).to_string(),
                allowed: allowed.iter().map(|s| (*s).to_string()).collect(),
            })
            .collect(),
        message: message.to_string(),
    }
}

/// The built-in cross-question constraints.
pub fn builtin_rules() -> Vec<ImplicationRule> {
    alloc::vec![
        rule(
            "fire-presence",
            "CL1",
            "No fire",
            &[
                ("PD1", &["No"]),
                ("PD3", &["No"]),
                ("CMR1", &["No fire"]),
                ("CMR3", &["No fire"]),
                ("FP3", &["No fire"]),
                ("CL6", &["No fire"]),
                ("PD7", &["No fire"]),
            ],
            "frame classified as no fire but fire-dependent answers say otherwise",
        ),
        rule(
            "smoke",
            "PD2",
            "No",
            &[
                ("DS6", &["No smoke"]),
                ("LD3", &["No smoke"]),
                ("CMR3", &["No fire", "Not obstructed"]),
            ],
            "no smoke reported but smoke coverage, location, or obstruction answers imply smoke",
        ),
        rule(
            "hotspots",
            "PD1",
            "No",
            &[
                ("LD1", &["No hotspots"]),
                ("DS3", &["No active hotspots"]),
                ("DS1", &["No active hotspots"]),
                ("CMR4", &["No hotspots"]),
            ],
            "no hotspots reported but hotspot location, distribution, or temperature answers imply hotspots",
        ),
        rule(
            "structures",
            "PD4",
            "No",
            &[("LD4", &["No structures"])],
            "no structures reported but a structure location is given",
        ),
    ]
}

/// One answer involved in a violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffendingAnswer {
    pub frame_id: String,
    pub question: String,
    pub option: Option<String>,
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Rule id, or `group:<first frame id>/<slot>` for group disagreements.
    pub source: String,
    pub answers: Vec<OffendingAnswer>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStatus {
    Clean,
    Flagged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema_version: u32,
    pub frame_ids: Vec<String>,
    pub status: AuditStatus,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    /// Sorts violations by source and derives the status.
    pub fn new(frame_ids: Vec<String>, mut violations: Vec<Violation>) -> Self {
        violations.sort_by(|a, b| a.source.cmp(&b.source));
        let status = if violations.is_empty() {
            AuditStatus::Clean
        } else {
            AuditStatus::Flagged
        };
        Self {
            schema_version: SCHEMA_VERSION,
            frame_ids,
            status,
            violations,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.status == AuditStatus::Clean
    }

    /// Human-readable rendering for terminal output.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let status = match self.status {
            AuditStatus::Clean => "clean",
            AuditStatus::Flagged => "FLAGGED",
        };
        let _ = writeln!(s, "[{}] {}", status, self.frame_ids.join(", "));
        for v in &self.violations {
            let _ = writeln!(s, "  {}: {}", v.source, v.message);
            for a in &v.answers {
                let prov = match a.provenance {
                    Some(Provenance::Deterministic) => "deterministic",
                    Some(Provenance::External) => "external",
                    None => "-",
                };
                let _ = writeln!(
                    s,
                    "    {} {} = {} ({})",
                    a.frame_id,
                    a.question,
                    a.option.as_deref().unwrap_or("<unanswered>"),
                    prov
                );
            }
        }
        s
    }
}

fn offending(sheet: &AnswerSheet, q: &str) -> OffendingAnswer {
    OffendingAnswer {
        frame_id: sheet.frame_id.clone(),
        question: q.to_string(),
        option: sheet.get(q).map(ToString::to_string),
        provenance: sheet.provenance(q),
    }
}

/// Evaluates every rule whose antecedent slot is filled and matches. Unfilled
/// consequents never count as violations. Each firing rule yields one
/// violation.
pub fn audit_frame(
    sheet: &AnswerSheet,
    rules: &[ImplicationRule],
) -> Result<AuditReport, ConsistencyError> {
    if let Some(q) = sheet
        .answers
        .keys()
        .find(|q| questions::question(q).is_none())
    {
        return Err(ConsistencyError::UnknownQuestion {
            question: q.clone(),
            context: format!("sheet {}", sheet.frame_id),
        });
    }
    let mut violations = Vec::new();
    for r in rules {
        if sheet.get(&r.antecedent.q) != Some(r.antecedent.equals.as_str()) {
            continue;
        }
        let bad: Vec<&Requirement> = r
            .consequents
            .iter()
            .filter(|c| {
                sheet
                    .get(&c.q)
                    .is_some_and(|o| !c.allowed.iter().any(|a| a == o))
            })
            .collect();
        if bad.is_empty() {
            continue;
        }
        let mut answers = alloc::vec![offending(sheet, &r.antecedent.q)];
        answers.extend(bad.iter().map(|c| offending(sheet, &c.q)));
        violations.push(Violation {
            source: r.id.clone(),
            answers,
            message: r.message.clone(),
        });
    }
    Ok(AuditReport::new(
        alloc::vec![sheet.frame_id.clone()],
        violations,
    ))
}

/// Images used to decide whether two frames are near-duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameImages {
    pub id: String,
    pub rgb: GrayImage,
    pub thermal: Option<GrayImage>,
}

/// Outcome of comparing one pair of frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDecision {
    pub a: String,
    pub b: String,
    pub rgb: MatchResult,
    /// Present only when the RGB pair fell short and both frames carry a
    /// thermal visualization.
    pub thermal: Option<MatchResult>,
    pub near_duplicate: bool,
}

/// RGB first; thermal visualization only if the RGB pair is not a
/// near-duplicate.
pub fn compare_frames(
    a: &FrameImages,
    b: &FrameImages,
    cfg: &MatchConfig,
) -> Result<PairDecision, ConsistencyError> {
    let err = |source| ConsistencyError::Matching {
        a: a.id.clone(),
        b: b.id.clone(),
        source,
    };
    let rgb = features::match_images(&a.rgb, &b.rgb, cfg).map_err(err)?;
    let mut thermal = None;
    let mut dup = rgb.near_duplicate;
    if !dup {
        if let (Some(ta), Some(tb)) = (&a.thermal, &b.thermal) {
            let t = features::match_images(ta, tb, cfg).map_err(err)?;
            dup = t.near_duplicate;
            thermal = Some(t);
        }
    }
    Ok(PairDecision {
        a: a.id.clone(),
        b: b.id.clone(),
        rgb,
        thermal,
        near_duplicate: dup,
    })
}

/// All unordered index pairs `(i, j)` with `i < j`.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// Connected components of the near-duplicate relation. Ids inside a group
/// are sorted; groups are sorted by their first id. Singletons are included.
pub fn groups_from_pairs(ids: &[String], duplicates: &[(usize, usize)]) -> Vec<Vec<String>> {
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for &(i, j) in duplicates {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for i in 0..ids.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(ids[i].clone());
    }
    let mut out: Vec<Vec<String>> = groups
        .into_values()
        .map(|mut g| {
            g.sort();
            g
        })
        .collect();
    out.sort();
    out
}

/// Sequential all-pairs grouping. Each unordered pair is evaluated once.
pub fn near_duplicate_groups(
    frames: &[FrameImages],
    cfg: &MatchConfig,
) -> Result<(Vec<Vec<String>>, Vec<PairDecision>), ConsistencyError> {
    let ids = unique_ids(frames.iter().map(|f| f.id.as_str()))?;
    let mut decisions = Vec::new();
    let mut dups = Vec::new();
    for (i, j) in all_pairs(frames.len()) {
        let d = compare_frames(&frames[i], &frames[j], cfg)?;
        if d.near_duplicate {
            dups.push((i, j));
        }
        decisions.push(d);
    }
    Ok((groups_from_pairs(&ids, &dups), decisions))
}

fn unique_ids<'a>(ids: impl Iterator<Item = &'a str>) -> Result<Vec<String>, ConsistencyError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ConsistencyError::DuplicateFrame(id.to_string()));
        }
        out.push(id.to_string());
    }
    Ok(out)
}

/// Slots compared across a near-duplicate group.
pub const DEFAULT_FIRE_SLOTS: &[&str] = &["PD1", "PD3", "CL1"];

/// Pseudo-slot for the fire/no-fire split derived from CL1.
pub const FIRE_AXIS: &str = "fire-axis";

fn fire_axis(sheet: &AnswerSheet) -> Option<&'static str> {
    sheet
        .get("CL1")
        .map(|o| if o == "No fire" { "No fire" } else { "Fire" })
}

/// One report per group. A violation is raised for each slot on which the
/// answered frames of a group disagree; unanswered slots are ignored.
pub fn audit_groups(
    groups: &[Vec<String>],
    sheets: &[AnswerSheet],
    slots: &[&str],
) -> Result<Vec<AuditReport>, ConsistencyError> {
    for s in slots {
        if questions::question(s).is_none() {
            return Err(ConsistencyError::UnknownQuestion {
                question: (*s).to_string(),
                context: "group slot list".into(),
            });
        }
    }
    let by_id: BTreeMap<&str, &AnswerSheet> =
        sheets.iter().map(|s| (s.frame_id.as_str(), s)).collect();
    let mut reports = Vec::new();
    for group in groups {
        let members: Vec<&AnswerSheet> = group
            .iter()
            .map(|id| {
                by_id
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| ConsistencyError::MissingSheet(id.clone()))
            })
            .collect::<Result<_, _>>()?;
        let gid = group.first().map_or("", String::as_str);
        let mut violations = Vec::new();

        let axis: BTreeSet<&str> = members.iter().filter_map(|s| fire_axis(s)).collect();
        if axis.len() > 1 {
            violations.push(Violation {
                source: format!("group:{gid}/{FIRE_AXIS}"),
                answers: members
                    .iter()
                    .filter(|s| s.get("CL1").is_some())
                    .map(|s| offending(s, "CL1"))
                    .collect(),
                message: "near-duplicate frames disagree on fire versus no fire".into(),
            });
        }
        for &slot in slots {
            let values: BTreeSet<&str> = members.iter().filter_map(|s| s.get(slot)).collect();
            if values.len() > 1 {
                violations.push(Violation {
                    source: format!("group:{gid}/{slot}"),
                    answers: members
                        .iter()
                        .filter(|s| s.get(slot).is_some())
                        .map(|s| offending(s, slot))
                        .collect(),
                    message: format!("near-duplicate frames disagree on {slot}"),
                });
            }
        }
        reports.push(AuditReport::new(group.clone(), violations));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn sheet(id: &str, answers: &[(&str, &str)]) -> AnswerSheet {
        let mut s = AnswerSheet::empty(id);
        for (q, o) in answers {
            s.set_external(q, o).unwrap();
        }
        s
    }

    #[test]
    fn builtin_rules_are_valid() {
        let rules = builtin_rules();
        assert_eq!(rules.len(), 4);
        for r in &rules {
            r.validate().unwrap();
        }
    }

    #[test]
    fn fire_presence_violation() {
        let r = audit_frame(
            &sheet("f", &[("CL1", "No fire"), ("PD1", "Yes")]),
            &builtin_rules(),
        )
        .unwrap();
        assert_eq!(r.status, AuditStatus::Flagged);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].source, "fire-presence");
    }

    #[test]
    fn smoke_violation_shows_provenance() {
        let r = audit_frame(
            &sheet("f", &[("PD2", "No"), ("DS6", "1–25%")]),
            &builtin_rules(),
        )
        .unwrap();
        assert_eq!(r.violations.len(), 1);
        let v = &r.violations[0];
        assert_eq!(v.source, "smoke");
        assert!(v
            .answers
            .iter()
            .all(|a| a.provenance == Some(Provenance::External)));
        assert!(r.render_text().contains("DS6 = 1–25% (external)"));
    }

    #[test]
    fn empty_sheet_is_clean() {
        let r = audit_frame(&AnswerSheet::empty("e"), &builtin_rules()).unwrap();
        assert!(r.is_clean());
    }

    #[test]
    fn two_independent_contradictions() {
        let s = sheet(
            "f",
            &[("PD2", "No"), ("LD3", "TL"), ("PD4", "No"), ("LD4", "BR")],
        );
        let r = audit_frame(&s, &builtin_rules()).unwrap();
        assert_eq!(r.violations.len(), 2);
    }

    #[test]
    fn one_violation_per_rule_even_with_many_bad_consequents() {
        let s = sheet(
            "f",
            &[
                ("PD1", "No"),
                ("LD1", "TL"),
                ("DS1", "Linear"),
                ("CMR4", ">500"),
            ],
        );
        let r = audit_frame(&s, &builtin_rules()).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].answers.len(), 4);
    }

    #[test]
    fn unknown_question_in_sheet_is_error() {
        let mut s = AnswerSheet::empty("f");
        s.answers.insert("ZZ9".into(), s.answers["PD1"].clone());
        assert!(matches!(
            audit_frame(&s, &builtin_rules()),
            Err(ConsistencyError::UnknownQuestion { .. })
        ));
    }

    #[test]
    fn rule_order_does_not_matter() {
        let s = sheet(
            "f",
            &[
                ("CL1", "No fire"),
                ("PD3", "Yes"),
                ("PD2", "No"),
                ("DS6", "No smoke"),
                ("PD1", "No"),
                ("LD1", "TR"),
            ],
        );
        let mut rules = builtin_rules();
        let a = audit_frame(&s, &rules).unwrap();
        rules.reverse();
        let b = audit_frame(&s, &rules).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.violations.len(), 2);
    }

    #[test]
    fn rule_validation_rejects_bad_rules() {
        let mut r = builtin_rules().remove(3);
        r.consequents[0].allowed = vec!["No structures visible".into()];
        assert!(r.validate().is_err());
        let mut r = builtin_rules().remove(3);
        r.consequents[0].q = "PD4".into();
        assert!(r.validate().is_err());
        let mut r = builtin_rules().remove(3);
        r.consequents[0].allowed.clear();
        assert!(r.validate().is_err());
    }

    #[test]
    fn grouping_is_transitive() {
        let ids: Vec<String> = ["C", "A", "B", "D"].iter().map(|s| s.to_string()).collect();
        let g = groups_from_pairs(&ids, &[(1, 2), (2, 0)]);
        assert_eq!(
            g,
            vec![
                vec!["A".to_string(), "B".into(), "C".into()],
                vec!["D".into()]
            ]
        );
    }

    #[test]
    fn group_audit() {
        let a = sheet(
            "a",
            &[("CL1", "Active fire"), ("PD1", "Yes"), ("DS5", "1–25%")],
        );
        let b = sheet(
            "b",
            &[("CL1", "Active fire"), ("PD1", "Yes"), ("DS5", "75–100%")],
        );
        let c = sheet("c", &[("CL1", "No fire"), ("PD1", "Yes")]);
        let g = vec![vec!["a".to_string(), "b".into()]];
        let r = audit_groups(&g, &[a.clone(), b.clone()], DEFAULT_FIRE_SLOTS).unwrap();
        assert!(r[0].is_clean());

        let g = vec![vec!["a".to_string(), "b".into(), "c".into()]];
        let r = audit_groups(&g, &[a.clone(), b, c], DEFAULT_FIRE_SLOTS).unwrap();
        let sources: Vec<&str> = r[0].violations.iter().map(|v| v.source.as_str()).collect();
        assert_eq!(sources, ["group:a/CL1", "group:a/fire-axis"]);

        let missing = audit_groups(&[vec!["a".into(), "x".into()]], &[a], DEFAULT_FIRE_SLOTS);
        assert!(matches!(missing, Err(ConsistencyError::MissingSheet(_))));
    }

    #[test]
    fn smoldering_and_active_agree_on_axis_only() {
        let a = sheet("a", &[("CL1", "Active fire")]);
        let b = sheet("b", &[("CL1", "Smoldering")]);
        let r = audit_groups(&[vec!["a".into(), "b".into()]], &[a, b], DEFAULT_FIRE_SLOTS).unwrap();
        assert_eq!(r[0].violations.len(), 1);
        assert_eq!(r[0].violations[0].source, "group:a/CL1");
    }

    #[test]
    fn merged_clean_groups_stay_clean() {
        let sheets: Vec<AnswerSheet> = (0..6)
            .map(|i| {
                let cl1 = if i < 3 { "No fire" } else { "Active fire" };
                sheet(&format!("f{i}"), &[("CL1", cl1)])
            })
            .collect();
        let groups = vec![
            vec!["f0".to_string(), "f1".into(), "f2".into()],
            vec!["f3".to_string(), "f4".into(), "f5".into()],
        ];
        let r = audit_groups(&groups, &sheets, DEFAULT_FIRE_SLOTS).unwrap();
        assert!(r.iter().all(AuditReport::is_clean));
    }

    #[test]
    fn rule_json_shape() {
        let r = &builtin_rules()[3];
        let v = serde_json::to_value(r).unwrap();
        assert_eq!(v["if"]["q"], "PD4");
        assert_eq!(v["then"][0]["in"][0], "No structures");
        let back: ImplicationRule = serde_json::from_value(v).unwrap();
        assert_eq!(&back, r);
    }
}

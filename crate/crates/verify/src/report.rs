//! Markdown and JSON reports over a set of class runs.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::VerifyError;
use crate::expect::Expectations;
use crate::pipeline::ClassReport;

pub const SCHEMA_NAME: &str = "coinv-report";
pub const SCHEMA_VERSION: u32 = 1;

/// Stated in every report: group shapes are compared through their orders.
pub const SHAPE_NOTE: &str = "Group shapes are compared by order only; extension structure is not verified. \
Subgroup identification uses orders, orbit lengths, stabilizer orders, indices and label-map containment.";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema: String,
    pub schema_version: u32,
    pub notes: Vec<String>,
    pub all_passed: bool,
    pub classes: Vec<ClassReport>,
}

impl Report {
    pub fn new(classes: Vec<ClassReport>) -> Report {
        let all_passed = classes.iter().all(ClassReport::passed);
        Report {
            schema: SCHEMA_NAME.to_string(),
            schema_version: SCHEMA_VERSION,
            notes: vec![SHAPE_NOTE.to_string()],
            all_passed,
            classes,
        }
    }

    pub fn to_json(&self) -> Result<String, VerifyError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Report, VerifyError> {
        let r: Report = serde_json::from_str(text)?;
        if r.schema != SCHEMA_NAME || r.schema_version != SCHEMA_VERSION {
            return Err(VerifyError::Expectations(format!(
                "unsupported report schema {} version {}",
                r.schema, r.schema_version
            )));
        }
        Ok(r)
    }

    pub fn to_markdown(&self, exp: &Expectations) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Coinvariant lattice orbifold verification\n");
        for n in &self.notes {
            let _ = writeln!(s, "> {n}\n");
        }
        let status = if self.all_passed { "all checks pass" } else { "SOME CHECKS FAIL" };
        let _ = writeln!(s, "Classes: {}. Status: {status}.\n", self.classes.len());

        let cell = |c: &ClassReport, id: &str| match c.check(id) {
            Some(ch) => format!("{}{}", ch.computed, if ch.pass { "" } else { " (FAIL)" }),
            None => "-".to_string(),
        };
        let shape = |c: &ClassReport, f: fn(&crate::expect::ClassExpect) -> &crate::expect::Shape| {
            exp.get(c.class).map(|e| f(e).shape.clone()).unwrap_or_default()
        };

        let _ = writeln!(s, "## Lattices\n");
        let _ = writeln!(s, "| class | rank | det | L*/L | O(L) | shape | C(g) | shape | (1-g)L* = L |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|");
        for c in &self.classes {
            let disc = exp.get(c.class).map(|e| e.disc.clone()).unwrap_or_default();
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                c.class.name(),
                cell(c, "rank"),
                cell(c, "det"),
                disc,
                cell(c, "o_lattice"),
                shape(c, |e| &e.o_lattice),
                cell(c, "centralizer"),
                shape(c, |e| &e.centralizer),
                cell(c, "one_minus_g"),
            );
        }

        let _ = writeln!(s, "\n## Discriminant forms\n");
        let _ = writeln!(s, "| class | O(L*/L) | shape | C(g)/<g> | shape | index |");
        let _ = writeln!(s, "|---|---|---|---|---|---|");
        for c in &self.classes {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} |",
                c.class.name(),
                cell(c, "o_disc"),
                shape(c, |e| &e.o_disc),
                cell(c, "c_mod_g"),
                shape(c, |e| &e.c_mod_g),
                cell(c, "disc_index"),
            );
        }

        let _ = writeln!(s, "\n## Irreducible modules\n");
        let _ = writeln!(s, "| class | Irr | O(Irr) | shape | stabilizer | shape | c_voa | index | Aut | shape |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|---|");
        for c in &self.classes {
            let irr = exp.get(c.class).map(|e| e.irr.clone()).unwrap_or_default();
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                c.class.name(),
                irr,
                cell(c, "o_irr"),
                shape(c, |e| &e.o_irr),
                cell(c, "stabilizer"),
                shape(c, |e| &e.stabilizer),
                cell(c, "c_voa"),
                cell(c, "aut_index"),
                cell(c, "aut"),
                shape(c, |e| &e.aut),
            );
        }

        for c in &self.classes {
            let _ = writeln!(s, "\n## Class {}\n", c.class.name());
            let _ = writeln!(s, "| check | computed | expected | source | result |");
            let _ = writeln!(s, "|---|---|---|---|---|");
            for ch in &c.checks {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {:?} | {} |",
                    ch.label,
                    ch.computed,
                    ch.expected.as_deref().unwrap_or("-"),
                    ch.provenance,
                    if ch.pass { "pass" } else { "FAIL" },
                );
            }
            if let Some(out) = &c.index2 {
                let _ = writeln!(s, "\nIndex-2 subgroups of O(Irr):\n");
                for cand in &out.candidates {
                    let _ = writeln!(
                        s,
                        "- signs {}: transitive {}, stabilizer {}, missing label maps: {}",
                        cand.signs,
                        cand.transitive_on_sg,
                        cand.stabilizer,
                        if cand.missing_footprints.is_empty() { "none".to_string() } else { cand.missing_footprints.join(", ") },
                    );
                }
            }
            if let Some(out) = &c.deep {
                let passing = out.candidates.iter().filter(|d| d.transitive_on_sg && d.stabilizer == out.target_stabilizer);
                let _ = writeln!(
                    s,
                    "\nIndex-{} subgroups of O(Irr_2) x O(Irr_p) (factor orders {:?}): {} found, {} passing the order screens, \
                     in {} conjugacy classes.",
                    out.index,
                    out.factor_orders,
                    out.candidates.len(),
                    passing.count(),
                    out.passing_classes.len(),
                );
            }
            let times: Vec<String> = c.timings.iter().map(|t| format!("{} {:.1}s", t.stage.name(), t.seconds)).collect();
            let _ = writeln!(s, "\nTimings: {}.", times.join(", "));
        }
        s
    }
}

/// Writes `report.md` and `report.json` into `out_dir`.
pub fn emit_report(report: &Report, exp: &Expectations, out_dir: &Path) -> Result<(), VerifyError> {
    std::fs::create_dir_all(out_dir).map_err(|e| VerifyError::io(out_dir, e))?;
    let md = out_dir.join("report.md");
    std::fs::write(&md, report.to_markdown(exp)).map_err(|e| VerifyError::io(&md, e))?;
    let js = out_dir.join("report.json");
    std::fs::write(&js, report.to_json()?).map_err(|e| VerifyError::io(&js, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{Check, Provenance, Stage, Summary, Topic};
    use coinv_core::glue::ClassTag;

    fn sample() -> ClassReport {
        ClassReport {
            class: ClassTag::C4,
            upto: Stage::Lattice,
            summary: Summary { rank: Some(14), ..Summary::default() },
            checks: vec![Check {
                id: "rank".into(),
                topic: Topic::LatticeFacts,
                stage: Stage::Lattice,
                label: "rank of L".into(),
                computed: "14".into(),
                expected: Some("14".into()),
                pass: true,
                provenance: Provenance::Derived,
            }],
            index2: None,
            deep: None,
            timings: vec![],
        }
    }

    #[test]
    fn empty_report_has_header() {
        let r = Report::new(vec![]);
        assert!(r.all_passed);
        let md = r.to_markdown(&Expectations::builtin());
        assert!(md.starts_with("# Coinvariant lattice orbifold verification"));
        assert!(md.contains("order only"));
    }

    #[test]
    fn json_round_trip() {
        let r = Report::new(vec![sample()]);
        let back = Report::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn rejects_other_schema_versions() {
        let mut r = Report::new(vec![]);
        r.schema_version = 99;
        assert!(Report::from_json(&r.to_json().unwrap()).is_err());
    }

    #[test]
    fn failing_check_marks_report() {
        let mut c = sample();
        c.checks[0].pass = false;
        let r = Report::new(vec![c]);
        assert!(!r.all_passed);
        assert!(r.to_markdown(&Expectations::builtin()).contains("14 (FAIL)"));
    }

    #[test]
    fn emits_both_files() {
        let dir = tempfile::tempdir().unwrap();
        emit_report(&Report::new(vec![sample()]), &Expectations::builtin(), dir.path()).unwrap();
        assert!(dir.path().join("report.md").exists());
        let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        assert_eq!(Report::from_json(&text).unwrap().classes.len(), 1);
    }
}

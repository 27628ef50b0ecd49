//! Classification reports.

use std::fmt::Write as _;

use lienard_core::blowup::{local_portrait_oracle, PlanarField};
use lienard_core::global::{classify_global, index_balance, Criteria, GlobalError, GlobalOutcome, GlobalPortrait, IndexBalance};
use lienard_core::infinity::{classify_infinity, infinity_oracle, InfinityClass, InfinityError, InfinityMonodromy, InfinityPortrait};
use lienard_core::numeric::{center_probe, geometric_amplitudes, period_profile, PeriodProfile, ProbeOptions, ProbeReport};
use lienard_core::origin::{
    center_test, classify_origin, monodromy_origin, CenterVerdict, OriginClass, OriginError, OriginMonodromy, OriginPortrait, Verdict,
};
use lienard_core::poly::{format_rational, Rational, Sign};
use lienard_core::system::{normalize_time, normalize_time_high, thresholds, GeneralizedLienardSystem, Threshold, TimeRecord};
use serde::{Deserialize, Serialize};

use crate::spec::{SpecError, SystemSpecFile};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum At {
    Origin,
    Infinity,
    Global,
    #[default]
    All,
}

impl At {
    fn origin(self) -> bool {
        matches!(self, At::Origin | At::All)
    }
    fn infinity(self) -> bool {
        matches!(self, At::Infinity | At::All)
    }
    fn global(self) -> bool {
        matches!(self, At::Global | At::All)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    #[default]
    None,
    Oracle,
    Numeric,
    Both,
}

impl VerifyMode {
    fn oracle(self) -> bool {
        matches!(self, VerifyMode::Oracle | VerifyMode::Both)
    }
    fn numeric(self) -> bool {
        matches!(self, VerifyMode::Numeric | VerifyMode::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassifyOptions {
    pub at: At,
    pub verify: VerifyMode,
}

/// Failures that stop a report from being produced at all.
#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("ell-one-out-of-scope")]
    EllOne,
}

impl ClassifyError {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassifyError::Spec(e) => e.kind(),
            ClassifyError::EllOne => "ell-one-out-of-scope",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    pub symmetry: String,
    pub time: TimeRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Normalizations {
    pub origin: Option<Normalization>,
    pub infinity: Option<Normalization>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginSection {
    pub portrait: OriginPortrait,
    pub sector_word: String,
    pub index: i64,
    pub case: String,
    pub situation: Option<String>,
    pub monodromy: Option<OriginMonodromy>,
    pub center: Option<CenterVerdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinitySection {
    pub portrait: InfinityPortrait,
    pub case: String,
    pub situation: String,
    pub monodromy: Option<InfinityMonodromy>,
    pub equator_index: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalSection {
    pub portrait: Option<GlobalPortrait>,
    pub reasons: Vec<String>,
    pub criteria: Criteria,
    pub global_center: bool,
}

/// A threshold, its decimal expansion, and how the relevant normalized
/// coefficient sits against `+value` and `-value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub value: Threshold,
    pub decimal: String,
    pub compared: String,
    pub coefficient: String,
    pub vs_positive: Sign,
    pub vs_negative: Sign,
}

fn entry(t: &Threshold, name: &str, coefficient: &Rational) -> ThresholdEntry {
    ThresholdEntry {
        value: t.clone(),
        decimal: t.decimal(30),
        compared: name.to_string(),
        coefficient: format_rational(coefficient),
        vs_positive: t.compare(coefficient),
        vs_negative: t.negated().compare(coefficient),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdSection {
    pub c_hat: ThresholdEntry,
    pub c_star: ThresholdEntry,
    pub c_star_upper: Option<ThresholdEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OracleCheck {
    pub origin_word: Option<String>,
    pub origin_agrees: Option<bool>,
    pub infinity_signature: Option<String>,
    pub infinity_agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NumericCheck {
    pub probe: Option<ProbeReport>,
    pub period_profile: Option<PeriodProfile>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Verification {
    pub oracle_agreement: Option<bool>,
    pub oracle: Option<OracleCheck>,
    pub index_check: Option<bool>,
    pub index_balance: Option<IndexBalance>,
    pub numeric: Option<NumericCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub kind: String,
    pub message: String,
}

impl StageError {
    fn new(stage: &str, kind: &str, message: impl ToString) -> StageError {
        StageError { stage: stage.into(), kind: kind.into(), message: message.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub input: SystemSpecFile,
    pub system: String,
    pub normalizations: Normalizations,
    pub origin: Option<OriginSection>,
    pub infinity: Option<InfinitySection>,
    pub global: Option<GlobalSection>,
    pub thresholds: ThresholdSection,
    pub verification: Verification,
    pub errors: Vec<StageError>,
}

impl ClassificationReport {
    /// 0 when everything requested was decided, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<ClassificationReport> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(l) = &self.input.label {
            let _ = writeln!(out, "label     {}", l);
        }
        let _ = writeln!(out, "system    {}", self.system);
        if let Some(o) = &self.origin {
            let _ = write!(out, "origin    {} ({}", o.portrait, o.case);
            if let Some(s) = &o.situation {
                let _ = write!(out, " {}", s);
            }
            let _ = write!(out, ")");
            if let Some(m) = o.monodromy {
                let _ = write!(out, " monodromic {:?}", m);
            }
            if let Some(c) = &o.center {
                let v = match &c.verdict {
                    Verdict::Center => "center".to_string(),
                    Verdict::Focus { stability: Some(s) } => format!("focus ({:?})", s).to_lowercase(),
                    Verdict::Focus { stability: None } => "focus".to_string(),
                    Verdict::Inconclusive { .. } => "undecided".to_string(),
                };
                let _ = write!(out, ", {}", v);
            }
            out.push('\n');
        }
        if let Some(i) = &self.infinity {
            let _ = write!(out, "infinity  {} ({} {})", i.portrait, i.case, i.situation);
            if let Some(m) = i.monodromy {
                let _ = write!(out, " monodromic {:?}", m);
            }
            out.push('\n');
        }
        if let Some(g) = &self.global {
            match g.portrait {
                Some(p) => {
                    let _ = write!(out, "global    {}", p);
                }
                None => {
                    let _ = write!(out, "global    not applicable: {}", g.reasons.join("; "));
                }
            }
            if g.global_center {
                out.push_str(", global center");
            }
            out.push('\n');
        }
        let t = &self.thresholds;
        let _ = writeln!(out, "c_hat     {}", t.c_hat.decimal);
        let _ = writeln!(out, "c_*       {}", t.c_star.decimal);
        if let Some(u) = &t.c_star_upper {
            let _ = writeln!(out, "c^*       {}", u.decimal);
        }
        let v = &self.verification;
        if let Some(ok) = v.index_check {
            let _ = writeln!(out, "index     {}", if ok { "ok" } else { "mismatch" });
        }
        if let Some(ok) = v.oracle_agreement {
            let _ = writeln!(out, "oracle    {}", if ok { "agrees" } else { "disagrees" });
        }
        for e in &self.errors {
            let _ = writeln!(out, "error     [{}] {}: {}", e.stage, e.kind, e.message);
        }
        out
    }
}

fn origin_error_kind(e: &OriginError) -> &'static str {
    match e {
        OriginError::UnclassifiedByTable(_) => "unclassified-by-table",
        OriginError::NotMonodromic => "not-monodromic",
        OriginError::OrderTooSmall(_) => "order-too-small",
        OriginError::Numeric(_) => "numeric",
    }
}

fn infinity_error_kind(e: &InfinityError) -> &'static str {
    match e {
        InfinityError::EllOne => "ell-one-out-of-scope",
        InfinityError::UnclassifiedByTable(_) => "unclassified-by-table",
        InfinityError::Blowup(_) => "blowup",
    }
}

fn threshold_section(sys: &GeneralizedLienardSystem) -> ThresholdSection {
    let (low, _) = normalize_time(sys);
    let (high, _) = normalize_time_high(sys);
    let t_low = thresholds(&low);
    let t_high = thresholds(&high);
    ThresholdSection {
        c_hat: entry(&t_low.c_hat, "c_r", &low.c_low()),
        c_star: entry(&t_high.c_star, "c_n", &high.c_high()),
        c_star_upper: t_high.c_star_upper.as_ref().map(|t| entry(t, "c_n", &high.c_high())),
    }
}

fn origin_stage(sys: &GeneralizedLienardSystem, numeric: bool, report: &mut ClassificationReport) -> Option<OriginClass> {
    let class = match classify_origin(sys) {
        Ok(c) => c,
        Err(e) => {
            report.errors.push(StageError::new("origin", origin_error_kind(&e), &e));
            return None;
        }
    };
    report.normalizations.origin = Some(Normalization { symmetry: class.applied_symmetry.label(), time: class.time.clone() });
    let center = match monodromy_origin(sys) {
        None => None,
        Some(_) => match center_test(sys, None, numeric) {
            Ok(v) => {
                if matches!(v.verdict, Verdict::Inconclusive { .. }) {
                    report.errors.push(StageError::new("origin", "center-undecided", "center test inconclusive"));
                }
                Some(v)
            }
            Err(e) => {
                report.errors.push(StageError::new("origin", origin_error_kind(&e), &e));
                None
            }
        },
    };
    report.origin = Some(OriginSection {
        portrait: class.portrait,
        sector_word: class.portrait.sector_word().to_string(),
        index: class.portrait.index(),
        case: class.case_label.subcase.clone(),
        situation: class.case_label.situation.clone(),
        monodromy: class.monodromy,
        center,
    });
    Some(class)
}

fn infinity_stage(sys: &GeneralizedLienardSystem, report: &mut ClassificationReport) -> Option<InfinityClass> {
    match classify_infinity(sys) {
        Ok(c) => {
            report.normalizations.infinity = Some(Normalization { symmetry: c.applied_symmetry.label(), time: c.time.clone() });
            report.infinity = Some(InfinitySection {
                portrait: c.portrait,
                case: c.case_label.to_string(),
                situation: c.situation.to_string(),
                monodromy: c.monodromy,
                equator_index: c.portrait.equator_index(),
            });
            Some(c)
        }
        Err(e) => {
            report.errors.push(StageError::new("infinity", infinity_error_kind(&e), &e));
            None
        }
    }
}

fn global_stage(sys: &GeneralizedLienardSystem, report: &mut ClassificationReport) {
    match classify_global(sys) {
        Ok(g) => {
            let (portrait, reasons) = match g.portrait {
                GlobalOutcome::Portrait(p) => (Some(p), Vec::new()),
                GlobalOutcome::NotApplicable { reasons } => (None, reasons),
            };
            report.global = Some(GlobalSection { portrait, reasons, criteria: g.criteria, global_center: g.global_center });
        }
        Err(GlobalError::CenterUndecided { order, .. }) => report.errors.push(StageError::new(
            "global",
            "center-undecided",
            format!("center test inconclusive at series order {}", order),
        )),
        Err(GlobalError::Origin(e)) => report.errors.push(StageError::new("global", origin_error_kind(&e), &e)),
        Err(GlobalError::Infinity(e)) => report.errors.push(StageError::new("global", infinity_error_kind(&e), &e)),
    }
}

fn oracle_stage(sys: &GeneralizedLienardSystem, report: &mut ClassificationReport) {
    let mut check = OracleCheck::default();
    if let Some(o) = &report.origin {
        match local_portrait_oracle(&PlanarField::from_system(sys), 6) {
            Ok(seq) => {
                let word = if seq.monodromic { String::new() } else { seq.word };
                check.origin_agrees = Some(word == o.sector_word);
                check.origin_word = Some(word);
            }
            Err(e) => report.errors.push(StageError::new("oracle", "blowup", e)),
        }
    }
    if let Some(i) = &report.infinity {
        match infinity_oracle(sys) {
            Ok(eq) => {
                let sig = eq.signature();
                check.infinity_agrees = Some(sig == i.portrait.figure().signature);
                check.infinity_signature = Some(sig);
            }
            Err(e) => report.errors.push(StageError::new("oracle", infinity_error_kind(&e), e)),
        }
    }
    let verdicts: Vec<bool> = [check.origin_agrees, check.infinity_agrees].into_iter().flatten().collect();
    if !verdicts.is_empty() {
        report.verification.oracle_agreement = Some(verdicts.iter().all(|&b| b));
    }
    report.verification.oracle = Some(check);
}

fn numeric_stage(sys: &GeneralizedLienardSystem, report: &mut ClassificationReport) {
    let mut check = NumericCheck::default();
    if monodromy_origin(sys).is_some() {
        match center_probe(sys, &ProbeOptions::default()) {
            Ok(p) => check.probe = Some(p),
            Err(e) => report.errors.push(StageError::new("numeric", "probe", e)),
        }
    }
    if report.global.as_ref().is_some_and(|g| g.global_center) {
        match period_profile(sys, &geometric_amplitudes(1.0, 50.0, 6), 1e-9) {
            Ok(p) => check.period_profile = Some(p),
            Err(e) => report.errors.push(StageError::new("numeric", "period-profile", e)),
        }
    }
    report.verification.numeric = Some(check);
}

/// Classify the system of a spec file.
pub fn classify(spec: &SystemSpecFile, opts: ClassifyOptions) -> Result<ClassificationReport, ClassifyError> {
    let sys = spec.system()?;
    if sys.exponents().phi_high < 2 && (opts.at.infinity() || opts.at.global()) {
        return Err(ClassifyError::EllOne);
    }
    let mut report = ClassificationReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        input: spec.clone(),
        system: sys.to_string(),
        normalizations: Normalizations::default(),
        origin: None,
        infinity: None,
        global: None,
        thresholds: threshold_section(&sys),
        verification: Verification::default(),
        errors: Vec::new(),
    };
    let origin = if opts.at.origin() { origin_stage(&sys, opts.verify.numeric(), &mut report) } else { None };
    let infinity = if opts.at.infinity() { infinity_stage(&sys, &mut report) } else { None };
    if opts.at.global() {
        global_stage(&sys, &mut report);
    }
    if let (Some(o), Some(i)) = (&origin, &infinity) {
        let balance = index_balance(&sys, o, i);
        report.verification.index_check = Some(balance.holds());
        report.verification.index_balance = Some(balance);
    }
    if opts.verify.oracle() {
        oracle_stage(&sys, &mut report);
    }
    if opts.verify.numeric() {
        numeric_stage(&sys, &mut report);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> SystemSpecFile {
        SystemSpecFile::parse(text).unwrap()
    }

    #[test]
    fn system_d_is_a_global_center() {
        let s = spec(r#"{"phi": {"3": "-1", "7": "-1"}, "F": {"4": "1"}, "g": {"3": "-1", "5": "-1"}}"#);
        let r = classify(&s, ClassifyOptions::default()).unwrap();
        let g = r.global.as_ref().unwrap();
        assert_eq!(g.portrait, Some(GlobalPortrait::D));
        assert!(g.global_center);
        assert_eq!(r.verification.index_check, Some(true));
        assert_eq!(r.exit_code(), 0);
        assert_eq!(ClassificationReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn ell_one_is_an_input_error() {
        let s = spec(r#"{"phi": {"1": "-1"}, "F": {"2": "1"}, "g": {"1": "-1"}}"#);
        let e = classify(&s, ClassifyOptions { at: At::Infinity, verify: VerifyMode::None }).unwrap_err();
        assert_eq!(e.kind(), "ell-one-out-of-scope");
        assert!(classify(&s, ClassifyOptions { at: At::Origin, verify: VerifyMode::None }).is_ok());
    }

    #[test]
    fn oracle_agrees_on_system_a() {
        let s = spec(r#"{"phi": {"3": "-1"}, "F": {"4": "1"}, "g": {"3": "-1"}}"#);
        let r = classify(&s, ClassifyOptions { at: At::All, verify: VerifyMode::Oracle }).unwrap();
        assert_eq!(r.verification.oracle_agreement, Some(true));
    }

    #[test]
    fn threshold_comparisons_are_exact() {
        // l = m = n = 3, b = 4, c = -3: c_n sits exactly on -c_*
        let s = spec(r#"{"phi": {"3": "-1"}, "F": {"3": "4"}, "g": {"3": "-3"}}"#);
        let r = classify(&s, ClassifyOptions { at: At::Infinity, verify: VerifyMode::None }).unwrap();
        let c = &r.thresholds.c_star;
        assert!(c.vs_positive == Sign::Zero || c.vs_negative == Sign::Zero, "{:?}", c);
        assert_eq!(c.decimal.len(), "3.".len() + 30);
    }
}

//! Config-driven chains of constructions with persisted intermediates.
//!
//! A config names a curve file, a grid and a list of stages. Stages run in
//! order on a current field and, after `stereographic`, a current surface.
//! Every field and report is written to the output directory, and every
//! asserted tolerance is collected as a [`Check`].

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::constructions::{
    choose_hyperplane, envelope, make_willmore_form, osculate, recover_original, splitting, tangent_curve, Hyperplane,
};
use crate::error::{Error, Result};
use crate::field::{twistor_project, CurveField};
use crate::frenet::{canonical_residuals, degree_check, weierstrass_points};
use crate::grid::{Chart, ChartGrid};
use crate::metrics::{classical_oracle, conformality_residual, harmonicity, harmonicity_order, richardson, willmore_energy};
use crate::quaternion::HVector;
use crate::rational::RationalCurve;
use crate::surface::{
    export_mesh, planar_end_check, resolve_pole, stereographic, MeshDomain, MeshOptions, Pole, Projection, SurfaceMap,
};

/// Pipeline input, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Curve file, relative to the config file.
    pub curve: PathBuf,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub seed: u64,
    /// Output directory, relative to the config file.
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub stages: Vec<Stage>,
}

fn default_grid() -> usize {
    128
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Stage {
    /// Twistor projection of the input curve.
    Twistor {},
    /// Tangent curve; a random admissible hyperplane unless one is given.
    Tangent {
        #[serde(default)]
        hyperplane: Option<Vec<f64>>,
    },
    /// `k`-fold osculate with random hyperplanes.
    Osculate { k: usize },
    /// Envelope along `ω = *Ãb₀`; `b₀` is random unless given.
    Envelope {
        #[serde(default)]
        b0: Option<Vec<f64>>,
    },
    /// Rebuild the current field from its tangent curve; the field is unchanged.
    Recover {},
    /// Direct-sum decomposition by iterated tangents.
    Split {},
    /// Orders of the composed flag derivatives and the degree of `K R₊`.
    DegreeCheck {},
    Energy {
        /// Also run at half resolution for a Richardson error estimate.
        #[serde(default)]
        refine: bool,
    },
    Harmonicity {
        /// Also run at half resolution for the convergence order.
        #[serde(default)]
        refine: bool,
    },
    Stereographic {
        #[serde(default = "default_pole", with = "pole_text")]
        pole: Pole,
    },
    PlanarEnds {},
    /// Classical curvature integral of the current surface against the last energy.
    Oracle {},
    Mesh {
        file: PathBuf,
        #[serde(default)]
        projection: Projection,
        #[serde(default)]
        domain: MeshDomain,
        #[serde(default)]
        bake_w: bool,
    },
}

fn default_pole() -> Pole {
    Pole::Auto
}

/// Poles are written as `"auto"` or a sample index.
mod pole_text {
    use super::Pole;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Pole, s: S) -> Result<S::Ok, S::Error> {
        match p {
            Pole::Index(k) => s.serialize_u64(*k as u64),
            _ => s.serialize_str("auto"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Pole, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Index(k) => Ok(Pole::Index(k)),
            Raw::Text(t) => t.parse().map_err(de::Error::custom),
        }
    }
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Twistor {} => "twistor",
            Stage::Tangent { .. } => "tangent",
            Stage::Osculate { .. } => "osculate",
            Stage::Envelope { .. } => "envelope",
            Stage::Recover {} => "recover",
            Stage::Split {} => "split",
            Stage::DegreeCheck {} => "degree_check",
            Stage::Energy { .. } => "energy",
            Stage::Harmonicity { .. } => "harmonicity",
            Stage::Stereographic { .. } => "stereographic",
            Stage::PlanarEnds {} => "planar_ends",
            Stage::Oracle {} => "oracle",
            Stage::Mesh { .. } => "mesh",
        }
    }

    /// Replaces the current field.
    fn produces_field(&self) -> bool {
        matches!(self, Stage::Twistor {} | Stage::Tangent { .. } | Stage::Osculate { .. } | Stage::Envelope { .. })
    }
}

/// Asserted limits. Every check is `value < limit` unless noted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Pointwise algebraic Frenet residuals.
    pub algebraic: f64,
    /// Differential Frenet residuals (flag derivative and type conditions).
    pub differential: f64,
    /// Relative closedness of a form before integration.
    pub closed: f64,
    /// Minimum observed harmonicity order under refinement.
    pub harmonic_order: f64,
    /// `|W − W_classical| / max(W, 4π)`.
    pub energy: f64,
    pub conformal: f64,
    pub mean_curvature: f64,
    pub roundtrip: f64,
    /// Minimum splitting certificate.
    pub splitting: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: 1e-8,
            differential: 1e-6,
            closed: crate::constructions::DEFAULT_CLOSED_TOL,
            harmonic_order: 1.5,
            energy: 1e-2,
            conformal: 1e-5,
            mean_curvature: crate::surface::MINIMAL_TOL,
            roundtrip: 1e-6,
            splitting: 1e-4,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: PipelineConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        if self.grid < 16 || self.grid % 2 != 0 {
            return Err(Error::Config(format!("grid must be even and at least 16, got {}", self.grid)));
        }
        if self.stages.is_empty() {
            return Err(Error::Config("no stages".into()));
        }
        if !self.stages[0].produces_field() {
            return Err(Error::Config(format!("first stage must build a field, got `{}`", self.stages[0].name())));
        }
        Ok(())
    }
}

/// One asserted tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub stage: String,
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    fn below(stage: &str, name: &str, value: f64, limit: f64) -> Self {
        Check { stage: stage.into(), name: name.into(), value, limit, pass: value < limit }
    }

    fn above(stage: &str, name: &str, value: f64, limit: f64) -> Self {
        Check { stage: stage.into(), name: name.into(), value, limit, pass: value > limit }
    }
}

/// Result of a run that reached the end of its stage list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub grid: usize,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageRecord {
    pub index: usize,
    pub op: String,
    pub files: Vec<String>,
}

/// A stage that aborted, with the checks collected before it.
#[derive(Debug)]
pub struct StageError {
    pub stage: String,
    pub error: Error,
    pub checks: Vec<Check>,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "stage `{}` failed: {}", self.stage, self.error)?;
        write!(f, "{}", check_table(&self.checks))
    }
}

impl std::error::Error for StageError {}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        self.error.exit_code()
    }
}

/// Plain-text table of checks, one per line.
pub fn check_table(checks: &[Check]) -> String {
    checks
        .iter()
        .map(|c| {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            format!("{mark} {:<14} {:<24} {:>12.4e}  limit {:.1e}\n", c.stage, c.name, c.value, c.limit)
        })
        .collect()
}

/// Run every stage, writing artifacts under `config.out` resolved against `base`.
pub fn run_pipeline(config: &PipelineConfig, base: &Path) -> std::result::Result<Summary, StageError> {
    let setup = |error| StageError { stage: "setup".into(), error, checks: Vec::new() };
    let curve = RationalCurve::read(&base.join(&config.curve)).map_err(setup)?;
    let out = base.join(&config.out);
    std::fs::create_dir_all(&out).map_err(|e| setup(e.into()))?;
    let mut run = Runner { config, curve, out, field: None, half: None, map: None, energy: None, history: Vec::new(), checks: Vec::new(), records: Vec::new() };
    let mut failure = None;
    for (idx, stage) in config.stages.iter().enumerate() {
        if let Err(error) = run.stage(idx, stage) {
            failure = Some(StageError { stage: format!("{idx:02} {}", stage.name()), error, checks: run.checks.clone() });
            break;
        }
    }
    let summary = Summary {
        grid: config.grid,
        seed: config.seed,
        passed: failure.is_none() && run.checks.iter().all(|c| c.pass),
        stages: run.records,
        checks: run.checks,
    };
    let written = write_json(&run.out.join("summary.json"), &summary);
    match (failure, written) {
        (Some(f), _) => Err(f),
        (None, Err(error)) => Err(StageError { stage: "summary".into(), error, checks: summary.checks }),
        (None, Ok(())) => Ok(summary),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

struct Runner<'a> {
    config: &'a PipelineConfig,
    curve: RationalCurve,
    out: PathBuf,
    field: Option<CurveField>,
    /// The current field rebuilt at half resolution, once needed.
    half: Option<CurveField>,
    map: Option<SurfaceMap>,
    energy: Option<f64>,
    /// Field-building stages applied so far, for replay at half resolution.
    history: Vec<(usize, Stage)>,
    checks: Vec<Check>,
    records: Vec<StageRecord>,
}

impl Runner<'_> {
    fn seed(&self, idx: usize) -> u64 {
        self.config.seed.wrapping_add(idx as u64)
    }

    fn build(&self, idx: usize, stage: &Stage, prev: Option<&CurveField>, n: usize) -> Result<CurveField> {
        let seed = self.seed(idx);
        let prev = || prev.ok_or_else(|| Error::Config(format!("`{}` needs a field", stage.name())));
        match stage {
            Stage::Twistor {} => twistor_project(&self.curve, ChartGrid::new(n)),
            Stage::Tangent { hyperplane } => {
                let f = prev()?;
                let hp = match hyperplane {
                    Some(v) => Hyperplane::new(reals_to_vector(v, f.m())?)?,
                    None => choose_hyperplane(f, 64, seed)?,
                };
                tangent_curve(f, &hp)
            }
            Stage::Osculate { k } => osculate(prev()?, *k, &[], seed),
            Stage::Envelope { b0 } => {
                let f = prev()?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let b0 = match b0 {
                    Some(v) => reals_to_vector(v, f.m())?,
                    None => HVector::random(&mut rng, f.m()),
                };
                let form = make_willmore_form(f, &b0)?;
                let k0 = f.grid.nearest(num_complex::Complex64::new(0.0, 0.0));
                let value = HVector::random(&mut rng, f.m());
                envelope(f, &form, &f.grid.point(Chart::A, k0), &value, self.config.tolerances.closed)
            }
            _ => unreachable!("not a field stage"),
        }
    }

    fn current(&self) -> &CurveField {
        self.field.as_ref().expect("validated: the first stage builds a field")
    }

    fn surface(&self, stage: &Stage) -> Result<&SurfaceMap> {
        self.map.as_ref().ok_or_else(|| Error::Config(format!("`{}` needs a surface; run `stereographic` first", stage.name())))
    }

    fn half_field(&mut self) -> Result<&CurveField> {
        if self.half.is_none() {
            let mut f: Option<CurveField> = None;
            for (idx, stage) in &self.history {
                f = Some(self.build(*idx, stage, f.as_ref(), self.config.grid / 2)?);
            }
            self.half = f;
        }
        Ok(self.half.as_ref().expect("history is nonempty"))
    }

    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn stage(&mut self, idx: usize, stage: &Stage) -> Result<()> {
        let name = stage.name();
        let stem = format!("{idx:02}_{name}");
        let mut files = Vec::new();
        let tol = self.config.tolerances.clone();
        let report: serde_json::Value = if stage.produces_field() {
            let f = self.build(idx, stage, self.field.as_ref(), self.config.grid)?;
            let r = canonical_residuals(&f);
            self.check(Check::below(name, "algebraic", r.algebraic(), tol.algebraic));
            let diff = r.flag_derivative.max(r.delta()).max(r.canonical());
            self.check(Check::below(name, "differential", diff, tol.differential));
            let path = format!("{stem}.field");
            f.save(&self.out.join(&path))?;
            files.push(path);
            self.history.push((idx, stage.clone()));
            self.half = None;
            let report = json!({ "dimension": f.n, "provenance": f.provenance, "meta": f.meta, "residuals": r });
            self.field = Some(f);
            report
        } else {
            match stage {
                Stage::Recover {} => {
                    let f = self.current();
                    let hp = choose_hyperplane(f, 64, self.seed(idx))?;
                    let rec = recover_original(f, &hp)?;
                    let report = json!({ "distance": rec.distance, "margin": hp.margin(f), "envelope": rec.envelope.meta });
                    self.check(Check::below(name, "distance", rec.distance, tol.roundtrip));
                    report
                }
                Stage::Split {} => {
                    let s = splitting(self.current(), self.seed(idx))?;
                    self.check(Check::above(name, "certificate", s.certificate, tol.splitting));
                    json!({ "lines": s.lines.len(), "certificate": s.certificate })
                }
                Stage::DegreeCheck {} => {
                    let d = degree_check(self.current())?;
                    let w = weierstrass_points(self.current())?;
                    self.check(Check::below(name, "deg_kr_plus", d.deg_kr_plus as f64, 0.0));
                    json!({ "degree": d, "weierstrass": w })
                }
                Stage::Energy { refine } => {
                    let mut e = willmore_energy(self.current());
                    if *refine {
                        let coarse = willmore_energy(self.half_field()?);
                        richardson(&mut e, &coarse, 4.0);
                    }
                    self.energy = Some(e.energy);
                    serde_json::to_value(e)?
                }
                Stage::Harmonicity { refine } => {
                    let mut h = harmonicity(self.current());
                    if *refine {
                        let coarse = harmonicity(self.half_field()?);
                        harmonicity_order(&mut h, &coarse);
                        self.check(Check::above(name, "order", h.order.unwrap_or(f64::NAN), tol.harmonic_order));
                    }
                    serde_json::to_value(h)?
                }
                Stage::Stereographic { pole } => {
                    let choice = resolve_pole(self.current(), pole)?;
                    let map = stereographic(self.current(), &HVector::from_real(&choice.line))?;
                    let conf = conformality_residual(&map);
                    self.check(Check::below(name, "conformality", conf, tol.conformal));
                    let report = json!({ "pole": choice, "punctures": map.punctures, "conformality": conf });
                    self.map = Some(map);
                    report
                }
                Stage::PlanarEnds {} => {
                    let map = self.surface(stage)?;
                    if map.punctures.is_empty() {
                        return Err(Error::Unsupported("planar end check needs at least one puncture".into()));
                    }
                    let ends = planar_end_check(map);
                    for (k, end) in ends.iter().enumerate() {
                        let decay = if end.inner < 1e-10 { 0.0 } else { end.inner / end.outer };
                        self.check(Check::below(name, &format!("end {k} residual ratio"), decay, 1.0));
                        self.check(Check::below(name, &format!("end {k} |H|"), end.mean_curvature, tol.mean_curvature));
                    }
                    serde_json::to_value(ends)?
                }
                Stage::Oracle {} => {
                    let w = self.energy.ok_or_else(|| Error::Config("`oracle` needs an earlier `energy` stage".into()))?;
                    let o = classical_oracle(self.surface(stage)?)?;
                    let rel = (w - o.energy).abs() / w.max(4.0 * std::f64::consts::PI);
                    self.check(Check::below(name, "relative gap", rel, tol.energy));
                    json!({ "willmore": w, "classical": o, "relative_gap": rel })
                }
                Stage::Mesh { file, projection, domain, bake_w } => {
                    let opts = MeshOptions { projection: *projection, domain: *domain, bake_w: *bake_w };
                    let stats = export_mesh(self.surface(stage)?, opts, &self.out.join(file))?;
                    files.push(file.display().to_string());
                    serde_json::to_value(stats)?
                }
                _ => unreachable!("field stages handled above"),
            }
        };
        let path = format!("{stem}.json");
        write_json(&self.out.join(&path), &report)?;
        files.push(path);
        self.records.push(StageRecord { index: idx, op: name.into(), files });
        Ok(())
    }
}

fn reals_to_vector(v: &[f64], m: usize) -> Result<HVector> {
    if v.len() != 4 * m {
        return Err(Error::Config(format!("expected {} reals for a vector in H^{m}, got {}", 4 * m, v.len())));
    }
    Ok(HVector::from_real(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_stage_tags() {
        let c = PipelineConfig::from_json(
            r#"{ "curve": "c.json", "stages": [
                { "op": "twistor" },
                { "op": "tangent" },
                { "op": "stereographic", "pole": 12 },
                { "op": "mesh", "file": "s.obj", "projection": "stereographic", "bake_w": true }
            ] }"#,
        )
        .unwrap();
        assert_eq!(c.grid, 128);
        assert_eq!(c.out, PathBuf::from("out"));
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.stages[2], Stage::Stereographic { pole: Pole::Index(12) });
        let back = PipelineConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn malformed_configs_are_rejected() {
        for text in [
            r#"{ "curve": "c.json", "stages": [ { "op": "spin" } ] }"#,
            r#"{ "curve": "c.json", "stages": [ { "op": "twistor", "extra": 1 } ] }"#,
            r#"{ "curve": "c.json", "stages": [ { "op": "energy" } ] }"#,
            r#"{ "curve": "c.json", "grid": 15, "stages": [ { "op": "twistor" } ] }"#,
            r#"{ "curve": "c.json", "stages": [] }"#,
            r#"{ "stages": [ { "op": "twistor" } ] }"#,
            r#"{ "curve": "c.json", "stages": [ { "op": "twistor" }, { "op": "stereographic", "pole": "north" } ] }"#,
        ] {
            let err = PipelineConfig::from_json(text).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{text}: {err}");
            assert_eq!(err.exit_code(), 3);
        }
    }

    #[test]
    fn check_direction() {
        assert!(Check::below("s", "x", 1.0, 2.0).pass);
        assert!(!Check::below("s", "x", f64::NAN, 2.0).pass);
        assert!(Check::above("s", "x", 3.0, 2.0).pass);
    }
}

//! Command dispatch, report assembly and output files.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use absentia_core::certify::{
    check_budget_ab, check_budget_multi, check_budget_nsa, check_budget_robust, check_budget_thm1,
    check_obvious_condition, constants_sweep, pointwise_sufficient, CertificateReport, ComputedConstants,
    ConstantSet, ObviousCheck, PointwiseChoice, TheoremId, Verdict,
};
use absentia_core::eigensolve::{
    classify_stabilization, participation_radius, smallest_eigs, SolverOptions, StabilizationEntry,
    StabilizationReport,
};
use absentia_core::field::{
    ab_potential, transverse_gauge, AngularFluxDensity, RadialFieldProfile, VectorPotentialField,
};
use absentia_core::forms::{assemble_dirichlet_form, hamiltonian_form, potential_mass, quadrature_mass};
use absentia_core::hardy::{
    ab_probe, ab_weighted_probe, ck_sweep, circle_probe, hp_disk_probe, lw_probe, weighted_classical_probe,
    CkWeight, GridSummary, HardyProbeResult,
};
use absentia_core::identities::{
    manufacture, residual_crucial_ss, residual_g1, residual_g2, residual_g3, Decomposition, G1Choice,
    G2Choice, IdentityResidual, ManufacturedEigenpair, Quadrature, UProfile,
};
use absentia_core::mesh::GridSpec;
use absentia_core::potential::{PotentialModel, ScalarPotential};
use absentia_core::Error;
use serde::Serialize;

use crate::config::{ConfigError, DecompositionChoice, FieldSpec, ScenarioConfig, ShapeSpec, TheoremChoice};

/// Quadrature points per panel for the identity residuals.
const IDENTITY_POINTS: usize = 4000;

/// Fourier modes for the circle eigenvalue.
const CIRCLE_MODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Certify,
    Spectrum,
    Hardy,
    Identities,
    All,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::Spectrum => "spectrum",
            Command::Hardy => "hardy",
            Command::Identities => "identities",
            Command::All => "all",
        }
    }

    fn includes(self, other: Command) -> bool {
        self == other || self == Command::All
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Toolkit {
    pub name: &'static str,
    pub version: &'static str,
}

/// A certificate with the data it was computed from.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateRecord {
    #[serde(flatten)]
    pub report: CertificateReport,
    /// Where the real part of `V` was placed.
    pub decomposition: Option<DecompositionChoice>,
    pub pointwise: Option<PointwiseChoice>,
    pub obvious: Option<ObviousCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRun {
    pub r_max: f64,
    pub grid: GridSummary,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub participation_radius: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Spectra {
    pub runs: Vec<SpectrumRun>,
    pub stabilization: Option<StabilizationReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityRecord {
    pub pair: String,
    #[serde(flatten)]
    pub residual: IdentityResidual,
}

/// A module failure recorded in the report.
#[derive(Clone, Debug, Serialize)]
pub struct RunError {
    pub stage: String,
    pub message: String,
    /// I/O, breakdown or non-convergence; these set a nonzero exit code.
    pub operational: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: i64,
    pub toolkit: Toolkit,
    pub command: &'static str,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub certificates: Vec<CertificateRecord>,
    pub spectra: Option<Spectra>,
    pub hardy_probes: Vec<HardyProbeResult>,
    pub identity_residuals: Vec<IdentityRecord>,
    pub errors: Vec<RunError>,
    /// Wall-clock milliseconds per stage; the only nondeterministic block.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The report without its timings block.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(o) = v.as_object_mut() {
            o.remove("timings");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn operational_failure(&self) -> bool {
        self.errors.iter().any(|e| e.operational)
    }

    /// Plain-text summary of the certificates and errors.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.certificates {
            let r = &c.report;
            s.push_str(&format!("{}: {}", r.theorem_id.as_str(), r.verdict.as_str()));
            if r.verdict != Verdict::Inapplicable {
                s.push_str(&format!(" (budget {:.6}, margin {:.6})", r.budget_value, r.margin));
            }
            s.push('\n');
            for n in &r.diagnostics.notes {
                s.push_str(&format!("  note: {n}\n"));
            }
        }
        if let Some(st) = self.spectra.as_ref().and_then(|sp| sp.stabilization.as_ref()) {
            let v = st.verdict.map_or("undetermined", |v| match v {
                absentia_core::eigensolve::Stabilization::Genuine => "genuine",
                absentia_core::eigensolve::Stabilization::Artifact => "artifact",
            });
            s.push_str(&format!("lowest eigenvalue across radii: {v}\n"));
        }
        for e in &self.errors {
            let kind = if e.operational { "error" } else { "skipped" };
            s.push_str(&format!("{kind} [{}]: {}\n", e.stage, e.message));
        }
        s
    }
}

fn operational(e: &Error) -> bool {
    matches!(
        e,
        Error::Factorization { .. } | Error::NonFinite { .. } | Error::Assembly(_) | Error::Dimension { .. }
    )
}

/// Models built from a scenario.
struct Scenario {
    profile: Option<RadialFieldProfile<f64>>,
    alpha: Option<AngularFluxDensity<f64>>,
    a: VectorPotentialField<f64>,
    spec: GridSpec<f64>,
    radii: Vec<f64>,
    opts: SolverOptions<f64>,
}

fn invalid(key: &str, e: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        line: None,
        message: e.to_string(),
    }
}

fn scalar(s: &ShapeSpec) -> ScalarPotential<f64> {
    match *s {
        ShapeSpec::Zero => ScalarPotential::Zero,
        ShapeSpec::Constant { value } => ScalarPotential::Constant(value),
        ShapeSpec::Step { value, radius } => ScalarPotential::Step { value, radius },
        ShapeSpec::Gaussian { value, width } => ScalarPotential::Gaussian {
            amplitude: value,
            width,
        },
        ShapeSpec::InverseSquare { value } => ScalarPotential::InverseSquare { coeff: value },
        ShapeSpec::Harmonic { value, offset } => ScalarPotential::Harmonic { coeff: value, offset },
    }
}

/// `V` with its real part in `V⁽¹⁾` or `V⁽²⁾`.
fn potential(config: &ScenarioConfig, choice: DecompositionChoice) -> Result<PotentialModel<f64>, ConfigError> {
    let re = scalar(&config.potential.real);
    let im = scalar(&config.potential.imag);
    let in_v1 = match choice {
        DecompositionChoice::AllV1 => true,
        DecompositionChoice::AllV2 => false,
        DecompositionChoice::Auto => !config.potential.real.has_jump(),
    };
    let model = if in_v1 {
        PotentialModel::new(re, ScalarPotential::Zero, im)
    } else {
        PotentialModel::new(ScalarPotential::Zero, re, im)
    };
    model.map_err(|e| invalid("certify.decomposition", e))
}

impl Scenario {
    fn build(config: &ScenarioConfig) -> Result<Self, ConfigError> {
        let (profile, alpha) = match &config.field {
            FieldSpec::None => (Some(Ok(RadialFieldProfile::zero())), None),
            FieldSpec::Step { strength, radius } => (Some(RadialFieldProfile::step(*strength, *radius)), None),
            FieldSpec::Constant { strength } => (Some(RadialFieldProfile::constant(*strength)), None),
            FieldSpec::GaussianPoly {
                strength,
                width,
                cutoff,
            } => (Some(RadialFieldProfile::gaussian_poly(*strength, *width, *cutoff)), None),
            FieldSpec::Ab {
                alpha_mean,
                alpha_cos,
                alpha_sin,
            } => (
                None,
                Some(
                    AngularFluxDensity::series(*alpha_mean, alpha_cos.clone(), alpha_sin.clone())
                        .map_err(|e| invalid("field", e))?,
                ),
            ),
        };
        let profile = profile.transpose().map_err(|e| invalid("field", e))?;
        let a = match (&profile, &alpha) {
            (Some(p), _) => transverse_gauge(p),
            (None, Some(al)) => ab_potential(al),
            (None, None) => unreachable!("every field spec yields a profile or a density"),
        };
        let g = &config.grid;
        Ok(Self {
            profile,
            alpha,
            a,
            spec: GridSpec::annulus(g.n_r, g.n_theta, g.r_max, g.r_min / g.r_max, g.grading),
            radii: config.certify.sweep_radii.clone(),
            opts: SolverOptions {
                tol: config.solver.tol,
                max_iter: config.solver.max_iter,
                seed: config.solver.seed,
            },
        })
    }
}

struct Recorder {
    errors: Vec<RunError>,
    timings: BTreeMap<String, f64>,
}

impl Recorder {
    fn fail(&mut self, stage: &str, e: &Error) {
        self.errors.push(RunError {
            stage: stage.into(),
            message: e.to_string(),
            operational: operational(e),
        });
    }

    fn not_converged(&mut self, stage: &str, what: impl Into<String>) {
        self.errors.push(RunError {
            stage: stage.into(),
            message: format!("{} did not converge", what.into()),
            operational: true,
        });
    }

    fn time<R>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        let t = Instant::now();
        let r = f(self);
        self.timings.insert(format!("{stage}_ms"), t.elapsed().as_secs_f64() * 1e3);
        r
    }
}

/// Runs `command` on a validated scenario. `seed` overrides `solver.seed`.
pub fn run(command: Command, config: &ScenarioConfig, seed: Option<u64>) -> Result<RunReport, ConfigError> {
    let mut config = config.clone();
    if let Some(s) = seed {
        config.solver.seed = s;
    }
    let wants_certify = command.includes(Command::Certify);
    if wants_certify && !config.potential.real.is_zero() && config.certify.decomposition.is_none() {
        return Err(invalid(
            "certify.decomposition",
            "is required when the potential has a nonzero real part (all_v1, all_v2 or auto)",
        ));
    }
    let scenario = Scenario::build(&config)?;
    let spectral_v = potential(&config, DecompositionChoice::AllV2)?;
    let mut rec = Recorder {
        errors: Vec::new(),
        timings: BTreeMap::new(),
    };
    let total = Instant::now();

    let certificates = if wants_certify {
        let choice = config.certify.decomposition.unwrap_or(DecompositionChoice::AllV1);
        let v = potential(&config, choice)?;
        rec.time("certify", |rec| certify(&config, &scenario, &v, rec))
    } else {
        Vec::new()
    };
    let spectra = if command.includes(Command::Spectrum) {
        rec.time("spectrum", |rec| spectrum(&config, &scenario, &spectral_v, rec))
    } else {
        None
    };
    let hardy_probes = if command.includes(Command::Hardy) {
        rec.time("hardy", |rec| hardy(&scenario, rec))
    } else {
        Vec::new()
    };
    let identity_residuals = if command.includes(Command::Identities) {
        rec.time("identities", |rec| identities(&scenario, rec))
    } else {
        Vec::new()
    };
    rec.timings.insert("total_ms".into(), total.elapsed().as_secs_f64() * 1e3);

    Ok(RunReport {
        schema_version: config.schema_version,
        toolkit: Toolkit {
            name: "absentia",
            version: env!("CARGO_PKG_VERSION"),
        },
        command: command.as_str(),
        seed: config.solver.seed,
        certificates,
        spectra,
        hardy_probes,
        identity_residuals,
        errors: rec.errors,
        timings: rec.timings,
        config,
    })
}

fn theorem_id(t: TheoremChoice) -> TheoremId {
    match t {
        TheoremChoice::Thm1 => TheoremId::Thm1,
        TheoremChoice::Thm2Budget => TheoremId::Thm2Budget,
        TheoremChoice::Thm3Nsa => TheoremId::Thm3Nsa,
        TheoremChoice::Thm4Robust => TheoremId::Thm4Robust,
        TheoremChoice::Thm5Ab => TheoremId::Thm5Ab,
    }
}

fn certify(
    config: &ScenarioConfig,
    s: &Scenario,
    v: &PotentialModel<f64>,
    rec: &mut Recorder,
) -> Vec<CertificateRecord> {
    let theorems = &config.certify.theorems;
    let needs_sa = theorems
        .iter()
        .any(|t| matches!(t, TheoremChoice::Thm1 | TheoremChoice::Thm2Budget));
    let needs_nsa = theorems.len() > usize::from(needs_sa)
        || theorems
            .iter()
            .any(|t| !matches!(t, TheoremChoice::Thm1 | TheoremChoice::Thm2Budget));
    let decomposition = config.certify.decomposition;
    let largest = s.spec.with_r_max(*s.radii.last().expect("sweep radii are non-empty"));

    let grid = match largest.build() {
        Ok(g) => g,
        Err(e) => {
            rec.fail("certify", &e);
            return Vec::new();
        }
    };
    let pointwise = match pointwise_sufficient(&s.a, v, &grid) {
        Ok(p) => Some(p),
        Err(e) => {
            rec.fail("certify.pointwise", &e);
            None
        }
    };
    let sweep = |set: ConstantSet, rec: &mut Recorder| -> Option<ComputedConstants> {
        let c = constants_sweep(
            set,
            &s.a,
            v,
            &s.spec,
            &s.radii,
            &s.opts,
            pointwise.as_ref().map(|p| &p.selected),
        );
        match c {
            Ok(c) => {
                for e in c.entries.iter().filter(|e| !e.converged) {
                    rec.not_converged("certify.constants", format!("constant {}", e.name));
                }
                Some(c)
            }
            Err(e) => {
                rec.fail("certify.constants", &e);
                None
            }
        }
    };
    let sa = if needs_sa && v.is_real() {
        sweep(ConstantSet::SelfAdjoint, rec)
    } else {
        None
    };
    let nsa = if needs_nsa { sweep(ConstantSet::NonSelfAdjoint, rec) } else { None };

    let mut out = Vec::new();
    for &t in theorems {
        let id = theorem_id(t);
        let constants = match t {
            TheoremChoice::Thm1 | TheoremChoice::Thm2Budget => sa.as_ref(),
            _ => nsa.as_ref(),
        };
        let mut obvious = None;
        let report = match (t, constants) {
            (TheoremChoice::Thm1 | TheoremChoice::Thm2Budget, None) if !v.is_real() => {
                CertificateReport::inapplicable(
                    id,
                    Default::default(),
                    "the self-adjoint theorems need a real potential",
                )
            }
            (_, None) => continue,
            (TheoremChoice::Thm1, Some(c)) => check_budget_thm1(&c.budget).with_constants(c),
            (TheoremChoice::Thm2Budget, Some(c)) => {
                check_budget_multi(config.certify.d, &c.budget).with_constants(c)
            }
            (TheoremChoice::Thm3Nsa, Some(c)) => match check_obvious_condition(&s.a, v, &grid, &s.opts) {
                Ok(o) => {
                    if !o.converged {
                        rec.not_converged("certify.obvious", "positivity precondition");
                    }
                    let r = check_budget_nsa(&c.budget, o.outcome).with_constants(c);
                    obvious = Some(o);
                    r
                }
                Err(e) => {
                    rec.fail("certify.obvious", &e);
                    continue;
                }
            },
            (TheoremChoice::Thm4Robust, Some(c)) => {
                check_budget_robust(&c.budget, config.certify.epsilon).with_constants(c)
            }
            (TheoremChoice::Thm5Ab, Some(c)) => match &s.alpha {
                Some(alpha) => check_budget_ab(alpha, &c.budget, config.certify.epsilon).with_constants(c),
                None => CertificateReport::inapplicable(
                    id,
                    c.budget,
                    "the Aharonov-Bohm theorem needs field.profile = \"ab\"",
                )
                .with_constants(c),
            },
        };
        out.push(CertificateRecord {
            report,
            decomposition,
            pointwise: pointwise.clone(),
            obvious,
        });
    }
    out
}

fn spectrum(
    config: &ScenarioConfig,
    s: &Scenario,
    v: &PotentialModel<f64>,
    rec: &mut Recorder,
) -> Option<Spectra> {
    if !v.is_real() {
        rec.fail(
            "spectrum",
            &Error::Rejected("eigenvalue search needs a real potential".into()),
        );
        return None;
    }
    let mut runs = Vec::new();
    for &r in &s.radii {
        let solved = (|| {
            let grid = s.spec.with_r_max(r).build()?;
            let h = hamiltonian_form(&assemble_dirichlet_form(&s.a, &grid)?, &potential_mass(&grid, v)?)?;
            let m = quadrature_mass(&grid)?;
            let res = smallest_eigs(&h, Some(&m), config.solver.k, &s.opts)?;
            Ok::<_, Error>((grid, res))
        })();
        match solved {
            Ok((grid, res)) => {
                if !res.converged {
                    rec.not_converged("spectrum", format!("eigensolve at r_max = {r}"));
                }
                runs.push(SpectrumRun {
                    r_max: r,
                    grid: GridSummary::of(&grid),
                    eigenvalues: res.eigenvalues.clone(),
                    residuals: res.residual_norms.clone(),
                    participation_radius: participation_radius(&grid, &res.eigenvectors[0]),
                    iterations: res.iterations,
                    converged: res.converged,
                });
            }
            Err(e) => rec.fail("spectrum", &e),
        }
    }
    let stabilization = (runs.len() >= 2).then(|| {
        classify_stabilization(
            runs.iter()
                .map(|run| StabilizationEntry {
                    r_max: run.r_max,
                    lambda1: run.eigenvalues[0],
                    residual: run.residuals[0],
                    participation_radius: run.participation_radius,
                    converged: run.converged,
                })
                .collect(),
        )
    });
    Some(Spectra { runs, stabilization })
}

fn hardy(s: &Scenario, rec: &mut Recorder) -> Vec<HardyProbeResult> {
    let mut out = Vec::new();
    let mut push = |stage: &str, r: absentia_core::Result<HardyProbeResult>, rec: &mut Recorder| match r {
        Ok(p) => {
            if !p.converged {
                rec.not_converged(stage, format!("probe {}", p.inequality_id.as_str()));
            }
            out.push(p);
        }
        Err(e) => rec.fail(stage, &e),
    };
    let grid = match s.spec.build() {
        Ok(g) => g,
        Err(e) => {
            rec.fail("hardy", &e);
            return Vec::new();
        }
    };
    match (&s.profile, &s.alpha) {
        (Some(profile), _) => {
            push("hardy.lw", lw_probe(profile, &grid, &s.opts), rec);
            push(
                "hardy.ck",
                ck_sweep(profile, &s.spec, &s.radii, CkWeight::LogWeight, &s.opts),
                rec,
            );
            let disk = GridSpec { inner_ratio: 0.0, ..s.spec }.build();
            match disk {
                Ok(d) => {
                    push("hardy.hp_disk", hp_disk_probe(&d, &s.opts), rec);
                    push(
                        "hardy.weighted_classical",
                        weighted_classical_probe(2, Some(&d), &s.opts),
                        rec,
                    );
                }
                Err(e) => rec.fail("hardy", &e),
            }
        }
        (None, Some(alpha)) => {
            push("hardy.ab", ab_probe(alpha, &grid, &s.opts), rec);
            push("hardy.ab_weighted", ab_weighted_probe(alpha, &grid, &s.opts), rec);
            push("hardy.circle", circle_probe(alpha, CIRCLE_MODES), rec);
        }
        (None, None) => {}
    }
    out
}

fn identity_suite(
    name: &str,
    pair: &ManufacturedEigenpair<f64>,
    rec: &mut Recorder,
    out: &mut Vec<IdentityRecord>,
) {
    let q = Quadrature::new(IDENTITY_POINTS);
    let results = [
        residual_g1(pair, &G1Choice::One, &q),
        residual_g1(pair, &G1Choice::R, &q),
        residual_g2(pair, &G2Choice::One, &q),
        residual_g2(pair, &G2Choice::R, &q),
        residual_g3(pair, &q),
        residual_crucial_ss(pair, &Decomposition::AllV1, &q),
        residual_crucial_ss(pair, &Decomposition::AllV2, &q),
        residual_crucial_ss(pair, &Decomposition::Split { r0: pair.scale() }, &q),
    ];
    for r in results {
        match r {
            Ok(residual) => out.push(IdentityRecord {
                pair: name.into(),
                residual,
            }),
            Err(e) => rec.fail(&format!("identities.{name}"), &e),
        }
    }
}

fn identities(s: &Scenario, rec: &mut Recorder) -> Vec<IdentityRecord> {
    let mut out = Vec::new();
    let mut pairs: Vec<(String, absentia_core::Result<ManufacturedEigenpair<f64>>)> = vec![
        (
            "oscillator".into(),
            manufacture(UProfile::gaussian(1.0), &transverse_gauge(&RadialFieldProfile::zero()), 0.0),
        ),
        (
            "constant_field_b0.5".into(),
            RadialFieldProfile::constant(0.5)
                .and_then(|p| manufacture(UProfile::gaussian(1.0), &transverse_gauge(&p), 0.0)),
        ),
    ];
    if s.profile.is_some() {
        pairs.push(("scenario".into(), manufacture(UProfile::gaussian(1.0), &s.a, 0.0)));
    }
    for (name, pair) in pairs {
        match pair {
            Ok(p) => identity_suite(&name, &p, rec, &mut out),
            Err(e) => rec.fail(&format!("identities.{name}"), &e),
        }
    }
    out
}

/// Files written by [`write_outputs`].
#[derive(Debug, Default)]
pub struct Written {
    pub files: Vec<PathBuf>,
}

/// Shortest round-trip decimal form, with an exponent for extreme magnitudes.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn csv_writer(path: &Path) -> io::Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .delimiter(b',')
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io::Error::other)
}

/// Writes the report, the CSV tables and, with `dump_matrix`, the
/// Hamiltonian at the configured grid in MatrixMarket format.
pub fn write_outputs(report: &RunReport, dir: &Path, dump_matrix: bool) -> io::Result<Written> {
    fs::create_dir_all(dir)?;
    let out = &report.config.output;
    let mut written = Written::default();

    if let Some(spectra) = &report.spectra {
        let path = dir.join(&out.eigenvalues_csv);
        let mut w = csv_writer(&path)?;
        w.write_record(["r_max", "index", "eigenvalue", "residual"])?;
        for run in &spectra.runs {
            for (i, (l, res)) in run.eigenvalues.iter().zip(&run.residuals).enumerate() {
                w.write_record([num(run.r_max), (i + 1).to_string(), num(*l), num(*res)])?;
            }
        }
        w.flush()?;
        written.files.push(path);
    }
    if !report.hardy_probes.is_empty() {
        let path = dir.join(&out.hardy_csv);
        let mut w = csv_writer(&path)?;
        w.write_record(["probe_id", "constant", "bound"])?;
        for p in &report.hardy_probes {
            w.write_record([
                p.inequality_id.as_str().to_string(),
                p.computed_constant.map(num).unwrap_or_default(),
                num(p.reference_bound),
            ])?;
        }
        w.flush()?;
        written.files.push(path);
    }
    if dump_matrix {
        let path = dir.join(&out.matrix);
        dump_hamiltonian(&report.config, &path)?;
        written.files.push(path);
    }
    let path = dir.join(&out.report);
    fs::write(&path, report.to_json())?;
    written.files.push(path);
    Ok(written)
}

fn dump_hamiltonian(config: &ScenarioConfig, path: &Path) -> io::Result<()> {
    let to_io = |e: ConfigError| io::Error::new(io::ErrorKind::InvalidInput, e.to_string());
    let scenario = Scenario::build(config).map_err(to_io)?;
    let v = potential(config, DecompositionChoice::AllV2).map_err(to_io)?;
    let form = (|| {
        let grid = scenario.spec.build()?;
        hamiltonian_form(&assemble_dirichlet_form(&scenario.a, &grid)?, &potential_mass(&grid, &v)?)
    })()
    .map_err(io::Error::other)?;
    let mut f = io::BufWriter::new(fs::File::create(path)?);
    form.dump_matrix_market(&mut f)?;
    f.flush()
}

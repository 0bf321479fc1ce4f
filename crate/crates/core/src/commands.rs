//! The command-line workflows. Each writes its artifacts into an output
//! directory and returns the run manifest.
//!
//! Random streams are fixed per purpose so runs with the same seed agree
//! command to command: 1 scan, 2 search, 3/4 clock A noise/lock, 5/6 clock B.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{lattice_light_shift, sideband_positions, TrapDerived};
use crate::noise::{synthesize, FrequencyTrace};
use crate::prep::{ballistic_escape_time, recapture_fraction, RECAPTURE_DETECTION_THRESHOLD};
use crate::prep::{bias_field, doppler_field_span, slower_field_profile};
use crate::prep::{run_pipeline, PipelineReport};
use crate::report::{
    read_trace, write_curve, write_json, write_lock_records, write_spectrum, write_stages, write_trace, write_xy,
    Manifest, Provenance,
};
use crate::rng::RngStream;
use crate::scenario::Scenario;
use crate::servo::{qpn_limit, run_lock, LockOutcome, QpnLimit};
use crate::spectroscopy::{
    chirp_search, fourier_limited_fwhm, scan_grid, scan_line, synthesize_lineshape, Lineshape, SearchOutcome,
};
use crate::stability::{compare_clocks, estimate_drift, fit_powerlaw, overlapping_allan, DriftEstimate, TauGrid};
use crate::systematics::{
    bbr_shift, density_shift, lattice_volume, quadratic_zeeman, quadratic_zeeman_uncertainty, total_budget, Budget,
    ShiftEntry,
};

pub const STREAM_SCAN: u64 = 1;
pub const STREAM_SEARCH: u64 = 2;
pub const STREAM_NOISE_A: u64 = 3;
pub const STREAM_LOCK_A: u64 = 4;
pub const STREAM_NOISE_B: u64 = 5;
pub const STREAM_LOCK_B: u64 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Prep,
    Scan,
    Lock,
    Allan,
    Budget,
    Compare,
    Search,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Prep => "prep",
            Command::Scan => "scan",
            Command::Lock => "lock",
            Command::Allan => "allan",
            Command::Budget => "budget",
            Command::Compare => "compare",
            Command::Search => "search",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub taus: TauGrid,
    /// Trace CSVs to analyse instead of simulating (`allan`: one, `compare`: two).
    pub inputs: Vec<PathBuf>,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        RunOptions {
            out: out.into(),
            taus: TauGrid::Octave,
            inputs: Vec::new(),
        }
    }
}

/// Runs `cmd` for `scenario`, writing artifacts and `manifest.json` to
/// `opts.out`.
pub fn run(cmd: Command, scenario: &Scenario, opts: &RunOptions) -> Result<Manifest> {
    std::fs::create_dir_all(&opts.out).map_err(|e| Error::io(&opts.out, e))?;
    let prov = Provenance::new(scenario.name(), Some(scenario.seed()));
    let echo = serde_json::to_value(&scenario.spec).ok();
    let mut manifest = Manifest::new(cmd.name(), prov.clone(), echo);
    let out = Output {
        dir: &opts.out,
        prov: &prov,
    };
    let files = match cmd {
        Command::Prep => cmd_prep(scenario, &out)?,
        Command::Scan => cmd_scan(scenario, &out, &mut manifest.warnings)?,
        Command::Lock => cmd_lock(scenario, &out)?,
        Command::Allan => cmd_allan(scenario, opts, &out, &mut manifest)?,
        Command::Budget => cmd_budget(scenario, &out)?,
        Command::Compare => cmd_compare(scenario, opts, &out, &mut manifest)?,
        Command::Search => cmd_search(scenario, &out)?,
    };
    manifest.files = files;
    write_json(&opts.out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

struct Output<'a> {
    dir: &'a Path,
    prov: &'a Provenance,
}

impl Output<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

/// Runs the preparation chain with the scenario's lattice depth.
pub fn prepare(s: &Scenario) -> Result<PipelineReport> {
    run_pipeline(&s.species, &s.spec.pipeline, s.trap.depth)
}

/// Lineshape seen by an ensemble at `temperature`, with the scan broadening.
pub fn scan_lineshape(s: &Scenario, temperature: f64) -> Result<Lineshape> {
    synthesize_lineshape(&s.probe, Some(&s.trap), s.spec.probe.broadening, temperature)
}

/// Lineshape the servo locks to.
pub fn lock_lineshape(s: &Scenario) -> Result<Lineshape> {
    Lineshape::new(s.probe.rabi_frequency, s.probe.pulse_time, s.spec.lock.broadening, None)
}

/// Free-running local oscillator for the scenario, one sample per cycle.
pub fn local_oscillator(s: &Scenario, stream: u64) -> Result<FrequencyTrace> {
    let mut rng = RngStream::new(s.seed(), stream);
    let mut lo = synthesize(&s.spec.noise, s.spec.lock.cycles, s.spec.servo.cycle_time, &mut rng)?;
    lo.label = "free-running".into();
    Ok(lo)
}

/// Locks a freshly synthesized oscillator. Returns the free-running trace
/// and the lock outcome.
pub fn simulate_clock(s: &Scenario, noise_stream: u64, lock_stream: u64) -> Result<(FrequencyTrace, LockOutcome)> {
    let lo = local_oscillator(s, noise_stream)?;
    let line = lock_lineshape(s)?;
    let mut rng = RngStream::new(s.seed(), lock_stream);
    let outcome = run_lock(&lo, s.spec.lock.line_center, s.nu0(), &s.spec.servo, &line, &mut rng)?;
    Ok((lo, outcome))
}

pub fn scenario_qpn(s: &Scenario) -> Result<QpnLimit> {
    let line = lock_lineshape(s)?;
    qpn_limit(line.fwhm(), s.nu0(), s.spec.servo.atom_number, s.spec.servo.cycle_time)
}

/// Systematic budget for `atoms` trapped atoms.
pub fn scenario_budget(s: &Scenario, atoms: f64) -> Result<Budget> {
    let sys = &s.spec.systematics;
    let nu0 = s.nu0();
    let t = sys.environment_temperature;
    let bbr = ShiftEntry::new(
        "black-body",
        bbr_shift(t, &sys.bbr)?,
        (sys.bbr.sensitivity(t) * sys.temperature_uncertainty).abs(),
        nu0,
    )?;
    let field = sys.bias_field.unwrap_or(s.probe.magnetic_field);
    let zeeman = ShiftEntry::new(
        "quadratic-zeeman",
        quadratic_zeeman(field, sys.zeeman_beta),
        quadratic_zeeman_uncertainty(field, sys.zeeman_beta, sys.field_uncertainty_fraction * field),
        nu0,
    )?;
    let volume = lattice_volume(s.lattice.waist, s.lattice.wavelength, sys.occupied_sites);
    let dens = density_shift(atoms, volume, sys.density_coefficient)?;
    let density = ShiftEntry::new("density", dens, (dens * sys.density_uncertainty_fraction).abs(), nu0)?;
    let ls = lattice_light_shift(
        s.trap.depth,
        s.spec.lattice.frequency_stability,
        s.spec.lattice.light_shift_slope,
        s.trap.recoil,
    )?;
    let lattice = ShiftEntry::new("lattice-light", 0.0, ls.abs(), nu0)?;
    total_budget(vec![bbr, zeeman, density, lattice], nu0)
}

#[derive(Debug, Clone, Serialize)]
pub struct RecaptureRow {
    pub hold: f64,
    pub lattice_on: bool,
    pub fraction: f64,
    pub detected: bool,
}

/// Recapture checks for scenarios that define them.
pub fn scenario_recapture(s: &Scenario, report: &PipelineReport) -> Result<Vec<RecaptureRow>> {
    let Some(r) = &s.spec.recapture else {
        return Ok(Vec::new());
    };
    let lifetime = s.spec.pipeline.hold.as_ref().map_or(f64::INFINITY, |h| h.lifetime);
    let escape = ballistic_escape_time(r.capture_radius, report.final_state.temperature, s.species.mass)?;
    [(r.lattice_off_hold, false), (r.lattice_on_hold, true)]
        .into_iter()
        .map(|(hold, on)| {
            let fraction = recapture_fraction(hold, on, lifetime, escape)?;
            Ok(RecaptureRow {
                hold,
                lattice_on: on,
                fraction,
                detected: fraction > RECAPTURE_DETECTION_THRESHOLD,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct PrepSummary<'a> {
    report: &'a PipelineReport,
    trap: &'a TrapDerived,
    circulating_power: f64,
    enhancement_factor: f64,
    slower_bias_field: Option<f64>,
    slower_field_span: Option<f64>,
    recapture: Vec<RecaptureRow>,
}

fn cmd_prep(s: &Scenario, out: &Output) -> Result<Vec<String>> {
    let report = prepare(s)?;
    let mut files = vec!["prep_stages.csv".to_string(), "prep.json".to_string()];
    write_stages(&out.path("prep_stages.csv"), &report.rows, out.prov)?;
    let slower = s.spec.pipeline.slower.as_ref();
    if let Some(cfg) = slower {
        let profile = slower_field_profile(&s.species, cfg)?;
        write_xy(&out.path("slower_profile.csv"), ["z_m", "field_T"], &profile, out.prov)?;
        files.push("slower_profile.csv".into());
    }
    let summary = PrepSummary {
        report: &report,
        trap: &s.trap,
        circulating_power: s.lattice.circulating_power(),
        enhancement_factor: s.lattice.enhancement_factor,
        slower_bias_field: slower.map(bias_field),
        slower_field_span: report.capture_velocity.map(|v| doppler_field_span(&s.species, v)),
        recapture: scenario_recapture(s, &report)?,
    };
    write_json(&out.path("prep.json"), &summary)?;
    Ok(files)
}

#[derive(Serialize)]
struct ScanSummary {
    atoms_per_point: f64,
    temperature: f64,
    rabi_frequency: f64,
    pulse_time: f64,
    broadening: f64,
    fourier_limited_fwhm: f64,
    model_fwhm: f64,
    measured_fwhm: Option<f64>,
    red_sideband: f64,
    blue_sideband: f64,
    red_peak: Option<f64>,
    blue_peak: Option<f64>,
    diagnostic: Option<String>,
}

fn cmd_scan(s: &Scenario, out: &Output, warnings: &mut Vec<String>) -> Result<Vec<String>> {
    let report = prepare(s)?;
    let atoms = report.final_state.atom_number;
    let temperature = report.final_state.temperature;
    let line = scan_lineshape(s, temperature)?;
    let grid = scan_grid(&line, s.spec.probe.scan_span, s.spec.probe.scan_points);
    let mut rng = RngStream::new(s.seed(), STREAM_SCAN);
    let noisy = scan_line(&line, &grid, atoms, &mut rng)?;
    let model = line.sample(&grid, atoms);
    write_spectrum(&out.path("spectrum.csv"), &noisy, out.prov)?;
    write_spectrum(&out.path("spectrum_model.csv"), &model, out.prov)?;
    let (red, blue) = sideband_positions(0.0, s.trap.axial_frequency);
    let window = s.spec.probe.scan_span / 2.0;
    if let Some(d) = &s.probe_diagnostic {
        warnings.push(d.clone());
    }
    let summary = ScanSummary {
        atoms_per_point: atoms,
        temperature,
        rabi_frequency: s.probe.rabi_frequency,
        pulse_time: s.probe.pulse_time,
        broadening: s.spec.probe.broadening,
        fourier_limited_fwhm: fourier_limited_fwhm(s.probe.pulse_time)?,
        model_fwhm: line.fwhm(),
        measured_fwhm: noisy.fwhm(),
        red_sideband: red,
        blue_sideband: blue,
        red_peak: line.sidebands().and_then(|_| noisy.peak_near(red, window)),
        blue_peak: line.sidebands().and_then(|_| noisy.peak_near(blue, window)),
        diagnostic: s.probe_diagnostic.clone(),
    };
    write_json(&out.path("scan.json"), &summary)?;
    Ok(vec![
        "spectrum.csv".into(),
        "spectrum_model.csv".into(),
        "scan.json".into(),
    ])
}

#[derive(Serialize)]
struct LockSummary {
    line_fwhm: f64,
    modulation_halfwidth: f64,
    discriminator_slope: f64,
    final_correction: f64,
    qpn: QpnLimit,
    qpn_at_1s: f64,
    free_running_drift: DriftEstimate,
    locked_drift: DriftEstimate,
}

fn cmd_lock(s: &Scenario, out: &Output) -> Result<Vec<String>> {
    let (lo, outcome) = simulate_clock(s, STREAM_NOISE_A, STREAM_LOCK_A)?;
    let noise = Some(&s.spec.noise);
    write_trace(&out.path("lo_trace.csv"), &lo, out.prov, noise)?;
    write_trace(&out.path("locked_trace.csv"), &outcome.locked, out.prov, None)?;
    write_lock_records(&out.path("lock_records.csv"), &outcome.records, out.prov)?;
    let qpn = scenario_qpn(s)?;
    let summary = LockSummary {
        line_fwhm: lock_lineshape(s)?.fwhm(),
        modulation_halfwidth: outcome.halfwidth,
        discriminator_slope: outcome.slope,
        final_correction: outcome.records.last().map_or(0.0, |r| r.correction),
        qpn,
        qpn_at_1s: qpn.sigma(1.0),
        free_running_drift: estimate_drift(&lo)?,
        locked_drift: estimate_drift(&outcome.locked)?,
    };
    write_json(&out.path("lock.json"), &summary)?;
    Ok(vec![
        "lo_trace.csv".into(),
        "lo_trace.json".into(),
        "locked_trace.csv".into(),
        "locked_trace.json".into(),
        "lock_records.csv".into(),
        "lock.json".into(),
    ])
}

#[derive(Serialize)]
struct AllanSummary {
    source: String,
    samples: usize,
    dt: f64,
    drift: DriftEstimate,
    power_law: Option<crate::stability::PowerLaw>,
}

fn cmd_allan(s: &Scenario, opts: &RunOptions, out: &Output, manifest: &mut Manifest) -> Result<Vec<String>> {
    let (trace, source, prov) = match opts.inputs.as_slice() {
        [] => (
            local_oscillator(s, STREAM_NOISE_A)?,
            "free-running".to_string(),
            out.prov.clone(),
        ),
        [path] => {
            let t = read_trace(path)?;
            let prov = Provenance::new(format!("file:{}", file_name(path)), t.seed);
            (t, path.display().to_string(), prov)
        }
        _ => return Err(Error::invalid("allan takes at most one --input trace")),
    };
    manifest.provenance = prov.clone();
    let taus = opts.taus.resolve(trace.dt, trace.len());
    let curve = overlapping_allan(&trace, &taus)?;
    write_curve(&out.path("allan.csv"), &curve, &prov)?;
    let power_law = (curve.len() >= 2)
        .then(|| fit_powerlaw(&curve, curve.taus[0], curve.taus[curve.len() - 1]).ok())
        .flatten();
    let summary = AllanSummary {
        source,
        samples: trace.len(),
        dt: trace.dt,
        drift: estimate_drift(&trace)?,
        power_law,
    };
    write_json(&out.path("allan.json"), &summary)?;
    Ok(vec!["allan.csv".into(), "allan.json".into()])
}

fn cmd_budget(s: &Scenario, out: &Output) -> Result<Vec<String>> {
    let report = prepare(s)?;
    let budget = scenario_budget(s, report.final_state.atom_number)?;
    write_json(&out.path("budget.json"), &budget)?;
    let table = format!(
        "# latclock scenario={} seed={}\n{}",
        s.name(),
        s.seed(),
        budget.to_table()
    );
    std::fs::write(out.path("budget.txt"), table).map_err(|e| Error::io(out.path("budget.txt"), e))?;
    Ok(vec!["budget.json".into(), "budget.txt".into()])
}

#[derive(Serialize)]
struct CompareSummary {
    sources: [String; 2],
    difference_drift: DriftEstimate,
    per_clock_at_shortest_tau: Option<f64>,
}

fn cmd_compare(s: &Scenario, opts: &RunOptions, out: &Output, manifest: &mut Manifest) -> Result<Vec<String>> {
    let (a, b, sources, prov) = match opts.inputs.as_slice() {
        [] => {
            let (_, a) = simulate_clock(s, STREAM_NOISE_A, STREAM_LOCK_A)?;
            let (_, b) = simulate_clock(s, STREAM_NOISE_B, STREAM_LOCK_B)?;
            (
                a.locked,
                b.locked,
                ["clock-a".to_string(), "clock-b".to_string()],
                out.prov.clone(),
            )
        }
        [pa, pb] => {
            let a = read_trace(pa)?;
            let b = read_trace(pb)?;
            let prov = Provenance::new(format!("file:{}+{}", file_name(pa), file_name(pb)), a.seed);
            (a, b, [pa.display().to_string(), pb.display().to_string()], prov)
        }
        _ => return Err(Error::invalid("compare takes zero or two --input traces")),
    };
    manifest.provenance = prov.clone();
    let cmp = compare_clocks(&a, &b, &opts.taus)?;
    write_trace(&out.path("compare_difference.csv"), &cmp.difference, &prov, None)?;
    write_curve(&out.path("compare.csv"), &cmp.curve, &prov)?;
    write_curve(&out.path("compare_per_clock.csv"), &cmp.per_clock, &prov)?;
    let summary = CompareSummary {
        sources,
        difference_drift: estimate_drift(&cmp.difference)?,
        per_clock_at_shortest_tau: cmp.per_clock.sigmas.first().copied(),
    };
    write_json(&out.path("compare.json"), &summary)?;
    Ok(vec![
        "compare_difference.csv".into(),
        "compare_difference.json".into(),
        "compare.csv".into(),
        "compare_per_clock.csv".into(),
        "compare.json".into(),
    ])
}

#[derive(Serialize)]
struct SearchSummary {
    true_offset: f64,
    transfer_probability: f64,
    threshold: f64,
    outcome: SearchOutcome,
}

fn cmd_search(s: &Scenario, out: &Output) -> Result<Vec<String>> {
    let cfg = &s.spec.search.chirp;
    let mut rng = RngStream::new(s.seed(), STREAM_SEARCH);
    let outcome = chirp_search(s.spec.search.line_offset, 0.0, cfg, &mut rng)?;
    let summary = SearchSummary {
        true_offset: s.spec.search.line_offset,
        transfer_probability: cfg.transfer_probability(cfg.span),
        threshold: cfg.threshold(),
        outcome,
    };
    write_json(&out.path("search.json"), &summary)?;
    Ok(vec!["search.json".into()])
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use kdebw::{HernquistParams, RNG_NAME};

use crate::args::{Command, DensityArgs, ExperimentArgs, SampleArgs, SelectArgs};
use crate::experiment::{
    axis_nodes, curve_table, document, run_experiment, Experiment, ExperimentOptions, SampleData,
};
use crate::input::{read_sample, write_sample};
use crate::report::{to_json, ExperimentReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Done,
    NotConverged,
}

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Select(a) => cmd_select(&a),
        Command::Experiment(a) => cmd_experiment(&a),
        Command::Density(a) => cmd_density(&a),
        Command::Sample(a) => cmd_sample(&a),
    }
}

fn with_output(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    with_output(path, |w| w.write_all(text.as_bytes()))
}

pub fn cmd_select(args: &SelectArgs) -> Result<Status> {
    let config = args.selector.config();
    config.validate()?;
    let sample = read_sample(&args.input, args.dim)?;

    let start = Instant::now();
    let trace = sample.select(args.kernel, &config)?;
    let elapsed = start.elapsed().as_millis() as u64;

    let name = args
        .input
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let report = ExperimentReport {
        experiment_id: format!("select/{name}"),
        kernel: args.kernel.as_str().to_string(),
        np: sample.len(),
        seed: 0,
        selected_h: trace.final_h,
        analytic_h: None,
        relative_error: None,
        iterations: trace.updates(),
        backoffs: trace.backoffs(),
        converged: trace.converged,
        wall_time_ms: if args.no_timings { 0 } else { elapsed },
        rng_name: "none".to_string(),
    };
    write_text(args.out.as_deref(), &to_json(&report))?;
    if let Some(p) = &args.trace {
        write_text(Some(p), &to_json(&trace))?;
    }
    Ok(if trace.converged { Status::Done } else { Status::NotConverged })
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<Status> {
    let mut options = ExperimentOptions::new(args.name, args.kernel);
    if !args.np.is_empty() {
        options.sizes = args.np.clone();
    }
    if args.seed.is_empty() {
        bail!("at least one seed is required");
    }
    options.seeds = args.seed.clone();
    options.config = args.selector.config();
    options.config.validate()?;
    options.hernquist = args.hernquist.params()?;
    options.timings = !args.no_timings;
    options.curves = args.emit_curves.is_some();

    let runs = run_experiment(&options)?;

    if let Some(dir) = &args.emit_curves {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for run in &runs {
            let r = &run.report;
            let file = dir.join(format!(
                "{}_{}_np{}_seed{}.dat",
                args.name.as_str(),
                r.kernel,
                r.np,
                r.seed
            ));
            let comments = vec![
                format!("experiment {}", r.experiment_id),
                format!("selected_h {}", r.selected_h),
                format!("analytic_h {}", r.analytic_h.unwrap_or(f64::NAN)),
                format!("rng {}", r.rng_name),
            ];
            let table = run.curve.as_ref().expect("curves were requested");
            with_output(Some(&file), |w| table.write_to(w, &comments))?;
        }
    }

    let doc = document(&options, &runs);
    write_text(args.out.as_deref(), &to_json(&doc))?;
    Ok(if runs.iter().all(|r| r.report.converged) {
        Status::Done
    } else {
        Status::NotConverged
    })
}

pub fn cmd_density(args: &DensityArgs) -> Result<Status> {
    let params = args.hernquist.params()?;
    let (sample, source) = match (&args.input, args.generator) {
        (Some(path), _) => (read_sample(path, args.dim)?, format!("file {}", path.display())),
        (None, Some(g)) => (
            g.generate(args.np, kdebw::RngSeed(args.seed), &params)?,
            format!("generator {} np={} seed={} rng {}", g.as_str(), args.np, args.seed, RNG_NAME),
        ),
        (None, None) => bail!("either --input or --generator is required"),
    };
    let density = args.generator.map(|g| g.density(&params));
    let hernquist = (args.generator == Some(Experiment::Hernquist)).then_some(&params);

    let mut status = Status::Done;
    let h = if args.auto {
        let config = args.selector.config();
        config.validate()?;
        let trace = sample.select(args.kernel, &config)?;
        if !trace.converged {
            status = Status::NotConverged;
        }
        trace.final_h
    } else {
        let h = args.h.expect("clap requires --h or --auto");
        if !(h > 0.0 && h.is_finite()) {
            return Err(kdebw::KdeError::NonPositiveBandwidth(h).into());
        }
        h
    };

    let (lo, hi, default_step) = match (args.range, args.generator) {
        (Some((lo, hi)), _) => (lo, hi, (hi - lo) / 1000.0),
        (None, Some(g)) => g.curve_range(&params),
        (None, None) => {
            let (min, max) = axis_extent(&sample);
            let pad = args.kernel.width() * h;
            (min - pad, max + pad, (max - min + 2.0 * pad) / 1000.0)
        }
    };
    let step = args.step.unwrap_or(default_step);
    if !(step > 0.0 && step.is_finite()) {
        bail!("--step must be positive, got {step}");
    }
    let xs = axis_nodes(lo, hi, step);
    let table = curve_table(&sample, args.kernel, h, &xs, density.as_ref(), hernquist)?;
    let mut comments = vec![
        format!("source {source}"),
        format!("kernel {}", args.kernel),
        format!("h {h}{}", if args.auto { " (selected)" } else { "" }),
    ];
    if sample.dimension() == 3 {
        comments.push("evaluated along the first axis with the other coordinates at 0".into());
    }
    with_output(args.out.as_deref(), |w| table.write_to(w, &comments))?;
    Ok(status)
}

fn axis_extent(sample: &SampleData) -> (f64, f64) {
    match sample {
        SampleData::OneD(s) => (s.min(), s.max()),
        SampleData::ThreeD(s) => (s.min()[0], s.max()[0]),
    }
}

pub fn sample_header(generator: Experiment, n: usize, seed: u64, params: &HernquistParams) -> Vec<String> {
    let mut p = format!("np={n}");
    if generator == Experiment::Hernquist {
        p.push_str(&format!(
            " rc={} mt={} rmin={} rmax={}",
            params.scale_length, params.total_mass, params.min_r_over_rc, params.max_r_over_rc
        ));
    }
    vec![
        format!("generator: {}", generator.as_str()),
        format!("params: {p}"),
        format!("seed: {seed}"),
        format!("rng: {RNG_NAME}"),
    ]
}

pub fn cmd_sample(args: &SampleArgs) -> Result<Status> {
    let params = args.hernquist.params()?;
    let sample = args.generator.generate(args.np, kdebw::RngSeed(args.seed), &params)?;
    let header = sample_header(args.generator, args.np, args.seed, &params);
    with_output(args.out.as_deref(), |w| write_sample(w, &header, &sample))?;
    Ok(Status::Done)
}

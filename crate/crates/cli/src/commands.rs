//! Subcommand implementations.

use std::path::{Path, PathBuf};

use scbp_core::corpus::{self, read_manifest, scan_timit_dir};
use scbp_core::experiment::{config_summary, load_config, read_trials_csv, write_report};
use scbp_core::seed::derive_seed;
use scbp_core::{
    aggregate, bp_recover, compressive_sample, gen_sensing_matrix, learn_envelope,
    measurement_count, nmse, run_experiment, save_envelope, scbp_recover, split_blocks,
    Error as CoreError, LpStatus, Method, SignalBlock, StructureEnvelope, SyntheticCorpusConfig,
};

use crate::{ExperimentArgs, LearnArgs, RecoverArgs, ReportArgs};

pub struct CliError {
    /// 1 for runtime failures, 2 for configuration/usage errors.
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(err: CoreError) -> Self {
        CliError {
            code: 1,
            message: err.to_string(),
        }
    }
}

/// Errors raised while resolving arguments/config are exit code 2; errors
/// raised while doing the work are exit code 1.
fn as_config(err: CoreError) -> CliError {
    CliError {
        code: 2,
        message: err.to_string(),
    }
}

pub fn learn(args: LearnArgs) -> Result<(), CliError> {
    let sources = args.synthetic_seed.is_some() as u8
        + args.manifest.is_some() as u8
        + args.timit_dir.is_some() as u8;
    if sources != 1 {
        return Err(CliError::config(
            "exactly one of --synthetic-seed, --manifest, --timit-dir must be given",
        ));
    }

    let training: Vec<SignalBlock> = if let Some(seed) = args.synthetic_seed {
        let cfg = SyntheticCorpusConfig {
            n_train: args.n_train,
            n_test: 1,
            block_length: args.block_length,
            sparsity: args.sparsity,
            band_fraction: args.band_fraction,
            noise_floor: args.noise_floor,
            seed,
        };
        cfg.validate().map_err(as_config)?;
        eprintln!(
            "learn: synthetic corpus (seed {seed}, n_train {}, block {}, sparsity {}, band {}, noise {}) label={} out={}",
            cfg.n_train,
            cfg.block_length,
            cfg.sparsity,
            cfg.band_fraction,
            cfg.noise_floor,
            args.label,
            args.out.display()
        );
        let (train, _) = corpus::generate_synthetic_corpus(&cfg).map_err(CliError::runtime)?;
        train
    } else {
        let entries = if let Some(manifest) = &args.manifest {
            eprintln!(
                "learn: manifest {} label={} out={}",
                manifest.display(),
                args.label,
                args.out.display()
            );
            read_manifest(manifest).map_err(as_config)?
        } else {
            let dir = args.timit_dir.as_ref().unwrap();
            eprintln!(
                "learn: timit dir {} partition {} label={} out={}",
                dir.display(),
                args.partition,
                args.label,
                args.out.display()
            );
            scan_timit_dir(dir, &args.partition).map_err(as_config)?
        };
        let vectors =
            corpus::load_phoneme_corpus(&entries, &args.label).map_err(CliError::runtime)?;
        let blocks: Vec<SignalBlock> = vectors.into_iter().flat_map(|v| v.blocks).collect();
        if blocks.is_empty() {
            return Err(CliError {
                code: 1,
                message: format!(
                    "no segments labeled {:?} found in the training corpus",
                    args.label
                ),
            });
        }
        blocks
    };

    let env = learn_envelope(&training, &args.label).map_err(CliError::runtime)?;
    save_envelope(&env, &args.out).map_err(CliError::runtime)?;

    let widths: Vec<f64> = env
        .beta_u
        .iter()
        .zip(&env.beta_l)
        .map(|(u, l)| u - l)
        .collect();
    let mean_width = widths.iter().sum::<f64>() / widths.len() as f64;
    let max_width = widths.iter().cloned().fold(0.0f64, f64::max);
    println!("training_count = {}", env.training_count);
    println!("envelope_mean_width = {mean_width:.6e}");
    println!("envelope_max_width = {max_width:.6e}");
    println!("saved {}", args.out.display());
    Ok(())
}

fn read_input(path: &Path, raw_rate: Option<u32>) -> Result<SignalBlock, CliError> {
    match raw_rate {
        Some(rate) => corpus::read_raw_pcm16(path, rate).map_err(CliError::runtime),
        None => corpus::read_wav(path).map_err(CliError::runtime),
    }
}

pub fn recover(args: RecoverArgs) -> Result<(), CliError> {
    let method: Method = args
        .method
        .parse()
        .map_err(|_| CliError::config(format!("unknown method {:?}", args.method)))?;
    if method == Method::Scbp && args.envelope.is_none() {
        return Err(CliError::config("--method scbp requires --envelope"));
    }
    if args.cr < 1.0 {
        return Err(CliError::config(format!("--cr {} must be >= 1", args.cr)));
    }
    let envelope: Option<StructureEnvelope> = match &args.envelope {
        Some(path) => Some(scbp_core::load_envelope(path).map_err(as_config)?),
        None => None,
    };
    let out_path = args.out.clone().unwrap_or_else(|| {
        let mut p = args.input.as_os_str().to_owned();
        p.push(".recovered.wav");
        PathBuf::from(p)
    });
    eprintln!(
        "recover: input={} method={method} cr={} epsilon={} seed={} envelope={} out={}",
        args.input.display(),
        args.cr,
        args.epsilon,
        args.seed,
        args.envelope
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "none".into()),
        out_path.display()
    );

    let input = read_input(&args.input, args.raw_rate)?;
    let blocks = split_blocks(&input).map_err(CliError::runtime)?;
    let truth_blocks: Option<Vec<SignalBlock>> = match &args.truth {
        Some(path) => {
            let t = read_input(path, args.raw_rate)?;
            if t.len() != input.len() {
                return Err(CliError::config(format!(
                    "--truth length {} does not match input length {}",
                    t.len(),
                    input.len()
                )));
            }
            Some(split_blocks(&t).map_err(CliError::runtime)?)
        }
        None => None,
    };

    let mut recovered = Vec::with_capacity(input.len());
    let mut failures = 0usize;
    let mut errors = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        let n = block.len();
        let m = measurement_count(n, args.cr).map_err(CliError::runtime)?;
        let seed = derive_seed(args.seed, 0, i as u64, 0);
        let phi = gen_sensing_matrix(n, m, seed).map_err(CliError::runtime)?;
        let b = compressive_sample(&phi, block).map_err(CliError::runtime)?;
        let result = match method {
            Method::Bp => bp_recover(&phi, &b),
            Method::Scbp => scbp_recover(&phi, &b, envelope.as_ref().unwrap(), args.epsilon),
        }
        .map_err(CliError::runtime)?;
        if result.status != LpStatus::Optimal {
            failures += 1;
            eprintln!("block {i}: recovery failed with status {}", result.status);
        }
        if let Some(truth) = &truth_blocks {
            match nmse(&truth[i], &result.x_hat) {
                Ok(v) => println!("block {i}: n={n} m={m} nmse = {v:.17e}"),
                Err(_) => println!("block {i}: n={n} m={m} nmse undefined (zero-energy truth)"),
            }
        }
        recovered.extend_from_slice(&result.x_hat.samples);
        errors.push(result.status);
    }

    let out_block = SignalBlock::with_source(recovered, input.sample_rate, "recovered");
    corpus::write_wav(&out_path, &out_block).map_err(CliError::runtime)?;
    println!(
        "recovered {} blocks ({} failed) -> {}",
        blocks.len(),
        failures,
        out_path.display()
    );
    Ok(())
}

pub fn experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.config).map_err(as_config)?;
    eprint!("{}", config_summary(&cfg));
    eprintln!("out = {}", args.out.display());

    let run = match args.threads {
        Some(k) if k > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::config(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run_experiment(&cfg))
        }
        _ => run_experiment(&cfg),
    }
    .map_err(CliError::runtime)?;

    write_report(&run.report, &run.records, &args.out).map_err(CliError::runtime)?;
    print!("{}", scbp_core::experiment::render_summary(&run.report));
    println!("wrote {}", args.out.display());
    Ok(())
}

pub fn report(args: ReportArgs) -> Result<(), CliError> {
    eprintln!(
        "report: trials={} bins={} out={}",
        args.trials.display(),
        args.bins,
        args.out.display()
    );
    let records = read_trials_csv(&args.trials).map_err(CliError::runtime)?;
    let report = aggregate(&records, args.bins).map_err(CliError::runtime)?;
    write_report(&report, &records, &args.out).map_err(CliError::runtime)?;
    print!("{}", scbp_core::experiment::render_summary(&report));
    println!("wrote {}", args.out.display());
    Ok(())
}

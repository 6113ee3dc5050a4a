//! Command-line front end. [`run`] returns the process exit status:
//! 0 on success, 1 for usage errors, 2 for bad input data, 3 when the beam
//! collapses.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::accounting::{memory_report, timing_harness, StorageParams, TimingConfig};
use crate::alphabet::Alphabet;
use crate::beam::{BeamDecoder, DecodeConfig, ExactArith, FixedArith};
use crate::dict::{compile, report_sizes, CompiledDict, DictWidths, FORMAT_VERSION};
use crate::error::{DecodeError, IoError};
use crate::io::{read_alphabet, read_logits, read_words, ConfigFile};
use crate::lm::{extend_probs, resolve_prefix};
use crate::reference::{decode_reference, WordListLm};
use crate::softmax::{softmax_approx, softmax_exact, softmax_exact_frame, LogitFrame, SoftmaxParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_COLLAPSE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ctcfx", version, about = "Fixed-point CTC beam search with a compressed dictionary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a word list into a dictionary blob.
    CompileDict {
        #[arg(long)]
        words: PathBuf,
        #[arg(long)]
        alphabet: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a dictionary's header and sizes; optionally probe a prefix or list every word.
    InspectDict {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        alphabet: Option<PathBuf>,
        #[arg(long)]
        probe: Option<String>,
        #[arg(long)]
        enumerate: bool,
    },
    /// Decode a logits file with the fixed-point pipeline.
    Decode {
        #[arg(long)]
        logits: PathBuf,
        /// Dictionary blob, or `none`.
        #[arg(long, default_value = "none")]
        dict: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        alphabet: Option<PathBuf>,
        /// Per-step beam dump as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Exact and approximate softmax of every frame, as CSV.
    Softmax {
        #[arg(long)]
        logits: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the fixed-point decoder, the exact decoder and the textbook search side by side.
    Compare(CompareArgs),
    /// Storage of the beam before and after the improvements.
    ReportMemory {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        w: u64,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 30)]
        prob_bits: u64,
        #[arg(long, default_value_t = 19)]
        sl_bits: u64,
    },
    /// Time the textbook search against the bounded decoder on synthetic frames.
    Bench {
        #[arg(long)]
        frames: usize,
        #[arg(long, default_value_t = 28)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        w: usize,
        #[arg(long, default_value_t = 2021)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Logits file; omit and pass `--random` for seeded random instances.
    #[arg(long)]
    logits: Option<PathBuf>,
    /// Word list used as the language model.
    #[arg(long)]
    dict: Option<PathBuf>,
    #[arg(long)]
    alphabet: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    w: usize,
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Labels per random instance (blank excluded).
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Frames per random instance.
    #[arg(long, default_value_t = 30)]
    t: usize,
}

enum Failure {
    Usage(String),
    Data(String),
    Collapse(String),
}

impl Failure {
    fn data(e: impl Display) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::data(e)
    }
}

impl From<crate::error::DictError> for Failure {
    fn from(e: crate::error::DictError) -> Self {
        Failure::data(e)
    }
}

impl From<crate::error::OracleError> for Failure {
    fn from(e: crate::error::OracleError) -> Self {
        Failure::data(e)
    }
}

impl From<DecodeError> for Failure {
    fn from(e: DecodeError) -> Self {
        match e {
            DecodeError::BeamCollapse { .. } => Failure::Collapse(e.to_string()),
            _ => Failure::data(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::data(e)
    }
}

type Outcome = Result<(), Failure>;

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::CompileDict { words, alphabet, out: dest } => {
            compile_dict(&words, alphabet.as_deref(), &dest, out)
        }
        Command::InspectDict {
            dict,
            alphabet,
            probe,
            enumerate,
        } => inspect_dict(&dict, alphabet.as_deref(), probe.as_deref(), enumerate, out),
        Command::Decode {
            logits,
            dict,
            config,
            alphabet,
            trace,
        } => decode_cmd(
            &logits,
            &dict,
            config.as_deref(),
            alphabet.as_deref(),
            trace.as_deref(),
            out,
        ),
        Command::Softmax { logits, config, out: dest } => {
            softmax_cmd(&logits, config.as_deref(), dest.as_deref(), out)
        }
        Command::Compare(args) => compare(&args, out),
        Command::ReportMemory {
            k,
            w,
            t,
            prob_bits,
            sl_bits,
        } => report_memory(k, w, t, prob_bits, sl_bits, out),
        Command::Bench { frames, k, w, seed } => bench(frames, k, w, seed, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Data(m) => (EXIT_DATA, m),
                Failure::Collapse(m) => (EXIT_COLLAPSE, m),
            };
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn load_alphabet(path: Option<&Path>) -> Result<Alphabet, Failure> {
    match path {
        Some(p) => Ok(read_alphabet(p)?),
        None => Ok(Alphabet::english()),
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, Failure> {
    match path {
        Some(p) => Ok(ConfigFile::read(p)?),
        None => Ok(ConfigFile::default()),
    }
}

fn load_dict(path: &Path) -> Result<CompiledDict, Failure> {
    Ok(CompiledDict::from_bytes(&std::fs::read(path)?)?)
}

/// Labels as text when the alphabet fits, else as space-separated indices.
fn render(alphabet: Option<&Alphabet>, labels: &[u16]) -> String {
    match alphabet {
        Some(a) => a.render(labels),
        None => labels
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    }
}

fn matching_alphabet(path: Option<&Path>, k: usize) -> Result<Option<Alphabet>, Failure> {
    let a = load_alphabet(path)?;
    if a.k() == k {
        Ok(Some(a))
    } else if path.is_some() {
        Err(Failure::Data(format!(
            "alphabet has K = {}, input has K = {k}",
            a.k()
        )))
    } else {
        Ok(None)
    }
}

fn compile_dict(words: &Path, alphabet: Option<&Path>, dest: &Path, out: &mut dyn Write) -> Outcome {
    let alphabet = load_alphabet(alphabet)?;
    let words = read_words(words)?;
    let widths = DictWidths::for_alphabet(&alphabet);
    let dict = compile(&words, &alphabet, widths)?;
    std::fs::write(dest, dict.to_bytes())?;
    let sizes = report_sizes(&words, &alphabet, widths)?;
    writeln!(out, "nodes: {}", dict.node_count())?;
    writeln!(out, "compressed bits: {}", sizes.compressed_bits)?;
    Ok(())
}

fn inspect_dict(
    path: &Path,
    alphabet: Option<&Path>,
    probe: Option<&str>,
    enumerate: bool,
    out: &mut dyn Write,
) -> Outcome {
    let dict = load_dict(path)?;
    let alphabet = matching_alphabet(alphabet, dict.k())?;
    let w = dict.widths();
    writeln!(out, "format version: {FORMAT_VERSION}")?;
    writeln!(out, "K: {}", dict.k())?;
    writeln!(
        out,
        "widths: char {} rel {} addr {}",
        w.char_bits, w.rel_bits, w.addr_bits
    )?;
    writeln!(out, "nodes: {}", dict.node_count())?;
    let words = dict.enumerate()?;
    let label_bits = crate::alphabet::ceil_log2(dict.k() as u64) as u64;
    let mut sizes = crate::dict::SizeReport::from_node_count(dict.node_count() as u64, dict.k() as u64, w);
    sizes.list_bits = words.iter().map(|x| (x.len() as u64 + 1) * label_bits).sum();
    writeln!(out, "words: {}", words.len())?;
    writeln!(out, "list bits: {}", sizes.list_bits)?;
    writeln!(out, "matrix trie bits: {}", sizes.matrix_trie_bits)?;
    writeln!(out, "binary trie bits: {}", sizes.binary_trie_bits)?;
    writeln!(out, "compressed bits: {}", sizes.compressed_bits)?;
    if let Some(prefix) = probe {
        let a = alphabet
            .as_ref()
            .ok_or_else(|| Failure::Usage("--probe needs an alphabet matching the dictionary".into()))?;
        let labels = prefix
            .chars()
            .map(|c| {
                a.index_of(c)
                    .ok_or_else(|| Failure::Usage(format!("{c:?} is not in the alphabet")))
            })
            .collect::<Result<Vec<u16>, _>>()?;
        match resolve_prefix(&dict, &labels)? {
            None => writeln!(out, "probe {prefix:?}: not in dictionary")?,
            Some(dp) => {
                let v = extend_probs(&dict, dp)?;
                writeln!(out, "probe {prefix:?}: pointer {dp}")?;
                for l in v.allowed_labels() {
                    writeln!(out, "  {} -> {}", render(Some(a), &[l]), v.next(l))?;
                }
            }
        }
    }
    if enumerate {
        for word in &words {
            writeln!(out, "{}", render(alphabet.as_ref(), word))?;
        }
    }
    Ok(())
}

fn decode_cmd(
    logits: &Path,
    dict: &str,
    config: Option<&Path>,
    alphabet: Option<&Path>,
    trace: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let file = read_logits(logits)?;
    let config = load_config(config)?;
    let dict = if dict == "none" {
        None
    } else {
        Some(load_dict(Path::new(dict))?)
    };
    let k = file.k();
    let alphabet = matching_alphabet(alphabet, k)?;
    let decode_config = config.decode_config(k, dict.is_some())?;
    let params = config.softmax_params()?;
    let frames = file.frames();
    if frames.is_empty() {
        return Err(DecodeError::NoFrames.into());
    }

    let arith = FixedArith::new(decode_config.q);
    let q = decode_config.q;
    let mut dec = BeamDecoder::new(decode_config, arith, dict.as_ref())?;
    let mut trace_out = match trace {
        Some(p) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(p)?);
            writeln!(f, "t,slot,pr,pr_plus,pr_minus,sl,sentence")?;
            Some(f)
        }
        None => None,
    };
    for (t, frame) in frames.iter().enumerate() {
        let probs = softmax_approx(frame, &params, q);
        dec.step(&probs)?;
        if let Some(f) = trace_out.as_mut() {
            for (i, s) in dec.state().occupied() {
                writeln!(
                    f,
                    "{t},{i},{},{},{},{},{}",
                    s.pr.to_f64(),
                    s.pr_plus.to_f64(),
                    s.pr_minus.to_f64(),
                    s.sl,
                    render(alphabet.as_ref(), &s.sentence)
                )?;
            }
        }
    }
    if let Some(mut f) = trace_out {
        f.flush()?;
    }
    let result = dec.finish()?;
    writeln!(out, "{}", render(alphabet.as_ref(), &result.sentence))?;
    Ok(())
}

fn softmax_cmd(logits: &Path, config: Option<&Path>, dest: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let file = read_logits(logits)?;
    let config = load_config(config)?;
    let params = config.softmax_params()?;
    let q = config.q;
    let mut csv = String::from("t,label,logit,exact,approx,abs_err\n");
    let mut max_err = 0.0f64;
    let mut total = 0.0;
    let mut count = 0usize;
    for (t, frame) in file.frames().iter().enumerate() {
        let exact = softmax_exact_frame(frame);
        let approx = softmax_approx(frame, &params, q);
        for (i, ((l, e), a)) in frame.0.iter().zip(&exact).zip(&approx).enumerate() {
            let err = (a.to_f64() - e).abs();
            max_err = max_err.max(err);
            total += err;
            count += 1;
            csv.push_str(&format!(
                "{t},{},{},{e:.9},{:.9},{err:.9}\n",
                i + 1,
                l.to_f64(),
                a.to_f64()
            ));
        }
    }
    let mean = if count == 0 { 0.0 } else { total / count as f64 };
    let summary = format!("frames: {}\nmax abs error: {max_err:.6}\nmean abs error: {mean:.6}\n", file.t);
    match dest {
        Some(p) => {
            std::fs::write(p, csv)?;
            write!(out, "{summary}")?;
        }
        None => write!(out, "{csv}{summary}")?,
    }
    Ok(())
}

fn fixed_decode(
    frames: &[LogitFrame],
    dict: Option<&CompiledDict>,
    config: &DecodeConfig,
    params: &SoftmaxParams,
) -> Result<Vec<u16>, DecodeError> {
    let mut dec = BeamDecoder::new(config.clone(), FixedArith::new(config.q), dict)?;
    for f in frames {
        dec.step(&softmax_approx(f, params, config.q))?;
    }
    Ok(dec.finish()?.sentence)
}

fn exact_decode<F: AsRef<[f64]>>(
    probs: &[F],
    dict: Option<&CompiledDict>,
    config: &DecodeConfig,
) -> Result<Vec<u16>, DecodeError> {
    Ok(crate::beam::decode(probs, dict, config, ExactArith)?.sentence)
}

fn random_probs(rng: &mut ChaCha8Rng, t: usize, k: usize) -> Vec<Vec<f64>> {
    (0..t)
        .map(|_| {
            let logits: Vec<f64> = (0..=k).map(|_| rng.random_range(-3.0..3.0)).collect();
            softmax_exact(&logits)
        })
        .collect()
}

fn compare(args: &CompareArgs, out: &mut dyn Write) -> Outcome {
    if args.w == 0 {
        return Err(Failure::Usage("--w must be positive".into()));
    }
    let lm_words = match &args.dict {
        Some(p) => Some(read_words(p)?),
        None => None,
    };
    let build_lm = |k: usize| -> Result<Option<(Alphabet, CompiledDict, WordListLm)>, Failure> {
        let Some(words) = &lm_words else { return Ok(None) };
        let a = load_alphabet(args.alphabet.as_deref())?;
        if a.k() != k {
            return Err(Failure::Data(format!("alphabet has K = {}, input has K = {k}", a.k())));
        }
        let dict = compile(words, &a, DictWidths::for_alphabet(&a))?;
        let lm = WordListLm::from_words(words, &a)?;
        Ok(Some((a, dict, lm)))
    };

    match (&args.logits, args.random) {
        (Some(path), None) => {
            let file = read_logits(path)?;
            let k = file.k();
            let lm = build_lm(k)?;
            let config = DecodeConfig::new(k, args.w).with_lm(lm.is_some());
            let frames = file.frames();
            if frames.is_empty() {
                return Err(DecodeError::NoFrames.into());
            }
            let probs: Vec<Vec<f64>> = file.rows_f64().iter().map(|r| softmax_exact(r)).collect();
            let dict = lm.as_ref().map(|x| &x.1);
            let fixed = fixed_decode(&frames, dict, &config, &SoftmaxParams::default())?;
            let exact = exact_decode(&probs, dict, &config)?;
            let reference = decode_reference(&probs, lm.as_ref().map(|x| &x.2), args.w)?;
            let alphabet = match &lm {
                Some((a, _, _)) => Some(a.clone()),
                None => matching_alphabet(args.alphabet.as_deref(), k)?,
            };
            writeln!(out, "fixed:     {}", render(alphabet.as_ref(), &fixed))?;
            writeln!(out, "exact:     {}", render(alphabet.as_ref(), &exact))?;
            writeln!(out, "reference: {}", render(alphabet.as_ref(), &reference.sentence))?;
            let verdict = |a: bool| if a { "agree" } else { "differ" };
            writeln!(out, "exact vs reference: {}", verdict(exact == reference.sentence))?;
            writeln!(out, "fixed vs exact: {}", verdict(fixed == exact))?;
            if reference.tie {
                writeln!(out, "note: near-tie during the reference search")?;
            }
            Ok(())
        }
        (None, Some(n)) => {
            if args.k == 0 || args.t == 0 {
                return Err(Failure::Usage("--k and --t must be positive".into()));
            }
            let lm = build_lm(args.k)?;
            let config = DecodeConfig::new(args.k, args.w).with_lm(lm.is_some());
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let mut agree = 0;
            let mut redrawn = 0;
            let mut done = 0;
            while done < n {
                let probs = random_probs(&mut rng, args.t, args.k);
                let reference = decode_reference(&probs, lm.as_ref().map(|x| &x.2), args.w)?;
                if reference.tie {
                    redrawn += 1;
                    continue;
                }
                let exact = exact_decode(&probs, lm.as_ref().map(|x| &x.1), &config)?;
                agree += usize::from(exact == reference.sentence);
                done += 1;
            }
            writeln!(out, "{agree}/{n} agree")?;
            if redrawn > 0 {
                writeln!(out, "redrawn after near-ties: {redrawn}")?;
            }
            Ok(())
        }
        _ => Err(Failure::Usage("pass exactly one of --logits or --random".into())),
    }
}

fn report_memory(k: u64, w: u64, t: u64, prob_bits: u64, sl_bits: u64, out: &mut dyn Write) -> Outcome {
    if k < 2 || w == 0 || prob_bits == 0 {
        return Err(Failure::Usage("need K >= 2, W >= 1 and a positive probability width".into()));
    }
    let r = memory_report(StorageParams {
        k,
        w,
        t,
        prob_bits,
        sl_bits,
    });
    writeln!(out, "{}\n", r.original)?;
    writeln!(out, "{}\n", r.first_improvement)?;
    writeln!(out, "{}\n", r.improved)?;
    writeln!(out, "{}\n", r.as_built)?;
    writeln!(out, "ratio: {:.2}", r.ratio)?;
    Ok(())
}

fn bench(frames: usize, k: usize, w: usize, seed: u64, out: &mut dyn Write) -> Outcome {
    if k == 0 || w == 0 {
        return Err(Failure::Usage("--k and --w must be positive".into()));
    }
    let cfg = TimingConfig {
        k,
        w,
        seed,
        ..TimingConfig::default()
    };
    let r = timing_harness(frames, &cfg)?;
    writeln!(out, "frames: {}", r.frames)?;
    writeln!(out, "utterances: {}", r.utterances)?;
    writeln!(out, "tau_original: {:.3} s", r.tau_original.as_secs_f64())?;
    writeln!(out, "tau_improved: {:.3} s", r.tau_improved.as_secs_f64())?;
    Ok(())
}

//! Command dispatch. [`run`] never exits the process; it returns the exit
//! code and both output streams so tests can drive it directly.
//!
//! Exit codes: 0 and 1 mirror a yes/no verdict, 2 is any input error, and
//! `classify` uses 3 for an unknown verdict.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::abelian::{abelianize, abelianize_hom, classify_family, factorize_gl2, FamilyVerdict};
use crate::folding::{image_graph, is_invertible, subgroup_rank};
use crate::format::{
    parse_czz, parse_hom, parse_matrix, parse_stream, parse_substitution, render_matrix, render_substitution,
};
use crate::freegroup::is_positive_hom;
use crate::rewrite::{junction_candidates, language, rewrite_proper, rewrite_proper_auto, Junction};
use crate::symbolic::{compose, is_degenerate_proper, is_primitive, is_proper, Substitution};
use crate::trope::{solve_conjugator, verify_czz};

#[derive(Debug, Parser)]
#[command(name = "flowtrope", version, about = "Substitutions, free group maps and flow equivalence invariants")]
struct Cli {
    /// Resolve relative input paths against this directory.
    #[arg(long, global = true, value_name = "DIR")]
    fixtures: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symbolic substitutions.
    #[command(subcommand)]
    Sub(SubCmd),
    /// Free group homomorphisms and their abelianizations.
    #[command(subcommand)]
    Hom(HomCmd),
    /// Conjugacy of positive homomorphisms.
    #[command(subcommand)]
    Trope(TropeCmd),
    /// Compare the flow spaces of two label streams.
    Classify(ClassifyArgs),
}

#[derive(Debug, Subcommand)]
enum SubCmd {
    /// Report proper, degenerate-proper, primitive and surjective flags.
    Check { file: PathBuf },
    /// Print OUTER ∘ INNER.
    Compose { outer: PathBuf, inner: PathBuf },
    /// List the factors of the given length, sorted.
    Language {
        file: PathBuf,
        #[arg(long)]
        length: usize,
    },
    /// Rewrite into a proper substitution on return words.
    Rewrite {
        file: PathBuf,
        /// Junction letters `a,b`.
        #[arg(long)]
        junction: String,
        #[arg(long)]
        horizon: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum HomCmd {
    /// Decide invertibility by folding the image graph.
    Invertible { file: PathBuf },
    /// Print the letter-count matrix.
    Abelianize { file: PathBuf },
    /// Factor a nonnegative unimodular 2×2 matrix such as "5 3; 3 2".
    Factorize { matrix: String },
}

#[derive(Debug, Subcommand)]
enum TropeCmd {
    /// Find `a` with F = c_a G.
    Relate { f: PathBuf, g: PathBuf },
    /// Verify a conjugate zigzag diagram.
    Czz { file: PathBuf },
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Label stream such as `s,s|s,r`.
    a: String,
    b: String,
    /// `label=FILE`, or `FILE` labelled by its file stem.
    #[arg(long = "dict", required = true, num_args = 1..)]
    dict: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    fixtures: Option<PathBuf>,
}

impl Ctx {
    fn read(&self, path: &Path) -> Result<String> {
        let full = match &self.fixtures {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        };
        std::fs::read_to_string(&full).with_context(|| format!("reading {}", full.display()))
    }

    fn substitution(&self, path: &Path) -> Result<Substitution> {
        parse_substitution(&self.read(path)?).with_context(|| format!("parsing {}", path.display()))
    }

    fn hom(&self, path: &Path) -> Result<crate::format::NamedHom> {
        parse_hom(&self.read(path)?).with_context(|| format!("parsing {}", path.display()))
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let ctx = Ctx { fixtures: cli.fixtures };
    let mut out = String::new();
    match dispatch(&ctx, cli.command, &mut out) {
        Ok(code) => Outcome { code, stdout: out, stderr: String::new() },
        Err(e) => Outcome { code: 2, stdout: out, stderr: format!("error: {e:#}\n") },
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn dispatch(ctx: &Ctx, command: Command, out: &mut String) -> Result<i32> {
    match command {
        Command::Sub(cmd) => sub(ctx, cmd, out),
        Command::Hom(cmd) => hom(ctx, cmd, out),
        Command::Trope(cmd) => trope(ctx, cmd, out),
        Command::Classify(args) => classify(ctx, args, out),
    }
}

fn sub(ctx: &Ctx, cmd: SubCmd, out: &mut String) -> Result<i32> {
    match cmd {
        SubCmd::Check { file } => {
            let s = ctx.substitution(&file)?;
            writeln!(out, "proper: {}", yes_no(is_proper(&s)))?;
            writeln!(out, "degenerate-proper: {}", yes_no(is_degenerate_proper(&s)))?;
            writeln!(out, "primitive: {}", yes_no(is_primitive(&s)))?;
            // construction already rejects non-surjective maps
            writeln!(out, "surjective: yes")?;
            Ok(0)
        }
        SubCmd::Compose { outer, inner } => {
            let c = compose(&ctx.substitution(&outer)?, &ctx.substitution(&inner)?)?;
            out.push_str(&render_substitution(&c));
            Ok(0)
        }
        SubCmd::Language { file, length } => {
            let table = language(&ctx.substitution(&file)?, length)?;
            for w in table.spelled(length) {
                writeln!(out, "{w}")?;
            }
            Ok(0)
        }
        SubCmd::Rewrite { file, junction, horizon } => {
            let s = ctx.substitution(&file)?;
            let (l, r) = junction
                .split_once(',')
                .ok_or_else(|| anyhow!("junction must be written `a,b`"))?;
            let find = |sym: &str| {
                s.source()
                    .index_of(sym.trim())
                    .ok_or_else(|| anyhow!("junction symbol {sym:?} is not in the alphabet"))
            };
            let (left, right) = (find(l)?, find(r)?);
            let n = s.source().len();
            let j = junction_candidates(&s, n * n)?
                .into_iter()
                .find(|j| j.left == left && j.right == right)
                .ok_or_else(|| anyhow!("{l},{r} is not a junction of this substitution"))?;
            let rw = match horizon {
                Some(h) => rewrite_proper(&s, j, h)?,
                None => rewrite_proper_auto(&s, j)?,
            };
            let names = rw.rewritten.source();
            for (i, t) in rw.tiles.iter().enumerate() {
                writeln!(out, "# tile {} = {}", names.symbol(i), s.source().spell(t))?;
            }
            let Junction { left, right, k } = rw.junction;
            writeln!(out, "# junction {},{} k={k}", s.source().symbol(left), s.source().symbol(right))?;
            out.push_str(&render_substitution(&rw.rewritten));
            Ok(0)
        }
    }
}

fn hom(ctx: &Ctx, cmd: HomCmd, out: &mut String) -> Result<i32> {
    match cmd {
        HomCmd::Invertible { file } => {
            let h = ctx.hom(&file)?.hom;
            let yes = is_invertible(&h)?;
            let g = image_graph(&h)?;
            writeln!(out, "{}", if yes { "invertible" } else { "not-invertible" })?;
            writeln!(out, "vertices: {}", g.vertex_count())?;
            writeln!(out, "edges: {}", g.edge_count())?;
            writeln!(out, "rank: {}", subgroup_rank(&g)?)?;
            Ok(if yes { 0 } else { 1 })
        }
        HomCmd::Abelianize { file } => {
            let text = ctx.read(&file)?;
            let m = match parse_substitution(&text) {
                Ok(s) => abelianize(&s),
                Err(_) => abelianize_hom(&parse_hom(&text).with_context(|| format!("parsing {}", file.display()))?.hom),
            };
            writeln!(out, "{}", render_matrix(&m))?;
            Ok(0)
        }
        HomCmd::Factorize { matrix } => {
            let m = parse_matrix(&matrix)?;
            writeln!(out, "{}", factorize_gl2(&m)?)?;
            Ok(0)
        }
    }
}

fn trope(ctx: &Ctx, cmd: TropeCmd, out: &mut String) -> Result<i32> {
    match cmd {
        TropeCmd::Relate { f, g } => {
            let (f, g) = (ctx.hom(&f)?, ctx.hom(&g)?);
            for (h, name) in [(&f, "first"), (&g, "second")] {
                if !is_positive_hom(&h.hom) {
                    bail!("{name} map is not positive");
                }
            }
            match solve_conjugator(&f.hom, &g.hom)? {
                Some(a) if a.is_empty() => {
                    writeln!(out, "witness: (empty)")?;
                    Ok(0)
                }
                Some(a) => {
                    writeln!(out, "witness: {}", a.display_with(&f.target))?;
                    Ok(0)
                }
                None => {
                    writeln!(out, "not-related")?;
                    Ok(1)
                }
            }
        }
        TropeCmd::Czz { file } => {
            let (_, w) = parse_czz(&ctx.read(&file)?).with_context(|| format!("parsing {}", file.display()))?;
            let report = verify_czz(&w)?;
            match report.first_failure {
                None => {
                    writeln!(out, "ok")?;
                    Ok(0)
                }
                Some(f) => {
                    writeln!(out, "fails at {}: {}", f.triangle, f.reason)?;
                    Ok(1)
                }
            }
        }
    }
}

fn classify(ctx: &Ctx, args: ClassifyArgs, out: &mut String) -> Result<i32> {
    let a = parse_stream(&args.a).context("first stream")?;
    let b = parse_stream(&args.b).context("second stream")?;
    let mut dict = BTreeMap::new();
    for entry in &args.dict {
        let (label, path) = match entry.split_once('=') {
            Some((l, p)) => (l.trim().to_owned(), PathBuf::from(p)),
            None => {
                let p = PathBuf::from(entry);
                let stem = p
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .ok_or_else(|| anyhow!("cannot derive a label from {entry:?}"))?
                    .to_owned();
                (stem, p)
            }
        };
        if dict.insert(label.clone(), ctx.substitution(&path)?).is_some() {
            bail!("label {label:?} given twice");
        }
    }
    let (code, word, reason) = match classify_family(&a, &b, &dict)? {
        FamilyVerdict::FlowEquivalent(r) => (0, "flow-equivalent", r),
        FamilyVerdict::Distinct(r) => (1, "distinct", r),
        FamilyVerdict::Unknown(r) => (3, "unknown", r),
    };
    writeln!(out, "{word}")?;
    writeln!(out, "reason: {reason}")?;
    Ok(code)
}

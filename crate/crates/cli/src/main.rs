//! Command-line front end: verification suites, membership queries,
//! certification, and DOT export.

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resfin_core::{
    certify, check, kernel_witness, Alphabet, CertCase, Certificate, CoreGraph, DoubleElement,
    Error, FreeWord, Report, Side, SquaringSystem,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "resfin",
    version,
    about = "Verification and certification toolkit for a tower subgroup of a rank-2 free group \
             and the double glued along it"
)]
struct Cli {
    /// Seed for the randomized suites
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Vertex budget for graph constructions
    #[arg(long, global = true, default_value_t = 1 << 20)]
    max_vertices: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites; exit 0 exactly when every check passes
    Verify {
        /// Depth of the kernel chain and strict-increase checks
        #[arg(long, default_value_t = 10)]
        n: u32,

        /// Largest tower generator for invariance and decomposition checks
        #[arg(long, default_value_t = 12)]
        m: u32,

        /// Word length for the exhaustive membership-agreement sweep
        #[arg(long, default_value_t = 7)]
        l: u32,
    },

    /// Decide membership of a word in the tower subgroup or an approximation
    Member {
        /// Word in the shared grammar, e.g. "t^3 a^8 t^-3"
        word: String,

        /// Target subgroup: H or Hr:<r>
        #[arg(long = "in")]
        target: String,
    },

    /// Certify that an element of the double is nontrivial
    Certify {
        /// Element expression, e.g. "[t^2 a^-1 t^-2] * [t^2 a t^-2]'"
        expr: String,

        /// Spot-check this many tower generators inside the cover
        #[arg(long, default_value_t = 8)]
        m: u32,

        /// Write the certificate here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Re-verify a stored certificate from its own data
    Check { path: PathBuf },

    /// Print a graph in DOT form
    Dot {
        #[command(flatten)]
        target: DotTarget,

        /// Write the DOT text here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Fold a generator list and print the resulting graph
    Fold {
        /// Generator words
        #[arg(long, num_args = 1.., required = true)]
        gens: Vec<String>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct DotTarget {
    /// Truncated core of the tower cover at this level
    #[arg(long)]
    bhat: Option<u32>,

    /// Directly constructed approximation core at this level
    #[arg(long)]
    bhat_r: Option<u32>,

    /// Folded approximation subgroup graph at this level
    #[arg(long)]
    hr: Option<u32>,

    /// Fold these generator words
    #[arg(long, num_args = 1..)]
    gens: Option<Vec<String>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let system = SquaringSystem::with_max_vertices(cli.max_vertices);
    match cli.command {
        Command::Verify { n, m, l } => Ok(cmd_verify(&system, n, m, l, cli.seed)),
        Command::Member { word, target } => cmd_member(&system, &word, &target),
        Command::Certify { expr, m, out } => cmd_certify(&system, &expr, m, out.as_deref()),
        Command::Check { path } => cmd_check(&path),
        Command::Dot { target, out } => cmd_dot(&system, &target, out.as_deref()),
        Command::Fold { gens } => cmd_fold(&system, &gens),
    }
}

fn cmd_verify(system: &SquaringSystem, n: u32, m: u32, l: u32, seed: u64) -> u8 {
    let mut reports = vec![
        run_suite("squaring-invariance", || {
            system.verify_squaring_invariance(m)
        }),
        run_suite("strict-increase", || system.verify_strict_increase(n)),
        kernel_suite(system, n),
        decomposition_suite(system, m),
    ];
    if l == 0 {
        println!("membership-agreement: skipped (l = 0)");
    } else {
        reports.push(run_suite("membership-agreement", || {
            system.verify_membership_agreement(l)
        }));
    }
    reports.push(cross_construction_suite(system));
    reports.push(hall_random_suite(system, seed));
    reports.push(certificate_random_suite(system, seed));

    let mut all = true;
    for report in &reports {
        print!("{report}");
        all &= report.passed();
    }
    u8::from(!all)
}

fn run_suite(name: &str, suite: impl FnOnce() -> Result<Report, Error>) -> Report {
    suite().unwrap_or_else(|e| {
        let mut report = Report::new(name);
        report.push("run", false, e.to_string());
        report
    })
}

fn kernel_suite(system: &SquaringSystem, n: u32) -> Report {
    let mut report = Report::new("kernel-witnesses");
    for level in 1..=n {
        match kernel_witness(system, level) {
            Ok(w) => report.push(format!("level-{level:02}"), true, w.to_string()),
            Err(e) => report.push(format!("level-{level:02}"), false, e.to_string()),
        }
    }
    report
}

fn decomposition_suite(system: &SquaringSystem, max_m: u32) -> Report {
    let mut report = Report::new("tower-decomposition");
    for m in 0..=max_m {
        for r in 0..=6 {
            let name = format!("m{m:02}-r{r}");
            match system.decompose_tower_generator(m, r) {
                Ok(d) => report.push(name, d.verified(), String::new()),
                Err(e) => report.push(name, false, e.to_string()),
            }
        }
    }
    report
}

fn cross_construction_suite(system: &SquaringSystem) -> Report {
    let mut report = Report::new("cross-construction");
    for r in 0..=6 {
        let name = format!("level-{r}");
        match (system.approx_graph(r), system.approx_core(r)) {
            (Ok(folded), Ok(direct)) => {
                let same = folded.rooted_isomorphic(&direct);
                let witness = format!(
                    "{} vertices, {} edges",
                    direct.vertex_count(),
                    direct.edge_count()
                );
                report.push(name, same, witness);
            }
            (Err(e), _) | (_, Err(e)) => report.push(name, false, e.to_string()),
        }
    }
    report
}

fn hall_random_suite(system: &SquaringSystem, seed: u64) -> Report {
    let mut report = Report::new("hall-random");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = system.alphabet();
    for i in 0..50 {
        let (gens, graph, avoided) =
            random_hall_instance(&mut rng, alphabet, system.max_vertices());
        let name = format!("instance-{i:02}");
        match graph.hall_complete(std::slice::from_ref(&avoided), system.max_vertices()) {
            Ok(cover) => {
                let good = cover.graph().is_complete()
                    && gens.iter().all(|g| cover.contains(g))
                    && !cover.contains(&avoided);
                report.push(name, good, format!("index {}", cover.index()));
            }
            Err(e) => report.push(name, false, e.to_string()),
        }
    }
    report
}

fn certificate_random_suite(system: &SquaringSystem, seed: u64) -> Report {
    let mut report = Report::new("certificate-random");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..10 {
        let element = random_nontrivial_element(&mut rng, system, 3, 5);
        let name = format!("element-{i:02}");
        let verified = certify(system, &element, 4).and_then(|cert| check(&cert));
        match verified {
            Ok(good) => report.push(name, good, element.to_string()),
            Err(e) => report.push(name, false, e.to_string()),
        }
    }
    report
}

fn random_reduced_word(rng: &mut ChaCha8Rng, alphabet: &Alphabet, max_len: usize) -> FreeWord {
    let len = rng.gen_range(1..=max_len);
    let mut letters: Vec<(char, i64)> = Vec::with_capacity(len);
    let mut prev: Option<(usize, i64)> = None;
    for _ in 0..len {
        loop {
            let gen = rng.gen_range(0..alphabet.rank());
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            if prev != Some((gen, -sign)) {
                letters.push((alphabet.symbol(gen), sign));
                prev = Some((gen, sign));
                break;
            }
        }
    }
    alphabet
        .reduce(&letters)
        .expect("letters come from the alphabet")
}

fn random_hall_instance(
    rng: &mut ChaCha8Rng,
    alphabet: &Alphabet,
    max_vertices: u64,
) -> (Vec<FreeWord>, CoreGraph, FreeWord) {
    loop {
        let count = rng.gen_range(1..=4);
        let gens: Vec<FreeWord> = (0..count)
            .map(|_| random_reduced_word(rng, alphabet, 6))
            .collect();
        let graph = CoreGraph::from_generators(alphabet, &gens, max_vertices)
            .expect("small generator sets fit the budget");
        for _ in 0..50 {
            let candidate = random_reduced_word(rng, alphabet, 6);
            if !graph.contains(&candidate) {
                return (gens, graph, candidate);
            }
        }
    }
}

fn random_nontrivial_element(
    rng: &mut ChaCha8Rng,
    system: &SquaringSystem,
    max_syllables: usize,
    max_len: usize,
) -> DoubleElement {
    loop {
        let count = rng.gen_range(1..=max_syllables);
        let mut side = if rng.gen_bool(0.5) {
            Side::Left
        } else {
            Side::Right
        };
        let mut raw = Vec::with_capacity(count);
        for _ in 0..count {
            raw.push((side, random_reduced_word(rng, system.alphabet(), max_len)));
            side = if side == Side::Left {
                Side::Right
            } else {
                Side::Left
            };
        }
        let element = DoubleElement::normalize(raw, system).expect("short words stay in budget");
        if !element.is_trivial() {
            return element;
        }
    }
}

fn cmd_member(system: &SquaringSystem, word: &str, target: &str) -> Result<u8, Error> {
    let w = system.alphabet().parse_word(word)?;
    let inside = if target == "H" {
        system.tower_contains(&w)?
    } else if let Some(level) = target.strip_prefix("Hr:") {
        let r: u32 = level
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad approximation level '{level}'")))?;
        system.approx_graph(r)?.contains(&w)
    } else {
        return Err(Error::InvalidInput(format!(
            "unknown target '{target}', expected H or Hr:<r>"
        )));
    };
    println!("{inside}");
    Ok(u8::from(!inside))
}

fn cmd_certify(
    system: &SquaringSystem,
    expr: &str,
    m: u32,
    out: Option<&Path>,
) -> Result<u8, Error> {
    let element = DoubleElement::parse(system.alphabet(), expr, system)?;
    let cert = match certify(system, &element, m) {
        Ok(cert) => cert,
        Err(Error::TrivialElement) => {
            eprintln!("error: the element is trivial; nothing to certify");
            return Ok(1);
        }
        Err(e) => return Err(e),
    };
    let json = cert.to_json();
    match out {
        Some(path) => write_file(path, &json)?,
        None => println!("{json}"),
    }
    let case = match cert.case {
        CertCase::AmalgamSyllable => "AmalgamSyllable",
        CertCase::AlternatingProduct => "AlternatingProduct",
    };
    eprintln!(
        "case={case} index={} facts={}",
        cert.index(),
        cert.facts.len()
    );
    Ok(0)
}

fn cmd_check(path: &Path) -> Result<u8, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let cert = Certificate::from_json(&text)?;
    if check(&cert)? {
        println!("valid: {}", cert.element);
        Ok(0)
    } else {
        println!("INVALID: recomputed facts disagree with the stored ones");
        Ok(1)
    }
}

fn cmd_dot(system: &SquaringSystem, target: &DotTarget, out: Option<&Path>) -> Result<u8, Error> {
    let graph = if let Some(level) = target.bhat {
        system.tower_core(level)?.graph().clone()
    } else if let Some(r) = target.bhat_r {
        system.approx_core(r)?
    } else if let Some(r) = target.hr {
        system.approx_graph(r)?
    } else {
        let gens = parse_words(
            system.alphabet(),
            target.gens.as_deref().unwrap_or_default(),
        )?;
        CoreGraph::from_generators(system.alphabet(), &gens, system.max_vertices())?
    };
    let dot = graph.to_dot();
    match out {
        Some(path) => write_file(path, &dot)?,
        None => print!("{dot}"),
    }
    Ok(0)
}

fn cmd_fold(system: &SquaringSystem, gens: &[String]) -> Result<u8, Error> {
    let words = parse_words(system.alphabet(), gens)?;
    let graph = CoreGraph::from_generators(system.alphabet(), &words, system.max_vertices())?;
    println!(
        "{} vertices, {} edges, basepoint {}",
        graph.vertex_count(),
        graph.edge_count(),
        graph.basepoint()
    );
    for (src, gen, dst) in graph.edges() {
        println!("{src} -{}-> {dst}", system.alphabet().symbol(gen));
    }
    Ok(0)
}

fn parse_words(alphabet: &Alphabet, texts: &[String]) -> Result<Vec<FreeWord>, Error> {
    texts.iter().map(|t| alphabet.parse_word(t)).collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

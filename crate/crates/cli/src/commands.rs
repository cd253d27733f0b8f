//! The four subcommands. Results go to files and stdout, progress to stderr.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use feigdim::ifs::{dimension_run, DimensionBounds, RunParams};
use feigdim::interval::format_outward;
use feigdim::monotonicity::{certificate_rectangles, emit_cover_rectangles, rectangles_csv, Panel};
use feigdim::renorm::{alpha_of, ball_from_newton, newton_fixpoint, RenormConfig};
use feigdim::{Error, FunctionBall, Interval, MonotonicityCertificate};

use crate::config::RunConfig;

pub const EXIT_NO_CONVERGENCE: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;
pub const EXIT_INPUT: u8 = 4;
pub const EXIT_RIGOR: u8 = 5;
pub const EXIT_USAGE: u8 = 64;

/// A failed command with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoConvergence { .. } | Error::CompositionDivergence { .. } => EXIT_NO_CONVERGENCE,
        Error::Inconclusive { .. } | Error::PositiveSignWitness { .. } => EXIT_INCONCLUSIVE,
        Error::ChecksumMismatch { .. }
        | Error::CertificateMismatch(_)
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::Json(_) => EXIT_INPUT,
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_RIGOR,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    }
}

type Outcome = Result<(), Failure>;

fn ensure_parent(path: &Path) -> Outcome {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| io_failure(dir, e)),
        _ => Ok(()),
    }
}

fn interval_text(x: Interval) -> String {
    let o = format_outward(x, 17);
    format!("[{}, {}]", o.lo, o.hi)
}

fn compute_ball(cfg: &RunConfig) -> Result<FunctionBall, Failure> {
    let rc = RenormConfig::from_profile(&cfg.profile);
    eprintln!(
        "newton: degree {} rho {} truncation {}",
        rc.degree, rc.rho, rc.truncation
    );
    let result = newton_fixpoint(&rc)?;
    eprintln!(
        "newton: {} steps, residual {:e}, tail {:e}",
        result.history.len() - 1,
        result.residual_l1,
        result.tail_l1
    );
    Ok(ball_from_newton(&result, &rc, cfg.profile.radius, true)?)
}

fn matches_profile(ball: &FunctionBall, cfg: &RunConfig) -> bool {
    let p = &cfg.profile;
    ball.degree() == p.degree
        && ball.rho() == p.rho
        && ball.truncation() == p.truncation
        && ball.radius() == p.radius
        && ball.t_max() == p.t_max
}

/// The ball of this run. An explicit `--ball` must load; the default file
/// is reused when it fits the settings and rebuilt otherwise.
fn obtain_ball(cfg: &RunConfig) -> Result<FunctionBall, Failure> {
    if cfg.ball_explicit {
        let ball = FunctionBall::load(&cfg.ball).map_err(|e| match e {
            Error::Io(io) => io_failure(&cfg.ball, io),
            e => e.into(),
        })?;
        if ball.degree() != cfg.degree() {
            return Err(Failure {
                code: EXIT_INPUT,
                message: format!(
                    "{}: ball has degree {}, run asks for {}",
                    cfg.ball.display(),
                    ball.degree(),
                    cfg.degree()
                ),
            });
        }
        return Ok(ball);
    }
    if cfg.ball.exists() {
        let ball = FunctionBall::load(&cfg.ball)?;
        if matches_profile(&ball, cfg) {
            eprintln!("ball: reusing {}", cfg.ball.display());
            return Ok(ball);
        }
        eprintln!("ball: {} does not match the settings, rebuilding", cfg.ball.display());
    }
    let ball = compute_ball(cfg)?;
    ensure_parent(&cfg.ball)?;
    ball.save(&cfg.ball)?;
    eprintln!("ball: wrote {}", cfg.ball.display());
    Ok(ball)
}

fn obtain_cert(cfg: &RunConfig, ball: &FunctionBall) -> Result<MonotonicityCertificate, Failure> {
    if cfg.cert_explicit {
        let cert = MonotonicityCertificate::load(&cfg.cert).map_err(|e| match e {
            Error::Io(io) => io_failure(&cfg.cert, io),
            e => e.into(),
        })?;
        cert.check(ball)?;
        return Ok(cert);
    }
    if cfg.cert.exists() {
        if let Ok(cert) = MonotonicityCertificate::load(&cfg.cert) {
            if cert.check(ball).is_ok() {
                eprintln!("certificate: reusing {}", cfg.cert.display());
                return Ok(cert);
            }
        }
        eprintln!("certificate: {} does not fit the ball, rebuilding", cfg.cert.display());
    }
    let cert = MonotonicityCertificate::build(ball, cfg.profile.max_depth)?;
    ensure_parent(&cfg.cert)?;
    cert.save(&cfg.cert)?;
    eprintln!("certificate: wrote {}", cfg.cert.display());
    Ok(cert)
}

pub fn fixpoint(cfg: &RunConfig) -> Outcome {
    let ball = compute_ball(cfg)?;
    let consts = alpha_of(&ball)?;
    ensure_parent(&cfg.ball)?;
    ball.save(&cfg.ball)?;
    let p = ball.provenance();
    println!("degree {}", ball.degree());
    println!("alpha {}", interval_text(consts.alpha));
    println!("g(1) {}", interval_text(consts.alpha_inv));
    println!("residual_l1 {:e}", p.residual_l1);
    println!("radius {:e}", ball.radius());
    println!("assumed_rigorous {}", p.assumed_rigorous);
    println!("checksum {}", ball.checksum());
    println!("ball {}", cfg.ball.display());
    Ok(())
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let ball = obtain_ball(cfg)?;
    let cert = match MonotonicityCertificate::build(&ball, cfg.profile.max_depth) {
        Ok(c) => c,
        Err(e @ (Error::Inconclusive { .. } | Error::PositiveSignWitness { .. })) => {
            let subinterval = match &e {
                Error::Inconclusive { subinterval, .. } | Error::PositiveSignWitness { subinterval, .. } => {
                    *subinterval
                }
                _ => unreachable!(),
            };
            println!("degree {}", ball.degree());
            println!("status inconclusive");
            println!("subinterval {}", interval_text(subinterval));
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    ensure_parent(&cfg.cert)?;
    cert.save(&cfg.cert)?;
    let finest = cert
        .cover
        .iter()
        .chain(&cert.gprime_cover)
        .max_by_key(|l| l.depth)
        .expect("nonempty cover");
    println!("degree {}", cert.degree_d);
    println!("status certified");
    println!("J {}", interval_text(cert.j));
    println!("domain {}", interval_text(cert.domain));
    println!("gprime_leaves {}", cert.gprime_cover.len());
    println!("gsecond_leaves {}", cert.cover.len());
    println!("max_depth_used {}", cert.max_depth_used);
    println!("finest_segment {} depth {}", interval_text(finest.subinterval), finest.depth);
    println!("min_abs_gprime {:e}", cert.min_abs_gprime);
    println!("checksum {}", cert.checksum());
    println!("certificate {}", cfg.cert.display());
    Ok(())
}

fn row_line(row: &DimensionBounds, timing: bool) -> String {
    let r = format_outward(Interval::point(row.r_n), 17).lo;
    let s = format_outward(Interval::point(row.s_n), 17).hi;
    let w = format_outward(Interval::point(row.max_endpoint_width), 3).hi;
    let mut line = format!("{},{r},{s},{},{w}", row.generation, row.node_count);
    if timing {
        line.push_str(&format!(",{:.3}", row.wall_time.as_secs_f64()));
    }
    line
}

/// Run the IFS up to `generations`, writing the results CSV row by row.
fn write_series(
    cfg: &RunConfig,
    ball: &FunctionBall,
    cert: &MonotonicityCertificate,
    generations: u32,
    path: &Path,
) -> Result<Vec<DimensionBounds>, Failure> {
    let p = &cfg.profile;
    ensure_parent(path)?;
    let file = File::create(path).map_err(|e| io_failure(path, e))?;
    let mut out = BufWriter::new(file);
    let mut header = vec![
        format!("# degree = {}", ball.degree()),
        format!("# ball_checksum = {}", ball.checksum()),
        format!("# certificate_checksum = {}", cert.checksum()),
        format!("# ball_assumed_rigorous = {}", ball.provenance().assumed_rigorous),
        format!("# contraction = {}", cfg.contraction.as_str()),
        format!("# pieces = {}", p.pieces),
        format!("# inverse_tol = {:e}", p.inverse_tol),
        format!("# partition_tol = {:e}", p.partition_tol),
    ];
    let mut columns = String::from("generation,r_n,s_n,node_count,max_endpoint_width");
    if cfg.timing {
        columns.push_str(",wall_time_s");
    }
    header.push(columns);
    let werr = |e: std::io::Error| io_failure(path, e);
    for h in &header {
        writeln!(out, "{h}").map_err(werr)?;
    }
    out.flush().map_err(werr)?;

    let params = RunParams {
        generations,
        pieces: p.pieces,
        inverse_tol: p.inverse_tol,
        partition_tol: p.partition_tol,
        method: cfg.contraction,
    };
    let mut write_err = None;
    let run = dimension_run(ball, cert, params, |row| {
        eprintln!(
            "generation {:>2}: [{:.10}, {:.10}] nodes {} ({:.1} s)",
            row.generation,
            row.r_n,
            row.s_n,
            row.node_count,
            row.wall_time.as_secs_f64()
        );
        let res = writeln!(out, "{}", row_line(row, cfg.timing)).and_then(|_| out.flush());
        if let Err(e) = res {
            write_err.get_or_insert(e);
        }
    })?;
    if let Some(e) = write_err {
        return Err(werr(e));
    }
    if let Some(e) = run.aborted {
        let done = run.rows.last().map_or(0, |r| r.generation);
        let mut f = Failure::from(e);
        f.message = format!("stopped after generation {done}: {}", f.message);
        return Err(f);
    }
    Ok(run.rows)
}

pub fn dimension(cfg: &RunConfig) -> Outcome {
    let ball = obtain_ball(cfg)?;
    let cert = obtain_cert(cfg, &ball)?;
    if !ball.provenance().assumed_rigorous {
        eprintln!("warning: the ball is not flagged as assumed rigorous");
    }
    let path = cfg.results_path();
    let start = Instant::now();
    let rows = write_series(cfg, &ball, &cert, cfg.profile.generations, &path)?;
    eprintln!("total {:.1} s", start.elapsed().as_secs_f64());
    let last = rows.last().expect("at least one generation");
    let r = format_outward(Interval::point(last.r_n), 10).lo;
    let s = format_outward(Interval::point(last.s_n), 10).hi;
    let width = format_outward(Interval::point(last.s_n - last.r_n), 3).hi;
    println!("degree {} generation {}", ball.degree(), last.generation);
    println!("dimension in [{r}, {s}] width {width}");
    println!("contraction {} pieces {}", cfg.contraction.as_str(), cfg.profile.pieces);
    println!("results {}", path.display());
    Ok(())
}

pub fn figures(cfg: &RunConfig) -> Outcome {
    let ball = obtain_ball(cfg)?;
    let cert = obtain_cert(cfg, &ball)?;
    let dir = cfg.figures_dir();
    fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
    let write = |name: String, text: String| -> Outcome {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| io_failure(&path, e))?;
        println!("wrote {}", path.display());
        Ok(())
    };
    for panel in Panel::ALL {
        let rects = emit_cover_rectangles(&ball, &cert, panel, cfg.grid)?;
        write(format!("{}.csv", panel.tag()), rectangles_csv(&rects, ball.degree()))?;
    }
    write(
        "gsecond_cover.csv".into(),
        rectangles_csv(&certificate_rectangles(&cert), ball.degree()),
    )?;
    if let Some(n) = cfg.series {
        let path = dir.join("series.csv");
        write_series(cfg, &ball, &cert, n, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

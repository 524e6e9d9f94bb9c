//! Command-line front end.
//!
//! [`run`] takes the argument list and output streams explicitly so the whole
//! command surface can be driven from tests. Exit codes: 0 success, 2 usage
//! error, 3 I/O or image format error, 4 numeric failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::compare::{compare, Metrics};
use crate::format::sig9;
use crate::ilut::Ilut;
use crate::kernels::{Kernel, KernelId};
use crate::pgm::{read_image, write_image};
use crate::resample::{approximate_rotation, rotate, zoom, Boundary, ImageBuffer, ZoomSpec};
use crate::spectral::{fae, fourier_curve, optimal_error_curve};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

const TIMING_RUNS: usize = 5;

#[derive(Debug, Parser)]
#[command(
    name = "l2interp",
    version,
    about = "L2-optimal interpolation kernels, lookup tables and image resampling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a kernel over its support as `x,h` rows.
    Kernel {
        #[arg(long, value_parser = parse_kernel)]
        kernel: KernelId,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a kernel's Fourier transform as `t,F` rows.
    Ft {
        #[arg(long, value_parser = parse_kernel)]
        kernel: KernelId,
        #[arg(long, default_value_t = 4.0)]
        tmax: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frequency approximation error of one or more kernels.
    ///
    /// A trailing `L=a..b` expands to one kernel per support, e.g.
    /// `l2opt:L=1..20`.
    Fae {
        #[arg(long = "kernel", num_args = 1.., required_unless_present = "curve")]
        kernels: Vec<String>,
        /// Emit `L,E,E_approx` rows of the optimal-error curve for L = 1..=N instead.
        #[arg(long, value_name = "N", conflicts_with = "kernels")]
        curve: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a lookup table and write it as CSV or, with `--binary`, as a blob.
    Ilut {
        #[arg(long, value_parser = parse_kernel)]
        kernel: KernelId,
        #[arg(long = "Q", default_value_t = 100)]
        q: u32,
        /// Keep the raw kernel samples instead of renormalizing the phases.
        #[arg(long)]
        raw: bool,
        #[arg(long, requires = "out")]
        binary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zoom a PGM image by m/Q.
    Zoom {
        input: PathBuf,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        common: ResampleArgs,
        #[command(flatten)]
        ilut: IlutToggle,
    },
    /// Rotate a PGM image about its center by a rational approximation of an angle.
    Rotate {
        input: PathBuf,
        /// Degrees, clockwise as displayed.
        #[arg(long, allow_hyphen_values = true)]
        angle: f64,
        #[command(flatten)]
        common: ResampleArgs,
    },
    /// Compare two kernels on the same zoom.
    Compare {
        input: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long = "Q", default_value_t = 100)]
        q: u32,
        #[arg(long = "kernel-a", value_parser = parse_kernel)]
        kernel_a: KernelId,
        #[arg(long = "kernel-b", value_parser = parse_kernel)]
        kernel_b: KernelId,
        #[arg(long, default_value_t = Boundary::Clamp, value_parser = parse_boundary)]
        boundary: Boundary,
        /// Also score both against a box-downscale-then-upscale reference.
        #[arg(long)]
        reference: bool,
    },
}

#[derive(Debug, Args)]
pub struct ResampleArgs {
    #[arg(long = "Q", default_value_t = 100)]
    pub q: u32,
    #[arg(long, default_value = "l2opt:L=2", value_parser = parse_kernel)]
    pub kernel: KernelId,
    #[arg(long, default_value_t = Boundary::Clamp, value_parser = parse_boundary)]
    pub boundary: Boundary,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IlutToggle {
    /// Interpolate through a lookup table (default).
    #[arg(long = "ilut", overrides_with = "no_ilut")]
    ilut: bool,
    /// Evaluate the kernel directly at every tap.
    #[arg(long = "no-ilut", overrides_with = "ilut")]
    no_ilut: bool,
}

impl IlutToggle {
    pub fn enabled(&self) -> bool {
        !self.no_ilut
    }
}

fn parse_kernel(s: &str) -> std::result::Result<KernelId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_boundary(s: &str) -> std::result::Result<Boundary, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Expands a trailing `L=a..b` into one id per support.
pub fn expand_sweep(id: &str) -> Result<Vec<KernelId>> {
    let Some((prefix, range)) = id.rsplit_once("L=").filter(|(_, r)| r.contains("..")) else {
        return Ok(vec![id.parse()?]);
    };
    let bad = || Error::KernelParse {
        input: id.to_string(),
        reason: "support sweep must look like L=a..b with a <= b".into(),
    };
    let (a, b) = range.split_once("..").ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    (a..=b).map(|l| format!("{prefix}L={l}").parse()).collect()
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::KernelParse { .. } => EXIT_USAGE,
        Error::Io(_) | Error::Format(_) | Error::UnsupportedFormat(_) => EXIT_IO,
        Error::Quadrature { .. } | Error::NonConforming { .. } => EXIT_NUMERIC,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(text: &str, dest: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    match dest {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn median_timing<F>(mut f: F) -> Result<(ImageBuffer, Duration)>
where
    F: FnMut() -> Result<ImageBuffer>,
{
    let mut times = Vec::with_capacity(TIMING_RUNS);
    let mut result = None;
    for _ in 0..TIMING_RUNS {
        let start = Instant::now();
        let img = f()?;
        times.push(start.elapsed());
        result = Some(img);
    }
    times.sort_unstable();
    Ok((result.expect("at least one run"), times[TIMING_RUNS / 2]))
}

fn metrics_row(label_a: &str, label_b: &str, m: &Metrics) -> String {
    format!(
        "{},{},{},{},{}\n",
        csv_field(label_a),
        csv_field(label_b),
        sig9(m.mae),
        sig9(m.psnr),
        m.max_abs
    )
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Kernel {
            kernel,
            step,
            out: dest,
        } => {
            if !(step > 0.0) || !step.is_finite() {
                return Err(Error::invalid("--step must be positive"));
            }
            let l = kernel.support() as f64;
            let count = (2.0 * l / step + 1e-9).floor() as usize;
            let mut csv = String::from("x,h\n");
            for i in 0..=count {
                let x = -l + i as f64 * step;
                csv.push_str(&format!("{},{}\n", sig9(x), sig9(kernel.eval(x))));
            }
            emit(&csv, dest.as_ref(), out)
        }
        Command::Ft {
            kernel,
            tmax,
            step,
            out: dest,
        } => {
            let mut csv = String::from("t,F\n");
            for (t, f) in fourier_curve(&kernel, tmax, step)? {
                csv.push_str(&format!("{},{}\n", sig9(t), sig9(f)));
            }
            emit(&csv, dest.as_ref(), out)
        }
        Command::Fae {
            kernels,
            curve,
            out: dest,
        } => {
            let csv = if let Some(max) = curve {
                let mut csv = String::from("L,E,E_approx\n");
                for (l, e, approx) in optimal_error_curve(max)? {
                    csv.push_str(&format!("{l},{},{}\n", sig9(e), sig9(approx)));
                }
                csv
            } else {
                let mut ids = Vec::new();
                for k in &kernels {
                    ids.extend(expand_sweep(k)?);
                }
                let mut csv = String::from("kernel,L,E1,E2,E\n");
                for id in &ids {
                    let r = fae(id)?;
                    csv.push_str(&format!(
                        "{},{},{},{},{}\n",
                        csv_field(&id.to_string()),
                        r.support,
                        sig9(r.e1),
                        sig9(r.e2),
                        sig9(r.e)
                    ));
                }
                csv
            };
            emit(&csv, dest.as_ref(), out)
        }
        Command::Ilut {
            kernel,
            q,
            raw,
            binary,
            out: dest,
        } => {
            let table = Ilut::build(&kernel, q, !raw && kernel.partitions_unity())?;
            match (binary, dest) {
                (true, Some(path)) => {
                    fs::write(&path, table.to_bytes())?;
                    Ok(())
                }
                (_, dest) => emit(&table.to_csv(), dest.as_ref(), out),
            }
        }
        Command::Zoom { input, m, common, ilut } => {
            let img = read_image(&input)?;
            let spec = ZoomSpec::new(m, common.q, common.kernel.clone())
                .with_boundary(common.boundary)
                .with_ilut(ilut.enabled());
            let (zoomed, median) = median_timing(|| zoom(&img, &spec))?;
            write_image(&zoomed, &common.out)?;
            writeln!(
                out,
                "{}x{} -> {}x{} kernel={} path={} median_ms={:.3} runs={TIMING_RUNS}",
                img.width(),
                img.height(),
                zoomed.width(),
                zoomed.height(),
                common.kernel,
                if ilut.enabled() { "ilut" } else { "analytic" },
                median.as_secs_f64() * 1e3
            )?;
            Ok(())
        }
        Command::Rotate { input, angle, common } => {
            let img = read_image(&input)?;
            let rot = approximate_rotation(angle, common.q)?;
            let rotated = rotate(&img, &rot, &common.kernel, common.boundary)?;
            write_image(&rotated, &common.out)?;
            writeln!(out, "n={}", rot.n)?;
            writeln!(out, "m={}", rot.m)?;
            writeln!(out, "Q={}", rot.q)?;
            writeln!(out, "angle_deviation={}", sig9(rot.angle_deviation))?;
            writeln!(out, "implied_scale={}", sig9(rot.implied_scale))?;
            Ok(())
        }
        Command::Compare {
            input,
            m,
            q,
            kernel_a,
            kernel_b,
            boundary,
            reference,
        } => {
            let img = read_image(&input)?;
            let c = compare(&img, m, q, &kernel_a, &kernel_b, boundary, reference)?;
            let (a, b) = (kernel_a.to_string(), kernel_b.to_string());
            let mut csv = String::from("a,b,mae,psnr,max_abs\n");
            let pair = Metrics {
                mae: c.report.mae,
                psnr: c.report.psnr,
                max_abs: c.report.max_abs,
            };
            csv.push_str(&metrics_row(&a, &b, &pair));
            if let Some(r) = &c.reference {
                csv.push_str(&metrics_row(&a, "reference", &r.a));
                csv.push_str(&metrics_row(&b, "reference", &r.b));
            }
            out.write_all(csv.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["l2interp"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn sweep_expansion() {
        let ids = expand_sweep("l2opt:L=1..3").unwrap();
        assert_eq!(
            ids.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
            ["l2opt:L=1", "l2opt:L=2", "l2opt:L=3"]
        );
        assert_eq!(expand_sweep("cubic6").unwrap(), vec![KernelId::Cubic6]);
        assert!(expand_sweep("l2opt:L=3..1").is_err());
        assert!(expand_sweep("l2opt:L=a..2").is_err());
    }

    #[test]
    fn kernel_rows() {
        let (code, out, _) = run_str(&["kernel", "--kernel", "l2opt:L=1", "--step", "0.5"]);
        assert_eq!(code, 0);
        let rows: Vec<_> = out.lines().collect();
        assert_eq!(rows[0], "x,h");
        assert!(rows.contains(&"0,1"), "{out}");
        assert!(rows.contains(&"0.5,0.5"), "{out}");
        assert!(rows.contains(&"1,0"), "{out}");

        let (_, out, _) = run_str(&["kernel", "--kernel", "linear", "--step", "0.25"]);
        assert_eq!(
            out,
            "x,h\n-1,0\n-0.75,0.25\n-0.5,0.5\n-0.25,0.75\n0,1\n0.25,0.75\n0.5,0.5\n0.75,0.25\n1,0\n"
        );
    }

    #[test]
    fn usage_errors() {
        assert_eq!(
            run_str(&["kernel", "--kernel", "blend:w=1.5,linear,cubic6"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_str(&["kernel", "--kernel", "gauss"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["fae", "--kernel", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["kernel", "--kernel", "linear", "--step", "0"]).0, EXIT_USAGE);
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("zoom"));
    }

    #[test]
    fn io_errors() {
        let (code, _, err) = run_str(&["zoom", "/definitely/missing.pgm", "--m", "2", "--out", "/tmp/x.pgm"]);
        assert_eq!(code, EXIT_IO, "{err}");
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(exit_code(&Error::invalid("x")), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Format("x".into())), EXIT_IO);
        assert_eq!(
            exit_code(&Error::Quadrature {
                a: 0.0,
                b: 1.0,
                panels: 4
            }),
            EXIT_NUMERIC
        );
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("cubic6"), "cubic6");
        assert_eq!(csv_field("blend:w=0.5,linear,cubic6"), "\"blend:w=0.5,linear,cubic6\"");
    }
}

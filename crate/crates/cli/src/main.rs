mod overlay;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hairflow_core::bench::{
    compare_planners, mean_alignment, select_starts, sign_test_p, BenchParams, Planner,
};
use hairflow_core::filter::WindowWeighting;
use hairflow_core::formats::*;
use hairflow_core::mask::{binarize, TemporalFilter};
use hairflow_core::mesh::{plan_mesh, MeshParams};
use hairflow_core::orientation::{field_from_image, field_without_filter, OrientationParams};
use hairflow_core::path::{metrics, plan, shape_metrics, PathParams};
use hairflow_core::refine::{refine, Connectivity, RefineParams};
use hairflow_core::shock::{shock_iterate, CoherenceParams, ConvexityConvention};
use hairflow_core::synth::{generate, SceneKind, SyntheticSpec};
use hairflow_core::trajectory::{generate as generate_poses, RigidTransform, TrajectoryParams};
use hairflow_core::PixelPoint;

#[derive(Parser)]
#[command(
    name = "hairflow",
    version,
    about = "Hair-flow orientation and brush-stroke planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exponentially filter a sequence of soft masks and threshold the result.
    MaskFilter {
        #[arg(long, default_value_t = 0.9)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(required = true)]
        frames: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the filtered soft mask.
        #[arg(long)]
        soft: Option<PathBuf>,
    },
    /// Keep the largest hair region and grow it by depth and hue.
    Refine {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long)]
        rgb: PathBuf,
        #[arg(long, value_enum, default_value_t = Conn::Eight)]
        connectivity: Conn,
        #[arg(long, default_value_t = 2.0)]
        depth_sigmas: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Coherence-enhancing shock filter.
    Coherence {
        #[command(flatten)]
        params: ShockArgs,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Orientation field from the structure tensor.
    Orient {
        #[arg(long, default_value_t = 3)]
        kd: usize,
        #[arg(long, default_value_t = 5)]
        ke: usize,
        /// Run the shock filter (default parameters) first.
        #[arg(long)]
        filter: bool,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Write θ·255/π as a greyscale image.
        #[arg(long)]
        preview: Option<PathBuf>,
    },
    /// Trace a stroke along an orientation field.
    Plan {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, value_parser = parse_pair)]
        start: (f64, f64),
        #[arg(long, default_value_t = 6.0)]
        k: f64,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        /// Direction of the first step, as `dx,dy`.
        #[arg(long, value_parser = parse_pair)]
        heading: Option<(f64, f64)>,
        #[arg(short, long)]
        output: PathBuf,
        /// Draw the stroke over the field preview.
        #[arg(long)]
        overlay: Option<PathBuf>,
    },
    /// Shortest path to the bottom of the hair over the depth mesh.
    PlanMesh {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long, value_parser = parse_pair)]
        start: (f64, f64),
        #[arg(long, default_value_t = 0.1)]
        goal_frac: f64,
        #[arg(long, default_value_t = 0.05)]
        edge_max: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Timed end-effector poses for a stroke.
    Traject {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long, default_value_t = 0.03)]
        speed: f64,
        #[arg(long, default_value_t = 5)]
        radius: u32,
        /// Camera-to-robot transform as `tx,ty,tz,qw,qx,qy,qz`.
        #[arg(long, value_parser = parse_extrinsic)]
        extrinsic: Option<RigidTransform>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a synthetic scene with its true orientation field.
    Synth(SynthArgs),
    /// Compare both planners on a synthetic scene directory.
    Eval {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value_t = 20)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of static files served for non-API routes.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Conn {
    Four,
    Eight,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    AsWritten,
    Weickert,
}

#[derive(Args)]
struct ShockArgs {
    #[arg(long, default_value_t = 7)]
    kd: usize,
    #[arg(long, default_value_t = 11)]
    ke: usize,
    #[arg(long, default_value_t = 3)]
    km: usize,
    #[arg(long, default_value_t = 0.9)]
    blend: f64,
    #[arg(long, default_value_t = 3)]
    iters: usize,
    #[arg(long, value_enum, default_value_t = Convention::AsWritten)]
    convention: Convention,
    /// Weighting of the structure-tensor window.
    #[arg(long, value_enum, default_value_t = Window::Box)]
    window: Window,
}

#[derive(Clone, Copy, ValueEnum)]
enum Window {
    Box,
    Gaussian,
}

impl ShockArgs {
    fn params(&self) -> CoherenceParams {
        CoherenceParams {
            k_delta: self.kd,
            k_e: self.ke,
            k_m: self.km,
            c_blend: self.blend,
            iterations: self.iters,
            convention: match self.convention {
                Convention::AsWritten => ConvexityConvention::AsWritten,
                Convention::Weickert => ConvexityConvention::Weickert,
            },
            window: match self.window {
                Window::Box => WindowWeighting::Box,
                Window::Gaussian => WindowWeighting::Gaussian,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Stripes,
    Waves,
    Circular,
    Parting,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 256)]
    size: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 12.0)]
    period: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Stripe angle in degrees.
    #[arg(long, default_value_t = 0.0)]
    angle: f64,
    #[arg(long, default_value_t = 12.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 96.0)]
    wavelength: f64,
    #[arg(short, long)]
    output: PathBuf,
}

impl SynthArgs {
    fn spec(&self) -> SyntheticSpec {
        let kind = match self.kind {
            Kind::Stripes => SceneKind::Stripes {
                angle_rad: self.angle.to_radians(),
            },
            Kind::Waves => SceneKind::Waves {
                amplitude_px: self.amplitude,
                wavelength_px: self.wavelength,
            },
            Kind::Circular => SceneKind::Circular { center: None },
            Kind::Parting => SceneKind::Parting,
        };
        SyntheticSpec {
            kind,
            size: self.size,
            period_px: self.period,
            noise_sigma: self.noise,
            seed: self.seed,
        }
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or("expected two comma-separated numbers")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_extrinsic(s: &str) -> Result<RigidTransform, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [tx, ty, tz, qw, qx, qy, qz] = v[..] else {
        return Err(format!("expected 7 numbers, got {}", v.len()));
    };
    Ok(RigidTransform {
        translation: [tx, ty, tz],
        rotation_quat: [qw, qx, qy, qz],
    })
}

fn load<T>(path: &Path, parse: impl FnOnce(&[u8]) -> Result<T, FormatError>) -> Result<T> {
    let bytes = read_file(path)?;
    parse(&bytes).with_context(|| format!("reading {}", path.display()))
}

fn save(path: &Path, bytes: &[u8]) -> Result<()> {
    write_file(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::MaskFilter {
            alpha,
            threshold,
            frames,
            output,
            soft,
        } => {
            if !(threshold > 0.0 && threshold < 1.0) {
                bail!("threshold must lie in (0, 1), got {threshold}");
            }
            let mut filter = TemporalFilter::new(alpha)?;
            for f in &frames {
                filter.update(&load(f, read_soft_mask_pgm)?)?;
            }
            let acc = filter.current().expect("at least one frame");
            save(&output, &write_mask_pgm(&binarize(acc, threshold)))?;
            if let Some(p) = soft {
                save(&p, &write_soft_mask_pgm(acc))?;
            }
        }
        Command::Refine {
            mask,
            cloud,
            rgb,
            connectivity,
            depth_sigmas,
            output,
        } => {
            let params = RefineParams {
                connectivity: match connectivity {
                    Conn::Four => Connectivity::Four,
                    Conn::Eight => Connectivity::Eight,
                },
                depth_sigma_mult: depth_sigmas,
                ..Default::default()
            };
            let before = load(&mask, read_mask_pgm)?;
            let refined = refine(
                &before,
                &load(&cloud, read_ocd)?,
                &load(&rgb, read_ppm)?,
                &params,
            )?;
            eprintln!("hair pixels: {} -> {}", before.count(), refined.count());
            save(&output, &write_mask_pgm(&refined))?;
        }
        Command::Coherence {
            params,
            input,
            output,
        } => {
            let out = shock_iterate(&load(&input, read_pgm)?, &params.params())?;
            save(&output, &write_pgm(&out))?;
        }
        Command::Orient {
            kd,
            ke,
            filter,
            input,
            output,
            preview,
        } => {
            let img = load(&input, read_pgm)?;
            let params = OrientationParams {
                k_delta: kd,
                k_window: ke,
            };
            let field = if filter {
                field_from_image(&img, &CoherenceParams::default(), &params)?
            } else {
                field_without_filter(&img, &params)?
            };
            save(&output, &write_orf(&field))?;
            if let Some(p) = preview {
                save(&p, &write_pgm(&field.preview()))?;
            }
        }
        Command::Plan {
            field,
            mask,
            start,
            k,
            max_steps,
            heading,
            output,
            overlay,
        } => {
            let field = load(&field, read_orf)?;
            let mask = load(&mask, read_mask_pgm)?;
            let params = PathParams {
                step_px: k,
                max_steps,
                initial_heading: heading.map(|(x, y)| [x, y]),
            };
            let out = plan(&field, &mask, PixelPoint::new(start.0, start.1), &params)?;
            let m = metrics(&out.path, &field, out.terminated_by);
            eprintln!("{}", serde_json::to_string(&m)?);
            save(&output, &write_path_json(&out.path))?;
            if let Some(p) = overlay {
                save(
                    &p,
                    &write_ppm(&overlay::render(&field.preview(), &mask, &out.path)),
                )?;
            }
        }
        Command::PlanMesh {
            mask,
            cloud,
            start,
            goal_frac,
            edge_max,
            output,
        } => {
            let params = MeshParams {
                edge_max_m: edge_max,
                goal_frac,
            };
            let out = plan_mesh(
                &load(&mask, read_mask_pgm)?,
                &load(&cloud, read_ocd)?,
                PixelPoint::new(start.0, start.1),
                &params,
            )?;
            eprintln!(
                "{}",
                serde_json::to_string(&shape_metrics(&out.path, out.terminated_by))?
            );
            save(&output, &write_path_json(&out.path))?;
        }
        Command::Traject {
            path,
            mask,
            cloud,
            speed,
            radius,
            extrinsic,
            output,
        } => {
            let params = TrajectoryParams {
                speed_mps: speed,
                lookup_radius_px: radius,
                extrinsic,
            };
            let poses = generate_poses(
                &load(&path, read_path_json)?,
                &load(&mask, read_mask_pgm)?,
                &load(&cloud, read_ocd)?,
                &params,
            )?;
            save(&output, &write_pose_json(&poses))?;
        }
        Command::Synth(args) => {
            let spec = args.spec();
            let scene = generate(&spec)?;
            let dir = &args.output;
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            save(&dir.join("image.pgm"), &write_pgm(&scene.image))?;
            save(&dir.join("image.ppm"), &write_ppm(&scene.rgb()))?;
            save(&dir.join("truth.orf"), &write_orf(&scene.truth))?;
            save(&dir.join("mask.pgm"), &write_mask_pgm(&scene.mask))?;
            save(&dir.join("cloud.ocd"), &write_ocd(&scene.cloud))?;
            save(&dir.join("spec.json"), &serde_json::to_vec_pretty(&spec)?)?;
        }
        Command::Eval {
            scene,
            starts,
            seed,
            output,
        } => {
            let image = load(&scene.join("image.pgm"), read_pgm)?;
            let truth = load(&scene.join("truth.orf"), read_orf)?;
            let mask = load(&scene.join("mask.pgm"), read_mask_pgm)?;
            let cloud = load(&scene.join("cloud.ocd"), read_ocd)?;
            let points = select_starts(&mask, starts, 0.25, 8, seed)?;
            let rows = compare_planners(
                &image,
                &truth,
                &mask,
                &cloud,
                &points,
                &BenchParams::default(),
            )?;
            let mut out = csv::Writer::from_path(&output)
                .with_context(|| format!("writing {}", output.display()))?;
            out.write_record([
                "planner",
                "start_x",
                "start_y",
                "length_px",
                "mean_alignment",
                "mean_turn_rad",
                "terminated_by",
                "dx",
                "dy",
            ])?;
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            for r in &rows {
                out.write_record([
                    r.planner.as_str().to_string(),
                    r.start.x.to_string(),
                    r.start.y.to_string(),
                    r.metrics.length_px.to_string(),
                    opt(r.metrics.mean_alignment),
                    opt(r.metrics.mean_turn_rad),
                    serde_json::to_value(r.metrics.terminated_by)?
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                    r.displacement[0].to_string(),
                    r.displacement[1].to_string(),
                ])?;
            }
            out.flush()?;
            let field_wins = rows[..starts]
                .iter()
                .zip(&rows[starts..])
                .filter(|(f, m)| {
                    f.metrics.mean_alignment.unwrap_or(0.0)
                        > m.metrics.mean_alignment.unwrap_or(0.0)
                })
                .count();
            eprintln!(
                "mean alignment: field {} mesh {}; field better on {field_wins}/{starts} starts (sign test p = {:.3e})",
                opt(mean_alignment(&rows, Planner::Field)),
                opt(mean_alignment(&rows, Planner::Mesh)),
                sign_test_p(field_wins, starts),
            );
        }
        Command::Serve {
            port,
            host,
            static_dir,
        } => {
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .context("bad listen address")?;
            let state = hairflow_service::AppState::from_env();
            tokio::runtime::Runtime::new()?
                .block_on(hairflow_service::serve(addr, state, static_dir))?;
        }
    }
    Ok(())
}

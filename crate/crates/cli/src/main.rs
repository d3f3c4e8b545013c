mod manifest;

use std::fs;
use std::net::IpAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use shexchain_api::Config;
use shexchain_core::engine::{materialize_instance_with, RandomUuids, SeededUuids, UuidSource};
use shexchain_core::shexc::ShexError;
use shexchain_core::{
    assemble_chain, collect_exvars, parse_schema, Direction, GenerationOptions, InstanceMaterialization,
    Iri, ShexSchema,
};

use manifest::{Endpoint, Manifest, SUPPORTED_VERSION};

#[derive(Parser)]
#[command(name = "shexchain", version, about = "ShEx templates to supply-chain RDF graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the REST service.
    Serve {
        #[arg(long, env = "SHEXCHAIN_PORT", default_value_t = shexchain_api::DEFAULT_PORT)]
        port: u16,
        #[arg(long, env = "SHEXCHAIN_ADDR", default_value = "127.0.0.1")]
        addr: IpAddr,
        /// Store file, created on the first change.
        #[arg(long, env = "SHEXCHAIN_STORE", default_value = "shexchain-store.json")]
        store: PathBuf,
        /// Keep all data in memory instead of a store file.
        #[arg(long, conflicts_with = "store")]
        memory: bool,
        /// Base IRI for skolem IRIs and relative output.
        #[arg(long, env = "SHEXCHAIN_BASE", default_value = shexchain_core::vocab::DEFAULT_BASE)]
        base: String,
    },
    /// Build a chain's Turtle graph from a wiring manifest.
    Generate {
        manifest: PathBuf,
        /// Write here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Parse a template and report its shapes and variables.
    Check { template: PathBuf },
}

/// Exit status 1: unreadable or invalid input. Exit status 2: the manifest's
/// wiring does not fit the templates.
enum Failure {
    Input(anyhow::Error),
    Wiring(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve {
            port,
            addr,
            store,
            memory,
            base,
        } => serve(port, addr, (!memory).then_some(store), &base).map_err(Failure::Input),
        Command::Generate { manifest, out } => generate(&manifest, out.as_deref()),
        Command::Check { template } => check(&template).map_err(Failure::Input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Wiring(e)) => {
            eprintln!("wiring error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn options(base: Option<&str>) -> anyhow::Result<GenerationOptions> {
    let Some(base) = base else {
        return Ok(GenerationOptions::default());
    };
    let iri = Iri::new(base).map_err(|e| anyhow!("invalid base IRI: {e}"))?;
    Ok(GenerationOptions::new(iri)?)
}

fn serve(port: u16, addr: IpAddr, store_path: Option<PathBuf>, base: &str) -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    let config = Config {
        addr,
        port,
        store_path,
        options: options(Some(base))?,
    };
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("cannot start runtime")?;
    runtime.block_on(shexchain_api::serve(config))?;
    Ok(())
}

fn read_template(path: &Path) -> anyhow::Result<ShexSchema> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_schema(&text).map_err(|e| parse_failure(path, &e))
}

fn parse_failure(path: &Path, err: &ShexError) -> anyhow::Error {
    anyhow!("{}:{err}", path.display())
}

fn check(path: &Path) -> anyhow::Result<()> {
    let schema = read_template(path)?;
    let list = |iris: &[Iri]| {
        iris.iter()
            .map(|i| schema.compact_iri(i))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let (inputs, outputs) = schema
        .primary_shape()
        .map(|s| (list(&s.inputs), list(&s.outputs)))
        .unwrap_or_default();
    println!("shapes: {}", schema.shapes.len());
    println!("exvars: {}", list(&collect_exvars(&schema)));
    println!("in: {inputs}");
    println!("out: {outputs}");
    if schema.shapes.len() != 1 {
        eprintln!(
            "warning: a template should declare exactly one shape, found {}",
            schema.shapes.len()
        );
    }
    Ok(())
}

struct Loaded {
    name: String,
    schema: ShexSchema,
    instance: InstanceMaterialization,
}

fn generate(manifest_path: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let text = fs::read_to_string(manifest_path)
        .with_context(|| format!("cannot read {}", manifest_path.display()))?;
    let manifest: Manifest = toml::from_str(&text)
        .map_err(|e| anyhow!("{}: {e}", manifest_path.display()))?;
    if manifest.version != SUPPORTED_VERSION {
        return Err(anyhow!(
            "{}: unsupported manifest version {} (expected {SUPPORTED_VERSION})",
            manifest_path.display(),
            manifest.version
        )
        .into());
    }
    let opts = options(manifest.base.as_deref())?.with_merge(manifest.merge);
    let mut uuids: Box<dyn UuidSource> = match manifest.seed {
        Some(seed) => Box::new(SeededUuids::new(seed)),
        None => Box::new(RandomUuids),
    };

    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut loaded: Vec<Loaded> = Vec::new();
    for entry in &manifest.instances {
        if loaded.iter().any(|l| l.name == entry.name) {
            return Err(anyhow!("instance name `{}` is declared twice", entry.name).into());
        }
        let schema = read_template(&dir.join(&entry.template))?;
        let instance = materialize_instance_with(&schema, &opts, &entry.name, uuids.as_mut())
            .with_context(|| format!("{}", entry.template.display()))?;
        loaded.push(Loaded {
            name: entry.name.clone(),
            schema,
            instance,
        });
    }

    let mut edges = Vec::new();
    for edge in &manifest.edges {
        let source = endpoint(&loaded, &edge.from, Direction::Out).map_err(Failure::Wiring)?;
        let target = endpoint(&loaded, &edge.to, Direction::In).map_err(Failure::Wiring)?;
        edges.push((source, target));
    }

    let instances: Vec<_> = loaded.iter().map(|l| (&l.schema, &l.instance.skolem_map)).collect();
    let graph = assemble_chain(&instances, &edges, &opts).map_err(|e| Failure::Wiring(e.into()))?;
    let turtle = graph.to_turtle();
    match out {
        Some(path) => fs::write(path, turtle).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{turtle}"),
    }
    Ok(())
}

fn endpoint(loaded: &[Loaded], end: &Endpoint, direction: Direction) -> anyhow::Result<Iri> {
    let inst = loaded
        .iter()
        .find(|l| l.name == end.instance)
        .ok_or_else(|| anyhow!("unknown instance `{}`", end.instance))?;
    let var = inst
        .schema
        .resolve_term(&end.var)
        .map_err(|e| anyhow!("instance `{}`: cannot resolve `{}`: {e}", end.instance, end.var))?;
    let found = inst
        .instance
        .io_vars
        .iter()
        .find(|v| v.iri == var && v.direction == direction);
    match found {
        Some(v) => Ok(v.skolem.clone()),
        None => {
            let side = match direction {
                Direction::Out => "from",
                Direction::In => "to",
            };
            bail!(
                "`{side}` endpoint {} is not a #{direction}: variable of instance `{}`",
                end.var,
                end.instance
            )
        }
    }
}

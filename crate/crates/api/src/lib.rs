//! HTTP interface to the supply-chain store.
//!
//! | method | path | |
//! |---|---|---|
//! | GET, POST | `/supply-chain` | list, create |
//! | GET, PUT, DELETE | `/supply-chain/{id}` | |
//! | GET, POST | `/template` | list, create |
//! | GET, PUT, DELETE | `/template/{id}` | |
//! | POST | `/template-instance` | instantiate a template in a chain |
//! | DELETE | `/template-instance/{id}` | |
//! | POST | `/edge` | wire an output to an input |
//! | DELETE | `/edge/{id}` | |
//! | GET | `/supply-chain/{id}/graph?merge=<bool>` | Turtle export |

mod error;
mod routes;
pub mod wire;

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use shexchain_core::store::{Store, StoreError};
use shexchain_core::GenerationOptions;
use tokio::net::TcpListener;

pub use error::ApiError;
pub use routes::router;

pub const DEFAULT_PORT: u16 = 8187;

#[derive(Debug, Clone)]
pub struct Config {
    pub addr: IpAddr,
    pub port: u16,
    /// JSON store file; `None` keeps everything in memory.
    pub store_path: Option<PathBuf>,
    pub options: GenerationOptions,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            addr: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: DEFAULT_PORT,
            store_path: Some(PathBuf::from("shexchain-store.json")),
            options: GenerationOptions::default(),
        }
    }
}

#[derive(Debug)]
pub enum ServeError {
    Store(StoreError),
    Bind(SocketAddr, std::io::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for ServeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ServeError::Store(e) => write!(f, "cannot open store: {e}"),
            ServeError::Bind(addr, e) => write!(f, "cannot listen on {addr}: {e}"),
            ServeError::Io(e) => write!(f, "server failed: {e}"),
        }
    }
}

impl std::error::Error for ServeError {}

pub fn open_store(config: &Config) -> Result<Store, StoreError> {
    match &config.store_path {
        Some(path) => Store::open(path, config.options.clone()),
        None => Store::with_backend(
            Box::new(shexchain_core::store::MemoryBackend),
            config.options.clone(),
        ),
    }
}

/// Binds and serves until Ctrl-C.
pub async fn serve(config: Config) -> Result<(), ServeError> {
    let store = Arc::new(open_store(&config).map_err(ServeError::Store)?);
    let addr = SocketAddr::new(config.addr, config.port);
    let listener = TcpListener::bind(addr)
        .await
        .map_err(|e| ServeError::Bind(addr, e))?;
    tracing::info!(%addr, store = ?config.store_path, "listening");
    serve_on(listener, store, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}

/// Serves on an already bound listener until `shutdown` completes.
pub async fn serve_on(
    listener: TcpListener,
    store: Arc<Store>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    axum::serve(listener, router(store))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(ServeError::Io)
}

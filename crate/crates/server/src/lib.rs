//! Micro AR story repository: publish, browse, fetch, remix lineage, usage
//! statistics and asset endpoints over HTTP.

pub mod api;
pub mod config;
pub mod store;

use std::sync::Arc;

pub use api::{router, AppState, CREATOR_HEADER};
pub use config::Config;
pub use store::{Fetched, ListingPage, PublishOutcome, Store, StoryListing};

/// Serves the API on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    store: Arc<Store>,
    config: &Config,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let app = router(AppState::new(store, config));
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
}

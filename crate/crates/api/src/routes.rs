use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use shexchain_core::store::{FieldError, Store, StoreError, SupplyChainInput, TemplateInput};
use tower_http::cors::CorsLayer;

use crate::error::ApiError;
use crate::wire::{self, NewEdge, NewInstance, WireEdge, WireTemplate};

type AppState = State<Arc<Store>>;
type ApiResult = Result<Response, ApiError>;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/supply-chain", get(list_chains).post(create_chain))
        .route(
            "/supply-chain/{id}",
            get(get_chain).put(update_chain).delete(delete_chain),
        )
        .route("/supply-chain/{id}/graph", get(chain_graph))
        .route("/template", get(list_templates).post(create_template))
        .route(
            "/template/{id}",
            get(get_template).put(update_template).delete(delete_template),
        )
        .route("/template-instance", post(create_instance))
        .route("/template-instance/{id}", delete(delete_instance))
        .route("/edge", post(create_edge))
        .route("/edge/{id}", delete(delete_edge))
        .fallback(|| async { ApiError::not_found("no such route") })
        .layer(CorsLayer::permissive())
        .with_state(store)
}

fn parse_id(raw: &str) -> Result<u64, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::bad_request(format!("`{raw}` is not a valid id")))
}

/// Malformed JSON is a 400; well-formed JSON of the wrong shape a 422.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => {
                let message = e.to_string();
                let field = message
                    .split('`')
                    .nth(1)
                    .unwrap_or("body")
                    .to_string();
                ApiError::validation(message.clone(), &[FieldError::new(field, message)])
            }
            _ => ApiError::bad_request(format!("malformed JSON: {e}")),
        }
    })
}

/// Runs a store operation off the async executor; file-backed mutations
/// block on disk writes.
async fn blocking<R: Send + 'static>(
    store: Arc<Store>,
    f: impl FnOnce(&Store) -> Result<R, StoreError> + Send + 'static,
) -> Result<R, ApiError> {
    tokio::task::spawn_blocking(move || f(&store))
        .await
        .map_err(|e| ApiError::from(StoreError::Io(format!("worker failed: {e}"))))?
        .map_err(ApiError::from)
}

fn created(body: impl serde::Serialize) -> Response {
    (StatusCode::CREATED, Json(body)).into_response()
}

fn ok(body: impl serde::Serialize) -> Response {
    Json(body).into_response()
}

async fn list_chains(State(store): AppState) -> ApiResult {
    let chains = store.read_with(|t| {
        t.supply_chains
            .values()
            .map(|c| wire::supply_chain(t, c))
            .collect::<Vec<_>>()
    });
    Ok(ok(chains))
}

async fn get_chain(State(store): AppState, Path(id): Path<String>) -> ApiResult {
    let id = parse_id(&id)?;
    let chain = store.get_supply_chain(id)?;
    Ok(ok(store.read_with(|t| wire::supply_chain(t, &chain))))
}

async fn create_chain(State(store): AppState, body: Bytes) -> ApiResult {
    let input: SupplyChainInput = parse_body(&body)?;
    let record = blocking(store.clone(), move |s| s.create_supply_chain(input)).await?;
    Ok(created(store.read_with(|t| wire::supply_chain(t, &record))))
}

async fn update_chain(State(store): AppState, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let id = parse_id(&id)?;
    let input: SupplyChainInput = parse_body(&body)?;
    let record = blocking(store.clone(), move |s| s.update_supply_chain(id, input)).await?;
    Ok(ok(store.read_with(|t| wire::supply_chain(t, &record))))
}

async fn delete_chain(State(store): AppState, Path(id): Path<String>) -> ApiResult {
    let id = parse_id(&id)?;
    blocking(store, move |s| s.delete_supply_chain(id)).await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn chain_graph(
    State(store): AppState,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult {
    let id = parse_id(&id)?;
    let merge = match query.get("merge").map(String::as_str) {
        None | Some("false") | Some("0") => false,
        Some("true") | Some("1") => true,
        Some(other) => {
            return Err(ApiError::bad_request(format!(
                "merge must be true or false, got `{other}`"
            )))
        }
    };
    let graph = store.chain_graph(id, merge)?;
    Ok((
        [
            (header::CONTENT_TYPE, "text/turtle; charset=utf-8".to_string()),
            (
                header::CONTENT_DISPOSITION,
                format!("attachment; filename=\"supply-chain-{id}.ttl\""),
            ),
        ],
        graph.to_turtle(),
    )
        .into_response())
}

async fn list_templates(State(store): AppState) -> ApiResult {
    let templates: Vec<WireTemplate> = store.list_templates().into_iter().map(Into::into).collect();
    Ok(ok(templates))
}

async fn get_template(State(store): AppState, Path(id): Path<String>) -> ApiResult {
    let id = parse_id(&id)?;
    Ok(ok(WireTemplate::from(store.get_template(id)?)))
}

async fn create_template(State(store): AppState, body: Bytes) -> ApiResult {
    let input: TemplateInput = parse_body(&body)?;
    let record = blocking(store, move |s| s.create_template(input)).await?;
    Ok(created(WireTemplate::from(record)))
}

async fn update_template(State(store): AppState, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let id = parse_id(&id)?;
    let input: TemplateInput = parse_body(&body)?;
    let record = blocking(store, move |s| s.update_template(id, input)).await?;
    Ok(ok(WireTemplate::from(record)))
}

async fn delete_template(State(store): AppState, Path(id): Path<String>) -> ApiResult {
    let id = parse_id(&id)?;
    blocking(store, move |s| s.delete_template(id)).await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn create_instance(State(store): AppState, body: Bytes) -> ApiResult {
    let input: NewInstance = parse_body(&body)?;
    let (record, _) = blocking(store.clone(), move |s| {
        s.instantiate(input.template_id, input.supply_chain_id, input.label)
    })
    .await?;
    Ok(created(store.read_with(|t| wire::instance(t, &record))))
}

async fn delete_instance(State(store): AppState, Path(id): Path<String>) -> ApiResult {
    let id = parse_id(&id)?;
    blocking(store, move |s| s.delete_instance(id)).await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn create_edge(State(store): AppState, body: Bytes) -> ApiResult {
    let input: NewEdge = parse_body(&body)?;
    let record = blocking(store, move |s| {
        s.add_edge(input.supply_chain_id, input.source_io_id, input.target_io_id)
    })
    .await?;
    Ok(created(WireEdge::from(record)))
}

async fn delete_edge(State(store): AppState, Path(id): Path<String>) -> ApiResult {
    let id = parse_id(&id)?;
    blocking(store, move |s| s.delete_edge(id)).await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

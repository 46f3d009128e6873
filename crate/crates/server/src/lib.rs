//! HTTP front end for live sessions.
//!
//! `GET /session` upgrades to a web socket speaking the line protocol from
//! [`adapta_core::session`], one handler per connection. `/profiles` and
//! `/content` are plain JSON endpoints over the same store.

use std::net::SocketAddr;
use std::sync::Arc;

use adapta_core::content::Content;
use adapta_core::models::ProfileId;
use adapta_core::session::{ServerMessage, SessionHandler};
use adapta_core::store::{DataStore, ProfileRecord, StoreError};
use axum::extract::rejection::JsonRejection;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::json;

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let status = match e {
            StoreError::UnknownUser(_) => StatusCode::NOT_FOUND,
            StoreError::DuplicateProfile(_) => StatusCode::CONFLICT,
            StoreError::InvalidProfile(_) | StoreError::Content(_) => StatusCode::BAD_REQUEST,
            StoreError::StorageFailure { .. } | StoreError::Corrupt { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(StatusCode::BAD_REQUEST, e.body_text())
    }
}

type Store = State<Arc<DataStore>>;

pub fn router(store: Arc<DataStore>) -> Router {
    Router::new()
        .route("/session", get(session))
        .route("/profiles", get(list_profiles).post(create_profile))
        .route(
            "/profiles/{id}",
            get(get_profile).put(update_profile).delete(delete_profile),
        )
        .route("/content", get(get_content).put(put_content))
        .with_state(store)
}

pub async fn serve(store: Arc<DataStore>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    serve_on(listener, store).await
}

pub async fn serve_on(listener: tokio::net::TcpListener, store: Arc<DataStore>) -> std::io::Result<()> {
    axum::serve(listener, router(store)).await
}

async fn list_profiles(State(store): Store) -> Result<Json<Vec<ProfileRecord>>, ApiError> {
    Ok(Json(store.profiles()?))
}

async fn get_profile(State(store): Store, Path(id): Path<String>) -> Result<Json<ProfileRecord>, ApiError> {
    store
        .profile(&ProfileId::new(id.clone()))?
        .map(Json)
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown profile {id:?}")))
}

async fn create_profile(
    State(store): Store,
    body: Result<Json<ProfileRecord>, JsonRejection>,
) -> Result<(StatusCode, Json<ProfileRecord>), ApiError> {
    let Json(record) = body?;
    store.add_profile(record.clone())?;
    Ok((StatusCode::CREATED, Json(record)))
}

async fn update_profile(
    State(store): Store,
    Path(id): Path<String>,
    body: Result<Json<ProfileRecord>, JsonRejection>,
) -> Result<Json<ProfileRecord>, ApiError> {
    let Json(record) = body?;
    if record.profile.id.as_str() != id {
        return Err(ApiError(
            StatusCode::BAD_REQUEST,
            format!("body is for profile {:?}, path names {id:?}", record.profile.id.as_str()),
        ));
    }
    store.update_profile(record.clone())?;
    Ok(Json(record))
}

async fn delete_profile(State(store): Store, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    store.delete_profile(&ProfileId::new(id))?;
    Ok(StatusCode::NO_CONTENT)
}

async fn get_content(State(store): Store) -> Result<Json<Content>, ApiError> {
    Ok(Json(store.content()?))
}

async fn put_content(State(store): Store, body: Result<Json<Content>, JsonRejection>) -> Result<StatusCode, ApiError> {
    let Json(content) = body?;
    store.set_content(&content)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn session(ws: WebSocketUpgrade, State(store): Store) -> Response {
    ws.on_upgrade(move |socket| run_session(socket, store))
}

async fn run_session(mut socket: WebSocket, store: Arc<DataStore>) {
    let mut handler = SessionHandler::new(store);
    while let Some(Ok(msg)) = socket.recv().await {
        let replies = match msg {
            Message::Text(text) => handler.handle_line(text.as_str()),
            Message::Binary(_) => vec![ServerMessage::Error {
                reason: "messages must be text".into(),
            }],
            Message::Close(_) => break,
            Message::Ping(_) | Message::Pong(_) => continue,
        };
        for reply in replies {
            if socket.send(Message::Text(reply.to_line().into())).await.is_err() {
                return;
            }
        }
    }
}

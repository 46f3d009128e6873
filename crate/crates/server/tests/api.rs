use std::sync::Arc;

use adapta_core::content::Content;
use adapta_core::models::{ArmMobility, DeviceInteractionModel, Disability, LateralityProblem, Posture, ProfileId, Sex, Side, UserProfile};
use adapta_core::store::{DataStore, ProfileRecord};
use adapta_server::router;
use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

fn record(id: &str) -> ProfileRecord {
    ProfileRecord {
        profile: UserProfile {
            id: ProfileId::new(id),
            full_name: "Ana".into(),
            age: 13,
            sex: Sex::F,
            laterality: LateralityProblem::CannotRecognizeRight,
            disability: Disability::Physical,
        },
        device: DeviceInteractionModel {
            posture: Posture::Seated,
            rgb_camera_active: false,
            depth_distance: 1.8,
            arm_mobility: ArmMobility::BothArms { dominant: Side::Right },
        },
    }
}

async fn call(app: &axum::Router, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let resp = app
        .clone()
        .oneshot(req.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap())
        .await
        .unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or(Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, value)
}

fn setup() -> (tempfile::TempDir, axum::Router) {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(DataStore::open(dir.path()).unwrap());
    (dir, router(store))
}

#[tokio::test]
async fn profile_lifecycle() {
    let (_dir, app) = setup();
    let (status, body) = call(&app, Method::GET, "/profiles", None).await;
    assert_eq!((status, body), (StatusCode::OK, Value::Array(vec![])));

    let json = serde_json::to_string(&record("ana")).unwrap();
    let (status, _) = call(&app, Method::POST, "/profiles", Some(json.clone())).await;
    assert_eq!(status, StatusCode::CREATED);
    let (status, _) = call(&app, Method::POST, "/profiles", Some(json)).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (status, body) = call(&app, Method::GET, "/profiles/ana", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["profile"]["fullName"], "Ana");
    assert_eq!(body["device"]["armMobility"]["BothArms"]["dominant"], "Right");

    let mut changed = record("ana");
    changed.profile.age = 14;
    let (status, body) = call(&app, Method::PUT, "/profiles/ana", Some(serde_json::to_string(&changed).unwrap())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["profile"]["age"], 14);
    let (status, _) = call(&app, Method::PUT, "/profiles/other", Some(serde_json::to_string(&changed).unwrap())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, _) = call(&app, Method::DELETE, "/profiles/ana", None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, body) = call(&app, Method::GET, "/profiles/ana", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(body["error"].as_str().unwrap().contains("ana"));
    let (status, _) = call(&app, Method::DELETE, "/profiles/ana", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn invalid_profiles_are_rejected() {
    let (_dir, app) = setup();
    let mut bad = record("x");
    bad.profile.age = 130;
    let (status, body) = call(&app, Method::POST, "/profiles", Some(serde_json::to_string(&bad).unwrap())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("age"));
    let (status, _) = call(&app, Method::POST, "/profiles", Some("{\"profile\":1}".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn content_round_trip() {
    let (_dir, app) = setup();
    let (status, body) = call(&app, Method::GET, "/content", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_value::<Content>(body).unwrap(), Content::builtin());

    let mut items = Content::builtin().items;
    items.truncate(3);
    let (status, _) = call(&app, Method::PUT, "/content", Some(serde_json::to_string(&items).unwrap())).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (_, body) = call(&app, Method::GET, "/content", None).await;
    assert_eq!(body.as_array().unwrap().len(), 3);

    items[1].option_id = items[0].option_id.clone();
    let (status, _) = call(&app, Method::PUT, "/content", Some(serde_json::to_string(&items).unwrap())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

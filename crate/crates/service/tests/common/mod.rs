#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use noosphere_service::cli::app_state;
use noosphere_service::{router, AppState, Config};
use serde_json::Value;
use tower::ServiceExt;

pub const ADMIN_SECRET: &str = "correct horse";

pub fn config(data_dir: &Path) -> Config {
    let mut cfg = Config::default();
    cfg.data_dir = data_dir.to_path_buf();
    cfg.admin.secret = Some(ADMIN_SECRET.into());
    cfg
}

pub fn core_testdata(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/testdata").join(name)
}

pub struct Api {
    pub state: Arc<AppState>,
    pub app: Router,
}

pub struct Reply {
    pub status: StatusCode,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|_| panic!("not json: {}", self.text()))
    }

    pub fn text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }

    pub fn code(&self) -> String {
        self.json()["code"].as_str().unwrap_or_default().to_string()
    }
}

impl Api {
    pub fn open(cfg: Config) -> Self {
        let (state, _) = app_state(cfg).unwrap();
        Self {
            app: router(state.clone()),
            state,
        }
    }

    pub async fn call(&self, method: Method, uri: &str, token: Option<&str>, body: Option<Value>) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(t) = token {
            req = req.header(header::AUTHORIZATION, format!("Bearer {t}"));
        }
        let req = match body {
            Some(v) => req
                .header(header::CONTENT_TYPE, "application/json")
                .body(Body::from(v.to_string())),
            None => req.body(Body::empty()),
        }
        .unwrap();
        let res = self.app.clone().oneshot(req).await.unwrap();
        let status = res.status();
        let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
        Reply { status, body }
    }

    pub async fn get(&self, uri: &str) -> Reply {
        self.call(Method::GET, uri, None, None).await
    }

    pub async fn login(&self, user: &str, secret: &str) -> String {
        let r = self
            .call(Method::POST, "/v1/login", None, Some(serde_json::json!({"user": user, "secret": secret})))
            .await;
        assert_eq!(r.status, StatusCode::OK, "{}", r.text());
        r.json()["token"].as_str().unwrap().to_string()
    }

    /// Registers a user directly and sets their secret.
    pub fn add_user(&self, id: &str, role: noosphere_core::Role) {
        let admin = self.state.config.admin_id();
        let user = noosphere_core::UserId::new(id).unwrap();
        self.state
            .engine
            .register_user(&admin, &user, id, role, format!("{id}@example.org"))
            .unwrap();
        self.state.credentials.set(&user, &format!("{id}-pw")).unwrap();
    }

    pub fn last_seq(&self) -> u64 {
        self.state.engine.snapshot().last_seq()
    }
}

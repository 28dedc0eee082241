use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use lorenzen::{DialogueError, ParseError, RulesetError, Violation};
use serde::{Deserialize, Serialize};

/// Error body: `{code, rule?, message}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("no game with id `{0}`")]
    NotFound(String),
    #[error("formula does not parse: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Ruleset(#[from] RulesetError),
    #[error("initial move is illegal: {0}")]
    InitialMoveIllegal(Violation),
    #[error("illegal move: {0}")]
    IllegalMove(Violation),
    #[error("it is the {0} turn")]
    OutOfTurn(&'static str),
    #[error("{0}")]
    BadRequest(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Parse(_) | ApiError::Ruleset(_) | ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::InitialMoveIllegal(_) | ApiError::IllegalMove(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::OutOfTurn(_) => StatusCode::CONFLICT,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ApiError::NotFound(_) => "not_found",
            ApiError::Parse(_) => "parse_error",
            ApiError::Ruleset(_) => "unknown_ruleset",
            ApiError::InitialMoveIllegal(_) => "initial_move_illegal",
            ApiError::IllegalMove(_) => "illegal_move",
            ApiError::OutOfTurn(_) => "out_of_turn",
            ApiError::BadRequest(_) => "bad_request",
            ApiError::Internal(_) => "internal",
        }
    }

    pub fn body(&self) -> ErrorBody {
        let rule = match self {
            ApiError::InitialMoveIllegal(v) | ApiError::IllegalMove(v) => Some(v.code()),
            _ => None,
        };
        let mut message = self.to_string();
        if let ApiError::InitialMoveIllegal(v) | ApiError::IllegalMove(v) = self {
            if let Some(id) = v.rule() {
                message = format!("{message} ({})", id.description());
            }
        }
        ErrorBody {
            code: self.code().to_string(),
            rule,
            message,
        }
    }
}

impl From<DialogueError> for ApiError {
    fn from(e: DialogueError) -> Self {
        match e {
            DialogueError::InitialMoveIllegal(v) => ApiError::InitialMoveIllegal(v),
            DialogueError::IllegalMove { violation, .. } => ApiError::IllegalMove(violation),
            DialogueError::Replay { cause, .. } => ApiError::IllegalMove(cause),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self.body())).into_response()
    }
}

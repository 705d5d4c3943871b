//! Exit-code contract: 0 ok, 1 verification failure, 2 parse or invalid input,
//! 3 resource limit, 4 not found.

use hdcoding::boole::BooleError;
use hdcoding::coding::CodingError;
use hdcoding::curves::CurvesError;
use hdcoding::decode::DecodeError;
use hdcoding::MapError;
use serde_json::Value;

pub const OK: i32 = 0;
pub const VERIFY_FAILED: i32 = 1;
pub const PARSE: i32 = 2;
pub const RESOURCE: i32 = 3;
pub const NOT_FOUND: i32 = 4;

/// A failed command: exit code, message, and an optional JSON body for stdout.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
    pub body: Option<Value>,
}

impl Failure {
    pub fn new(code: i32, error: impl Into<anyhow::Error>) -> Self {
        Failure { code, error: error.into(), body: None }
    }

    pub fn parse(msg: impl std::fmt::Display) -> Self {
        Failure::new(PARSE, anyhow::anyhow!("{msg}"))
    }

    pub fn with_body(mut self, body: Value) -> Self {
        self.body = Some(body);
        self
    }
}

fn map_code(e: &MapError) -> i32 {
    match e {
        MapError::ResourceLimit { .. } => RESOURCE,
        MapError::DiscontinuityHit { .. } => PARSE,
    }
}

fn coding_code(e: &CodingError) -> i32 {
    match e {
        CodingError::Map(m) => map_code(m),
        _ => PARSE,
    }
}

fn curves_code(e: &CurvesError) -> i32 {
    match e {
        CurvesError::Map(m) => map_code(m),
        CurvesError::DiscontinuityHit { source, .. } => map_code(source),
        CurvesError::BracketNotFound { .. } => NOT_FOUND,
        CurvesError::NotADiscontinuity(_) => PARSE,
    }
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        Failure::new(map_code(&e), e)
    }
}

impl From<CodingError> for Failure {
    fn from(e: CodingError) -> Self {
        Failure::new(coding_code(&e), e)
    }
}

impl From<CurvesError> for Failure {
    fn from(e: CurvesError) -> Self {
        Failure::new(curves_code(&e), e)
    }
}

impl From<DecodeError> for Failure {
    fn from(e: DecodeError) -> Self {
        let code = match &e {
            DecodeError::NotFound(_) | DecodeError::NewtonDiverged(_) | DecodeError::BranchNotFound(_) => NOT_FOUND,
            DecodeError::InvalidQuery(_) => PARSE,
            DecodeError::Coding(c) => coding_code(c),
            DecodeError::Curves(c) => curves_code(c),
            DecodeError::Map(m) => map_code(m),
        };
        Failure::new(code, e)
    }
}

impl From<BooleError> for Failure {
    fn from(e: BooleError) -> Self {
        let code = match &e {
            BooleError::Map(m) => map_code(m),
            BooleError::Coding(c) => coding_code(c),
            BooleError::EmptyCylinder(_) => NOT_FOUND,
        };
        Failure::new(code, e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::new(VERIFY_FAILED, e)
    }
}

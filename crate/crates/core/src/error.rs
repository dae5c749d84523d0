use thiserror::Error;

/// Errors raised anywhere in the lifting pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiftError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scaffold construction failed at cube {cube:?}: {reason}")]
    ConstructionFailure { cube: Vec<i64>, reason: String },

    #[error("point is a singular point of the retraction")]
    SingularPoint,

    #[error("point lies within {0:e} of the shifted singular set")]
    NearSingular(f64),

    #[error("correction on N did not converge (residual {0:e})")]
    ProjectionFailure(f64),

    #[error("lifting step too large: distance {dist} >= injectivity margin {r_inj}")]
    StepTooLarge { dist: f64, r_inj: f64 },

    #[error("points do not lie on the same fiber (residual {0:e})")]
    NotSameFiber(f64),

    #[error("fundamental-domain normalization failed: {0}")]
    NormalizationFailure(String),

    #[error("no transversal shift found in {0} trials")]
    SelectionFailure(usize),

    #[error("point is too close to the shadow set T_y")]
    NearJump,

    #[error("path lifting failed: {0}")]
    LiftFailure(String),

    #[error("simplex needs refinement: {0}")]
    RefinementNeeded(String),

    #[error("jump facet {0} carries non-constant deck labels")]
    FacetSplit(usize),

    #[error("jump {jump} exceeds certified bound {bound}")]
    BoundViolation { jump: f64, bound: f64 },

    #[error("loop touches the singular stratum")]
    IllPosedLoop,

    #[error("ingest error at line {line}: {msg}")]
    Ingest { line: usize, msg: String },

    #[error("unknown target id `{0}`")]
    UnknownTarget(String),

    #[error("io: {0}")]
    Io(String),

    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        source: Box<LiftError>,
    },
}

impl LiftError {
    pub fn at(self, stage: &'static str) -> LiftError {
        LiftError::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, with stage tags stripped.
    pub fn root(&self) -> &LiftError {
        match self {
            LiftError::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

impl From<std::io::Error> for LiftError {
    fn from(e: std::io::Error) -> Self {
        LiftError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LiftError {
    fn from(e: serde_json::Error) -> Self {
        LiftError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LiftError>;

#[derive(Debug, thiserror::Error)]
pub enum CeceError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "{count} trajectories exceed the exhaustive-search limit of {limit}; \
         use the k-means clusterer for instances this size"
    )]
    ExhaustiveLimitExceeded { count: usize, limit: usize },

    #[error("classification impossible: the partial trajectory has no transitions")]
    ClassificationImpossible,

    #[error(transparent)]
    Core(#[from] cmdp_core::CoreError),

    #[error(transparent)]
    Eval(#[from] model_eval::EvalError),
}

pub type Result<T> = std::result::Result<T, CeceError>;

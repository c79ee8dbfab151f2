use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MgfError {
    #[error("a posynomial MGF needs at least one term")]
    NoTerms,
    #[error("term {0} has an empty factor list")]
    EmptyTerm(usize),
    #[error("non-finite characteristic coefficient in term {term}")]
    NonFinite { term: usize },
    #[error("MGF evaluated at a pole (s = {s_re} + {s_im}i)")]
    Pole { s_re: f64, s_im: f64 },
    #[error("mixture weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("mixture has {weights} weights but {components} components")]
    LengthMismatch { weights: usize, components: usize },
    #[error("MGF violates compatibility conditions: {0}")]
    Incompatible(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("argument outside the domain of {function}: {detail}")]
    Domain { function: &'static str, detail: String },
    #[error("integrand has a pole on the integration path (x = {0})")]
    IntegrandPole(f64),
    #[error("series did not converge within {max_order} orders (last term {last_term:e})")]
    NotConverged { max_order: usize, last_term: f64 },
    #[error("confluent Lauricella series supports at most 2 variables, got {0}")]
    SeriesOrder(usize),
    #[error(transparent)]
    Mgf(#[from] MgfError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    /// A parameter breaches one of the admissible ranges of the channel model.
    #[error("{kind}: {constraint} violated ({detail})")]
    Constraint {
        kind: &'static str,
        constraint: &'static str,
        detail: String,
    },
    #[error("no physical sampler for channel kind `{0}`")]
    UnsupportedSampler(&'static str),
    #[error(transparent)]
    Mgf(#[from] MgfError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Mgf(#[from] MgfError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

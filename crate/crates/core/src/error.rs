use thiserror::Error;

/// A parse failure at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {pos}: {message}")]
pub struct SyntaxError {
    pub pos: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(pos: usize, message: String) -> Self {
        SyntaxError { pos, message }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` expects {expected} argument(s), got {got}")]
    ArityMismatch {
        symbol: String,
        expected: String,
        got: usize,
    },
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("term is not ground: {0}")]
    NotGround(String),
    #[error("`listof` cannot be nested")]
    NestedListOf,
    #[error("iteration variable {0} outside of `listof`")]
    StrayIterVariable(String),
}

/// Why a term cannot be stripped of its recursive calls.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StripError {
    #[error("recursive symbol applied to `{arg}` instead of a single x-variable at {path}")]
    NotVariable { arg: String, path: String },
    #[error("x{index} is the argument of both f{first} and f{second}")]
    ConflictingSymbols {
        index: String,
        first: usize,
        second: usize,
    },
}

/// Errors raised while loading a system definition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Term {
        line: usize,
        #[source]
        source: TermError,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate definition of `{0}`")]
    Duplicate(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{function}: declared C={c}, p={p} do not dominate {what}")]
    Domination {
        function: String,
        c: u64,
        p: u32,
        what: String,
    },
}

/// Failures that abort an evaluation. Undefinedness is not an error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("system did not pass the static checks (use force to run it anyway)")]
    NotAccepted,
    #[error("no recursive symbol f{0}")]
    UnknownFunction(usize),
    #[error("base operation `{op}` is undefined on ({args})")]
    Domain { op: String, args: String },
    #[error(
        "C5 runtime violation in f{function} at {input}: term {term} has value size {value_size} > |w|+|l| = {w_size} + {l_size} = {}",
        w_size + l_size
    )]
    RuntimeC5 {
        function: usize,
        input: String,
        term: String,
        value_size: u64,
        w_size: u64,
        l_size: u64,
    },
    #[error("runtime bound violation in f{function} at {input}: {what} = {actual} > {bound}")]
    RuntimeBound {
        function: usize,
        input: String,
        what: String,
        actual: u64,
        bound: String,
    },
    #[error("rank did not descend: f{function} called on {arg} (rank {arg_rank}) from {input} (rank {input_rank})")]
    RankDescent {
        function: usize,
        input: String,
        arg: String,
        arg_rank: u64,
        input_rank: u64,
    },
    #[error("internal defect: {0}")]
    Internal(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("universe bounds must be at least 1 (got size {max_size}, rank {max_rank})")]
    EmptyBounds { max_size: u64, max_rank: u64 },
    #[error("universe slice would hold {count} elements, above the cap of {cap}")]
    TooLarge { count: String, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("need at least 3 measurements, got {0}")]
    TooFew(usize),
    #[error("all measurements have the same size")]
    Degenerate,
    #[error("measurement with zero size or zero steps")]
    NonPositive,
}

//! Reading JSON inputs, including the short forms accepted for
//! polynomials, trees and monads.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use polyop::dendroidal::{OmegaMor, Presheaf};
use polyop::freemonad::{identity_monad, maybe_monad, FreeTruncation, Multiplication, PolynomialMonad};
use polyop::poly::{MorTables, Polynomial};
use polyop::tree::{validate_tree, Shape, Tree};
use polyop::Guard;

use crate::Failure;

pub fn read_value(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn parse<T: DeserializeOwned>(v: Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::input(format!("not a valid {what}: {e}")))
}

#[derive(Deserialize)]
struct Operation {
    inputs: Vec<usize>,
    output: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PolyInput {
    Full(Box<Polynomial>),
    OneColour { arities: Vec<usize> },
    Operations { colours: usize, operations: Vec<Operation> },
}

pub fn polynomial_from(v: Value) -> Result<Polynomial, Failure> {
    match parse::<PolyInput>(v, "polynomial")? {
        PolyInput::Full(p) => Ok(*p),
        PolyInput::OneColour { arities } => Ok(Polynomial::one_colour(&arities)),
        PolyInput::Operations { colours, operations } => {
            let ops: Vec<(Vec<usize>, usize)> = operations.into_iter().map(|o| (o.inputs, o.output)).collect();
            Ok(Polynomial::from_operations(colours, colours, &ops)?)
        }
    }
}

pub fn polynomial(path: &Path) -> Result<Polynomial, Failure> {
    polynomial_from(read_value(path)?)
}

/// A tree as `{"shape": "((ll)l)"}`, as full tree JSON, or as any
/// polynomial short form.
pub fn tree_from(v: Value) -> Result<Tree, Failure> {
    if let Some(shape) = v.get("shape").and_then(Value::as_str) {
        return Ok(Tree::from_shape(&Shape::parse(shape)?));
    }
    if v.get("I").is_some() {
        return parse(v, "tree");
    }
    Ok(validate_tree(&polynomial_from(v)?)?)
}

pub fn tree(path: &Path) -> Result<Tree, Failure> {
    tree_from(read_value(path)?)
}

#[derive(Deserialize)]
struct OmegaInput {
    src: Value,
    dst: Value,
    edge_map: Vec<usize>,
}

pub fn omega_mor(path: &Path) -> Result<OmegaMor, Failure> {
    let raw: OmegaInput = parse(read_value(path)?, "dendroidal morphism")?;
    Ok(OmegaMor::from_edge_map(&tree_from(raw.src)?, &tree_from(raw.dst)?, raw.edge_map)?)
}

/// A monad, total or truncated.
pub enum Monad {
    Total(PolynomialMonad),
    Truncated(FreeTruncation),
}

impl Monad {
    pub fn as_mult(&self) -> &dyn Multiplication {
        match self {
            Monad::Total(m) => m,
            Monad::Truncated(m) => m,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MonadInput {
    Builtin {
        builtin: String,
        #[serde(default)]
        colours: Option<usize>,
    },
    Free {
        free: Value,
        height: usize,
    },
    Tables {
        poly: Value,
        unit: MorTables,
        mult: MorTables,
    },
}

/// Reads a monad without requiring the laws, so that `laws` can report on
/// failing tables.
pub fn monad(path: &Path, guard: Guard) -> Result<Monad, Failure> {
    monad_from(read_value(path)?, guard)
}

pub fn monad_from(v: Value, guard: Guard) -> Result<Monad, Failure> {
    match parse::<MonadInput>(v, "monad")? {
        MonadInput::Builtin { builtin, colours } => match builtin.as_str() {
            "maybe" => Ok(Monad::Total(maybe_monad())),
            "identity" => Ok(Monad::Total(identity_monad(colours.unwrap_or(1)))),
            other => Err(Failure::input(format!("unknown builtin monad `{other}`"))),
        },
        MonadInput::Free { free, height } => {
            Ok(Monad::Truncated(FreeTruncation::new(&polynomial_from(free)?, height, guard)?))
        }
        MonadInput::Tables { poly, unit, mult } => {
            Ok(Monad::Total(PolynomialMonad::new(polynomial_from(poly)?, unit, mult)?))
        }
    }
}

/// A presheaf file, bare or as emitted by `nerve`.
pub fn presheaf(path: &Path) -> Result<Presheaf, Failure> {
    presheaf_from(read_value(path)?)
}

pub fn presheaf_from(mut v: Value) -> Result<Presheaf, Failure> {
    if let Some(inner) = v.get_mut("presheaf") {
        v = inner.take();
    }
    parse(v, "presheaf")
}

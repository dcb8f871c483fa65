//! Python bindings: games, strategies, values and the mean-payoff solver.

use num_bigint::BigUint;
use num_rational::Rational64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use rrsynth_core::arena::Vertex;
use rrsynth_core::bounds;
use rrsynth_core::buchi;
use rrsynth_core::format;
use rrsynth_core::meanpayoff;
use rrsynth_core::optimal::synthesize_optimal_with_limit;
use rrsynth_core::{
    games, Adversary, Arena, ErrorKind, FiniteStateStrategy, LassoPlay, Player, RrGame, Thresholds,
    ValueResult,
};

create_exception!(rrsynth, GameError, PyException, "Parse or semantic error.");
create_exception!(
    rrsynth,
    LimitError,
    PyException,
    "Size or budget limit reached."
);

fn err(e: rrsynth_core::Error) -> PyErr {
    match e.kind() {
        ErrorKind::Limit => LimitError::new_err(e.to_string()),
        _ => GameError::new_err(e.to_string()),
    }
}

/// `(vertex, value)` pairs.
type ValueTable = Vec<(String, Option<Rational64>)>;

/// `Fraction` for finite values, `None` for infinity.
fn value(v: ValueResult) -> Option<Rational64> {
    v.finite()
}

/// A request-response game.
#[pyclass(name = "Game", module = "rrsynth", frozen)]
struct PyGame {
    inner: RrGame,
}

#[pymethods]
impl PyGame {
    /// Parses the text game format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<PyGame> {
        format::parse_game(text)
            .map(|inner| PyGame { inner })
            .map_err(err)
    }

    /// `fig1`, `fig2` or `blades` (with `k`).
    #[staticmethod]
    #[pyo3(signature = (name, k=None))]
    fn builtin(name: &str, k: Option<usize>) -> PyResult<PyGame> {
        games::gen_builtin(name, k)
            .map(|inner| PyGame { inner })
            .map_err(err)
    }

    fn to_text(&self) -> String {
        format::write_game(&self.inner)
    }

    fn to_dot(&self) -> String {
        format::game_dot(&self.inner)
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.s()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn vertices(&self) -> Vec<String> {
        let a = self.inner.arena();
        (0..a.len()).map(|v| a.name(v).to_string()).collect()
    }

    /// The value bound of the Büchi-reduction strategy.
    fn value_bound(&self) -> BigUint {
        buchi::value_bound(&self.inner)
    }

    /// Per-condition waiting-time thresholds for optimal synthesis.
    fn thresholds(&self) -> PyResult<Vec<BigUint>> {
        bounds::synthesis_thresholds(&self.inner).map_err(err)
    }

    /// `(W0, W1, strategy)`.
    fn solve(&self) -> PyResult<(Vec<String>, Vec<String>, PyStrategy)> {
        let sol = buchi::solve_rr(&self.inner).map_err(err)?;
        Ok((
            self.names(&sol.winning_0),
            self.names(&sol.winning_1),
            PyStrategy {
                inner: sol.strategy_0,
            },
        ))
    }

    /// `(values, strategy, caps, provenance)`. `values` holds
    /// `(vertex, value)` pairs with `None` for infinity. Without `caps` the
    /// caps are derived from `size_limit`.
    #[pyo3(signature = (caps=None, size_limit=10_000))]
    fn optimal(
        &self,
        caps: Option<Vec<u64>>,
        size_limit: usize,
    ) -> PyResult<(ValueTable, PyStrategy, Vec<u64>, String)> {
        let t = Thresholds::resolve(&self.inner, caps.as_deref(), size_limit).map_err(err)?;
        let out = synthesize_optimal_with_limit(&self.inner, &t, size_limit).map_err(err)?;
        Ok((
            self.table(&out.values),
            PyStrategy {
                inner: out.strategy,
            },
            t.caps.clone(),
            t.provenance.to_string(),
        ))
    }

    /// Values of the capped game computed without the mean-payoff solver.
    #[pyo3(signature = (caps, budget=1_000_000))]
    fn oracle(&self, caps: Vec<u64>, budget: u64) -> PyResult<ValueTable> {
        let t = Thresholds::user(caps).map_err(err)?;
        let values = rrsynth_core::rr_oracle_optimal(&self.inner, &t, budget).map_err(err)?;
        Ok(self.table(&values))
    }

    /// Value of `strategy` from `start`.
    fn evaluate(&self, strategy: &PyStrategy, start: &str) -> PyResult<Option<Rational64>> {
        let v = self.inner.arena().require(start).map_err(err)?;
        rrsynth_core::evaluate_strategy(&self.inner, &strategy.inner, v)
            .map(value)
            .map_err(err)
    }

    /// Value of the play `prefix · cycle^ω`.
    fn lasso_value(&self, prefix: Vec<String>, cycle: Vec<String>) -> PyResult<Option<Rational64>> {
        let p: Vec<&str> = prefix.iter().map(String::as_str).collect();
        let c: Vec<&str> = cycle.iter().map(String::as_str).collect();
        let play = LassoPlay::from_names(self.inner.arena(), &p, &c).map_err(err)?;
        rrsynth_core::lasso_value(&self.inner, &play, None)
            .map(value)
            .map_err(err)
    }

    /// Plays `strategy` against `adversary` (a Player 1 strategy) or a
    /// list of Player 1 choices. Returns `(vertex, waiting, penalty)` rows.
    #[pyo3(signature = (strategy, start, steps, adversary=None, script=None))]
    fn play(
        &self,
        strategy: &PyStrategy,
        start: &str,
        steps: usize,
        adversary: Option<PyRef<'_, PyStrategy>>,
        script: Option<Vec<String>>,
    ) -> PyResult<Vec<(String, Vec<u64>, u64)>> {
        let a = self.inner.arena();
        let from = a.require(start).map_err(err)?;
        let opponent = match (&adversary, script) {
            (Some(t), None) => Adversary::Strategy(&t.inner),
            (None, script) => Adversary::Script(
                script
                    .unwrap_or_default()
                    .iter()
                    .map(|n| a.require(n))
                    .collect::<Result<_, _>>()
                    .map_err(err)?,
            ),
            (Some(_), Some(_)) => {
                return Err(PyValueError::new_err("give either adversary or script"))
            }
        };
        let trace = rrsynth_core::playout(&self.inner, &strategy.inner, opponent, from, steps)
            .map_err(err)?;
        Ok(trace
            .into_iter()
            .map(|s| (a.name(s.vertex).to_string(), s.waiting.0, s.penalty))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Game(vertices={}, conditions={})",
            self.inner.s(),
            self.inner.k()
        )
    }
}

impl PyGame {
    fn names(&self, set: &[bool]) -> Vec<String> {
        let a = self.inner.arena();
        (0..a.len())
            .filter(|&v| set[v])
            .map(|v| a.name(v).to_string())
            .collect()
    }

    fn table(&self, values: &[ValueResult]) -> ValueTable {
        let a = self.inner.arena();
        (0..a.len())
            .map(|v| (a.name(v).to_string(), value(values[v])))
            .collect()
    }
}

/// A finite-state strategy bound to a game's vertex names.
#[pyclass(name = "Strategy", module = "rrsynth", frozen)]
struct PyStrategy {
    inner: FiniteStateStrategy,
}

#[pymethods]
impl PyStrategy {
    #[staticmethod]
    fn from_json(game: &PyGame, text: &str) -> PyResult<PyStrategy> {
        format::parse_strategy(game.inner.arena(), text)
            .map(|inner| PyStrategy { inner })
            .map_err(err)
    }

    /// The alternating-response strategy on `fig1`.
    #[staticmethod]
    fn fig1_alternating(game: &PyGame) -> PyResult<PyStrategy> {
        games::fig1_alternating(&game.inner)
            .map(|inner| PyStrategy { inner })
            .map_err(err)
    }

    fn to_json(&self, game: &PyGame) -> String {
        format::write_strategy(game.inner.arena(), &self.inner)
    }

    #[getter]
    fn player(&self) -> u8 {
        self.inner.player().index()
    }

    #[getter]
    fn memory_size(&self) -> usize {
        self.inner.size()
    }
}

/// Mean-payoff game: Player 0 minimizes, Player 1 maximizes.
#[pyclass(name = "MeanPayoffGame", module = "rrsynth", frozen)]
struct PyMeanPayoffGame {
    inner: meanpayoff::MeanPayoffGame,
}

#[pymethods]
impl PyMeanPayoffGame {
    /// `owners[v]` is 0 or 1; `edges` are `(u, v, weight)`.
    #[new]
    fn new(owners: Vec<u8>, edges: Vec<(usize, usize, i64)>) -> PyResult<Self> {
        let vertices = owners
            .iter()
            .enumerate()
            .map(|(i, &o)| {
                Ok(Vertex {
                    name: format!("v{i}"),
                    owner: Player::from_index(o)
                        .ok_or_else(|| PyValueError::new_err(format!("owner {o} is not 0 or 1")))?,
                })
            })
            .collect::<PyResult<Vec<_>>>()?;
        let arena =
            Arena::from_parts(vertices, edges.iter().map(|&(u, v, _)| (u, v))).map_err(err)?;
        let weights = (0..arena.len())
            .map(|u| {
                arena
                    .successors(u)
                    .iter()
                    .map(|&v| {
                        edges
                            .iter()
                            .find(|&&(a, b, _)| (a, b) == (u, v))
                            .map_or(0, |&(_, _, w)| w)
                    })
                    .collect()
            })
            .collect();
        meanpayoff::MeanPayoffGame::new(arena, weights)
            .map(|inner| PyMeanPayoffGame { inner })
            .map_err(err)
    }

    /// `(values, moves_0, moves_1)`; moves are `None` off the player's
    /// vertices.
    #[allow(clippy::type_complexity)]
    fn solve(&self) -> PyResult<(Vec<Rational64>, Vec<Option<usize>>, Vec<Option<usize>>)> {
        let sol = meanpayoff::solve_mpg(&self.inner).map_err(err)?;
        Ok((sol.values, sol.strategy_0, sol.strategy_1))
    }

    /// Values by enumerating positional strategies.
    #[pyo3(signature = (budget=1_000_000))]
    fn oracle(&self, budget: u64) -> PyResult<Vec<Rational64>> {
        meanpayoff::mpg_oracle(&self.inner, budget).map_err(err)
    }
}

#[pyfunction]
fn dickson_bound(s: u64, k: usize) -> BigUint {
    bounds::dickson_bound(s, k)
}

#[pyfunction]
fn dickson_bound_closed(s: u64, k: usize) -> PyResult<BigUint> {
    bounds::dickson_bound_closed(s, k).map_err(err)
}

#[pymodule]
fn rrsynth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_class::<PyStrategy>()?;
    m.add_class::<PyMeanPayoffGame>()?;
    m.add_function(wrap_pyfunction!(dickson_bound, m)?)?;
    m.add_function(wrap_pyfunction!(dickson_bound_closed, m)?)?;
    m.add("GameError", m.py().get_type::<GameError>())?;
    m.add("LimitError", m.py().get_type::<LimitError>())?;
    Ok(())
}

//! Interchangeable algorithms registered by name and chosen at run time.

use crate::error::{domain, Result};
use crate::gen_euler::{pgf, pgf_bruteforce, pgf_classical_limit, GenEulerParams, DEFAULT_TABLE_TOL};
use crate::regime::{classify, classify_oracle, zeta_q, zeta_q_bisection, Regime};

/// Name-keyed collection of trait objects, kept in registration order.
pub struct Registry<T: ?Sized> {
    entries: Vec<(&'static str, Box<T>)>,
}

impl<T: ?Sized> Default for Registry<T> {
    fn default() -> Self {
        Self { entries: Vec::new() }
    }
}

impl<T: ?Sized> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &'static str, item: Box<T>) -> Result<()> {
        if self.entries.iter().any(|(n, _)| *n == name) {
            return domain(format!("{name} is already registered"));
        }
        self.entries.push((name, item));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        match self.entries.iter().find(|(n, _)| *n == name) {
            Some((_, item)) => Ok(item.as_ref()),
            None => domain(format!("unknown name {name}, expected one of {}", self.names().join(", "))),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &T)> {
        self.entries.iter().map(|(n, item)| (*n, item.as_ref()))
    }
}

/// A way of evaluating `E[t^X]`.
pub trait PgfMethod: Send + Sync {
    fn eval(&self, t: f64, params: &GenEulerParams) -> Result<f64>;
}

struct ClosedForm;

impl PgfMethod for ClosedForm {
    fn eval(&self, t: f64, params: &GenEulerParams) -> Result<f64> {
        pgf(t, params)
    }
}

struct BruteForce;

impl PgfMethod for BruteForce {
    fn eval(&self, t: f64, params: &GenEulerParams) -> Result<f64> {
        pgf_bruteforce(t, params, DEFAULT_TABLE_TOL)
    }
}

/// Ignores `q`: the `q -> 1` law at the same `(lambda, m)`.
struct ClassicalLimit;

impl PgfMethod for ClassicalLimit {
    fn eval(&self, t: f64, params: &GenEulerParams) -> Result<f64> {
        pgf_classical_limit(t, params.lambda(), params.m())
    }
}

pub fn pgf_methods() -> Registry<dyn PgfMethod> {
    let mut r: Registry<dyn PgfMethod> = Registry::new();
    r.register("closed-form", Box::new(ClosedForm)).unwrap();
    r.register("brute-force", Box::new(BruteForce)).unwrap();
    r.register("classical-limit", Box::new(ClassicalLimit)).unwrap();
    r
}

/// Solver for the root of the cubic that sets the threshold index.
pub trait ZetaSolver: Send + Sync {
    fn solve(&self, q: f64) -> Result<f64>;
}

struct Trigonometric;

impl ZetaSolver for Trigonometric {
    fn solve(&self, q: f64) -> Result<f64> {
        zeta_q(q)
    }
}

struct Bisection;

impl ZetaSolver for Bisection {
    fn solve(&self, q: f64) -> Result<f64> {
        zeta_q_bisection(q)
    }
}

pub fn zeta_solvers() -> Registry<dyn ZetaSolver> {
    let mut r: Registry<dyn ZetaSolver> = Registry::new();
    r.register("trigonometric", Box::new(Trigonometric)).unwrap();
    r.register("bisection", Box::new(Bisection)).unwrap();
    r
}

pub trait RegimeClassifier: Send + Sync {
    fn classify(&self, lambda: f64, q: f64, m: u32) -> Result<Regime>;
}

struct SignPoly;

impl RegimeClassifier for SignPoly {
    fn classify(&self, lambda: f64, q: f64, m: u32) -> Result<Regime> {
        classify(lambda, q, m)
    }
}

/// Sign of `Var - E` from tabulated moments.
struct MandelMoments;

impl RegimeClassifier for MandelMoments {
    fn classify(&self, lambda: f64, q: f64, m: u32) -> Result<Regime> {
        classify_oracle(lambda, q, m)
    }
}

pub fn regime_classifiers() -> Registry<dyn RegimeClassifier> {
    let mut r: Registry<dyn RegimeClassifier> = Registry::new();
    r.register("sign-poly", Box::new(SignPoly)).unwrap();
    r.register("mandel-moments", Box::new(MandelMoments)).unwrap();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn registry_lookup() {
        let r = pgf_methods();
        assert_eq!(r.names(), ["closed-form", "brute-force", "classical-limit"]);
        assert!(matches!(r.get("nope"), Err(Error::Domain(_))));
        let mut r = zeta_solvers();
        assert!(r.register("bisection", Box::new(Bisection)).is_err());
    }

    #[test]
    fn pgf_methods_agree() {
        let r = pgf_methods();
        let p = GenEulerParams::new(0.7, 2, 0.3).unwrap();
        let a = r.get("closed-form").unwrap().eval(0.4, &p).unwrap();
        let b = r.get("brute-force").unwrap().eval(0.4, &p).unwrap();
        assert!((a - b).abs() < 1e-12);
        let c = r.get("classical-limit").unwrap().eval(1.0, &p).unwrap();
        assert!((c - 1.0).abs() < 1e-14);
    }

    #[test]
    fn solvers_and_classifiers_agree() {
        let s = zeta_solvers();
        for q in [0.85, 0.9, 0.99] {
            let a = s.get("trigonometric").unwrap().solve(q).unwrap();
            let b = s.get("bisection").unwrap().solve(q).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
        let c = regime_classifiers();
        for (_, clf) in c.iter() {
            assert_eq!(clf.classify(5.0, 0.95, 1).unwrap(), Regime::SuperPoissonian);
            assert_eq!(clf.classify(0.1, 0.5, 2).unwrap(), Regime::SubPoissonian);
        }
    }
}

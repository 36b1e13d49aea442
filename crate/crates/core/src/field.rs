use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Formula, ParseError};

/// The defining function `f(y, z)` of a strict Walker metric, with exact partials.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2 {
    f: Formula,
    fy: Formula,
    fz: Formula,
}

/// `f` and its first partials at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet {
    pub f: f64,
    pub fy: f64,
    pub fz: f64,
}

const VARS: &[&str] = &["y", "z"];

impl ScalarField2 {
    /// Parses `text` over the variables `y` and `z`. The variable `x` is rejected.
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let f = Formula::parse(text, VARS)?;
        let fy = f.derivative("y");
        let fz = f.derivative("z");
        Ok(ScalarField2 { f, fy, fz })
    }

    pub fn flat() -> Self {
        ScalarField2::parse("0").expect("constant parses")
    }

    pub fn source(&self) -> &str {
        self.f.source()
    }

    pub fn formula(&self) -> &Formula {
        &self.f
    }

    pub fn partial_y(&self) -> &Formula {
        &self.fy
    }

    pub fn partial_z(&self) -> &Formula {
        &self.fz
    }

    pub fn is_constant(&self) -> bool {
        self.f.is_constant()
    }

    pub fn value(&self, y: f64, z: f64) -> Result<f64> {
        eval(&self.f, y, z)
    }

    pub fn jet(&self, y: f64, z: f64) -> Result<FieldJet> {
        Ok(FieldJet { f: eval(&self.f, y, z)?, fy: eval(&self.fy, y, z)?, fz: eval(&self.fz, y, z)? })
    }
}

fn eval(formula: &Formula, y: f64, z: f64) -> Result<f64> {
    formula.eval(&[y, z]).map_err(|e| Error::FieldSingular { y, z, reason: e.0 })
}

impl fmt::Display for ScalarField2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.f.source())
    }
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn partials_match_central_differences(
            text in prop::sample::select(vec!["y*z", "0.5*sin(y) + 0.2*z^2", "exp(0.2*y)*cos(z)", "y^3 - z/(2 + y^2)", "cosh(z)*y"]),
            y in -2.0..2.0f64,
            z in -2.0..2.0f64,
        ) {
            let f = ScalarField2::parse(text).unwrap();
            let jet = f.jet(y, z).unwrap();
            let h = 1e-5;
            let fy = (f.value(y + h, z).unwrap() - f.value(y - h, z).unwrap()) / (2.0 * h);
            let fz = (f.value(y, z + h).unwrap() - f.value(y, z - h).unwrap()) / (2.0 * h);
            prop_assert!((jet.fy - fy).abs() <= 1e-6 * (1.0 + fy.abs()), "{} vs {}", jet.fy, fy);
            prop_assert!((jet.fz - fz).abs() <= 1e-6 * (1.0 + fz.abs()), "{} vs {}", jet.fz, fz);
        }
    }
}

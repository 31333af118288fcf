//! Study configuration. Files are TOML; every key is optional and falls back
//! to the defaults of the chosen study, so dotted overrides such as
//! `tolerance.eoc = [1.7, 2.5]` are enough to adjust one setting.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::solution::SolutionKind;
use crate::geometry::{DomainKind, SmoothDomain};
use crate::parabolic::Scheme;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Converge,
    Smoothing,
    Maxreg,
    Skin,
    Green,
    Galerkin,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Converge => "converge",
            StudyKind::Smoothing => "smoothing",
            StudyKind::Maxreg => "maxreg",
            StudyKind::Skin => "skin",
            StudyKind::Green => "green",
            StudyKind::Galerkin => "galerkin",
        }
    }
}

impl std::str::FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "converge" => StudyKind::Converge,
            "smoothing" => StudyKind::Smoothing,
            "maxreg" => StudyKind::Maxreg,
            "skin" => StudyKind::Skin,
            "green" => StudyKind::Green,
            "galerkin" => StudyKind::Galerkin,
            other => return Err(Error::Config(format!("unknown study `{other}`"))),
        })
    }
}

/// Pass windows and thresholds of the verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Window for the final EOC of a convergence study.
    pub eoc: [f64; 2],
    /// Minimum final EOC of the interpolation control, if checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_min_eoc: Option<f64>,
    pub skin_t_star: [f64; 2],
    pub skin_area: [f64; 2],
    pub skin_normal: [f64; 2],
    /// Margin above `1 + 2/e` for the `q = 2` smoothing table.
    pub smoothing_margin: f64,
    /// Allowed growth per level of the `q = inf` smoothing maxima.
    pub smoothing_growth: f64,
    pub maxreg_l2_ceiling: f64,
    pub maxreg_drift: f64,
    pub maxreg_oracle: f64,
    pub galerkin_min_slope: f64,
    /// Ceiling of the gap when the polygon is the domain.
    pub galerkin_flat: f64,
    pub green_slope: [f64; 2],
    pub green_ft_min_slope: f64,
    /// Largest relative shift between the two reference levels.
    pub green_gate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eoc: [1.7, 2.3],
            control_min_eoc: None,
            skin_t_star: [1.8, 2.2],
            skin_area: [1.7, 2.3],
            skin_normal: [0.8, 1.2],
            smoothing_margin: 1e-6,
            smoothing_growth: 0.10,
            maxreg_l2_ceiling: 1.05,
            maxreg_drift: 0.15,
            maxreg_oracle: 0.01,
            galerkin_min_slope: 1.5,
            galerkin_flat: 1e-9,
            green_slope: [0.6, 1.4],
            green_ft_min_slope: -0.15,
            green_gate: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: StudyKind,
    pub domain: DomainKind,
    pub degree: usize,
    /// Coarsest mesh size; level `l` uses `h0 / 2^l`.
    pub h0: f64,
    pub levels: usize,
    pub t_end: f64,
    /// Time step as an expression in `h`, e.g. `"h/2"` or `"h^2/4"`.
    pub dt: String,
    pub scheme: Scheme,
    pub solution: SolutionKind,
    pub seed: u64,
    pub c_star: f64,
    /// Power `w` of the `|log h|` correction in rate fits.
    pub log_power: f64,
    pub max_turning_deg: f64,
    pub eigen_cap: usize,
    /// Time intervals of maximal regularity loads (even).
    pub maxreg_intervals: usize,
    pub random_samples: usize,
    pub smoothing_times: Vec<f64>,
    /// Refinement factor of the Green's function reference and of the gate.
    pub reference_factor: usize,
    pub gate_factor: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub tolerance: Tolerances,
}

impl StudyConfig {
    pub fn defaults(study: StudyKind) -> Self {
        let mut c = Self {
            study,
            domain: DomainKind::Disk { radius: 1.0 },
            degree: 1,
            h0: 0.4,
            levels: 4,
            t_end: 0.5,
            dt: "h/2".into(),
            scheme: Scheme::CrankNicolson,
            solution: SolutionKind::Sine,
            seed: 0,
            c_star: 2.0,
            log_power: 1.0,
            max_turning_deg: 30.0,
            eigen_cap: crate::parabolic::DEFAULT_EIGEN_CAP,
            maxreg_intervals: 256,
            random_samples: 20,
            smoothing_times: vec![0.05, 0.1, 0.25, 0.5, 1.0, 2.0],
            reference_factor: 4,
            gate_factor: 8,
            output: None,
            tolerance: Tolerances::default(),
        };
        match study {
            StudyKind::Green => {
                c.h0 = 0.1;
                c.levels = 3;
                c.t_end = 0.25;
                c.dt = "h^2/4".into();
                c.scheme = Scheme::BackwardEuler;
            }
            StudyKind::Galerkin => {
                c.h0 = 0.2;
                c.levels = 3;
            }
            StudyKind::Converge | StudyKind::Smoothing | StudyKind::Maxreg | StudyKind::Skin => {}
        }
        c
    }

    /// Parses a TOML document over the defaults of its `study`.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let study: StudyKind = user
            .get("study")
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::Config("missing `study`".into()))?
            .parse()?;
        Self::defaults(study).overlay(user)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Applies the keys of `user` on top of `self`. Tables merge key by key
    /// except `domain`, which is replaced whole.
    pub fn overlay(&self, user: toml::Table) -> Result<Self> {
        let mut base = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        merge(&mut base, user);
        let cfg: Self = base.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        SmoothDomain::new(self.domain).map_err(|e| Error::Config(e.to_string()))?;
        if !(1..=3).contains(&self.degree) {
            return bad(format!("degree must be 1, 2 or 3, got {}", self.degree));
        }
        if !(self.h0 > 0.0) || self.levels == 0 {
            return bad(format!("need h0 > 0 and levels >= 1, got h0={}, levels={}", self.h0, self.levels));
        }
        if !(self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.study == StudyKind::Green && self.t_end > 1.0 {
            return bad(format!("Green studies need t_end <= 1, got {}", self.t_end));
        }
        if !(self.c_star >= 1.0) {
            return bad(format!("c_star must be >= 1, got {}", self.c_star));
        }
        if self.maxreg_intervals == 0 || self.maxreg_intervals % 2 == 1 {
            return bad(format!("maxreg_intervals must be even, got {}", self.maxreg_intervals));
        }
        DtRule::parse(&self.dt)?;
        Ok(())
    }

    pub fn smooth_domain(&self) -> Result<SmoothDomain> {
        SmoothDomain::new(self.domain)
    }

    pub fn level_h(&self, level: usize) -> f64 {
        self.h0 / 2f64.powi(level as i32)
    }

    pub fn dt_rule(&self) -> Result<DtRule> {
        DtRule::parse(&self.dt)
    }

    pub fn mesh_options(&self) -> crate::mesh::MeshOptions {
        crate::mesh::MeshOptions {
            max_turning_deg: self.max_turning_deg,
            ..Default::default()
        }
    }
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) if k != "domain" => merge(b, u),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Arithmetic expression in `h`: numbers, `h`, `+ - * / ^` and parentheses,
/// all in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct DtRule {
    source: String,
    expr: Expr,
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Num(f64),
    H,
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
}

impl DtRule {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let expr = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Config(format!("trailing input in dt rule `{src}`")));
        }
        Ok(Self {
            source: src.to_string(),
            expr,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, h: f64) -> Result<f64> {
        let v = eval(&self.expr, h);
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Config(format!("dt rule `{}` gives {v} at h = {h}", self.source)));
        }
        Ok(v)
    }
}

fn eval(e: &Expr, h: f64) -> f64 {
    match e {
        Expr::Num(v) => *v,
        Expr::H => h,
        Expr::Neg(a) => -eval(a, h),
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval(a, h), eval(b, h));
            match op {
                '+' => a + b,
                '-' => a - b,
                '*' => a * b,
                '/' => a / b,
                _ => a.powf(b),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    H,
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == 'h' {
            out.push(Tok::H);
            i += 1;
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_digit()
                    || chars[i] == '.'
                    || chars[i] == 'e'
                    || ((chars[i] == '-' || chars[i] == '+') && chars[i - 1] == 'e'))
            {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(
                s.parse()
                    .map_err(|_| Error::Config(format!("bad number `{s}` in dt rule")))?,
            ));
        } else {
            return Err(Error::Config(format!("unexpected `{c}` in dt rule `{src}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    // right associative
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::H) => Ok(Expr::H),
            Some(Tok::Op('(')) => {
                let e = self.sum()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Config("missing `)` in dt rule".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(Error::Config("malformed dt rule".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dt_rules_evaluate_in_floating_point() {
        let cases = [
            ("h/2", 0.05),
            ("h^2/4", 0.0025),
            ("1/4*h^2", 0.0025),
            ("0.5 * (h + h)", 0.1),
            ("2^-1*h", 0.05),
            ("1e-1 * h", 0.01),
        ];
        for (src, want) in cases {
            let v = DtRule::parse(src).unwrap().eval(0.1).unwrap();
            assert!((v - want).abs() < 1e-15, "{src}: {v}");
        }
        assert!(DtRule::parse("h/").is_err());
        assert!(DtRule::parse("x*h").is_err());
        assert!(DtRule::parse("h - h").unwrap().eval(0.1).is_err());
    }

    #[test]
    fn overlay_keeps_study_defaults() {
        let cfg = StudyConfig::from_toml_str(
            r#"
            study = "green"
            tolerance.green_gate = 0.3
            [domain]
            kind = "ellipse"
            a = 1.2
            b = 0.8
            "#,
        )
        .unwrap();
        assert_eq!(cfg.t_end, 0.25);
        assert_eq!(cfg.scheme, Scheme::BackwardEuler);
        assert_eq!(cfg.tolerance.green_gate, 0.3);
        assert_eq!(cfg.tolerance.eoc, [1.7, 2.3]);
        assert_eq!(cfg.domain, DomainKind::Ellipse { a: 1.2, b: 0.8 });
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(StudyConfig::from_toml_str("levels = 3").is_err());
        assert!(StudyConfig::from_toml_str("study = \"nope\"").is_err());
        assert!(StudyConfig::from_toml_str("study = \"converge\"\nlevles = 3").is_err());
        assert!(StudyConfig::from_toml_str("study = \"green\"\nt_end = 2.0").is_err());
        assert!(StudyConfig::from_toml_str("study = \"converge\"\ndegree = 4").is_err());
    }
}

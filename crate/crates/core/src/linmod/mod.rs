//! Linear models: factor coding and design matrices, least squares with
//! Wald and nested F tests, one-way and stratified ANOVA for balanced
//! designs, method-of-moments variance components, and binomial-logit GLMs.

mod anova;
mod design;
mod glm;
mod ols;

pub use anova::{
    anova_oneway, anova_strata, variance_components, ContrastTest, OneWayAnova, StrataAnova, StrataLayout, Stratum,
    TermRow, VarianceComponent, VarianceComponents,
};
pub use design::{build_design, Coding, DesignMatrix, FactorSpec, TermSpan, Variable, RANK_TOL};
pub use glm::{glm_binomial_fit, glm_lrt, GlmFit};
pub use ols::{nested_f_test, ols_fit, wald_coef_test, OlsFit};

//! The three-dimension category scheme and per-idea labels.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// JSON keys of the three label dimensions, in scheme order.
pub const DIMENSION_KEYS: [&str; 3] = ["industry_context", "psychological_need", "product_form"];

const BUILTIN_FITNESS: &str = include_str!("../data/scheme_fitness_v1.json");

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("scheme must have exactly 3 dimensions, found {0}")]
    DimensionCount(usize),
    #[error("dimension {0:?} has no categories")]
    EmptyDimension(String),
    #[error("dimension {dimension:?}: category {category:?} duplicates another after normalization")]
    DuplicateCategory { dimension: String, category: String },
    #[error("label for scheme {found:?} used with scheme {expected:?}")]
    VersionMismatch { expected: String, found: String },
    #[error("{dimension}: {category:?} is not a category of this scheme")]
    UnknownCategory { dimension: String, category: String },
    #[error("reading scheme file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing scheme file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Canonical form used to compare category names.
///
/// Case-folds, treats `&` and `and` as the same word, collapses runs of
/// whitespace and ignores spacing around `/`.
pub fn normalize_category(name: &str) -> String {
    let lowered = name.to_lowercase().replace('&', " and ");
    let collapsed = lowered.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed.replace(" / ", "/").replace(" /", "/").replace("/ ", "/")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryScheme {
    pub version: String,
    pub dimensions: Vec<Dimension>,
}

impl CategoryScheme {
    /// The 9/9/10 fitness-product scheme.
    pub fn builtin() -> Self {
        let scheme: Self = serde_json::from_str(BUILTIN_FITNESS).expect("built-in scheme parses");
        scheme.validate().expect("built-in scheme is valid");
        scheme
    }

    pub fn new(version: impl Into<String>, dimensions: Vec<Dimension>) -> Result<Self, SchemeError> {
        let scheme = Self { version: version.into(), dimensions };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn from_json(text: &str) -> Result<Self, SchemeError> {
        let scheme: Self = serde_json::from_str(text)?;
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn load(path: &Path) -> Result<Self, SchemeError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        if self.dimensions.len() != 3 {
            return Err(SchemeError::DimensionCount(self.dimensions.len()));
        }
        for dim in &self.dimensions {
            if dim.categories.is_empty() {
                return Err(SchemeError::EmptyDimension(dim.name.clone()));
            }
            let mut seen = HashSet::new();
            for cat in &dim.categories {
                if !seen.insert(normalize_category(cat)) {
                    return Err(SchemeError::DuplicateCategory {
                        dimension: dim.name.clone(),
                        category: cat.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn sizes(&self) -> [usize; 3] {
        [0, 1, 2].map(|d| self.dimensions[d].categories.len())
    }

    pub fn total_categories(&self) -> usize {
        self.sizes().iter().sum()
    }

    pub fn total_combinations(&self) -> usize {
        self.sizes().iter().product()
    }

    /// Index of `name` within dimension `dim`, matched after normalization.
    pub fn index_of(&self, dim: usize, name: &str) -> Option<usize> {
        let wanted = normalize_category(name);
        self.dimensions[dim]
            .categories
            .iter()
            .position(|c| normalize_category(c) == wanted)
    }

    /// Canonical spelling of `name` within dimension `dim`.
    pub fn resolve(&self, dim: usize, name: &str) -> Option<&str> {
        self.index_of(dim, name).map(|i| self.dimensions[dim].categories[i].as_str())
    }

    pub fn category(&self, dim: usize, index: usize) -> &str {
        &self.dimensions[dim].categories[index]
    }

    /// Builds a label from raw names, resolving each against the scheme.
    pub fn label(&self, names: [&str; 3]) -> Result<IdeaLabel, SchemeError> {
        let mut resolved: [String; 3] = Default::default();
        for (d, name) in names.iter().enumerate() {
            resolved[d] = self
                .resolve(d, name)
                .ok_or_else(|| SchemeError::UnknownCategory {
                    dimension: self.dimensions[d].name.clone(),
                    category: (*name).to_string(),
                })?
                .to_string();
        }
        let [a, b, c] = resolved;
        Ok(IdeaLabel::new(a, b, c, self.version.clone()))
    }

    pub fn label_from_indices(&self, idx: [usize; 3]) -> IdeaLabel {
        IdeaLabel::new(
            self.category(0, idx[0]),
            self.category(1, idx[1]),
            self.category(2, idx[2]),
            self.version.clone(),
        )
    }

    pub fn indices_of(&self, label: &IdeaLabel) -> Result<[usize; 3], SchemeError> {
        self.check(label)?;
        let cats = label.categories();
        Ok([0, 1, 2].map(|d| self.index_of(d, cats[d]).expect("checked")))
    }

    /// Checks that `label` belongs to this scheme and names valid categories.
    pub fn check(&self, label: &IdeaLabel) -> Result<(), SchemeError> {
        if label.scheme_version != self.version {
            return Err(SchemeError::VersionMismatch {
                expected: self.version.clone(),
                found: label.scheme_version.clone(),
            });
        }
        for (d, cat) in label.categories().iter().enumerate() {
            if self.index_of(d, cat).is_none() {
                return Err(SchemeError::UnknownCategory {
                    dimension: self.dimensions[d].name.clone(),
                    category: (*cat).to_string(),
                });
            }
        }
        Ok(())
    }
}

/// One category per dimension for a single idea.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdeaLabel {
    pub industry_context: String,
    pub psychological_need: String,
    pub product_form: String,
    pub scheme_version: String,
}

impl IdeaLabel {
    pub fn new(
        industry_context: impl Into<String>,
        psychological_need: impl Into<String>,
        product_form: impl Into<String>,
        scheme_version: impl Into<String>,
    ) -> Self {
        Self {
            industry_context: industry_context.into(),
            psychological_need: psychological_need.into(),
            product_form: product_form.into(),
            scheme_version: scheme_version.into(),
        }
    }

    pub fn categories(&self) -> [&str; 3] {
        [&self.industry_context, &self.psychological_need, &self.product_form]
    }
}

impl AsRef<IdeaLabel> for IdeaLabel {
    fn as_ref(&self) -> &IdeaLabel {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_scheme_has_paper_sizes() {
        let s = CategoryScheme::builtin();
        assert_eq!(s.sizes(), [9, 9, 10]);
        assert_eq!(s.total_categories(), 28);
        assert_eq!(s.total_combinations(), 810);
    }

    #[test]
    fn normalization_handles_ampersand_case_and_spacing() {
        let s = CategoryScheme::builtin();
        assert_eq!(s.resolve(0, "Strength and muscle"), Some("Strength & Muscle"));
        assert_eq!(s.resolve(0, "  STRENGTH   &  MUSCLE "), Some("Strength & Muscle"));
        assert_eq!(s.resolve(2, "app/software"), Some("App / Software"));
        assert_eq!(s.resolve(2, "Strength & Muscle"), None);
    }

    #[test]
    fn rejects_bad_schemes() {
        let dim = |n: &str, c: &[&str]| Dimension {
            name: n.into(),
            categories: c.iter().map(|s| s.to_string()).collect(),
        };
        assert!(matches!(
            CategoryScheme::new("x", vec![dim("a", &["p"]), dim("b", &["q"])]),
            Err(SchemeError::DimensionCount(2))
        ));
        assert!(matches!(
            CategoryScheme::new(
                "x",
                vec![dim("a", &["Fun & Games", "fun and games"]), dim("b", &["q"]), dim("c", &["r"])]
            ),
            Err(SchemeError::DuplicateCategory { .. })
        ));
        assert!(matches!(
            CategoryScheme::new("x", vec![dim("a", &[]), dim("b", &["q"]), dim("c", &["r"])]),
            Err(SchemeError::EmptyDimension(_))
        ));
    }

    #[test]
    fn label_checks_version_and_categories() {
        let s = CategoryScheme::builtin();
        let l = s.label(["strength and muscle", "convenience & access", "traditional equipment"]).unwrap();
        assert_eq!(l.categories(), ["Strength & Muscle", "Convenience & Access", "Traditional Equipment"]);
        assert!(s.check(&l).is_ok());
        let mut other = l.clone();
        other.scheme_version = "v0".into();
        assert!(matches!(s.check(&other), Err(SchemeError::VersionMismatch { .. })));
        assert!(s.label(["Juggling", "Fun", "Wearable"]).is_err());
    }
}

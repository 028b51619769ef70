//! One built-in model per ruin regime, used by the `gallery` and `certify`
//! commands and by the test suites.

use crate::levy_model::{JumpMeasure, LevyTriplet};

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryModel {
    pub name: &'static str,
    /// Regime the model is built to land in.
    pub expected_case: char,
    pub triplet: LevyTriplet,
    /// Capital levels used when certifying this model.
    pub capitals: &'static [f64],
}

/// Negative mean drift: `p = 1`, `σ² = 1`, claims at rate 2 with Exp(1) sizes.
pub fn almost_sure_ruin() -> GalleryModel {
    GalleryModel {
        name: "negative_drift",
        expected_case: 'A',
        triplet: LevyTriplet::new(1.0, 1.0, JumpMeasure::exponential_negative(2.0, 1.0)),
        capitals: &[1.0, 2.0],
    }
}

/// Classical Cramér-Lundberg model with adjustment coefficient 1/2.
pub fn lundberg() -> GalleryModel {
    GalleryModel {
        name: "cramer_lundberg",
        expected_case: 'B',
        triplet: LevyTriplet::new(2.0, 0.0, JumpMeasure::exponential_negative(1.0, 1.0)),
        capitals: &[1.0, 2.0, 4.0],
    }
}

/// Pure premium income.
pub fn never_ruin() -> GalleryModel {
    GalleryModel {
        name: "pure_drift",
        expected_case: 'C',
        triplet: LevyTriplet::new(3.0, 0.0, JumpMeasure::none()),
        capitals: &[0.0, 1.0],
    }
}

/// Tempered Pareto claims whose exponent stays negative up to `γ_c = 1`;
/// premium chosen so the mean drift is exactly 1.
pub fn critical_exponent() -> GalleryModel {
    GalleryModel {
        name: "tempered_pareto",
        expected_case: 'D',
        triplet: LevyTriplet::with_mean_drift(1.0, 0.0, JumpMeasure::tempered_pareto_negative(1.0, 1.0, 3.0, 1.0)),
        capitals: &[1.0, 2.0],
    }
}

/// All four models in case order.
pub fn gallery() -> Vec<GalleryModel> {
    vec![almost_sure_ruin(), lundberg(), never_ruin(), critical_exponent()]
}

/// Looks a model up by name or by case letter (case-insensitive).
pub fn find(key: &str) -> Option<GalleryModel> {
    gallery()
        .into_iter()
        .find(|m| m.name == key || m.expected_case.to_string().eq_ignore_ascii_case(key))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruin_classifier::{classify, DEFAULT_ROOT_TOL};

    #[test]
    fn each_model_lands_in_its_case() {
        for m in gallery() {
            let c = classify(&m.triplet, DEFAULT_ROOT_TOL).unwrap();
            assert_eq!(c.case.letter(), m.expected_case, "{}", m.name);
        }
    }

    #[test]
    fn tempered_model_has_unit_drift() {
        let d = critical_exponent().triplet.delta().unwrap();
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lookup_by_name_and_letter() {
        assert_eq!(find("b").unwrap().name, "cramer_lundberg");
        assert_eq!(find("pure_drift").unwrap().expected_case, 'C');
        assert!(find("nope").is_none());
    }
}

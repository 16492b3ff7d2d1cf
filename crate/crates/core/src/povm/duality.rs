use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conversions between gentleness `alpha` and privacy `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Duality {
    /// `alpha = tanh(delta/4)`: a `delta`-private measurement implemented by
    /// positive square roots is `alpha`-gentle.
    PrivacyToGentleness,
    /// `delta = 4 artanh(2 alpha)`: any `alpha`-gentle measurement, `alpha < 1/2`.
    GentlenessToPrivacy,
    /// `delta = 4 artanh(alpha)`: `alpha`-gentle with positive-definite
    /// measurement operators.
    GentlenessToPrivacyPositive,
    /// `alpha = tanh(delta/4)/2`, inverse of [`Duality::GentlenessToPrivacy`].
    PrivacyToGentlenessGeneral,
}

impl Duality {
    pub const ALL: [Duality; 4] = [
        Duality::PrivacyToGentleness,
        Duality::GentlenessToPrivacy,
        Duality::GentlenessToPrivacyPositive,
        Duality::PrivacyToGentlenessGeneral,
    ];

    pub fn inverse(self) -> Self {
        match self {
            Duality::PrivacyToGentleness => Duality::GentlenessToPrivacyPositive,
            Duality::GentlenessToPrivacyPositive => Duality::PrivacyToGentleness,
            Duality::GentlenessToPrivacy => Duality::PrivacyToGentlenessGeneral,
            Duality::PrivacyToGentlenessGeneral => Duality::GentlenessToPrivacy,
        }
    }

    pub fn takes_alpha(self) -> bool {
        matches!(
            self,
            Duality::GentlenessToPrivacy | Duality::GentlenessToPrivacyPositive
        )
    }
}

pub fn duality_convert(direction: Duality, value: f64) -> Result<f64> {
    if direction.takes_alpha() {
        if !(0.0..0.5).contains(&value) {
            return Err(Error::Domain {
                name: "alpha",
                value,
                domain: "[0, 1/2)",
            });
        }
    } else if !(value >= 0.0 && value.is_finite()) {
        return Err(Error::Domain {
            name: "delta",
            value,
            domain: "[0, inf)",
        });
    }
    Ok(match direction {
        Duality::PrivacyToGentleness => (value / 4.0).tanh(),
        Duality::PrivacyToGentlenessGeneral => 0.5 * (value / 4.0).tanh(),
        Duality::GentlenessToPrivacy => 4.0 * (2.0 * value).atanh(),
        Duality::GentlenessToPrivacyPositive => 4.0 * value.atanh(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_maps_to_zero() {
        for dir in Duality::ALL {
            assert_eq!(duality_convert(dir, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn general_direction_value() {
        let delta = duality_convert(Duality::GentlenessToPrivacy, 0.2).unwrap();
        assert!((delta - 1.694_595_720_774_407_3).abs() < 1e-12);
    }

    #[test]
    fn two_parametrizations_agree_in_closed_form() {
        // 4 artanh(2a) = 2 ln((1 + 2a)/(1 - 2a))
        for a in [0.01, 0.1, 0.25, 0.4] {
            let d = duality_convert(Duality::GentlenessToPrivacy, a).unwrap();
            let log_form = 2.0 * ((1.0 + 2.0 * a) / (1.0 - 2.0 * a)).ln();
            assert!((d - log_form).abs() < 1e-12);
        }
    }

    #[test]
    fn domains_are_enforced() {
        assert!(duality_convert(Duality::GentlenessToPrivacy, 0.5).is_err());
        assert!(duality_convert(Duality::GentlenessToPrivacyPositive, -0.1).is_err());
        assert!(duality_convert(Duality::PrivacyToGentleness, -1.0).is_err());
        assert!(duality_convert(Duality::PrivacyToGentleness, f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn round_trips(alpha in 0.0f64..0.49, delta in 0.0f64..8.0) {
            // tanh(delta/4) stays below 1/2 only for delta < 4 artanh(1/2)
            let delta_positive = delta * (4.0 * 0.49f64.atanh()) / 8.0;
            for dir in Duality::ALL {
                let x = match dir {
                    Duality::PrivacyToGentleness => delta_positive,
                    Duality::PrivacyToGentlenessGeneral => delta,
                    _ => alpha,
                };
                let y = duality_convert(dir, x).unwrap();
                let back = duality_convert(dir.inverse(), y).unwrap();
                prop_assert!((back - x).abs() <= 1e-12 * x.max(1.0), "{dir:?} {x} {back}");
            }
        }
    }
}

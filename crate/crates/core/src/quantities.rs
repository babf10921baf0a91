//! Dimensioned physical scalars.
//!
//! Every value is stored in SI base units. [`Quantity`] carries its dimension
//! at runtime as a vector of integer exponents over (m, kg, s, A, K); the
//! typed wrappers ([`Energy`], [`Length`], ...) pin the dimension at compile
//! time and convert to and from [`Quantity`] with a dimension check. Formulas
//! in this crate compute through [`Quantity`] so that a wrong exponent in a
//! formula surfaces as a dimension error instead of a silently wrong number.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer exponents over the SI base units (m, kg, s, A, K).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dimension {
    pub length: i8,
    pub mass: i8,
    pub time: i8,
    pub current: i8,
    pub temperature: i8,
}

impl Dimension {
    pub const fn new(length: i8, mass: i8, time: i8, current: i8, temperature: i8) -> Self {
        Self { length, mass, time, current, temperature }
    }

    pub const DIMENSIONLESS: Self = Self::new(0, 0, 0, 0, 0);
    pub const LENGTH: Self = Self::new(1, 0, 0, 0, 0);
    pub const AREA: Self = Self::new(2, 0, 0, 0, 0);
    pub const TIME: Self = Self::new(0, 0, 1, 0, 0);
    pub const FREQUENCY: Self = Self::new(0, 0, -1, 0, 0);
    pub const CURRENT: Self = Self::new(0, 0, 0, 1, 0);
    pub const TEMPERATURE: Self = Self::new(0, 0, 0, 0, 1);
    pub const ENERGY: Self = Self::new(2, 1, -2, 0, 0);
    pub const POWER: Self = Self::new(2, 1, -3, 0, 0);
    pub const VOLTAGE: Self = Self::new(2, 1, -3, -1, 0);
    pub const CAPACITANCE: Self = Self::new(-2, -1, 4, 2, 0);
    pub const INDUCTANCE: Self = Self::new(2, 1, -2, -2, 0);
    pub const RESISTANCE: Self = Self::new(2, 1, -3, -2, 0);
    pub const RESPONSIVITY: Self = Self::new(-2, -1, 3, 1, 0);
    pub const AREAL_CAPACITANCE: Self = Self::new(-4, -1, 4, 2, 0);
    pub const POWER_DENSITY: Self = Self::new(0, 1, -3, 0, 0);
    pub const CHARGE: Self = Self::new(0, 0, 1, 1, 0);
    pub const ACTION: Self = Self::new(2, 1, -1, 0, 0);
    pub const VELOCITY: Self = Self::new(1, 0, -1, 0, 0);
    pub const MAGNETIC_FLUX: Self = Self::new(2, 1, -2, -1, 0);
    pub const PERMEABILITY: Self = Self::new(1, 1, -2, -2, 0);

    const NAMED: [(Self, &'static str); 21] = [
        (Self::DIMENSIONLESS, "dimensionless"),
        (Self::LENGTH, "length"),
        (Self::AREA, "area"),
        (Self::TIME, "time"),
        (Self::FREQUENCY, "frequency"),
        (Self::CURRENT, "current"),
        (Self::TEMPERATURE, "temperature"),
        (Self::ENERGY, "energy"),
        (Self::POWER, "power"),
        (Self::VOLTAGE, "voltage"),
        (Self::CAPACITANCE, "capacitance"),
        (Self::INDUCTANCE, "inductance"),
        (Self::RESISTANCE, "resistance"),
        (Self::RESPONSIVITY, "responsivity"),
        (Self::AREAL_CAPACITANCE, "areal capacitance"),
        (Self::POWER_DENSITY, "power density"),
        (Self::CHARGE, "charge"),
        (Self::ACTION, "action"),
        (Self::VELOCITY, "velocity"),
        (Self::MAGNETIC_FLUX, "magnetic flux"),
        (Self::PERMEABILITY, "permeability"),
    ];

    /// Conventional name of the dimension, if it is one of the named kinds.
    pub fn name(self) -> Option<&'static str> {
        Self::NAMED.iter().find(|(d, _)| *d == self).map(|(_, n)| *n)
    }

    fn combine(self, rhs: Self, sign: i8) -> Self {
        Self::new(
            self.length + sign * rhs.length,
            self.mass + sign * rhs.mass,
            self.time + sign * rhs.time,
            self.current + sign * rhs.current,
            self.temperature + sign * rhs.temperature,
        )
    }
}

impl Mul for Dimension {
    type Output = Dimension;
    fn mul(self, rhs: Self) -> Self {
        self.combine(rhs, 1)
    }
}

impl Div for Dimension {
    type Output = Dimension;
    fn div(self, rhs: Self) -> Self {
        self.combine(rhs, -1)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = self.name() {
            return f.write_str(name);
        }
        let parts: Vec<String> = [
            ("m", self.length),
            ("kg", self.mass),
            ("s", self.time),
            ("A", self.current),
            ("K", self.temperature),
        ]
        .iter()
        .filter(|(_, e)| *e != 0)
        .map(|(u, e)| if *e == 1 { u.to_string() } else { format!("{u}^{e}") })
        .collect();
        f.write_str(&parts.join(" "))
    }
}

/// A real value tagged with its physical dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub dimension: Dimension,
}

impl Quantity {
    pub const fn new(value: f64, dimension: Dimension) -> Self {
        Self { value, dimension }
    }

    pub const fn dimensionless(value: f64) -> Self {
        Self::new(value, Dimension::DIMENSIONLESS)
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.require(rhs.dimension)?;
        Ok(Self::new(self.value + rhs.value, self.dimension))
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.require(rhs.dimension)?;
        Ok(Self::new(self.value - rhs.value, self.dimension))
    }

    pub fn sqrt(self) -> Result<Self> {
        let d = self.dimension;
        let halves = [d.length, d.mass, d.time, d.current, d.temperature];
        if halves.iter().any(|e| e % 2 != 0) {
            return Err(Error::Dimension {
                expected: format!("even exponents for sqrt"),
                found: d.to_string(),
            });
        }
        Ok(Self::new(
            self.value.sqrt(),
            Dimension::new(d.length / 2, d.mass / 2, d.time / 2, d.current / 2, d.temperature / 2),
        ))
    }

    pub fn powi(self, n: i8) -> Self {
        let d = self.dimension;
        Self::new(
            self.value.powi(n as i32),
            Dimension::new(d.length * n, d.mass * n, d.time * n, d.current * n, d.temperature * n),
        )
    }

    /// Fails unless this quantity has the given dimension.
    pub fn require(self, dimension: Dimension) -> Result<Self> {
        if self.dimension == dimension {
            Ok(self)
        } else {
            Err(Error::Dimension { expected: dimension.to_string(), found: self.dimension.to_string() })
        }
    }

    /// Value of a dimensionless quantity.
    pub fn scalar(self) -> Result<f64> {
        self.require(Dimension::DIMENSIONLESS).map(|q| q.value)
    }

    pub fn into_typed<T: TypedQuantity>(self) -> Result<T> {
        self.require(T::DIMENSION).map(|q| T::from_si(q.value))
    }
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Self::dimensionless(v)
    }
}

impl<T: Into<Quantity>> Mul<T> for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: T) -> Quantity {
        let rhs = rhs.into();
        Quantity::new(self.value * rhs.value, self.dimension * rhs.dimension)
    }
}

impl<T: Into<Quantity>> Div<T> for Quantity {
    type Output = Quantity;
    fn div(self, rhs: T) -> Quantity {
        let rhs = rhs.into();
        Quantity::new(self.value / rhs.value, self.dimension / rhs.dimension)
    }
}

impl Add for Quantity {
    type Output = Result<Quantity>;
    fn add(self, rhs: Self) -> Result<Quantity> {
        self.checked_add(rhs)
    }
}

impl Sub for Quantity {
    type Output = Result<Quantity>;
    fn sub(self, rhs: Self) -> Result<Quantity> {
        self.checked_sub(rhs)
    }
}

impl Neg for Quantity {
    type Output = Quantity;
    fn neg(self) -> Quantity {
        Quantity::new(-self.value, self.dimension)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} [{}]", self.value, self.dimension)
    }
}

/// A compile-time dimensioned wrapper around an SI value.
pub trait TypedQuantity: Copy + Into<Quantity> {
    const DIMENSION: Dimension;
    const UNIT: &'static str;
    fn from_si(value: f64) -> Self;
    fn si(self) -> f64;

    fn q(self) -> Quantity {
        self.into()
    }
}

/// Converts a formula result to its typed form. The dimension of every call
/// site is fixed by the formula, so a mismatch is a defect in this crate.
pub(crate) fn cast<T: TypedQuantity>(q: Quantity) -> T {
    match q.into_typed() {
        Ok(t) => t,
        Err(e) => panic!("dimension defect in formula: {e}"),
    }
}

macro_rules! typed_quantity {
    ($(#[$meta:meta])* $name:ident, $dim:expr, $unit:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(f64);

        impl $name {
            pub const ZERO: Self = Self(0.0);

            pub const fn new(si: f64) -> Self {
                Self(si)
            }

            pub const fn value(self) -> f64 {
                self.0
            }

            pub fn abs(self) -> Self {
                Self(self.0.abs())
            }
        }

        impl TypedQuantity for $name {
            const DIMENSION: Dimension = $dim;
            const UNIT: &'static str = $unit;
            fn from_si(value: f64) -> Self {
                Self(value)
            }
            fn si(self) -> f64 {
                self.0
            }
        }

        impl From<$name> for Quantity {
            fn from(v: $name) -> Quantity {
                Quantity::new(v.0, $dim)
            }
        }

        impl TryFrom<Quantity> for $name {
            type Error = Error;
            fn try_from(q: Quantity) -> Result<Self> {
                q.into_typed()
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, rhs: Self) -> Self {
                Self(self.0 + rhs.0)
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, rhs: Self) -> Self {
                Self(self.0 - rhs.0)
            }
        }

        impl Neg for $name {
            type Output = $name;
            fn neg(self) -> Self {
                Self(-self.0)
            }
        }

        impl Mul<f64> for $name {
            type Output = $name;
            fn mul(self, rhs: f64) -> Self {
                Self(self.0 * rhs)
            }
        }

        impl Mul<$name> for f64 {
            type Output = $name;
            fn mul(self, rhs: $name) -> $name {
                $name(self * rhs.0)
            }
        }

        impl Div<f64> for $name {
            type Output = $name;
            fn div(self, rhs: f64) -> Self {
                Self(self.0 / rhs)
            }
        }

        impl Div for $name {
            type Output = f64;
            fn div(self, rhs: Self) -> f64 {
                self.0 / rhs.0
            }
        }

        impl Sum for $name {
            fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
                Self(iter.map(|v| v.0).sum())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&format_si(self.0, $unit))
            }
        }
    };
}

typed_quantity!(Energy, Dimension::ENERGY, "J");
typed_quantity!(Power, Dimension::POWER, "W");
typed_quantity!(Length, Dimension::LENGTH, "m");
typed_quantity!(Area, Dimension::AREA, "m²");
typed_quantity!(Current, Dimension::CURRENT, "A");
typed_quantity!(Voltage, Dimension::VOLTAGE, "V");
typed_quantity!(Capacitance, Dimension::CAPACITANCE, "F");
typed_quantity!(Inductance, Dimension::INDUCTANCE, "H");
typed_quantity!(Resistance, Dimension::RESISTANCE, "Ω");
typed_quantity!(Temperature, Dimension::TEMPERATURE, "K");
typed_quantity!(Frequency, Dimension::FREQUENCY, "Hz");
typed_quantity!(Time, Dimension::TIME, "s");
typed_quantity!(Responsivity, Dimension::RESPONSIVITY, "A/W");
// Inductance per square of a thin film; squares are dimensionless.
typed_quantity!(InductancePerSquare, Dimension::INDUCTANCE, "H/sq");
// Sheet resistance; squares are dimensionless.
typed_quantity!(SheetResistance, Dimension::RESISTANCE, "Ω/sq");
typed_quantity!(ArealCapacitance, Dimension::AREAL_CAPACITANCE, "F/m²");
typed_quantity!(PowerDensity, Dimension::POWER_DENSITY, "W/m²");

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Self = Self(0.0);
    pub const ONE: Self = Self(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(Error::domain("probability", format!("{p} is outside [0, 1]")))
        }
    }

    pub const fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl From<Probability> for Quantity {
    fn from(p: Probability) -> Quantity {
        Quantity::dimensionless(p.0)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

const PREFIXES: [(i32, &str); 17] = [
    (-24, "y"),
    (-21, "z"),
    (-18, "a"),
    (-15, "f"),
    (-12, "p"),
    (-9, "n"),
    (-6, "µ"),
    (-3, "m"),
    (0, ""),
    (3, "k"),
    (6, "M"),
    (9, "G"),
    (12, "T"),
    (15, "P"),
    (18, "E"),
    (21, "Z"),
    (24, "Y"),
];

/// Formats an SI value with an engineering prefix and four significant digits.
pub fn format_si(value: f64, unit: &str) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value} {unit}");
    }
    let exp3 = ((value.abs().log10() / 3.0).floor() as i32 * 3).clamp(-24, 24);
    let prefix = PREFIXES.iter().find(|(e, _)| *e == exp3).map(|(_, p)| *p).unwrap_or("");
    let mantissa = value / 10f64.powi(exp3);
    let int_digits = (mantissa.abs().log10().floor() as i32 + 1).max(1);
    let decimals = (4 - int_digits).max(0) as usize;
    format!("{mantissa:.decimals$} {prefix}{unit}")
}

/// Fundamental constants, CODATA 2018 exact or recommended values.
pub mod constants {
    use super::{Dimension, Quantity};

    pub const PLANCK: f64 = 6.626_070_15e-34;
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// h / 2q.
    pub const FLUX_QUANTUM: f64 = 2.067_833_848_461_929_3e-15;
    pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
    pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    pub const H: Quantity = Quantity::new(PLANCK, Dimension::ACTION);
    pub const C: Quantity = Quantity::new(SPEED_OF_LIGHT, Dimension::VELOCITY);
    pub const Q: Quantity = Quantity::new(ELEMENTARY_CHARGE, Dimension::CHARGE);
    pub const PHI0: Quantity = Quantity::new(FLUX_QUANTUM, Dimension::MAGNETIC_FLUX);
    pub const MU0: Quantity = Quantity::new(VACUUM_PERMEABILITY, Dimension::PERMEABILITY);
}

/// Energy of a single photon, h·c/λ.
pub fn photon_energy(wavelength: Length) -> Result<Energy> {
    positive("wavelength", wavelength.value())?;
    (constants::H * constants::C / wavelength).into_typed()
}

/// Responsivity at unit quantum efficiency, q·λ/(h·c).
pub fn quantum_limited_responsivity(wavelength: Length) -> Result<Responsivity> {
    positive("wavelength", wavelength.value())?;
    (constants::Q * wavelength / (constants::H * constants::C)).into_typed()
}

pub(crate) fn positive(what: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(what, format!("must be strictly positive, got {v}")))
    }
}

pub(crate) fn non_negative(what: &'static str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(what, format!("must be non-negative, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flux_quantum_is_h_over_2q() {
        let derived = constants::PLANCK / (2.0 * constants::ELEMENTARY_CHARGE);
        assert_relative_eq!(constants::FLUX_QUANTUM, derived, max_relative = 1e-9);
        assert_eq!((constants::H / (constants::Q * 2.0)).dimension, Dimension::MAGNETIC_FLUX);
    }

    #[test]
    fn photon_energy_at_1500nm() {
        let e = photon_energy(Length::new(1.5e-6)).unwrap();
        // h·c/λ computed by hand from the CODATA values.
        assert_relative_eq!(e.value(), 1.324_297_238e-19, max_relative = 1e-9);
        let seven = e * 7.0;
        assert_relative_eq!(seven.value(), 0.927e-18, max_relative = 1e-3);
        let doubled = photon_energy(Length::new(3.0e-6)).unwrap();
        assert_relative_eq!(doubled.value() * 2.0, e.value(), max_relative = 1e-15);
    }

    #[test]
    fn photon_energy_rejects_bad_wavelength() {
        assert!(photon_energy(Length::new(0.0)).is_err());
        assert!(photon_energy(Length::new(-1e-6)).is_err());
        assert!(quantum_limited_responsivity(Length::new(0.0)).is_err());
    }

    #[test]
    fn responsivity_values() {
        let r = quantum_limited_responsivity(Length::new(1.5e-6)).unwrap();
        assert_relative_eq!(r.value(), 1.209_83, max_relative = 1e-5);
        let r = quantum_limited_responsivity(Length::new(1.24e-6)).unwrap();
        assert_relative_eq!(r.value(), 1.0, max_relative = 2e-4);
        let r = quantum_limited_responsivity(Length::new(1e-15)).unwrap();
        assert!(r.value() < 1e-8);
    }

    #[test]
    fn mismatched_addition_is_rejected() {
        let e = Energy::new(1.0).q();
        let p = Power::new(1.0).q();
        assert!(matches!(e + p, Err(Error::Dimension { .. })));
        assert!(e.checked_sub(p).is_err());
        assert_eq!((e + e).unwrap().value, 2.0);
        let t: Result<Power> = e.into_typed();
        assert!(t.is_err());
        let ok: Power = (e / Time::new(2.0)).into_typed().unwrap();
        assert_eq!(ok.value(), 0.5);
    }

    #[test]
    fn sqrt_requires_even_exponents() {
        let a = Area::new(4.0).q();
        assert_eq!(a.sqrt().unwrap().into_typed::<Length>().unwrap().value(), 2.0);
        assert!(Length::new(4.0).q().sqrt().is_err());
    }

    #[test]
    fn probability_bounds() {
        assert!(Probability::new(1.0).is_ok());
        assert!(Probability::new(0.0).is_ok());
        assert!(Probability::new(1.0 + 1e-12).is_err());
        assert!(Probability::new(-0.1).is_err());
        assert!(serde_json::from_str::<Probability>("1.5").is_err());
        assert_eq!(serde_json::from_str::<Probability>("0.7").unwrap().value(), 0.7);
    }

    #[test]
    fn si_formatting() {
        assert_eq!(format_si(0.927e-18, "J"), "927.0 zJ");
        assert_eq!(format_si(1.5e-6, "m"), "1.500 µm");
        assert_eq!(format_si(324.0, "s"), "324.0 s");
        assert_eq!(format!("{}", Energy::new(5e-18)), "5.000 aJ");
    }

    #[test]
    fn named_dimensions() {
        assert_eq!(Dimension::ENERGY.to_string(), "energy");
        assert_eq!((Dimension::ENERGY * Dimension::TIME).to_string(), "action");
        assert_eq!(Dimension::new(3, 0, 0, 0, 0).to_string(), "m^3");
    }
}

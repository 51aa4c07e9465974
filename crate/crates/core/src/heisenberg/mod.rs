//! The Heisenberg group ℍ^{2n+1} and its Sasakian models.
//!
//! Group law `(x,y,z)·(x',y',z') = (x+x', y+y', z+z'+x·y')`.

mod maps;
mod structure;

pub use maps::{
    horizontal_determinant, orientation_check, pullback_residuals, Diffeo, Dilation,
    IntermediateAction, Involution, LeftTranslation, OrientationReport, PullbackResiduals,
    RightTranslation, Sigma, UnitaryMap,
};
pub use structure::{
    contact_volume, right_frame, standard_structure, ContactMetric, EtaOf, MetricOf, Model,
    NegatedPhi, SasakiStructure, StructureResiduals, XiOf,
};

use std::ops::Neg;

use num_traits::Num;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};

/// Number types the group law is evaluated over (`f64`, `BigRational`).
pub trait Coord: Num + Clone + Neg<Output = Self> + std::fmt::Debug {}
impl<T: Num + Clone + Neg<Output = T> + std::fmt::Debug> Coord for T {}

/// A point of ℝ^{2n+1}, equivalently an element of ℍ^{2n+1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Point<T = f64> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub z: T,
}

pub type GroupElement<T = f64> = Point<T>;

fn dot<T: Coord>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (u, v)| acc + u.clone() * v.clone())
}

impl<T: Coord> Point<T> {
    pub fn new(x: Vec<T>, y: Vec<T>, z: T) -> Result<Self> {
        check_dim(x.len(), y.len())?;
        if x.is_empty() {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        Ok(Point { x, y, z })
    }

    pub fn identity(n: usize) -> Self {
        Point {
            x: vec![T::zero(); n],
            y: vec![T::zero(); n],
            z: T::zero(),
        }
    }

    /// From the flat layout `(x_1..x_n, y_1..y_n, z)`.
    pub fn from_flat(v: &[T]) -> Result<Self> {
        if v.len() < 3 || v.len() % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "flat point must have odd length 2n+1 ≥ 3, got {}",
                v.len()
            )));
        }
        let n = v.len() / 2;
        Ok(Point {
            x: v[..n].to_vec(),
            y: v[n..2 * n].to_vec(),
            z: v[2 * n].clone(),
        })
    }

    pub fn to_flat(&self) -> Vec<T> {
        let mut v = self.x.clone();
        v.extend(self.y.iter().cloned());
        v.push(self.z.clone());
        v
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_zero()) && self.z.is_zero()
    }

    pub fn mul(&self, q: &Point<T>) -> Result<Point<T>> {
        check_dim(self.n(), q.n())?;
        let x = self.x.iter().zip(&q.x).map(|(a, b)| a.clone() + b.clone()).collect();
        let y = self.y.iter().zip(&q.y).map(|(a, b)| a.clone() + b.clone()).collect();
        let z = self.z.clone() + q.z.clone() + dot(&self.x, &q.y);
        Ok(Point { x, y, z })
    }

    /// `(−x, −y, −z + x·y)`.
    pub fn inv(&self) -> Point<T> {
        Point {
            x: self.x.iter().map(|a| -a.clone()).collect(),
            y: self.y.iter().map(|a| -a.clone()).collect(),
            z: -self.z.clone() + dot(&self.x, &self.y),
        }
    }

    /// `ι(x, y, z) = (y, x, z)`.
    pub fn involution(&self) -> Point<T> {
        Point {
            x: self.y.clone(),
            y: self.x.clone(),
            z: self.z.clone(),
        }
    }

    /// Group commutator `p q p⁻¹ q⁻¹`.
    pub fn commutator(&self, q: &Point<T>) -> Result<Point<T>> {
        self.mul(q)?.mul(&self.inv())?.mul(&q.inv())
    }
}

impl<T: Coord + PartialOrd> Point<T> {
    /// `δ_λ(x, y, z) = (λx, λy, λ²z)`.
    pub fn dilation(&self, lambda: &T) -> Result<Point<T>> {
        if *lambda <= T::zero() {
            return Err(Error::InvalidParameter("dilation factor must be positive".into()));
        }
        Ok(Point {
            x: self.x.iter().map(|a| a.clone() * lambda.clone()).collect(),
            y: self.y.iter().map(|a| a.clone() * lambda.clone()).collect(),
            z: self.z.clone() * lambda.clone() * lambda.clone(),
        })
    }
}

pub fn mul<T: Coord>(p: &Point<T>, q: &Point<T>) -> Result<Point<T>> {
    p.mul(q)
}

pub fn inv<T: Coord>(p: &Point<T>) -> Point<T> {
    p.inv()
}

pub fn dilation<T: Coord + PartialOrd>(lambda: &T, p: &Point<T>) -> Result<Point<T>> {
    p.dilation(lambda)
}

pub fn involution<T: Coord>(p: &Point<T>) -> Point<T> {
    p.involution()
}

impl Point<f64> {
    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::poly::{int, rat, Rational};

    fn p1(x: i64, y: i64, z: i64) -> Point<Rational> {
        Point::new(vec![int(x)], vec![int(y)], int(z)).unwrap()
    }

    #[test]
    fn product_example() {
        assert_eq!(p1(1, 2, 3).mul(&p1(4, 5, 6)).unwrap(), p1(5, 7, 14));
    }

    #[test]
    fn inverse_example() {
        assert_eq!(p1(1, 2, 3).inv(), p1(-1, -2, -1));
        assert!(p1(1, 2, 3).mul(&p1(1, 2, 3).inv()).unwrap().is_identity());
        assert!(Point::<Rational>::identity(1).inv().is_identity());
    }

    #[test]
    fn dilation_example() {
        let p = p1(1, 1, 1);
        assert_eq!(p.dilation(&int(2)).unwrap(), p1(2, 2, 4));
        assert_eq!(p.dilation(&int(1)).unwrap(), p);
        assert!(p.dilation(&int(0)).is_err());
        assert!(p.dilation(&rat(-1, 2)).is_err());
    }

    #[test]
    fn involution_example() {
        assert_eq!(p1(1, 2, 3).involution(), p1(2, 1, 3));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Point::<f64>::identity(1);
        let b = Point::<f64>::identity(2);
        assert!(a.mul(&b).is_err());
        assert!(Point::<f64>::from_flat(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn commutator_is_central() {
        let x = p1(1, 0, 0);
        let y = p1(0, 1, 0);
        assert_eq!(x.commutator(&y).unwrap(), p1(0, 0, 1));
    }
}

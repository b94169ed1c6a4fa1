//! Serde adapters writing complex numbers as `{"re": .., "im": ..}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct C {
    re: f64,
    im: f64,
}

impl From<&Complex64> for C {
    fn from(z: &Complex64) -> Self {
        C { re: z.re, im: z.im }
    }
}

impl From<C> for Complex64 {
    fn from(c: C) -> Self {
        Complex64::new(c.re, c.im)
    }
}

pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        C::from(z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        C::deserialize(d).map(Into::into)
    }
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(C::from))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<C>::deserialize(d)?.into_iter().map(Into::into).collect())
    }
}

pub mod complex_vec_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Complex64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_seq(v.iter().map(C::from)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<Vec<Complex64>>, D::Error> {
        Ok(Option::<Vec<C>>::deserialize(d)?.map(|v| v.into_iter().map(Into::into).collect()))
    }
}

//! JSON form of a multivector: `{"n": 2, "coeffs": {"1,2": -3.0, "": 1.0}}`.
//! Keys are comma-joined ascending indices; the empty key is the scalar blade.
//! Zero coefficients are omitted on write and default to zero on read.

use std::collections::BTreeMap;

use serde::de::Error as DeError;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Blade, Multivector, MAX_DIM};

fn mask_key(dim: usize, mask: u32) -> String {
    let idx: Vec<String> = Blade::from_mask(dim, mask).indices().iter().map(|i| i.to_string()).collect();
    idx.join(",")
}

fn key_mask(dim: usize, key: &str) -> Result<u32, String> {
    if key.is_empty() {
        return Ok(0);
    }
    let mut mask = 0u32;
    let mut prev = 0usize;
    for part in key.split(',') {
        let i: usize = part.trim().parse().map_err(|_| format!("bad blade index {part:?}"))?;
        if i < 1 || i > dim {
            return Err(format!("blade index {i} outside 1..={dim}"));
        }
        if i <= prev {
            return Err(format!("blade indices not strictly increasing in {key:?}"));
        }
        prev = i;
        mask |= 1 << (i - 1);
    }
    Ok(mask)
}

impl Serialize for Multivector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut coeffs = BTreeMap::new();
        for (s, &c) in self.coeffs().iter().enumerate() {
            if c != 0.0 {
                coeffs.insert(mask_key(self.dim(), s as u32), c);
            }
        }
        let mut st = serializer.serialize_struct("Multivector", 2)?;
        st.serialize_field("n", &self.dim())?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct MultivectorRepr {
    n: usize,
    coeffs: BTreeMap<String, f64>,
}

impl<'de> Deserialize<'de> for Multivector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MultivectorRepr::deserialize(deserializer)?;
        if repr.n < 1 || repr.n > MAX_DIM {
            return Err(D::Error::custom(format!("dimension {} outside 1..={MAX_DIM}", repr.n)));
        }
        let mut m = Multivector::zero(repr.n);
        for (key, value) in repr.coeffs {
            let mask = key_mask(repr.n, &key).map_err(D::Error::custom)?;
            m.set_coeff_mask(mask, value);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_form() {
        let mut m = Multivector::zero(2);
        m.set_coeff_mask(0, 1.5);
        m.set_coeff_mask(0b11, -3.0);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"n":2,"coeffs":{"":1.5,"1,2":-3.0}}"#);
        let back: Multivector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_keys() {
        assert!(serde_json::from_str::<Multivector>(r#"{"n":2,"coeffs":{"3":1.0}}"#).is_err());
        assert!(serde_json::from_str::<Multivector>(r#"{"n":2,"coeffs":{"2,1":1.0}}"#).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(dim in 1usize..=4, seed in any::<u64>()) {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let coeffs: Vec<f64> = (0..1usize << dim).map(|_| {
                if rng.gen_bool(0.5) { rng.gen_range(-10.0..10.0) } else { 0.0 }
            }).collect();
            let m = Multivector::from_coeffs(dim, coeffs);
            let json = serde_json::to_string(&m).unwrap();
            let back: Multivector = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}

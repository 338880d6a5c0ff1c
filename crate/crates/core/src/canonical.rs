//! Canonical JSON: object keys sorted, shortest round-trip float formatting,
//! so equal values always serialize to equal bytes.

use serde::Serialize;

pub fn to_value<T: Serialize>(value: &T) -> serde_json::Value {
    // serde_json's default map is ordered by key
    serde_json::to_value(value).expect("engine types always serialize")
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    to_value(value).to_string()
}

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

/// Error returned when parsing an identifier from text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid {kind}: expected {len} lowercase hex characters, got {input:?}")]
pub struct IdParseError {
    kind: &'static str,
    len: usize,
    input: String,
}

fn is_lower_hex(s: &str) -> bool {
    s.bytes()
        .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

/// Content hash of a story's canonical package bytes (SHA-256).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StoryId([u8; 32]);

impl StoryId {
    pub const fn from_bytes(bytes: [u8; 32]) -> Self {
        Self(bytes)
    }

    /// SHA-256 of arbitrary bytes.
    pub fn digest(bytes: &[u8]) -> Self {
        let out = Sha256::digest(bytes);
        let mut id = [0u8; 32];
        id.copy_from_slice(&out);
        Self(id)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for StoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for StoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StoryId({})", self.to_hex())
    }
}

impl FromStr for StoryId {
    type Err = IdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || IdParseError {
            kind: "story id",
            len: 64,
            input: s.to_owned(),
        };
        if s.len() != 64 || !is_lower_hex(s) {
            return Err(err());
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out).map_err(|_| err())?;
        Ok(Self(out))
    }
}

impl Serialize for StoryId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for StoryId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! id128 {
    ($(#[$meta:meta])* $name:ident, $kind:literal) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(u128);

        impl $name {
            pub const fn from_u128(v: u128) -> Self {
                Self(v)
            }

            pub const fn as_u128(&self) -> u128 {
                self.0
            }

            pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Self(rng.gen())
            }

            /// Deterministic id derived from a namespace and arbitrary seed bytes.
            pub fn derive(namespace: &str, seed: &[u8]) -> Self {
                let mut h = Sha256::new();
                h.update(namespace.as_bytes());
                h.update([0u8]);
                h.update(seed);
                let out = h.finalize();
                let mut b = [0u8; 16];
                b.copy_from_slice(&out[..16]);
                Self(u128::from_be_bytes(b))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:032x}", self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({:032x})"), self.0)
            }
        }

        impl FromStr for $name {
            type Err = IdParseError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                if s.len() != 32 || !is_lower_hex(s) {
                    return Err(IdParseError { kind: $kind, len: 32, input: s.to_owned() });
                }
                u128::from_str_radix(s, 16)
                    .map(Self)
                    .map_err(|_| IdParseError { kind: $kind, len: 32, input: s.to_owned() })
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

id128!(
    /// Identifies a placed object; preserved across remixes.
    ObjectId,
    "object id"
);
id128!(
    /// Identifies a scene; preserved across remixes.
    SceneId,
    "scene id"
);
id128!(
    /// Flat grouping tag shared by objects that move together.
    GroupId,
    "group id"
);

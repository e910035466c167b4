use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident, $prefix:literal) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl From<u32> for $name {
            fn from(v: u32) -> Self {
                $name(v)
            }
        }
    };
}

id_type!(
    /// Project identifier as it appears in instance files.
    ProjectId,
    "p"
);
id_type!(
    /// Ballot group identifier.
    GroupId,
    "g"
);
id_type!(
    /// Funding-constraint label identifier.
    LabelId,
    "l"
);
id_type!(
    /// Voter identifier.
    VoterId,
    "v"
);

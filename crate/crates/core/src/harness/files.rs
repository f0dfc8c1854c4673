use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::{Distribution, DistributionFile};
use crate::error::{Error, Result};
use crate::instance::InstanceFile;

/// Either a full instance (sender and receiver priors) or a single
/// distribution, which then serves as both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorFile {
    Pair(InstanceFile),
    Single(DistributionFile),
}

/// Which party's prior to take from a [`PriorFile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Sender,
    Receiver,
}

impl PriorFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: not a distribution or instance file ({e})", path.display())))
    }

    /// The sender's and receiver's priors.
    pub fn into_pair(self) -> Result<(Distribution, Distribution)> {
        match self {
            PriorFile::Pair(file) => file.into_pair(),
            PriorFile::Single(file) => {
                let d = Distribution::try_from(file)?;
                Ok((d.clone(), d))
            }
        }
    }

    pub fn prior(self, role: Role) -> Result<Distribution> {
        let (p, q) = self.into_pair()?;
        Ok(match role {
            Role::Sender => p,
            Role::Receiver => q,
        })
    }
}

/// Writes pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_distribution_serves_both_roles() {
        let f: PriorFile = serde_json::from_str(r#"{"probs":[0.25,0.75]}"#).unwrap();
        assert!(matches!(f, PriorFile::Single(_)));
        let (p, q) = f.into_pair().unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn pair_selects_by_role() {
        let json = r#"{"p":{"probs":[0.5,0.5]},"q":{"probs":[0.25,0.75]}}"#;
        let f: PriorFile = serde_json::from_str(json).unwrap();
        assert_eq!(f.clone().prior(Role::Sender).unwrap().probs(), &[0.5, 0.5]);
        assert_eq!(f.prior(Role::Receiver).unwrap().probs(), &[0.25, 0.75]);
    }

    #[test]
    fn mismatched_pair_rejected() {
        let json = r#"{"p":{"probs":[1.0]},"q":{"probs":[0.25,0.75]}}"#;
        let f: PriorFile = serde_json::from_str(json).unwrap();
        assert!(matches!(f.into_pair(), Err(Error::MessageSetMismatch { .. })));
    }
}

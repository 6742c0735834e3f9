use std::borrow::Borrow;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::Error;

/// Hierarchical name such as `/a/img.png/seq=3`.
///
/// Cloning is a reference-count bump. Data names carry a trailing
/// `seq=<n>` component.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<[Box<str>]>);

impl Name {
    pub fn from_components<I, S>(components: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<Box<str>>,
    {
        let comps: Vec<Box<str>> = components.into_iter().map(Into::into).collect();
        if comps.is_empty() || comps.iter().any(|c| c.is_empty() || c.contains('/')) {
            return Err(Error::MalformedName(
                comps.iter().map(|c| format!("/{c}")).collect(),
            ));
        }
        Ok(Name(comps.into()))
    }

    pub fn components(&self) -> &[Box<str>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Name) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// The name with the last component dropped, or `None` for single-component names.
    pub fn parent(&self) -> Option<Name> {
        (self.0.len() > 1).then(|| Name(self.0[..self.0.len() - 1].into()))
    }

    pub fn child(&self, component: impl Into<Box<str>>) -> Name {
        let mut v: Vec<Box<str>> = self.0.to_vec();
        v.push(component.into());
        Name(v.into())
    }

    /// `prefix/seq=<n>`.
    pub fn with_seq(&self, seq: u64) -> Name {
        self.child(format!("seq={seq}"))
    }

    /// Sequence number of a data name, if the last component is `seq=<n>`.
    pub fn seq(&self) -> Option<u64> {
        self.0.last()?.strip_prefix("seq=")?.parse().ok()
    }

    /// Encoded length in bytes: one separator byte per component plus the text.
    pub fn wire_len(&self) -> u32 {
        self.0.iter().map(|c| c.len() as u32 + 1).sum()
    }
}

impl Borrow<[Box<str>]> for Name {
    fn borrow(&self) -> &[Box<str>] {
        &self.0
    }
}

impl FromStr for Name {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let body = s
            .strip_prefix('/')
            .ok_or_else(|| Error::MalformedName(s.to_owned()))?;
        let body = body.strip_suffix('/').unwrap_or(body);
        if body.is_empty() {
            return Err(Error::MalformedName(s.to_owned()));
        }
        Name::from_components(body.split('/')).map_err(|_| Error::MalformedName(s.to_owned()))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.0.iter() {
            write!(f, "/{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Name({self})")
    }
}

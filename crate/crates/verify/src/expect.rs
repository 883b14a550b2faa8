//! The expectations data file: published shapes, their orders, and the
//! structural data of each class.

use std::path::Path;

use coinv_core::glue::ClassTag;
use coinv_core::shape::{abelian_type, shape_order};
use serde::{Deserialize, Serialize};

use crate::error::VerifyError;

const DEFAULT: &str = include_str!("../data/expectations.toml");

/// A group given by its shape, with the order the shape evaluates to.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Shape {
    pub shape: String,
    pub order: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassExpect {
    pub tag: ClassTag,
    pub root_type: String,
    pub glue: String,
    pub rank: usize,
    pub disc: String,
    pub o_lattice: Shape,
    pub centralizer: Shape,
    pub o_disc: Shape,
    pub c_mod_g: Shape,
    pub disc_index: u64,
    pub irr: String,
    pub o_irr: Shape,
    pub stabilizer: Shape,
    pub c_voa: Shape,
    pub aut_index: u64,
    pub aut: Shape,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Expectations {
    pub schema: u32,
    pub class: Vec<ClassExpect>,
}

impl ClassExpect {
    fn shapes(&self) -> [(&'static str, &Shape); 8] {
        [
            ("o_lattice", &self.o_lattice),
            ("centralizer", &self.centralizer),
            ("o_disc", &self.o_disc),
            ("c_mod_g", &self.c_mod_g),
            ("o_irr", &self.o_irr),
            ("stabilizer", &self.stabilizer),
            ("c_voa", &self.c_voa),
            ("aut", &self.aut),
        ]
    }

    /// `|L*/L|` from the written abelian type.
    pub fn det(&self) -> Result<u64, VerifyError> {
        Ok(abelian_type(&self.disc)?.iter().map(|&d| d as u64).product())
    }

    /// `|Irr|` from the written abelian type.
    pub fn irr_order(&self) -> Result<u64, VerifyError> {
        Ok(abelian_type(&self.irr)?.iter().map(|&d| d as u64).product())
    }
}

impl Expectations {
    /// The expectations shipped with the crate.
    pub fn builtin() -> Expectations {
        Self::parse(DEFAULT).expect("built-in expectations are valid")
    }

    pub fn load(path: &Path) -> Result<Expectations, VerifyError> {
        let text = std::fs::read_to_string(path).map_err(|e| VerifyError::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses and validates: every shape must evaluate to its stated order
    /// and abelian types must parse.
    pub fn parse(text: &str) -> Result<Expectations, VerifyError> {
        let e: Expectations = toml::from_str(text).map_err(|err| VerifyError::Expectations(err.to_string()))?;
        if e.schema != 1 {
            return Err(VerifyError::Expectations(format!("unsupported schema {}", e.schema)));
        }
        for c in &e.class {
            for (field, s) in c.shapes() {
                let o = shape_order(&s.shape)?;
                if o != s.order as u128 {
                    return Err(VerifyError::Expectations(format!(
                        "{}: {field} shape {:?} has order {o}, file says {}",
                        c.tag, s.shape, s.order
                    )));
                }
            }
            c.det()?;
            c.irr_order()?;
        }
        Ok(e)
    }

    pub fn get(&self, tag: ClassTag) -> Option<&ClassExpect> {
        self.class.iter().find(|c| c.tag == tag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_file_is_consistent() {
        let e = Expectations::builtin();
        assert_eq!(e.class.len(), 5);
        for tag in ClassTag::ALL {
            let c = e.get(tag).unwrap();
            let spec = tag.glue_spec();
            assert_eq!(c.root_type, spec.root_type());
            let ranks: usize = spec.blocks.iter().map(|&k| k as usize - 1).sum();
            assert_eq!(c.rank, ranks);
            let digits: Vec<u32> = c.glue.chars().filter_map(|ch| ch.to_digit(10)).collect();
            assert_eq!(digits, spec.digits);
        }
    }

    #[test]
    fn rejects_inconsistent_order() {
        let bad = DEFAULT.replacen("order = 5898240", "order = 5898241", 1);
        assert!(Expectations::parse(&bad).is_err());
    }
}

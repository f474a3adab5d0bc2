//! Degreewise group tables.

use crate::grading::Degree;
use crate::snf::Group;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupEntry {
    pub free_rank: usize,
    pub f2_rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub restriction_index: Option<u32>,
}

impl GroupEntry {
    pub fn from_group(g: &Group) -> Self {
        GroupEntry { free_rank: g.free, f2_rank: g.f2_rank(), restriction_index: None }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.f2_rank == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub degree: Degree,
    pub free_rank: usize,
    pub f2_rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub restriction_index: Option<u32>,
}

/// Degree to ranks; degrees absent from the map are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedGroups {
    pub entries: BTreeMap<Degree, GroupEntry>,
}

impl GradedGroups {
    pub fn insert(&mut self, d: Degree, e: GroupEntry) {
        if !e.is_zero() {
            self.entries.insert(d, e);
        }
    }

    pub fn get(&self, d: Degree) -> GroupEntry {
        self.entries.get(&d).cloned().unwrap_or_default()
    }

    pub fn records(&self) -> Vec<GroupRecord> {
        self.entries
            .iter()
            .map(|(&degree, e)| GroupRecord {
                degree,
                free_rank: e.free_rank,
                f2_rank: e.f2_rank,
                restriction_index: e.restriction_index,
            })
            .collect()
    }

    pub fn from_records(rs: &[GroupRecord]) -> Self {
        let mut g = GradedGroups::default();
        for r in rs {
            g.insert(
                r.degree,
                GroupEntry {
                    free_rank: r.free_rank,
                    f2_rank: r.f2_rank,
                    restriction_index: r.restriction_index,
                },
            );
        }
        g
    }
}

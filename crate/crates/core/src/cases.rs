//! Benchmark specifications shipped with the library.
//!
//! MinePump is the classic formulation. The other small cases are
//! reconstructions: their published descriptions give only the numbers of
//! domain properties, goals and variables, so the formulae here are written
//! to match those counts and the informal intent of each case, and every one
//! comes with a boundary condition that has been checked. The larger cases
//! are listed but not shipped.

use crate::files::SpecFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Formulae as published.
    Verbatim,
    /// Written to match the published counts; not the original formulae.
    Reconstruction,
    /// Not shipped.
    Absent,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Verbatim => "verbatim",
            Provenance::Reconstruction => "reconstruction",
            Provenance::Absent => "absent",
        }
    }
}

/// Published counts for a case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub domains: usize,
    pub goals: usize,
    pub variables: usize,
    pub size: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct CaseInfo {
    pub id: &'static str,
    pub name: &'static str,
    pub published: Counts,
    pub provenance: Provenance,
    pub note: &'static str,
    json: Option<&'static str>,
    /// A boundary condition known to hold for the shipped formulae.
    pub known_bc: Option<&'static str>,
}

impl CaseInfo {
    pub fn spec_file(&self) -> Option<SpecFile> {
        self.json.map(|j| SpecFile::from_json(j, self.id).expect("bundled case is valid JSON"))
    }

    pub fn json(&self) -> Option<&'static str> {
        self.json
    }
}

const fn counts(domains: usize, goals: usize, variables: usize, size: usize) -> Counts {
    Counts { domains, goals, variables, size }
}

const RECONSTRUCTED: &str = "formulae reconstructed to match the published counts";
const NOT_SHIPPED: &str = "formulae not published; not shipped";

pub const CASES: &[CaseInfo] = &[
    CaseInfo {
        id: "RP1",
        name: "RetractionPattern1",
        published: counts(0, 2, 2, 9),
        provenance: Provenance::Reconstruction,
        note: RECONSTRUCTED,
        json: Some(include_str!("../cases/rp1.json")),
        known_bc: Some("F(p & !q)"),
    },
    CaseInfo {
        id: "RP2",
        name: "RetractionPattern2",
        published: counts(0, 2, 4, 10),
        provenance: Provenance::Reconstruction,
        note: RECONSTRUCTED,
        json: Some(include_str!("../cases/rp2.json")),
        known_bc: Some("F(a & c)"),
    },
    CaseInfo {
        id: "Ele",
        name: "Elevator",
        published: counts(1, 1, 3, 10),
        provenance: Provenance::Reconstruction,
        note: RECONSTRUCTED,
        json: Some(include_str!("../cases/elevator.json")),
        known_bc: Some("F(call & G move)"),
    },
    CaseInfo {
        id: "TCP",
        name: "TCP",
        published: counts(0, 2, 3, 14),
        provenance: Provenance::Reconstruction,
        note: RECONSTRUCTED,
        json: Some(include_str!("../cases/tcp.json")),
        known_bc: Some("F(send & timeout)"),
    },
    CaseInfo {
        id: "AAP",
        name: "AchieveAvoidPattern",
        published: counts(1, 2, 4, 15),
        provenance: Provenance::Reconstruction,
        note: RECONSTRUCTED,
        json: Some(include_str!("../cases/aap.json")),
        known_bc: Some("F(p & s)"),
    },
    CaseInfo {
        id: "MP",
        name: "MinePump",
        published: counts(1, 2, 3, 21),
        provenance: Provenance::Verbatim,
        note: "classic formulation: one domain property, two goals",
        json: Some(include_str!("../cases/minepump.json")),
        known_bc: Some("F(h & m)"),
    },
    CaseInfo {
        id: "ATM",
        name: "ATM",
        published: counts(1, 2, 3, 22),
        provenance: Provenance::Reconstruction,
        note: RECONSTRUCTED,
        json: Some(include_str!("../cases/atm.json")),
        known_bc: Some("F(card & !pin)"),
    },
    CaseInfo {
        id: "RRCS",
        name: "RRCS",
        published: counts(2, 2, 5, 22),
        provenance: Provenance::Reconstruction,
        note: RECONSTRUCTED,
        json: Some(include_str!("../cases/rrcs.json")),
        known_bc: Some("F(ta & X cc)"),
    },
    CaseInfo {
        id: "Tel",
        name: "Telephone",
        published: counts(3, 2, 4, 31),
        provenance: Provenance::Reconstruction,
        note: RECONSTRUCTED,
        json: Some(include_str!("../cases/telephone.json")),
        known_bc: Some("F(dial & busy)"),
    },
    CaseInfo {
        id: "LAS",
        name: "LAS",
        published: counts(0, 5, 7, 32),
        provenance: Provenance::Reconstruction,
        note: RECONSTRUCTED,
        json: Some(include_str!("../cases/las.json")),
        known_bc: Some("F(call & G broken)"),
    },
    CaseInfo {
        id: "PA",
        name: "Prioritized Arbiter",
        published: counts(6, 1, 6, 57),
        provenance: Provenance::Absent,
        note: NOT_SHIPPED,
        json: None,
        known_bc: None,
    },
    CaseInfo {
        id: "RRA",
        name: "Round Robin Arbiter",
        published: counts(6, 3, 4, 77),
        provenance: Provenance::Absent,
        note: NOT_SHIPPED,
        json: None,
        known_bc: None,
    },
    CaseInfo {
        id: "SA",
        name: "Simple Arbiter",
        published: counts(5, 3, 6, 84),
        provenance: Provenance::Absent,
        note: NOT_SHIPPED,
        json: None,
        known_bc: None,
    },
    CaseInfo {
        id: "LB",
        name: "Load Balancer",
        published: counts(3, 7, 5, 85),
        provenance: Provenance::Absent,
        note: NOT_SHIPPED,
        json: None,
        known_bc: None,
    },
    CaseInfo {
        id: "LC",
        name: "LiftController",
        published: counts(7, 8, 6, 124),
        provenance: Provenance::Absent,
        note: NOT_SHIPPED,
        json: None,
        known_bc: None,
    },
    CaseInfo {
        id: "AMBA",
        name: "AMBA",
        published: counts(6, 21, 16, 415),
        provenance: Provenance::Absent,
        note: NOT_SHIPPED,
        json: None,
        known_bc: None,
    },
];

/// Looks a case up by id or name, ignoring case.
pub fn find(key: &str) -> Option<&'static CaseInfo> {
    CASES.iter().find(|c| c.id.eq_ignore_ascii_case(key) || c.name.eq_ignore_ascii_case(key))
}

/// Every shipped case as a specification file.
pub fn bundled_cases() -> Vec<SpecFile> {
    CASES.iter().filter_map(CaseInfo::spec_file).collect()
}

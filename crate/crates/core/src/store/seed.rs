use super::{ProductRecord, ProjectRecord, ProjectStatus, Result, Store, StoreError, UserDetails};
use crate::role::Role;

/// Fixture accounts: one per role that can log in.
pub const SEED_USERS: [(&str, Role, &str, &str); 5] = [
    ("admin", Role::Administrator, "Alex Admin", "IT"),
    ("pm", Role::ProjectManager, "Pat Manager", "Projects"),
    ("engineer", Role::Engineer, "Erin Engineer", "Design"),
    ("staff", Role::StaffMember, "Sam Staff", "Operations"),
    ("businessman", Role::Businessman, "Blair Business", "Sales"),
];

/// Password of a seeded fixture account. Fixture use only.
pub fn seed_password(username: &str) -> String {
    format!("{username}-pass")
}

const PRODUCTS: [(&str, &str); 10] = [
    (
        "Gearbox housing",
        "Cast aluminium housing for the GX-2 drive",
    ),
    ("Drive shaft", "Hardened steel output shaft"),
    ("Bearing cap", "Front bearing retainer"),
    ("Control board", "Motor controller PCB, 4 layers"),
    ("Cable harness", "Main wiring loom"),
    ("Cooling fan", "80 mm axial fan assembly"),
    ("Mounting bracket", "Bracket for chassis attachment"),
    ("Sensor module", "Hall-effect speed sensor"),
    ("Front panel", "Operator panel with display cut-out"),
    ("Service manual", "Maintenance documentation set"),
];

const PROJECTS: [(&str, ProjectStatus, &str); 5] = [
    (
        "GX-2 drive redesign",
        ProjectStatus::Active,
        "Weight reduction of the GX-2 drive train",
    ),
    (
        "Controller firmware 3.0",
        ProjectStatus::Active,
        "Next firmware generation",
    ),
    (
        "Supplier qualification",
        ProjectStatus::Planned,
        "Second source for castings",
    ),
    (
        "Panel refresh",
        ProjectStatus::Done,
        "New operator panel layout",
    ),
    (
        "Documentation migration",
        ProjectStatus::Planned,
        "Move manuals to the PDM vault",
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SeedSummary {
    pub users: usize,
    pub products: usize,
    pub projects: usize,
}

impl Store {
    /// Fills an empty store with fixture users, products and projects.
    pub fn seed_sample_data(&self) -> Result<SeedSummary> {
        if !self.is_empty()? {
            return Err(StoreError::StoreNotEmpty);
        }
        for (username, role, full_name, department) in SEED_USERS {
            let details = UserDetails {
                full_name: full_name.to_string(),
                email: format!("{username}@example.com"),
                department: department.to_string(),
            };
            self.create_user(username, &seed_password(username), role, details)?;
        }
        for (n, (name, description)) in PRODUCTS.iter().enumerate() {
            self.put_product(&ProductRecord {
                id: format!("P-{:03}", n + 1),
                name: name.to_string(),
                revision_label: ["A", "B", "C"][n % 3].to_string(),
                description: description.to_string(),
            })?;
        }
        for (n, (name, status, description)) in PROJECTS.iter().enumerate() {
            self.put_project(&ProjectRecord {
                id: format!("PRJ-{:02}", n + 1),
                name: name.to_string(),
                status: *status,
                description: description.to_string(),
            })?;
        }
        Ok(SeedSummary {
            users: SEED_USERS.len(),
            products: PRODUCTS.len(),
            projects: PROJECTS.len(),
        })
    }
}

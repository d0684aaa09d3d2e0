use argon2::password_hash::phc::PasswordHash;
use argon2::{Algorithm, Argon2, Params, PasswordHasher, PasswordVerifier, Version};

/// Argon2id cost parameters for newly hashed passwords. Existing hashes
/// carry their own parameters and verify regardless of this setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PasswordConfig {
    pub memory_kib: u32,
    pub iterations: u32,
    pub parallelism: u32,
}

impl Default for PasswordConfig {
    fn default() -> Self {
        PasswordConfig {
            memory_kib: 19 * 1024,
            iterations: 2,
            parallelism: 1,
        }
    }
}

impl PasswordConfig {
    /// Minimal cost, for tests and fixtures only.
    pub const fn insecure_fast() -> Self {
        PasswordConfig {
            memory_kib: 64,
            iterations: 1,
            parallelism: 1,
        }
    }

    fn hasher(&self) -> Argon2<'static> {
        let params = Params::new(self.memory_kib, self.iterations, self.parallelism, None)
            .expect("argon2 parameters are within range");
        Argon2::new(Algorithm::Argon2id, Version::V0x13, params)
    }

    /// PHC string with a fresh random salt.
    pub fn hash(&self, password: &str) -> String {
        self.hasher()
            .hash_password(password.as_bytes())
            .expect("hashing with valid parameters cannot fail")
            .to_string()
    }
}

/// Checks `password` against a PHC string. Malformed hashes never match.
pub fn verify(password: &str, phc: &str) -> bool {
    match PasswordHash::new(phc) {
        Ok(parsed) => Argon2::default()
            .verify_password(password.as_bytes(), &parsed)
            .is_ok(),
        Err(_) => false,
    }
}

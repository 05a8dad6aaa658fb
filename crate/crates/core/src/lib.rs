pub mod field_rs;
pub mod pir;
pub mod anon_cred;
pub mod ledger;
pub mod harness;
pub mod overhead;

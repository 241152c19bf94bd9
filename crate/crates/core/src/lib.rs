pub mod arena;
pub mod bench;
pub mod copier;
pub mod frontend;
pub mod hashcons;
pub mod hashing;
pub mod programs;
pub mod tabling;
pub mod terms;

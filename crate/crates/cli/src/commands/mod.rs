pub mod crossings;
pub mod dist;
pub mod simulate;
pub mod verify;

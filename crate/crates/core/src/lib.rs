pub mod apex;
pub mod classify;
pub mod exact;
pub mod families;
pub mod gkz;
pub mod orbits;
pub mod reference;
pub mod schwarz;
pub mod verify;

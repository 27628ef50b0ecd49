pub mod bipoly;
pub mod blowup;
pub mod global;
pub mod infinity;
pub mod numeric;
pub mod origin;
pub mod poly;
pub mod sampling;
pub mod series;
pub mod system;

pub mod detpp;
pub mod enumerate;
pub mod error;
pub mod linalg;
pub mod models;
pub mod oracles;
pub mod series;
pub mod transforms;
pub mod verify;

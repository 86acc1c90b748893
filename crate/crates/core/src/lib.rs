pub mod linalg;
pub mod distances;
pub mod oracles;
pub mod projection;
pub mod solver;
pub mod datagen;
pub mod cli;

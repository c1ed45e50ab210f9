pub mod curvature;
pub mod run;
pub mod sweep;
pub mod verify;

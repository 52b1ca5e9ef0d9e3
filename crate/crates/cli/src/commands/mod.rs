pub mod cv;
pub mod fit;
pub mod model;
pub mod report;
pub mod simulate;

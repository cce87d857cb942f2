pub mod convention;
pub mod error;
pub mod field;
pub mod jet;
pub mod killing;
pub mod linalg;
pub mod maxwell;
pub mod poly;
pub mod spinor;
pub mod symmetry;
pub mod util;

pub mod error;
pub mod geometry;
pub mod guidance;
pub mod interaction;
pub mod layout;
pub mod scene;
pub mod protocol;
pub mod sim;

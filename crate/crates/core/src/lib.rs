pub mod abelian;
pub mod cohomology;
pub mod error;
pub mod extensions;
pub mod groups;
pub mod int;
pub mod io;
pub mod lattices;
pub mod matrix;
pub mod normal_form;
pub mod rationality;
pub mod resolutions;

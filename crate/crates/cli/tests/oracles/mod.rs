pub mod f2_hom;
pub mod massey;

pub mod inequalities;

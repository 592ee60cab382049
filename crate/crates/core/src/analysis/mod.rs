pub mod attacks;

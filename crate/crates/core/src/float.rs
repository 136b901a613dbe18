// Without std, f64 has no inherent sqrt/exp/sin; pull them in from libm
// through the num-traits `Float` trait. Modules glob-import this.
#[cfg(not(feature = "std"))]
pub(crate) use num_traits::Float;

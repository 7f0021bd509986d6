//! Weight hypergraphs of torus actions on Buchstaber-Ray and Ray
//! hypersurfaces, a monodromy obstruction search against toric structures,
//! and integral cohomology rings by finite integer linear algebra.

pub mod cohomology;
pub mod families;
pub mod linalg;
pub mod toric;
pub mod weightgraph;
